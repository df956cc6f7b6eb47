// Copyright 2026 The doaprior Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DOA_PRIOR_H_
#define DOA_PRIOR_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doa/error.h"
#include "doa/grid.h"

namespace doa {

enum class PriorSource { kNone, kExpert, kVisual };

const char* PriorSourceName(PriorSource source);

// Half-open [start_deg, end_deg) labelled free (z = 1) or obstructed (z = 0).
struct PriorInterval {
  double start_deg = 0.0;
  double end_deg = 0.0;
  int z = 0;

  friend bool operator==(const PriorInterval&, const PriorInterval&) = default;
};

// Half-open arc that may wrap through 0 (start > end). [0, 360) is the full
// circle.
struct Arc {
  double start_deg = 0.0;
  double end_deg = 0.0;
};

// Raised by MaskGrid when the prior obstructs every grid angle.
class EmptySearchSpaceError : public DataError {
 public:
  explicit EmptySearchSpaceError(const std::string& what) : DataError(what) {}
};

// Static angular map of free and obstructed space. Always stored as a sorted
// partition of [0, 360) with adjacent intervals of equal z merged.
class PriorMap {
 public:
  static PriorMap AllFree(PriorSource source = PriorSource::kNone);

  // Validates that `intervals` partition [0, 360) (any order) and normalizes.
  // Throws DataError on overlaps, gaps or z outside {0, 1}.
  static PriorMap FromPartition(std::vector<PriorInterval> intervals,
                                PriorSource source);

  // Everything inside `free_arcs` is free, the rest obstructed.
  static PriorMap FromFreeArcs(std::span<const Arc> free_arcs,
                               PriorSource source);

  // 1 if `azimuth_deg` (any real, wrapped into [0, 360)) is free.
  int Z(double azimuth_deg) const;
  bool IsFree(double azimuth_deg) const { return Z(azimuth_deg) == 1; }
  bool IsAllFree() const;
  double FreeWidthDeg() const;

  const std::vector<PriorInterval>& intervals() const { return intervals_; }
  std::vector<PriorInterval> FreeIntervals() const;
  PriorSource source() const { return source_; }

  std::string ToJson() const;
  static PriorMap FromJson(const std::string& text);
  static PriorMap Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  friend bool operator==(const PriorMap&, const PriorMap&) = default;

 private:
  PriorMap(std::vector<PriorInterval> intervals, PriorSource source)
      : intervals_(std::move(intervals)), source_(source) {}

  std::vector<PriorInterval> intervals_;
  PriorSource source_ = PriorSource::kNone;
};

// Expert prior from free arcs. Throws ConfigError on an arc with
// start == end or endpoints outside [0, 360].
PriorMap ExpertPrior(std::span<const Arc> free_arcs);

// Free arc of `width_deg` centered on `center_deg`: [c - w/2, c + w/2).
PriorMap CenteredFreePrior(double center_deg, double width_deg);

// G' = {phi in G : Z(phi) = 1}, order preserved. Throws EmptySearchSpaceError
// if nothing survives.
AngularGrid MaskGrid(const AngularGrid& grid, const PriorMap& prior);

// Per-heading class statistics of a segmented camera frame.
struct SegmentationFrame {
  double heading_deg = 0.0;
  double frustum_deg = 10.0;
  std::map<std::string, double> class_fractions;
};

enum class FreeRule { kAny, kAll, kSum };

FreeRule ParseFreeRule(const std::string& name);
const char* FreeRuleName(FreeRule rule);

struct ThresholdConfig {
  // Free-space classes and their per-class fraction thresholds.
  std::map<std::string, double> classes;
  FreeRule rule = FreeRule::kAny;
  // Threshold on the summed fraction for FreeRule::kSum; defaults to the
  // smallest per-class threshold.
  std::optional<double> sum_threshold;

  static ThresholdConfig Default();
  static ThresholdConfig FromJson(const std::string& text);
  static ThresholdConfig Load(const std::filesystem::path& path);

  bool IsFree(const SegmentationFrame& frame) const;
};

std::vector<SegmentationFrame> ParseSegmentationFrames(const std::string& text);
std::vector<SegmentationFrame> LoadSegmentationFrames(
    const std::filesystem::path& path);

struct FrameDecision {
  double heading_deg = 0.0;
  double frustum_deg = 0.0;
  bool free = false;
};

struct VisualPrior {
  PriorMap prior = PriorMap::AllFree();
  std::vector<FrameDecision> decisions;  // sorted by heading
  std::vector<std::string> warnings;
};

// Each FREE frame contributes [heading - w/2, heading + w/2); the union is
// free and everything else obstructed. Throws DataError on an empty list or
// invalid fractions. Coverage gaps wider than the frustum are reported in
// `warnings`, or thrown as DataError when strict_coverage is set.
VisualPrior PriorFromSegmentation(std::span<const SegmentationFrame> frames,
                                  const ThresholdConfig& thresholds,
                                  bool strict_coverage = false);

}  // namespace doa

#endif  // DOA_PRIOR_H_
