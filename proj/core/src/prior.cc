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

#include "doa/prior.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace doa {
namespace {

using Segment = std::pair<double, double>;  // [first, second) within [0, 360]

constexpr double kCoverageTolerance = 1e-9;

double WrapDeg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

// Splits a possibly wrapping arc of the given width into segments in
// [0, 360].
void AppendArc(double start_deg, double width_deg, std::vector<Segment>& out) {
  if (width_deg >= 360.0) {
    out.emplace_back(0.0, 360.0);
    return;
  }
  if (width_deg <= 0.0) return;
  const double start = WrapDeg(start_deg);
  const double end = start + width_deg;
  if (end <= 360.0) {
    out.emplace_back(start, end);
  } else {
    out.emplace_back(start, 360.0);
    out.emplace_back(0.0, end - 360.0);
  }
}

std::vector<Segment> UnionOf(std::vector<Segment> segs) {
  std::sort(segs.begin(), segs.end());
  std::vector<Segment> merged;
  for (const auto& s : segs) {
    if (s.second <= s.first) continue;
    if (!merged.empty() && s.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, s.second);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

// Complement of a sorted disjoint union within [0, 360).
std::vector<Segment> ComplementOf(const std::vector<Segment>& segs) {
  std::vector<Segment> gaps;
  double cursor = 0.0;
  for (const auto& s : segs) {
    if (s.first > cursor) gaps.emplace_back(cursor, s.first);
    cursor = std::max(cursor, s.second);
  }
  if (cursor < 360.0) gaps.emplace_back(cursor, 360.0);
  return gaps;
}

std::vector<PriorInterval> Merge(std::vector<PriorInterval> in) {
  std::vector<PriorInterval> out;
  for (const auto& iv : in) {
    if (!out.empty() && out.back().z == iv.z) {
      out.back().end_deg = iv.end_deg;
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

PriorSource ParseSource(const std::string& name) {
  if (name == "expert") return PriorSource::kExpert;
  if (name == "visual") return PriorSource::kVisual;
  if (name == "none") return PriorSource::kNone;
  throw DataError("unknown prior source '" + name + "'");
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const char* PriorSourceName(PriorSource source) {
  switch (source) {
    case PriorSource::kExpert:
      return "expert";
    case PriorSource::kVisual:
      return "visual";
    case PriorSource::kNone:
      break;
  }
  return "none";
}

PriorMap PriorMap::AllFree(PriorSource source) {
  return PriorMap({{0.0, 360.0, 1}}, source);
}

PriorMap PriorMap::FromPartition(std::vector<PriorInterval> intervals,
                                 PriorSource source) {
  if (intervals.empty()) throw DataError("prior has no intervals");
  for (const auto& iv : intervals) {
    if (iv.z != 0 && iv.z != 1) throw DataError("prior z must be 0 or 1");
    if (!(iv.start_deg >= 0.0) || !(iv.end_deg <= 360.0) ||
        !(iv.start_deg < iv.end_deg)) {
      throw DataError("prior interval must satisfy 0 <= start < end <= 360");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const PriorInterval& a, const PriorInterval& b) {
              return a.start_deg < b.start_deg;
            });
  double cursor = 0.0;
  for (auto& iv : intervals) {
    if (iv.start_deg < cursor - kCoverageTolerance) {
      throw DataError("prior intervals overlap at " +
                      std::to_string(iv.start_deg) + " deg");
    }
    if (iv.start_deg > cursor + kCoverageTolerance) {
      throw DataError("incomplete coverage: gap [" + std::to_string(cursor) +
                      ", " + std::to_string(iv.start_deg) + ")");
    }
    iv.start_deg = cursor;
    cursor = iv.end_deg;
  }
  if (cursor < 360.0 - kCoverageTolerance) {
    throw DataError("incomplete coverage: gap [" + std::to_string(cursor) +
                    ", 360)");
  }
  intervals.back().end_deg = 360.0;
  return PriorMap(Merge(std::move(intervals)), source);
}

PriorMap PriorMap::FromFreeArcs(std::span<const Arc> free_arcs,
                                PriorSource source) {
  std::vector<Segment> segs;
  for (const auto& a : free_arcs) {
    double width = a.end_deg - a.start_deg;
    if (width <= 0.0) width += 360.0;
    AppendArc(a.start_deg, width, segs);
  }
  const auto free = UnionOf(std::move(segs));
  std::vector<PriorInterval> parts;
  for (const auto& s : free) parts.push_back({s.first, s.second, 1});
  for (const auto& s : ComplementOf(free)) parts.push_back({s.first, s.second, 0});
  return FromPartition(std::move(parts), source);
}

int PriorMap::Z(double azimuth_deg) const {
  const double deg = WrapDeg(azimuth_deg);
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), deg,
      [](double d, const PriorInterval& iv) { return d < iv.start_deg; });
  return std::prev(it)->z;
}

bool PriorMap::IsAllFree() const {
  return intervals_.size() == 1 && intervals_[0].z == 1;
}

double PriorMap::FreeWidthDeg() const {
  double w = 0.0;
  for (const auto& iv : intervals_) {
    if (iv.z == 1) w += iv.end_deg - iv.start_deg;
  }
  return w;
}

std::vector<PriorInterval> PriorMap::FreeIntervals() const {
  std::vector<PriorInterval> out;
  std::copy_if(intervals_.begin(), intervals_.end(), std::back_inserter(out),
               [](const PriorInterval& iv) { return iv.z == 1; });
  return out;
}

std::string PriorMap::ToJson() const {
  nlohmann::json doc;
  doc["source"] = PriorSourceName(source_);
  doc["intervals"] = nlohmann::json::array();
  for (const auto& iv : intervals_) {
    doc["intervals"].push_back(
        {{"start_deg", iv.start_deg}, {"end_deg", iv.end_deg}, {"z", iv.z}});
  }
  return doc.dump(2);
}

PriorMap PriorMap::FromJson(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    const auto source = ParseSource(doc.value("source", std::string("none")));
    std::vector<PriorInterval> intervals;
    for (const auto& item : doc.at("intervals")) {
      const auto& z = item.at("z");
      if (!z.is_number_integer() || (z.get<int>() != 0 && z.get<int>() != 1)) {
        throw DataError("prior z must be 0 or 1, got " + z.dump());
      }
      intervals.push_back({item.at("start_deg").get<double>(),
                           item.at("end_deg").get<double>(), z.get<int>()});
    }
    return FromPartition(std::move(intervals), source);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("prior JSON: ") + e.what());
  }
}

PriorMap PriorMap::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path));
}

void PriorMap::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << ToJson() << "\n";
}

PriorMap ExpertPrior(std::span<const Arc> free_arcs) {
  for (const auto& a : free_arcs) {
    if (!(a.start_deg >= 0.0 && a.start_deg <= 360.0 && a.end_deg >= 0.0 &&
          a.end_deg <= 360.0)) {
      throw ConfigError("expert arc endpoints must lie in [0, 360]");
    }
    if (a.start_deg == a.end_deg) {
      throw ConfigError("expert arc has start == end");
    }
  }
  return PriorMap::FromFreeArcs(free_arcs, PriorSource::kExpert);
}

PriorMap CenteredFreePrior(double center_deg, double width_deg) {
  if (!(width_deg > 0.0)) throw ConfigError("prior width must be positive");
  std::vector<Segment> segs;
  AppendArc(center_deg - width_deg / 2.0, width_deg, segs);
  std::vector<Arc> arcs;
  for (const auto& s : segs) arcs.push_back({s.first, s.second});
  return PriorMap::FromFreeArcs(arcs, PriorSource::kExpert);
}

AngularGrid MaskGrid(const AngularGrid& grid, const PriorMap& prior) {
  std::vector<double> kept;
  kept.reserve(grid.size());
  for (double d : grid.degrees()) {
    if (prior.IsFree(d)) kept.push_back(d);
  }
  if (kept.empty()) {
    throw EmptySearchSpaceError("prior obstructs every grid angle");
  }
  return AngularGrid(std::move(kept), grid.resolution_deg());
}

FreeRule ParseFreeRule(const std::string& name) {
  if (name == "any") return FreeRule::kAny;
  if (name == "all") return FreeRule::kAll;
  if (name == "sum") return FreeRule::kSum;
  throw ConfigError("free rule must be any, all or sum; got '" + name + "'");
}

const char* FreeRuleName(FreeRule rule) {
  switch (rule) {
    case FreeRule::kAll:
      return "all";
    case FreeRule::kSum:
      return "sum";
    case FreeRule::kAny:
      break;
  }
  return "any";
}

// Placeholder thresholds; the values learned on real recordings are not
// available, tune them per deployment.
ThresholdConfig ThresholdConfig::Default() {
  ThresholdConfig c;
  c.classes = {{"floor", 0.2}, {"desk", 0.1}, {"table", 0.1},
               {"chair", 0.1}, {"tv", 0.05}};
  return c;
}

ThresholdConfig ThresholdConfig::FromJson(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    ThresholdConfig c;
    for (const auto& [name, value] : doc.at("classes").items()) {
      const double t = value.get<double>();
      if (!(t >= 0.0 && t <= 1.0)) {
        throw ConfigError("threshold for '" + name + "' must lie in [0, 1]");
      }
      c.classes[name] = t;
    }
    if (c.classes.empty()) throw ConfigError("threshold config has no classes");
    c.rule = ParseFreeRule(doc.value("rule", std::string("any")));
    if (doc.contains("sum_threshold")) {
      c.sum_threshold = doc["sum_threshold"].get<double>();
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("threshold JSON: ") + e.what());
  }
}

ThresholdConfig ThresholdConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open threshold file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

bool ThresholdConfig::IsFree(const SegmentationFrame& frame) const {
  auto fraction = [&](const std::string& name) {
    auto it = frame.class_fractions.find(name);
    return it == frame.class_fractions.end() ? 0.0 : it->second;
  };
  switch (rule) {
    case FreeRule::kAny:
      return std::any_of(classes.begin(), classes.end(), [&](const auto& kv) {
        return fraction(kv.first) >= kv.second;
      });
    case FreeRule::kAll:
      return std::all_of(classes.begin(), classes.end(), [&](const auto& kv) {
        return fraction(kv.first) >= kv.second;
      });
    case FreeRule::kSum: {
      double total = 0.0;
      double min_threshold = std::numeric_limits<double>::infinity();
      for (const auto& [name, t] : classes) {
        total += fraction(name);
        min_threshold = std::min(min_threshold, t);
      }
      return total >= sum_threshold.value_or(min_threshold);
    }
  }
  return false;
}

std::vector<SegmentationFrame> ParseSegmentationFrames(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw DataError("segmentation stats must be a list");
    std::vector<SegmentationFrame> frames;
    for (const auto& item : doc) {
      SegmentationFrame f;
      f.heading_deg = item.at("heading_deg").get<double>();
      f.frustum_deg = item.value("frustum_deg", 10.0);
      for (const auto& [name, value] : item.at("fractions").items()) {
        f.class_fractions[name] = value.get<double>();
      }
      frames.push_back(std::move(f));
    }
    return frames;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("segmentation JSON: ") + e.what());
  }
}

std::vector<SegmentationFrame> LoadSegmentationFrames(
    const std::filesystem::path& path) {
  return ParseSegmentationFrames(ReadFile(path));
}

VisualPrior PriorFromSegmentation(std::span<const SegmentationFrame> frames,
                                  const ThresholdConfig& thresholds,
                                  bool strict_coverage) {
  if (frames.empty()) throw DataError("no segmentation frames");
  VisualPrior out;
  std::vector<Segment> covered, free;
  double min_frustum = 360.0;
  for (const auto& f : frames) {
    if (!(f.heading_deg >= 0.0 && f.heading_deg < 360.0)) {
      throw DataError("frame heading must lie in [0, 360)");
    }
    if (!(f.frustum_deg > 0.0)) throw DataError("frustum width must be positive");
    double sum = 0.0;
    for (const auto& [name, value] : f.class_fractions) {
      if (!(value >= 0.0 && value <= 1.0)) {
        throw DataError("class fraction for '" + name + "' outside [0, 1]");
      }
      sum += value;
    }
    if (sum > 1.0 + 1e-6) throw DataError("class fractions sum above 1");

    const double start = f.heading_deg - f.frustum_deg / 2.0;
    AppendArc(start, f.frustum_deg, covered);
    const bool is_free = thresholds.IsFree(f);
    if (is_free) AppendArc(start, f.frustum_deg, free);
    out.decisions.push_back({f.heading_deg, f.frustum_deg, is_free});
    min_frustum = std::min(min_frustum, f.frustum_deg);
  }
  std::sort(out.decisions.begin(), out.decisions.end(),
            [](const FrameDecision& a, const FrameDecision& b) {
              return a.heading_deg < b.heading_deg;
            });

  // Gaps touching 0 and 360 are one gap on the circle.
  auto gaps = ComplementOf(UnionOf(covered));
  if (gaps.size() >= 2 && gaps.front().first == 0.0 &&
      gaps.back().second == 360.0) {
    gaps.front().first = gaps.back().first - 360.0;
    gaps.pop_back();
  }
  for (const auto& g : gaps) {
    if (g.second - g.first > min_frustum + kCoverageTolerance) {
      std::ostringstream msg;
      msg << "headings leave an uncovered gap of " << (g.second - g.first)
          << " deg starting at " << WrapDeg(g.first) << " deg";
      if (strict_coverage) throw DataError(msg.str());
      out.warnings.push_back(msg.str());
    }
  }

  std::vector<Arc> arcs;
  for (const auto& s : UnionOf(std::move(free))) arcs.push_back({s.first, s.second});
  out.prior = arcs.empty()
                  ? PriorMap::FromPartition({{0.0, 360.0, 0}}, PriorSource::kVisual)
                  : PriorMap::FromFreeArcs(arcs, PriorSource::kVisual);
  return out;
}

}  // namespace doa
