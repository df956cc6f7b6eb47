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

#ifndef DOA_WAV_IO_H_
#define DOA_WAV_IO_H_

#include <filesystem>

#include "doa/dsp.h"

namespace doa {

enum class WavSampleFormat { kPcm16, kFloat32 };

// RIFF/WAVE reader for PCM 16-bit and IEEE float 32-bit. Throws DataError on
// anything else.
MultichannelAudio ReadWav(const std::filesystem::path& path);

void WriteWav(const std::filesystem::path& path, const MultichannelAudio& audio,
              WavSampleFormat format = WavSampleFormat::kFloat32);

}  // namespace doa

#endif  // DOA_WAV_IO_H_
