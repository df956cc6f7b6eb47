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

#include "doa/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "doa/error.h"

namespace doa {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadU16(const uint8_t* p) { return p[0] | (p[1] << 8); }

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}
void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
}
void PutTag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

MultichannelAudio ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError(path.string() + ": not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw DataError(path.string() + ": truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw DataError(path.string() + ": short fmt chunk");
      format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = ReadU16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || data == nullptr) {
    throw DataError(path.string() + ": missing fmt or data chunk");
  }
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw DataError(path.string() +
                    ": only 16-bit PCM and 32-bit float WAV are supported");
  }

  const size_t bytes_per_sample = bits / 8;
  const size_t frames = data_size / (bytes_per_sample * channels);
  MultichannelAudio audio;
  audio.sample_rate_hz = static_cast<int>(rate);
  audio.channels.assign(channels, std::vector<double>(frames));
  const uint8_t* p = data;
  for (size_t t = 0; t < frames; ++t) {
    for (uint16_t c = 0; c < channels; ++c, p += bytes_per_sample) {
      if (pcm16) {
        audio.channels[c][t] = static_cast<int16_t>(ReadU16(p)) / 32768.0;
      } else {
        float v;
        uint32_t raw = ReadU32(p);
        std::memcpy(&v, &raw, sizeof(v));
        audio.channels[c][t] = v;
      }
    }
  }
  return audio;
}

void WriteWav(const std::filesystem::path& path, const MultichannelAudio& audio,
              WavSampleFormat format) {
  audio.Validate();
  const auto channels = static_cast<uint16_t>(audio.num_channels());
  const uint16_t bits = format == WavSampleFormat::kPcm16 ? 16 : 32;
  const uint32_t block = channels * bits / 8;
  const auto frames = static_cast<uint32_t>(audio.num_samples());
  const uint32_t data_size = frames * block;

  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_size);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format == WavSampleFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, channels);
  PutU32(out, static_cast<uint32_t>(audio.sample_rate_hz));
  PutU32(out, static_cast<uint32_t>(audio.sample_rate_hz) * block);
  PutU16(out, static_cast<uint16_t>(block));
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, data_size);
  for (uint32_t t = 0; t < frames; ++t) {
    for (uint16_t c = 0; c < channels; ++c) {
      const double v = audio.channels[c][t];
      if (format == WavSampleFormat::kPcm16) {
        const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
        PutU16(out, static_cast<uint16_t>(
                        static_cast<int16_t>(std::lround(clipped * 32768.0))));
      } else {
        const auto f = static_cast<float>(v);
        uint32_t raw;
        std::memcpy(&raw, &f, sizeof(raw));
        PutU32(out, raw);
      }
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write WAV file " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
}

}  // namespace doa
