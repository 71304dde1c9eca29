// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "astoi/errors.hpp"

namespace astoi {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// Kaiser window parameters of the resampling kernel. The kernel spans
// kHalfZeroCrossings zero crossings of the low-pass sinc on each side.
constexpr double kKaiserBeta = 8.6;
constexpr int kHalfZeroCrossings = 32;

std::uint16_t ReadU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void Malformed(const std::filesystem::path& path, const std::string& why) {
  throw FormatError(FormatError::Kind::kMalformed, "malformed WAV '" + path.string() + "': " + why);
}

[[noreturn]] void Unsupported(const std::filesystem::path& path, const std::string& why) {
  throw FormatError(FormatError::Kind::kUnsupported,
                    "unsupported WAV encoding in '" + path.string() + "': " + why);
}

double DecodeSample(const std::uint8_t* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    float f;
    std::uint32_t raw = ReadU32(p);
    std::memcpy(&f, &raw, sizeof f);
    return static_cast<double>(f);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default:
      return static_cast<std::int32_t>(ReadU32(p)) / 2147483648.0;
  }
}

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double Kaiser(double pos, double half_width) {
  const double r = pos / half_width;
  if (std::abs(r) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, kKaiserBeta);
}

}  // namespace

TimeSignal ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    Malformed(path, "missing RIFF/WAVE signature");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, block_align = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) Malformed(path, "chunk extends past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) Malformed(path, "fmt chunk too small");
      const std::uint8_t* f = bytes.data() + body;
      format = ReadU16(f);
      channels = ReadU16(f + 2);
      rate = ReadU32(f + 4);
      block_align = ReadU16(f + 12);
      bits = ReadU16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) Malformed(path, "extensible fmt chunk too small");
        format = ReadU16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) Malformed(path, "no fmt chunk");
  if (data == nullptr) Malformed(path, "no data chunk");
  if (channels == 0) Malformed(path, "zero channels");
  if (rate == 0) Malformed(path, "zero sample rate");

  if (format == kFormatPcm) {
    if (bits != 8 && bits != 16 && bits != 24 && bits != 32) {
      Unsupported(path, std::to_string(bits) + "-bit integer PCM");
    }
  } else if (format == kFormatFloat) {
    if (bits != 32) Unsupported(path, std::to_string(bits) + "-bit float");
  } else {
    Unsupported(path, "format tag " + std::to_string(format));
  }

  const std::size_t sample_bytes = bits / 8;
  if (block_align != sample_bytes * channels) Malformed(path, "block align does not match channels");
  if (channels > 1) {
    Warn("'" + path.string() + "' has " + std::to_string(channels) + " channels; using channel 0");
  }

  TimeSignal signal;
  signal.sample_rate_hz = static_cast<int>(rate);
  const std::size_t frames = data_size / block_align;
  signal.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    signal.samples[i] = DecodeSample(data + i * block_align, format, bits);
  }
  return signal;
}

int QuantizePcm16(double amplitude) {
  const double clamped = std::clamp(amplitude, -1.0, 1.0);
  // std::round is half-away-from-zero.
  const double scaled = std::round(clamped * 32768.0);
  return static_cast<int>(std::clamp(scaled, -32768.0, 32767.0));
}

void WriteWav(const TimeSignal& signal, const std::filesystem::path& path) {
  if (signal.sample_rate_hz <= 0) throw InvalidArgument("sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate_hz));
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate_hz) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double s : signal.samples) {
    if (!std::isfinite(s)) throw InvalidArgument("non-finite sample in WriteWav");
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(QuantizePcm16(s))));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for '" + path.string() + "'");
}

TimeSignal Resample(const TimeSignal& signal, int target_rate_hz) {
  if (signal.sample_rate_hz <= 0 || target_rate_hz <= 0) {
    throw InvalidArgument("sample rates must be positive");
  }
  if (signal.sample_rate_hz == target_rate_hz) return signal;

  const long g = std::gcd(signal.sample_rate_hz, target_rate_hz);
  const long up = target_rate_hz / g;
  const long down = signal.sample_rate_hz / g;

  // Cutoff relative to the input Nyquist; kernel width is measured at the
  // lower of the two rates.
  const double cutoff = std::min(1.0, static_cast<double>(up) / static_cast<double>(down));
  const double half_width = kHalfZeroCrossings / cutoff;
  const long reach = static_cast<long>(std::ceil(half_width));
  const long taps = 2 * reach;

  // Phase p places the output sample p/up input samples after the base index.
  std::vector<double> kernel(static_cast<std::size_t>(up * taps));
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / static_cast<double>(up);
    double* row = kernel.data() + p * taps;
    double sum = 0.0;
    for (long k = 0; k < taps; ++k) {
      const double d = frac - static_cast<double>(k - reach + 1);
      row[k] = cutoff * Sinc(cutoff * d) * Kaiser(d, half_width);
      sum += row[k];
    }
    for (long k = 0; k < taps; ++k) row[k] /= sum;
  }

  const long in_len = static_cast<long>(signal.samples.size());
  const long out_len = (in_len * up + down / 2) / down;
  TimeSignal out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(static_cast<std::size_t>(out_len));
  for (long n = 0; n < out_len; ++n) {
    const long num = n * down;
    const long base = num / up;
    const double* row = kernel.data() + (num % up) * taps;
    double acc = 0.0;
    for (long k = 0; k < taps; ++k) {
      const long i = base + k - reach + 1;
      if (i >= 0 && i < in_len) acc += row[k] * signal.samples[static_cast<std::size_t>(i)];
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

TimeSignal ToWorkingRate(const TimeSignal& signal) {
  if (signal.sample_rate_hz < 8000) {
    throw InvalidArgument("sample rate " + std::to_string(signal.sample_rate_hz) +
                          " Hz is below the 8000 Hz minimum");
  }
  return Resample(signal, kWorkingRateHz);
}

TimeSignal SynthTone(double freq_hz, double duration_s, double amplitude) {
  if (!(freq_hz > 0.0) || freq_hz >= kWorkingRateHz / 2.0) {
    throw InvalidArgument("tone frequency must lie in (0, 5000) Hz");
  }
  if (!(duration_s > 0.0)) throw InvalidArgument("tone duration must be positive");
  TimeSignal tone;
  tone.sample_rate_hz = kWorkingRateHz;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * kWorkingRateHz));
  tone.samples.resize(n);
  const double w = 2.0 * std::numbers::pi * freq_hz / kWorkingRateHz;
  for (std::size_t i = 0; i < n; ++i) {
    tone.samples[i] = amplitude * std::sin(w * static_cast<double>(i));
  }
  return tone;
}

}  // namespace astoi
