// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_SIGNAL_IO_HPP_
#define ASTOI_SIGNAL_IO_HPP_

#include <filesystem>

#include "astoi/signal.hpp"

namespace astoi {

/// Reads a RIFF/WAVE file. Accepts integer PCM (8/16/24/32 bit) and 32-bit
/// float, including WAVE_FORMAT_EXTENSIBLE wrappers. Multichannel files
/// yield channel 0 with a warning.
///
/// Throws IoError when the file cannot be opened, FormatError(kMalformed)
/// for a broken RIFF structure and FormatError(kUnsupported) for encodings
/// outside the list above.
TimeSignal ReadWav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono. Samples are clamped to [-1, 1] and rounded half
/// away from zero after scaling by 32768 (so +1.0 stores as 32767).
void WriteWav(const TimeSignal& signal, const std::filesystem::path& path);

/// Quantizes one amplitude exactly as WriteWav does.
int QuantizePcm16(double amplitude);

/// Resamples to the 10 kHz working rate with a Kaiser-windowed sinc
/// polyphase filter. A 10 kHz input is returned unchanged.
TimeSignal ToWorkingRate(const TimeSignal& signal);

/// General rational resampler behind ToWorkingRate.
TimeSignal Resample(const TimeSignal& signal, int target_rate_hz);

/// a * sin(2 pi f n / 10000), n = 0 .. round(duration * 10000) - 1.
TimeSignal SynthTone(double freq_hz, double duration_s, double amplitude);

}  // namespace astoi

#endif  // ASTOI_SIGNAL_IO_HPP_
