// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_MIXING_HPP_
#define ASTOI_MIXING_HPP_

#include <cstdint>
#include <span>

#include "astoi/signal.hpp"

namespace astoi {

/// Overall level 10 log10(mean square), dB re full scale squared.
double OverallLevelDb(const TimeSignal& signal);

/// ITU-T P.56 method-B active speech level in dB (same reference as
/// OverallLevelDb). The envelope is a two-stage exponential smoother
/// (30 ms), samples count as active above a threshold or within a 200 ms
/// hangover, and the level is read where the active level sits 15.9 dB above
/// the threshold, interpolated along a ladder of power-of-two thresholds.
/// The ladder is placed relative to the signal peak, so scaling the input by
/// a shifts the result by exactly 20 log10(a). Throws InvalidArgument for an
/// all-zero signal.
double ActiveSpeechLevel(const TimeSignal& speech);

struct Mixture {
  TimeSignal mixture;
  TimeSignal scaled_noise;
  std::size_t noise_offset = 0;  // start of the noise segment that was used
};

/// Cuts a seeded random segment of `noise` with the length of `speech`,
/// scales it so that ActiveSpeechLevel(speech) - OverallLevelDb(noise) equals
/// snr_db, and adds it. Throws InvalidArgument if the noise is shorter than
/// the speech or silent.
Mixture MixAtSnr(const TimeSignal& speech, const TimeSignal& noise, double snr_db, std::uint64_t seed);

/// SNR recomputed from a speech signal and the noise actually added.
double MeasuredSnrDb(const TimeSignal& speech, const TimeSignal& scaled_noise);

/// Speech-shaped noise: white Gaussian noise through a 512-tap linear-phase
/// FIR whose magnitude response follows the Welch long-term spectrum of the
/// reference material. Output has unit RMS. Needs >= 30 s of reference.
TimeSignal SynthSsn(std::span<const TimeSignal> reference, double duration_s, std::uint64_t seed);

/// Multi-talker babble: num_speakers streams of concatenated, unit-RMS
/// utterances (each stream starts at a different utterance and a random
/// offset), summed and normalized to unit RMS. Needs at least num_speakers
/// distinct utterances.
TimeSignal SynthBabble(std::span<const TimeSignal> reference, int num_speakers, double duration_s,
                       std::uint64_t seed);

struct NoiseSplit {
  TimeSignal train;
  TimeSignal validation;
  TimeSignal test;
};

/// Three contiguous, non-overlapping segments taken from the start of the
/// noise in train / validation / test order.
NoiseSplit SplitNoise(const TimeSignal& noise, double train_s, double validation_s, double test_s);

/// Deterministic stand-in for a speech corpus: words of harmonic syllables
/// with gliding pitch and formants, fricative bursts and pauses, over a
/// -60 dB noise floor. Returned at the working rate with RMS about 0.05.
TimeSignal SynthPseudoSpeech(double duration_s, std::uint64_t seed);

}  // namespace astoi

#endif  // ASTOI_MIXING_HPP_
