// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "astoi/errors.hpp"
#include "astoi/mixing.hpp"

namespace astoi {

namespace {

constexpr double kFs = kWorkingRateHz;
constexpr double kTargetRms = 0.05;
constexpr double kFloorRelative = 1e-3;  // -60 dB re the target RMS
constexpr double kMaxHarmonicHz = 4800.0;
constexpr int kControlStep = 10;  // samples between formant/pitch updates

struct Formants {
  double f[3];
  double bw[3];
};

double Resonance(const Formants& fm, double hz) {
  double a = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = (hz - fm.f[i]) / fm.bw[i];
    a += (i == 0 ? 1.0 : 0.6 / i) / (1.0 + d * d);
  }
  return a;
}

Formants Lerp(const Formants& a, const Formants& b, double t) {
  Formants out;
  for (int i = 0; i < 3; ++i) {
    out.f[i] = a.f[i] + t * (b.f[i] - a.f[i]);
    out.bw[i] = a.bw[i] + t * (b.bw[i] - a.bw[i]);
  }
  return out;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {
    voice_f0_ = Uniform(95.0, 230.0);
    formant_scale_ = Uniform(0.9, 1.15);
  }

  double Uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool Chance(double p) { return Uniform(0.0, 1.0) < p; }

  Formants RandomVowel() {
    Formants fm;
    fm.f[0] = Uniform(300.0, 850.0) * formant_scale_;
    fm.f[1] = Uniform(900.0, 2300.0) * formant_scale_;
    fm.f[2] = Uniform(2400.0, 3400.0) * formant_scale_;
    fm.bw[0] = Uniform(60.0, 120.0);
    fm.bw[1] = Uniform(90.0, 180.0);
    fm.bw[2] = Uniform(150.0, 260.0);
    return fm;
  }

  void Silence(std::vector<double>& out, double seconds) {
    out.insert(out.end(), static_cast<std::size_t>(seconds * kFs), 0.0);
  }

  // High-frequency noise burst (fricative-like).
  void Fricative(std::vector<double>& out, double seconds, double level) {
    const auto n = static_cast<std::size_t>(seconds * kFs);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double prev = 0.0, prev2 = 0.0;
    const double centre = Uniform(0.3, 0.7);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = gauss(rng_);
      // Second difference emphasises the upper half of the band.
      const double hp = w - centre * prev - (1.0 - centre) * prev2;
      prev2 = prev;
      prev = w;
      const double t = static_cast<double>(i) / static_cast<double>(n);
      out.push_back(level * 0.35 * hp * std::sin(std::numbers::pi * t));
    }
  }

  void Voiced(std::vector<double>& out, double seconds, double level) {
    const auto n = static_cast<std::size_t>(seconds * kFs);
    const Formants from = RandomVowel();
    const Formants to = Chance(0.6) ? RandomVowel() : from;
    const double f0_start = voice_f0_ * Uniform(0.85, 1.2);
    const double f0_end = f0_start * Uniform(0.8, 1.1);
    const double attack = 0.015 * kFs;
    const double release = 0.03 * kFs;
    const double am_rate = Uniform(3.0, 6.0);

    std::vector<double> amp;
    double phase = 0.0;
    int harmonics = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      const double f0 = f0_start + t * (f0_end - f0_start);
      if (i % kControlStep == 0) {
        const Formants fm = Lerp(from, to, t);
        harmonics = static_cast<int>(kMaxHarmonicHz / f0);
        amp.assign(static_cast<std::size_t>(harmonics) + 1, 0.0);
        for (int h = 1; h <= harmonics; ++h) {
          amp[static_cast<std::size_t>(h)] = Resonance(fm, h * f0) / std::sqrt(static_cast<double>(h));
        }
      }
      phase += 2.0 * std::numbers::pi * f0 / kFs;
      if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;

      // sin(h * phase) by the Chebyshev recurrence.
      const double c2 = 2.0 * std::cos(phase);
      double s_prev = 0.0;
      double s_cur = std::sin(phase);
      double acc = 0.0;
      for (int h = 1; h <= harmonics; ++h) {
        acc += amp[static_cast<std::size_t>(h)] * s_cur;
        const double s_next = c2 * s_cur - s_prev;
        s_prev = s_cur;
        s_cur = s_next;
      }

      const auto di = static_cast<double>(i);
      double env = 1.0;
      if (di < attack) env = std::sin(0.5 * std::numbers::pi * di / attack);
      if (static_cast<double>(n) - di < release) {
        env *= std::sin(0.5 * std::numbers::pi * (static_cast<double>(n) - di) / release);
      }
      env *= 1.0 + 0.25 * std::sin(2.0 * std::numbers::pi * am_rate * di / kFs);
      out.push_back(level * env * acc);
    }
  }

  std::vector<double> Utterance(double duration_s) {
    std::vector<double> out;
    const auto target = static_cast<std::size_t>(duration_s * kFs);
    Silence(out, Uniform(0.05, 0.2));
    while (out.size() < target) {
      const int syllables = 1 + static_cast<int>(Uniform(0.0, 3.0));
      const double word_level = std::pow(10.0, Uniform(-6.0, 3.0) / 20.0);
      for (int s = 0; s < syllables; ++s) {
        const double level = word_level * std::pow(10.0, Uniform(-4.0, 2.0) / 20.0);
        if (Chance(0.35)) Fricative(out, Uniform(0.04, 0.1), level);
        Voiced(out, Uniform(0.1, 0.25), level);
        if (s + 1 < syllables) Silence(out, Uniform(0.0, 0.03));
      }
      Silence(out, Uniform(0.08, 0.35));
    }
    out.resize(target);
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  double voice_f0_ = 120.0;
  double formant_scale_ = 1.0;
};

}  // namespace

TimeSignal SynthPseudoSpeech(double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw InvalidArgument("duration must be positive");
  Generator gen(seed);
  TimeSignal s;
  s.sample_rate_hz = kWorkingRateHz;
  s.samples = gen.Utterance(duration_s);

  double ms = 0.0;
  for (double v : s.samples) ms += v * v;
  ms /= static_cast<double>(std::max<std::size_t>(s.samples.size(), 1));
  const double scale = ms > 0.0 ? kTargetRms / std::sqrt(ms) : 0.0;
  std::normal_distribution<double> gauss(0.0, kFloorRelative * kTargetRms);
  for (double& v : s.samples) v = v * scale + gauss(gen.rng());
  return s;
}

}  // namespace astoi
