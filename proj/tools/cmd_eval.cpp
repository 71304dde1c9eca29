// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>
#include <memory>
#include <string>

#include "astoi/baseline.hpp"
#include "astoi/dataset.hpp"
#include "astoi/pipeline.hpp"
#include "astoi/signal_io.hpp"
#include "astoi/verify.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace astoi::tools {

namespace {

bool IsBaselineDir(const std::filesystem::path& dir) { return std::filesystem::exists(dir / "stsa.cfg"); }

// Loads either kind of model directory as an enhancement function.
Enhancer LoadEnhancer(const std::filesystem::path& dir) {
  if (IsBaselineDir(dir)) {
    auto system = std::make_shared<StsaSystem>(LoadStsa(dir));
    return [system](const TimeSignal& noisy) { return StsaEnhance(*system, noisy); };
  }
  auto system = std::make_shared<EnhancementSystem>(LoadSystem(dir));
  return [system](const TimeSignal& noisy) { return Enhance(*system, noisy); };
}

}  // namespace

int RunEnhance(const EnhanceOptions& o) {
  const Enhancer enhance = LoadEnhancer(o.model);
  WriteWav(enhance(ReadSpeech(o.in)), o.out);
  return kOk;
}

int RunEvaluate(const EvaluateOptions& o) {
  const std::vector<double> snrs = ParseDoubleList(o.snrs);
  const Enhancer enhance = LoadEnhancer(o.model);
  const TestSet test = LoadTestSet(o.testset);
  std::vector<EvalRow> rows;
  for (const auto& [type, noise] : test.noises) {
    const auto r = EvaluateEnhancer(enhance, test.clean, noise, type, snrs, o.seed);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const std::string table = RenderTables(rows, o.format == "csv" ? TableFormat::kCsv : TableFormat::kText);
  std::fputs(table.c_str(), stdout);
  return kOk;
}

int RunGainCorr(const GainCorrOptions& o) {
  if (IsBaselineDir(o.model_a) || IsBaselineDir(o.model_b)) {
    throw UsageError("gain-corr compares band-gain systems, not the baseline");
  }
  const EnhancementSystem a = LoadSystem(o.model_a);
  const EnhancementSystem b = LoadSystem(o.model_b);
  const TestSet test = LoadTestSet(o.testset);
  std::printf("noise_type,correlation\n");
  for (const auto& [type, noise] : test.noises) {
    SplitSpec spec;
    spec.split = Split::kTest;
    spec.test_snrs_db = {o.snr_db};
    spec.noise_source = type;
    spec.seed = o.seed;
    std::vector<TimeSignal> noisy;
    for (MixedUtterance& m : MixUtterances(test.clean, noise, spec)) noisy.push_back(std::move(m.noisy));
    std::printf("%s,%.4f\n", type.c_str(), GainCorrelation(a, b, noisy));
  }
  return kOk;
}

int RunVerify(std::uint64_t seed) {
  bool ok = true;
  for (const CheckResult& r : RunVerification(seed)) {
    std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kOk : kNumericFailure;
}

}  // namespace astoi::tools
