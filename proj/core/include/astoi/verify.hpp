// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_VERIFY_HPP_
#define ASTOI_VERIFY_HPP_

// Self-checks of the analytic gradients against finite differences, run by
// `astoi verify`.

#include <cstdint>
#include <string>
#include <vector>

#include "astoi/neural.hpp"

namespace astoi {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed error
  double tolerance = 0.0;
  std::string detail;
};

/// Elementwise error |a - f| / max(|a|, |f|, floor). With floor set to a
/// small fraction of the gradient's scale this is a relative error for
/// entries of ordinary size and an absolute one for entries near zero.
double GradientError(double analytic, double numeric, double floor);

/// ElcGrad against central differences (step h) on random pairs of length n.
CheckResult CheckElcGradient(int pairs, int n, std::uint64_t seed, double h = 1e-6, double tolerance = 1e-6);

/// |ElcGrad| against ElcGradNorm on random pairs.
CheckResult CheckElcGradNorm(int pairs, int n, std::uint64_t seed, double tolerance = 1e-9);

/// Shape of the gradient norm over constructed pairs with unit centered
/// estimate norm and L swept over [-1, 1]: symmetric, largest at L = 0,
/// decreasing in |L|, zero at |L| = 1.
CheckResult CheckElcGradNormShape(int grid_points, int n);

/// Finite-difference check of Backward over every parameter of a small
/// network (dims 6 -> 4 -> 4 -> 4 -> 3 by default).
CheckResult CheckNetworkGradient(Objective objective, int batch, std::uint64_t seed, double h = 1e-6,
                                 double tolerance = 1e-5);

std::vector<CheckResult> RunVerification(std::uint64_t seed);

}  // namespace astoi

#endif  // ASTOI_VERIFY_HPP_
