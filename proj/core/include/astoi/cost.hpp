// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_COST_HPP_
#define ASTOI_COST_HPP_

#include <span>
#include <vector>

namespace astoi {

/// Threshold on centered norms and on the centered cross inner product.
inline constexpr double kDegenerateEps = 1e-12;

// Envelope linear correlation (ELC): the sample correlation between a clean
// envelope x and its estimate x_hat,
//
//   L = (x - mu_x)^T (x_hat - mu_xhat) / (|x - mu_x| |x_hat - mu_xhat|).
//
// It is the clip-free approximation of the STOI intermediate measure. All
// functions below take the clean vector first. Inputs must have equal
// length >= 2 for the ELC family; DegenerateInput is thrown when either
// centered norm falls below kDegenerateEps.

double Elc(std::span<const double> clean, std::span<const double> estimate);

/// Gradient of Elc with respect to the estimate, evaluated in the form
///
///   dL/dx_hat_m = L (x_m - mu_x) / <c_hat, c> - L (x_hat_m - mu_xhat) / <c_hat, c_hat>
///
/// with c, c_hat the centered vectors. Throws DegenerateGradient when
/// |<c_hat, c>| < kDegenerateEps; ElcGradReduced is the fallback there.
std::vector<double> ElcGrad(std::span<const double> clean, std::span<const double> estimate);

/// The same gradient after cancelling L against the cross term:
/// c / (|c| |c_hat|) - L c_hat / |c_hat|^2. Defined whenever both
/// variances are non-zero, including at L = 0.
std::vector<double> ElcGradReduced(std::span<const double> clean, std::span<const double> estimate);

/// Closed-form gradient norm sqrt(1 - L^2) / |x_hat - mu_xhat|. The norm
/// in the denominator is that of the mean-centered estimate; with the raw
/// estimate norm the identity against |ElcGrad| does not hold.
double ElcGradNorm(std::span<const double> clean, std::span<const double> estimate);

/// Envelope MSE: (1/N) sum (x_hat_m - x_m)^2.
double Emse(std::span<const double> clean, std::span<const double> estimate);

/// (2/N) (x_hat - x).
std::vector<double> EmseGrad(std::span<const double> clean, std::span<const double> estimate);

/// Plain Pearson correlation of two sequences (same degeneracy rules as Elc).
double Pearson(std::span<const double> a, std::span<const double> b);

}  // namespace astoi

#endif  // ASTOI_COST_HPP_
