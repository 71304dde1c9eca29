// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "astoi/errors.hpp"

namespace astoi {

namespace {

struct Centered {
  std::vector<double> clean;
  std::vector<double> estimate;
  double clean_norm = 0.0;
  double estimate_norm = 0.0;
  double cross = 0.0;  // <c, c_hat>
};

void CheckSizes(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
  if (a.size() != b.size()) {
    throw InvalidArgument("vector lengths differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.size() < min_len) {
    throw InvalidArgument("vectors need at least " + std::to_string(min_len) + " entries");
  }
}

std::vector<double> Center(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  std::vector<double> c(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i] - mean;
  return c;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Centered CenterPair(std::span<const double> clean, std::span<const double> estimate) {
  CheckSizes(clean, estimate, 2);
  Centered c;
  c.clean = Center(clean);
  c.estimate = Center(estimate);
  c.clean_norm = std::sqrt(Dot(c.clean, c.clean));
  c.estimate_norm = std::sqrt(Dot(c.estimate, c.estimate));
  if (c.clean_norm < kDegenerateEps || c.estimate_norm < kDegenerateEps) {
    throw DegenerateInput("zero-variance envelope vector; correlation undefined");
  }
  c.cross = Dot(c.clean, c.estimate);
  return c;
}

double Correlation(const Centered& c) {
  return std::clamp(c.cross / (c.clean_norm * c.estimate_norm), -1.0, 1.0);
}

}  // namespace

double Elc(std::span<const double> clean, std::span<const double> estimate) {
  return Correlation(CenterPair(clean, estimate));
}

std::vector<double> ElcGrad(std::span<const double> clean, std::span<const double> estimate) {
  const Centered c = CenterPair(clean, estimate);
  if (std::abs(c.cross) < kDegenerateEps) {
    throw DegenerateGradient("centered cross inner product vanished");
  }
  const double l = c.cross / (c.clean_norm * c.estimate_norm);
  const double est_sq = c.estimate_norm * c.estimate_norm;
  std::vector<double> grad(c.clean.size());
  for (std::size_t m = 0; m < grad.size(); ++m) {
    grad[m] = l * c.clean[m] / c.cross - l * c.estimate[m] / est_sq;
  }
  return grad;
}

std::vector<double> ElcGradReduced(std::span<const double> clean, std::span<const double> estimate) {
  const Centered c = CenterPair(clean, estimate);
  const double l = c.cross / (c.clean_norm * c.estimate_norm);
  const double a = 1.0 / (c.clean_norm * c.estimate_norm);
  const double b = l / (c.estimate_norm * c.estimate_norm);
  std::vector<double> grad(c.clean.size());
  for (std::size_t m = 0; m < grad.size(); ++m) grad[m] = a * c.clean[m] - b * c.estimate[m];
  return grad;
}

double ElcGradNorm(std::span<const double> clean, std::span<const double> estimate) {
  const Centered c = CenterPair(clean, estimate);
  // 1 - L^2 through Lagrange's identity, |a|^2|b|^2 - (a.b)^2 =
  // sum_{i<j} (a_i b_j - a_j b_i)^2, which stays exact at |L| = 1 where
  // forming 1 - L*L would leave a rounding residue of order 1e-8 after sqrt.
  const std::size_t n = c.clean.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = c.clean[i] * c.estimate[j] - c.clean[j] * c.estimate[i];
      s += d * d;
    }
  }
  return std::sqrt(s) / (c.clean_norm * c.estimate_norm * c.estimate_norm);
}

double Emse(std::span<const double> clean, std::span<const double> estimate) {
  CheckSizes(clean, estimate, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = estimate[i] - clean[i];
    s += d * d;
  }
  return s / static_cast<double>(clean.size());
}

std::vector<double> EmseGrad(std::span<const double> clean, std::span<const double> estimate) {
  CheckSizes(clean, estimate, 1);
  const double k = 2.0 / static_cast<double>(clean.size());
  std::vector<double> grad(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) grad[i] = k * (estimate[i] - clean[i]);
  return grad;
}

double Pearson(std::span<const double> a, std::span<const double> b) { return Elc(a, b); }

}  // namespace astoi
