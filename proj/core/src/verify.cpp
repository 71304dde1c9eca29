// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "astoi/cost.hpp"
#include "astoi/errors.hpp"

namespace astoi {

namespace {

// Scale of the error floor relative to the largest gradient entry.
constexpr double kFloorFraction = 1e-3;

std::vector<double> RandomVector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = dist(rng);
  return v;
}

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double Norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> GradOrReduced(const std::vector<double>& x, const std::vector<double>& xh) {
  try {
    return ElcGrad(x, xh);
  } catch (const DegenerateGradient&) {
    return ElcGradReduced(x, xh);
  }
}

std::string Describe(const CheckResult& r, const std::string& what) {
  std::ostringstream s;
  s << what << ", worst " << r.worst << " (tolerance " << r.tolerance << ")";
  return s.str();
}

// Every parameter of a model as a list of pointers, in a fixed order, with
// the matching analytic gradient entries.
void CollectParams(MlpModel& model, Gradients& grads, std::vector<double*>& params, std::vector<double>& analytic) {
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    DenseLayer& layer = model.layers[l];
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      params.push_back(layer.weights.data() + i);
      analytic.push_back(grads.weights[l].data()[i]);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      params.push_back(layer.bias.data() + i);
      analytic.push_back(grads.bias[l][i]);
    }
    if (l < model.batch_norm.size()) {
      BatchNorm& bn = model.batch_norm[l];
      for (Eigen::Index i = 0; i < bn.gamma.size(); ++i) {
        params.push_back(bn.gamma.data() + i);
        analytic.push_back(grads.gamma[l][i]);
      }
      for (Eigen::Index i = 0; i < bn.beta.size(); ++i) {
        params.push_back(bn.beta.data() + i);
        analytic.push_back(grads.beta[l][i]);
      }
    }
  }
}

}  // namespace

double GradientError(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return scale > 0.0 ? std::abs(analytic - numeric) / scale : 0.0;
}

CheckResult CheckElcGradient(int pairs, int n, std::uint64_t seed, double h, double tolerance) {
  CheckResult r;
  r.name = "elc-gradient";
  r.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  for (int p = 0; p < pairs; ++p) {
    const std::vector<double> x = RandomVector(rng, n);
    std::vector<double> xh = RandomVector(rng, n);
    const std::vector<double> g = GradOrReduced(x, xh);
    const double floor = kFloorFraction * MaxAbs(g);
    for (int m = 0; m < n; ++m) {
      const double saved = xh[static_cast<std::size_t>(m)];
      xh[static_cast<std::size_t>(m)] = saved + h;
      const double up = Elc(x, xh);
      xh[static_cast<std::size_t>(m)] = saved - h;
      const double down = Elc(x, xh);
      xh[static_cast<std::size_t>(m)] = saved;
      const double numeric = (up - down) / (2.0 * h);
      r.worst = std::max(r.worst, GradientError(g[static_cast<std::size_t>(m)], numeric, floor));
    }
  }
  r.passed = r.worst <= tolerance;
  r.detail = Describe(r, std::to_string(pairs) + " pairs of length " + std::to_string(n));
  return r;
}

CheckResult CheckElcGradNorm(int pairs, int n, std::uint64_t seed, double tolerance) {
  CheckResult r;
  r.name = "elc-gradient-norm";
  r.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  for (int p = 0; p < pairs; ++p) {
    const std::vector<double> x = RandomVector(rng, n);
    const std::vector<double> xh = RandomVector(rng, n);
    const double closed = ElcGradNorm(x, xh);
    const double actual = Norm(GradOrReduced(x, xh));
    r.worst = std::max(r.worst, std::abs(actual - closed) / std::max(closed, 1e-300));
  }
  r.passed = r.worst <= tolerance;
  r.detail = Describe(r, "relative error over " + std::to_string(pairs) + " pairs");
  return r;
}

CheckResult CheckElcGradNormShape(int grid_points, int n) {
  CheckResult r;
  r.name = "elc-gradient-norm-shape";
  r.tolerance = 1e-12;
  if (grid_points < 3 || grid_points % 2 == 0 || n < 3) throw InvalidArgument("need an odd grid and n >= 3");

  // Orthonormal zero-mean directions u (clean) and v.
  std::vector<double> u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    u[static_cast<std::size_t>(i)] = std::cos(2.0 * M_PI * i / n);
    v[static_cast<std::size_t>(i)] = std::sin(2.0 * M_PI * i / n);
  }
  const double nu = Norm(u), nv = Norm(v);
  for (int i = 0; i < n; ++i) {
    u[static_cast<std::size_t>(i)] /= nu;
    v[static_cast<std::size_t>(i)] /= nv;
  }

  std::vector<double> norms(static_cast<std::size_t>(grid_points));
  std::vector<double> xh(static_cast<std::size_t>(n));
  bool ok = true;
  std::ostringstream why;
  for (int g = 0; g < grid_points; ++g) {
    const double l = -1.0 + 2.0 * g / (grid_points - 1);
    const double s = std::sqrt(std::max(0.0, 1.0 - l * l));
    for (int i = 0; i < n; ++i) {
      xh[static_cast<std::size_t>(i)] = l * u[static_cast<std::size_t>(i)] + s * v[static_cast<std::size_t>(i)];
    }
    norms[static_cast<std::size_t>(g)] = ElcGradNorm(u, xh);
    // Unit centered estimate: the norm must equal sqrt(1 - L^2).
    const double err = std::abs(norms[static_cast<std::size_t>(g)] - s);
    r.worst = std::max(r.worst, err);
    if (err > 1e-12) {
      ok = false;
      why << " norm(" << l << ") off by " << err << ";";
    }
  }
  const int mid = grid_points / 2;
  for (int g = 0; g < grid_points; ++g) {
    const double a = norms[static_cast<std::size_t>(g)];
    const double b = norms[static_cast<std::size_t>(grid_points - 1 - g)];
    if (std::abs(a - b) > 1e-12) {
      ok = false;
      why << " asymmetric at grid point " << g << ";";
    }
    if (g < mid && !(norms[static_cast<std::size_t>(g)] < norms[static_cast<std::size_t>(g + 1)])) {
      ok = false;
      why << " not increasing towards L = 0 at grid point " << g << ";";
    }
  }
  if (norms.front() > 1e-12 || norms.back() > 1e-12) {
    ok = false;
    why << " non-zero at |L| = 1;";
  }
  if (*std::max_element(norms.begin(), norms.end()) != norms[static_cast<std::size_t>(mid)]) {
    ok = false;
    why << " maximum not at L = 0;";
  }
  r.passed = ok;
  r.detail = std::to_string(grid_points) + "-point grid" + (ok ? std::string() : ":" + why.str());
  return r;
}

CheckResult CheckNetworkGradient(Objective objective, int batch, std::uint64_t seed, double h, double tolerance) {
  CheckResult r;
  r.name = std::string("network-gradient-") + ObjectiveName(objective);
  r.tolerance = tolerance;

  ModelShape shape;
  shape.input_dim = 6;
  shape.hidden = {4, 4, 4};
  shape.output_dim = 3;
  shape.block_len = 3;
  shape.objective = objective;
  MlpModel model = InitModel(shape, seed);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> positive(0.1, 1.0);
  // Non-trivial batch-norm parameters and biases so every term is exercised.
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (Eigen::Index i = 0; i < model.layers[l].bias.size(); ++i) model.layers[l].bias[i] = 0.1 * gauss(rng);
    if (l < model.batch_norm.size()) {
      for (Eigen::Index i = 0; i < model.batch_norm[l].gamma.size(); ++i) {
        model.batch_norm[l].gamma[i] = positive(rng) + 0.5;
        model.batch_norm[l].beta[i] = 0.1 * gauss(rng);
      }
    }
  }
  Matrix inputs(shape.input_dim, batch), clean(shape.output_dim, batch), noisy(shape.output_dim, batch);
  for (Eigen::Index i = 0; i < inputs.size(); ++i) inputs.data()[i] = gauss(rng);
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    clean.data()[i] = positive(rng);
    noisy.data()[i] = positive(rng);
  }

  auto loss = [&](const MlpModel& m) {
    return EvaluateLoss(objective, shape.block_len, Forward(m, inputs, Mode::kTrain), clean, noisy).loss;
  };

  GradientResult gr = ComputeGradients(model, inputs, clean, noisy);
  std::vector<double*> params;
  std::vector<double> analytic;
  CollectParams(model, gr.grads, params, analytic);
  const double floor = kFloorFraction * MaxAbs(analytic);
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = *params[p];
    *params[p] = saved + h;
    const double up = loss(model);
    *params[p] = saved - h;
    const double down = loss(model);
    *params[p] = saved;
    r.worst = std::max(r.worst, GradientError(analytic[p], (up - down) / (2.0 * h), floor));
  }
  r.passed = r.worst <= tolerance;
  r.detail = Describe(r, std::to_string(params.size()) + " parameters, batch " + std::to_string(batch));
  return r;
}

std::vector<CheckResult> RunVerification(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(CheckElcGradient(10000, 30, seed));
  out.push_back(CheckElcGradNorm(10000, 30, seed));
  out.push_back(CheckElcGradNormShape(201, 30));
  out.push_back(CheckNetworkGradient(Objective::kElc, 2, seed));
  out.push_back(CheckNetworkGradient(Objective::kEmse, 2, seed));
  out.push_back(CheckNetworkGradient(Objective::kElc, 16, seed));
  out.push_back(CheckNetworkGradient(Objective::kEmse, 16, seed));
  return out;
}

}  // namespace astoi
