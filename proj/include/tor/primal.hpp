#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tor/dataset.hpp"
#include "tor/kernels.hpp"
#include "tor/losses.hpp"
#include "tor/rng.hpp"
#include "tor/sparse_vector.hpp"

namespace tor {

struct PrimalSolution {
  // w_bar = (w, -theta): first `dim` entries are w, trailing K-1 entries
  // hold the negated thresholds.
  std::vector<double> weight;
  double bias = 0.0;
  double objective = 0.0;
  int epochs_run = 0;
  std::vector<double> epoch_objectives;  // accepted value after each epoch
};

struct PrimalSettings {
  int epochs = 50;
  std::uint64_t seed = 0;
  const PrimalSolution* warm = nullptr;  // optional starting point
};

// Stochastic subgradient descent on the structural risk
//   1/2 ||w_bar||^2 + sum_a c_a * l_{y_a}(w.x_a - theta_k - b)
// over augmented instances, Pegasos-style step eta_t = 1/(lambda t) with
// lambda = 1/(Cmax * N) on the regularized block and the 1/sqrt(t)
// subgradient rate on the unregularized bias. The returned solution is the
// best iterate measured on the full objective at epoch boundaries, and the
// recorded epoch trace is that best-so-far value, so the trace is
// non-increasing.
inline PrimalSolution solve_primal(LossKind loss, const KernelKind& kernel,
                                   std::span<const SparseVector> samples,
                                   const std::vector<AugmentedPoint>& points,
                                   const std::vector<double>& weights, int num_classes, int dim,
                                   const PrimalSettings& settings = {}) {
  if (kernel.variant != KernelVariant::linear)
    throw std::invalid_argument("solve_primal supports the linear kernel only");
  if (points.size() != weights.size())
    throw std::invalid_argument("solve_primal: weights size mismatch");
  const std::size_t N = points.size();
  const int nb = num_classes - 1;

  PrimalSolution sol;
  sol.weight.assign(static_cast<std::size_t>(dim + nb), 0.0);

  double c_max = 0.0;
  for (double c : weights) {
    if (c < 0.0 || !std::isfinite(c)) throw std::invalid_argument("solve_primal: bad weight");
    c_max = std::max(c_max, c);
  }
  if (N == 0 || c_max == 0.0) return sol;  // pure regularizer: zero solution

  const double lambda = 1.0 / (c_max * static_cast<double>(N));

  std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> waug(static_cast<std::size_t>(nb), 0.0);  // = -theta
  double w_scale = 1.0;
  double bias = 0.0;
  if (settings.warm && !settings.warm->weight.empty()) {
    if (settings.warm->weight.size() != static_cast<std::size_t>(dim + nb))
      throw std::invalid_argument("solve_primal: warm start size mismatch");
    std::copy(settings.warm->weight.begin(), settings.warm->weight.begin() + dim, w.begin());
    std::copy(settings.warm->weight.begin() + dim, settings.warm->weight.end(), waug.begin());
    bias = settings.warm->bias;
  }

  auto flush_scale = [&]() {
    if (w_scale != 1.0) {
      for (double& v : w) v *= w_scale;
      w_scale = 1.0;
    }
  };

  auto full_objective = [&]() {
    flush_scale();
    double reg = 0.0;
    for (double v : w) reg += v * v;
    for (double v : waug) reg += v * v;
    double obj = 0.5 * reg;
    for (std::size_t a = 0; a < N; ++a) {
      if (weights[a] == 0.0) continue;
      const auto& p = points[a];
      const double margin = dot_dense(w, samples[static_cast<std::size_t>(p.base)]) +
                            waug[static_cast<std::size_t>(p.k - 1)] - bias;
      obj += weights[a] * binary_loss(loss, p.binary_label, margin);
    }
    return obj;
  };

  Rng rng(settings.seed);
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best_obj = full_objective();
  std::vector<double> best_w = w, best_waug = waug;
  double best_bias = bias;
  long long t = 0;

  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double shrink = 1.0 - eta * lambda;
      const auto& p = points[idx];
      const SparseVector& x = samples[static_cast<std::size_t>(p.base)];

      const double margin =
          w_scale * dot_dense(w, x) + waug[static_cast<std::size_t>(p.k - 1)] - bias;
      const double g = (weights[idx] / c_max) * binary_loss_grad(loss, p.binary_label, margin);

      if (shrink <= 0.0) {
        std::fill(w.begin(), w.end(), 0.0);
        w_scale = 1.0;
      } else {
        w_scale *= shrink;
        if (w_scale < 1e-9) flush_scale();
      }
      for (double& v : waug) v *= std::max(shrink, 0.0);

      if (g != 0.0) {
        const double coeff = -eta * g / w_scale;
        add_scaled(w, coeff, x);
        waug[static_cast<std::size_t>(p.k - 1)] -= eta * g;
        bias += g / std::sqrt(static_cast<double>(t));
      }
    }

    const double obj = full_objective();
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_waug = waug;
      best_bias = bias;
    }
    sol.epoch_objectives.push_back(best_obj);
    sol.epochs_run = epoch + 1;
  }

  std::copy(best_w.begin(), best_w.end(), sol.weight.begin());
  std::copy(best_waug.begin(), best_waug.end(), sol.weight.begin() + dim);
  sol.bias = best_bias;
  sol.objective = best_obj;
  return sol;
}

}  // namespace tor
