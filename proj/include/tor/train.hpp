#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tor/dataset.hpp"
#include "tor/model.hpp"
#include "tor/primal.hpp"
#include "tor/smo.hpp"

namespace tor {

struct UnsupportedConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<AugmentedPoint> make_augmented_points(const std::vector<int>& labels,
                                                         int num_classes) {
  std::vector<AugmentedPoint> points;
  points.reserve(labels.size() * static_cast<std::size_t>(num_classes - 1));
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int k = 1; k < num_classes; ++k)
      points.push_back({static_cast<int>(i), k,
                        static_cast<std::int8_t>(binary_label_for(labels[i], k))});
  return points;
}

// theta_k = -(e_k block of w_bar) = -sum_i alpha_i^k y_i^k
inline Thresholds thresholds_from_alphas(const SmoProblem& prob,
                                         const std::vector<double>& alphas) {
  Thresholds theta;
  theta.values.assign(static_cast<std::size_t>(prob.num_boundaries), 0.0);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const auto& p = prob.points[a];
    theta.values[static_cast<std::size_t>(p.k - 1)] -= alphas[a] * p.binary_label;
  }
  return theta;
}

inline std::vector<double> dense_weight_from_alphas(const SmoProblem& prob,
                                                    const std::vector<double>& alphas, int dim) {
  std::vector<double> coef(prob.samples.size(), 0.0);
  for (std::size_t a = 0; a < alphas.size(); ++a)
    coef[static_cast<std::size_t>(prob.points[a].base)] +=
        alphas[a] * prob.points[a].binary_label;
  std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t s = 0; s < coef.size(); ++s)
    if (coef[s] != 0.0) add_scaled(w, coef[s], prob.samples[s]);
  return w;
}

inline void finish_model_from_dual(OrdinalModel& model, const SmoProblem& prob,
                                   const DualSolution& sol,
                                   std::shared_ptr<const std::vector<SparseVector>> samples) {
  model.thresholds = thresholds_from_alphas(prob, sol.alphas);
  model.bias = sol.bias;
  model.alphas = sol.alphas;
  model.solver_iterations = sol.diagnostics.iterations;
  if (!sol.diagnostics.converged) {
    model.converged = false;
    model.warnings.push_back("solver hit the iteration cap before reaching tolerance");
  }
  if (prob.kernel.variant == KernelVariant::linear) {
    model.form = ModelForm::primal_dense;
    model.weight = dense_weight_from_alphas(prob, sol.alphas, model.dim);
  } else {
    model.form = ModelForm::dual;
    model.train_samples = std::move(samples);
    for (std::size_t a = 0; a < sol.alphas.size(); ++a)
      if (sol.alphas[a] > 0.0)
        model.support.push_back({prob.points[a].base, prob.points[a].k,
                                 prob.points[a].binary_label, sol.alphas[a]});
  }
  if (!model.thresholds.non_decreasing(1e-6)) {
    model.converged = false;
    model.warnings.push_back("trained thresholds are not non-decreasing (solver failure)");
  }
}

}  // namespace detail

// RED-SVM: supervised ordinal regression through the extended binary
// reduction. Hinge loss trains the SMO dual; the other losses run the
// primal subgradient trainer (linear kernel only).
inline OrdinalModel train_supervised(const TrainConfig& cfg,
                                     std::shared_ptr<const std::vector<SparseVector>> samples,
                                     const std::vector<int>& labels, int num_classes, int dim) {
  cfg.validate();
  if (!samples || samples->empty() || labels.size() != samples->size())
    throw std::invalid_argument("train_supervised: need aligned, nonempty samples and labels");
  for (int y : labels)
    if (y < 1 || y > num_classes) throw std::invalid_argument("train_supervised: label out of 1..K");

  OrdinalModel model;
  model.num_classes = num_classes;
  model.dim = dim;
  model.kernel = cfg.kernel;
  model.config = cfg;

  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y - 1)];
  for (int c = 1; c <= num_classes; ++c)
    if (counts[static_cast<std::size_t>(c - 1)] == 0)
      model.warnings.push_back("class " + std::to_string(c) + " has no training samples");

  SolverChoice solver = cfg.solver;
  if (solver == SolverChoice::automatic)
    solver = cfg.loss == LossKind::hinge ? SolverChoice::smo : SolverChoice::primal;
  if (solver == SolverChoice::smo && cfg.loss != LossKind::hinge)
    throw UnsupportedConfig("the SMO solver handles the hinge loss only");
  if (solver == SolverChoice::primal && cfg.kernel.variant != KernelVariant::linear)
    throw UnsupportedConfig("the primal solver requires the linear kernel");
  if (cfg.loss != LossKind::hinge && cfg.kernel.variant != KernelVariant::linear)
    throw UnsupportedConfig("non-hinge losses require the linear kernel");

  auto points = detail::make_augmented_points(labels, num_classes);

  if (solver == SolverChoice::smo) {
    SmoProblem prob;
    prob.samples = std::span<const SparseVector>(*samples);
    prob.points = std::move(points);
    prob.box.assign(prob.points.size(), cfg.c1);
    prob.kernel = cfg.kernel;
    prob.num_boundaries = num_classes - 1;
    SmoSettings settings{cfg.tol, cfg.max_iter, cfg.cache_bytes};
    DualSolution sol = solve_smo(prob, nullptr, settings);
    model.train_objective = sol.objective;
    detail::finish_model_from_dual(model, prob, sol, samples);
  } else {
    std::vector<double> weights(points.size(), cfg.c1);
    PrimalSettings settings{cfg.epochs, cfg.seed};
    PrimalSolution sol = solve_primal(cfg.loss, cfg.kernel, std::span<const SparseVector>(*samples),
                                      points, weights, num_classes, dim, settings);
    model.form = ModelForm::primal_dense;
    model.weight.assign(sol.weight.begin(), sol.weight.begin() + dim);
    model.thresholds.values.resize(static_cast<std::size_t>(num_classes - 1));
    for (int k = 0; k < num_classes - 1; ++k)
      model.thresholds.values[static_cast<std::size_t>(k)] =
          -sol.weight[static_cast<std::size_t>(dim + k)];
    model.bias = sol.bias;
    model.train_objective = sol.objective;
    model.solver_iterations = sol.epochs_run;
    if (!model.thresholds.non_decreasing(1e-6)) {
      model.converged = false;
      model.warnings.push_back("trained thresholds are not non-decreasing (solver failure)");
    }
  }
  return model;
}

inline OrdinalModel train_supervised(const TrainConfig& cfg, const OrdinalDataset& ds) {
  auto samples = std::make_shared<const std::vector<SparseVector>>(ds.labeled);
  return train_supervised(cfg, samples, ds.labels, ds.num_classes, ds.dim);
}

}  // namespace tor
