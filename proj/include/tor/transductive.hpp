#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tor/dataset.hpp"
#include "tor/losses.hpp"
#include "tor/model.hpp"
#include "tor/train.hpp"

namespace tor {

struct PseudoLabels {
  std::vector<int> labels;  // aligned with the unlabeled set, each in 1..K
  std::vector<std::string> warnings;
};

struct C2Schedule {
  double initial = 1e-5;
  double multiplier = 2.0;
  double ceiling = 1.0;  // C1

  void validate() const {
    if (!(initial > 0.0)) throw std::invalid_argument("C2 schedule: initial must be > 0");
    if (!(multiplier > 1.0)) throw std::invalid_argument("C2 schedule: multiplier must be > 1");
  }

  static C2Schedule from_config(const TrainConfig& cfg) {
    return {cfg.c2_initial, cfg.c2_multiplier, cfg.c1};
  }
};

// One executed label swap, with the pre-swap model slice needed to
// re-validate the swap conditions later.
struct SwapEvent {
  int k = 0;  // boundary: classes k and k+1
  int i = 0;  // unlabeled index moving k -> k+1
  int j = 0;  // unlabeled index moving k+1 -> k
  double gain = 0.0;
  double h_i = 0.0;
  double h_j = 0.0;
  double bias = 0.0;
  std::vector<double> theta;
};

struct TraceRound {
  double objective = 0.0;  // Eq-style structural risk after this round's solve
  std::vector<SwapEvent> swaps;
};

struct TraceStage {
  double c2 = 0.0;
  std::vector<TraceRound> rounds;
  bool cap_hit = false;
  bool aborted = false;
};

struct TransductionTrace {
  std::vector<int> initial_labels;
  std::vector<TraceStage> stages;
  long long total_solver_iterations = 0;
};

struct TransductionResult {
  OrdinalModel model;
  PseudoLabels pseudo;
  TransductionTrace trace;
};

struct SwapCandidate {
  int i = 0;
  int j = 0;
  double gain = 0.0;
};

// Structural risk: 1/2||w||^2 + 1/2||theta||^2 + C1 * labeled ordinal loss
// + C2 * unlabeled ordinal loss under labels y_star.
inline double objective(const OrdinalModel& model, const std::vector<SparseVector>& labeled,
                        const std::vector<int>& labels,
                        const std::vector<SparseVector>& unlabeled,
                        const std::vector<int>& y_star, double c1, double c2, LossKind loss) {
  if (labels.size() != labeled.size() || y_star.size() != unlabeled.size())
    throw std::invalid_argument("objective: shape mismatch");
  double reg = 0.0;
  if (model.form == ModelForm::primal_dense) {
    for (double v : model.weight) reg += v * v;
  } else {
    std::vector<std::pair<int, double>> coef;  // sample -> beta, support is sample-sorted
    for (const auto& e : model.support) {
      const double c = e.alpha * static_cast<double>(e.y);
      if (!coef.empty() && coef.back().first == e.sample) coef.back().second += c;
      else coef.push_back({e.sample, c});
    }
    for (const auto& [si, bi] : coef)
      for (const auto& [sj, bj] : coef)
        reg += bi * bj *
               kernel_eval(model.kernel, (*model.train_samples)[static_cast<std::size_t>(si)],
                           (*model.train_samples)[static_cast<std::size_t>(sj)]);
  }
  for (double t : model.thresholds.values) reg += t * t;

  double obj = 0.5 * reg;
  for (std::size_t i = 0; i < labeled.size(); ++i)
    obj += c1 * ordinal_loss(loss, labels[i], model.score(labeled[i]), model.thresholds,
                             model.bias);
  for (std::size_t j = 0; j < unlabeled.size(); ++j)
    obj += c2 * ordinal_loss(loss, y_star[j], model.score(unlabeled[j]), model.thresholds,
                             model.bias);
  return obj;
}

namespace detail {

struct InitOutcome {
  PseudoLabels pseudo;
  OrdinalModel model;
};

inline InitOutcome init_pseudo_labels_impl(const TrainConfig& cfg,
                                           std::shared_ptr<const std::vector<SparseVector>> labeled,
                                           const std::vector<int>& labels,
                                           const std::vector<SparseVector>& unlabeled,
                                           int num_classes, int dim) {
  if (!labeled || labeled->empty()) throw std::invalid_argument("init_pseudo_labels: empty labeled set");
  if (unlabeled.empty()) throw std::invalid_argument("init_pseudo_labels: empty unlabeled set");

  InitOutcome out;
  const ClassRatios ratios = compute_class_ratios(labels, num_classes);
  for (int c = 1; c <= num_classes; ++c)
    if (ratios.ratios[static_cast<std::size_t>(c - 1)] == 0.0)
      out.pseudo.warnings.push_back("class " + std::to_string(c) +
                                    " absent from labeled data; no pseudo-labels assigned to it");

  out.model = train_supervised(cfg, std::move(labeled), labels, num_classes, dim);

  const std::size_t u = unlabeled.size();
  std::vector<double> h(u);
  for (std::size_t j = 0; j < u; ++j) h[j] = out.model.score(unlabeled[j]);

  std::vector<std::size_t> order(u);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return h[a] < h[b]; });

  out.pseudo.labels.assign(u, num_classes);
  std::size_t pos = 0;
  for (int k = 1; k < num_classes; ++k) {
    const auto take = static_cast<std::size_t>(
        std::floor(ratios.ratios[static_cast<std::size_t>(k - 1)] * static_cast<double>(u)));
    for (std::size_t s = 0; s < take && pos < u; ++s) out.pseudo.labels[order[pos++]] = k;
  }
  return out;
}

// Eq-5 candidates decompose: gain(i, j) = d_i + d_j with d_i depending only
// on i and d_j only on j, so the best pair is the pair of one-sided minima.
inline std::optional<SwapCandidate> find_swap_impl(int k, const std::vector<int>& y_star,
                                                   const std::vector<double>& h,
                                                   const std::vector<int>& f,
                                                   const Thresholds& theta, double bias,
                                                   LossKind loss) {
  int best_i = -1, best_j = -1;
  double best_di = 0.0, best_dj = 0.0;
  for (std::size_t idx = 0; idx < y_star.size(); ++idx) {
    if (y_star[idx] == k && f[idx] > k) {
      const double d = ordinal_loss(loss, k + 1, h[idx], theta, bias) -
                       ordinal_loss(loss, k, h[idx], theta, bias);
      if (best_i < 0 || d < best_di) {
        best_i = static_cast<int>(idx);
        best_di = d;
      }
    } else if (y_star[idx] == k + 1 && f[idx] < k + 1) {
      const double d = ordinal_loss(loss, k, h[idx], theta, bias) -
                       ordinal_loss(loss, k + 1, h[idx], theta, bias);
      if (best_j < 0 || d < best_dj) {
        best_j = static_cast<int>(idx);
        best_dj = d;
      }
    }
  }
  if (best_i < 0 || best_j < 0) return std::nullopt;
  const double gain = swap_gain(loss, k, k + 1, h[best_i], h[best_j], theta, bias);
  if (!(gain < 0.0)) return std::nullopt;  // floating-point tie; Prop-2 gives < 0
  return SwapCandidate{best_i, best_j, gain};
}

}  // namespace detail

// Pseudo-label initialization: class ratios from the labeled data, a
// supervised model without the unlabeled set, then ratio-sized label blocks
// over the unlabeled samples sorted by predicted value.
inline PseudoLabels init_pseudo_labels(const TrainConfig& cfg,
                                       const std::vector<SparseVector>& labeled,
                                       const std::vector<int>& labels,
                                       const std::vector<SparseVector>& unlabeled, int num_classes,
                                       int dim) {
  auto shared = std::make_shared<const std::vector<SparseVector>>(labeled);
  return detail::init_pseudo_labels_impl(cfg, shared, labels, unlabeled, num_classes, dim)
      .pseudo;
}

// Best Eq-5 swap across boundary k for the current model, or nothing when no
// qualifying pair exists. Ties break toward the lowest (i, j).
inline std::optional<SwapCandidate> find_swap(int k, const PseudoLabels& pseudo,
                                              const OrdinalModel& model,
                                              const std::vector<SparseVector>& unlabeled,
                                              LossKind loss) {
  if (k < 1 || k >= model.num_classes) throw std::invalid_argument("find_swap: boundary out of range");
  const std::size_t u = unlabeled.size();
  std::vector<double> h(u);
  std::vector<int> f(u);
  for (std::size_t j = 0; j < u; ++j) {
    h[j] = model.score(unlabeled[j]);
    f[j] = predict_label(h[j], model.thresholds, model.bias);
  }
  return detail::find_swap_impl(k, pseudo.labels, h, f, model.thresholds, model.bias, loss);
}

// The transductive loop: initialize pseudo-labels, then alternate solving
// the extended problem with y* fixed and swapping adjacent-class label pairs
// (one best pair per boundary) until a full pass swaps nothing, annealing C2
// geometrically toward C1.
inline TransductionResult train_transductive(const TrainConfig& cfg, const OrdinalDataset& ds) {
  cfg.validate();
  ds.validate();
  if (cfg.loss != LossKind::hinge && cfg.kernel.variant != KernelVariant::linear)
    throw UnsupportedConfig("transductive non-hinge losses require the linear kernel");
  if (cfg.solver == SolverChoice::smo && cfg.loss != LossKind::hinge)
    throw UnsupportedConfig("the SMO solver handles the hinge loss only");

  const std::size_t n = ds.n();
  const std::size_t u = ds.u();
  const int K = ds.num_classes;
  const int nb = K - 1;

  auto labeled_shared = std::make_shared<const std::vector<SparseVector>>(ds.labeled);
  detail::InitOutcome init =
      detail::init_pseudo_labels_impl(cfg, labeled_shared, ds.labels, ds.unlabeled, K, ds.dim);

  TransductionResult result;
  result.pseudo = std::move(init.pseudo);
  result.model = std::move(init.model);
  result.trace.initial_labels = result.pseudo.labels;
  result.trace.total_solver_iterations += result.model.solver_iterations;

  C2Schedule schedule = C2Schedule::from_config(cfg);
  schedule.validate();
  if (!(schedule.initial < schedule.ceiling)) return result;  // loop body never runs

  const bool use_smo = cfg.loss == LossKind::hinge && cfg.solver != SolverChoice::primal;

  // shared sample store: labeled first, then unlabeled
  auto all_samples = std::make_shared<std::vector<SparseVector>>(ds.labeled);
  all_samples->insert(all_samples->end(), ds.unlabeled.begin(), ds.unlabeled.end());
  auto all_samples_const = std::shared_ptr<const std::vector<SparseVector>>(all_samples);

  SmoProblem prob;
  prob.samples = std::span<const SparseVector>(*all_samples);
  prob.kernel = cfg.kernel;
  prob.num_boundaries = nb;
  prob.points.reserve((n + u) * static_cast<std::size_t>(nb));
  for (std::size_t s = 0; s < n + u; ++s)
    for (int k = 1; k <= nb; ++k) {
      const int y = s < n ? ds.labels[s] : result.pseudo.labels[s - n];
      prob.points.push_back(
          {static_cast<int>(s), k, static_cast<std::int8_t>(binary_label_for(y, k))});
    }
  prob.box.assign(prob.points.size(), cfg.c1);

  std::vector<double> warm(prob.points.size(), 0.0);
  if (use_smo)
    std::copy(result.model.alphas.begin(), result.model.alphas.end(), warm.begin());

  PrimalSolution primal_prev;  // warm start for the primal path
  bool have_primal_prev = false;

  const auto point_index = [nb, n](int unlabeled_idx, int k) {
    return (n + static_cast<std::size_t>(unlabeled_idx)) * static_cast<std::size_t>(nb) +
           static_cast<std::size_t>(k - 1);
  };

  const unsigned long long swap_cap = u * u;

  for (double c2 = schedule.initial; c2 < schedule.ceiling; c2 *= schedule.multiplier) {
    TraceStage stage;
    stage.c2 = c2;
    for (std::size_t a = n * static_cast<std::size_t>(nb); a < prob.box.size(); ++a)
      prob.box[a] = c2;

    unsigned long long stage_swaps = 0;
    while (true) {
      OrdinalModel round_model;
      round_model.num_classes = K;
      round_model.dim = ds.dim;
      round_model.kernel = cfg.kernel;
      round_model.config = cfg;

      if (use_smo) {
        SmoSettings settings{cfg.tol, cfg.max_iter, cfg.cache_bytes};
        DualSolution sol = solve_smo(prob, &warm, settings);
        result.trace.total_solver_iterations += sol.diagnostics.iterations;
        round_model.train_objective = sol.objective;
        warm = sol.alphas;
        const bool ok = sol.diagnostics.converged;
        detail::finish_model_from_dual(round_model, prob, sol, all_samples_const);
        if (!ok) {
          stage.aborted = true;
          result.model = std::move(round_model);
          break;
        }
      } else {
        std::vector<double> weights(prob.points.size(), cfg.c1);
        for (std::size_t a = n * static_cast<std::size_t>(nb); a < weights.size(); ++a)
          weights[a] = c2;
        PrimalSettings settings{cfg.epochs, cfg.seed};
        if (have_primal_prev) settings.warm = &primal_prev;
        PrimalSolution sol = solve_primal(cfg.loss, cfg.kernel, prob.samples, prob.points,
                                          weights, K, ds.dim, settings);
        result.trace.total_solver_iterations += sol.epochs_run;
        round_model.form = ModelForm::primal_dense;
        round_model.weight.assign(sol.weight.begin(), sol.weight.begin() + ds.dim);
        round_model.thresholds.values.resize(static_cast<std::size_t>(nb));
        for (int k = 0; k < nb; ++k)
          round_model.thresholds.values[static_cast<std::size_t>(k)] =
              -sol.weight[static_cast<std::size_t>(ds.dim + k)];
        round_model.bias = sol.bias;
        round_model.train_objective = sol.objective;
        round_model.solver_iterations = sol.epochs_run;
        primal_prev = std::move(sol);
        have_primal_prev = true;
      }

      TraceRound round;
      round.objective = objective(round_model, ds.labeled, ds.labels, ds.unlabeled,
                                  result.pseudo.labels, cfg.c1, c2, cfg.loss);

      std::vector<double> h(u);
      std::vector<int> f(u);
      for (std::size_t j = 0; j < u; ++j) {
        h[j] = round_model.score(ds.unlabeled[j]);
        f[j] = predict_label(h[j], round_model.thresholds, round_model.bias);
      }

      bool any_swap = false;
      for (int k = 1; k <= nb; ++k) {
        auto cand = detail::find_swap_impl(k, result.pseudo.labels, h, f,
                                           round_model.thresholds, round_model.bias, cfg.loss);
        if (!cand) continue;
        any_swap = true;
        ++stage_swaps;

        SwapEvent ev;
        ev.k = k;
        ev.i = cand->i;
        ev.j = cand->j;
        ev.gain = cand->gain;
        ev.h_i = h[static_cast<std::size_t>(cand->i)];
        ev.h_j = h[static_cast<std::size_t>(cand->j)];
        ev.bias = round_model.bias;
        ev.theta = round_model.thresholds.values;
        round.swaps.push_back(std::move(ev));

        result.pseudo.labels[static_cast<std::size_t>(cand->i)] = k + 1;
        result.pseudo.labels[static_cast<std::size_t>(cand->j)] = k;
        // the swap flips exactly the two extended points at boundary k
        const std::size_t ai = point_index(cand->i, k);
        const std::size_t aj = point_index(cand->j, k);
        prob.points[ai].binary_label = +1;
        prob.points[aj].binary_label = -1;
        if (use_smo) {
          warm[ai] = 0.0;
          warm[aj] = 0.0;
        }
      }

      result.model = std::move(round_model);
      stage.rounds.push_back(std::move(round));

      if (!any_swap) break;
      if (stage_swaps > swap_cap) {
        stage.cap_hit = true;
        result.pseudo.warnings.push_back("swap safety cap hit within a C2 stage");
        break;
      }

      if (use_smo) {
        // restore the equality constraint after the label flips
        double s = 0.0;
        for (std::size_t a = 0; a < warm.size(); ++a)
          s += warm[a] * prob.points[a].binary_label;
        for (std::size_t a = 0; a < warm.size() && s > 0.0; ++a)
          if (prob.points[a].binary_label > 0 && warm[a] > 0.0) {
            const double dec = std::min(warm[a], s);
            warm[a] -= dec;
            s -= dec;
          }
        for (std::size_t a = 0; a < warm.size() && s < 0.0; ++a)
          if (prob.points[a].binary_label < 0 && warm[a] > 0.0) {
            const double dec = std::min(warm[a], -s);
            warm[a] -= dec;
            s += dec;
          }
      }
    }
    result.trace.stages.push_back(std::move(stage));
  }
  return result;
}

}  // namespace tor
