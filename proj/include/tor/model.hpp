#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tor/kernels.hpp"
#include "tor/losses.hpp"
#include "tor/sparse_vector.hpp"

namespace tor {

enum class SolverChoice { automatic, smo, primal };

inline const char* solver_name(SolverChoice s) {
  switch (s) {
    case SolverChoice::automatic: return "auto";
    case SolverChoice::smo: return "smo";
    case SolverChoice::primal: return "primal";
  }
  return "?";
}

struct TrainConfig {
  double c1 = 1.0;
  LossKind loss = LossKind::hinge;
  KernelKind kernel = KernelKind::linear();
  SolverChoice solver = SolverChoice::automatic;
  double tol = 1e-3;
  long long max_iter = 10'000'000;
  int epochs = 50;
  std::uint64_t seed = 0;
  std::size_t cache_bytes = GramRowCache::kDefaultBudget;
  // C2 schedule consumed by the transductive loop
  double c2_initial = 1e-5;
  double c2_multiplier = 2.0;

  void validate() const {
    if (!(c1 > 0.0)) throw std::invalid_argument("config: C1 must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
    if (!(c2_initial > 0.0)) throw std::invalid_argument("config: C2 initial must be > 0");
    if (!(c2_multiplier > 1.0)) throw std::invalid_argument("config: C2 multiplier must be > 1");
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  }
};

enum class ModelForm { primal_dense, dual };

// A dual expansion term: alpha for the extended point (sample, k) with
// binary label y.
struct SupportEntry {
  int sample = 0;
  int k = 1;
  std::int8_t y = 1;
  double alpha = 0.0;
};

struct OrdinalModel {
  int num_classes = 2;
  int dim = 0;
  KernelKind kernel = KernelKind::linear();
  Thresholds thresholds;
  double bias = 0.0;
  ModelForm form = ModelForm::primal_dense;

  std::vector<double> weight;  // dense w of length dim (primal_dense form)

  std::vector<SupportEntry> support;  // dual form
  std::shared_ptr<const std::vector<SparseVector>> train_samples;

  // Raw dual alphas in the canonical order of the training problem; kept by
  // the SMO path so later solves can warm-start from this model.
  std::vector<double> alphas;

  TrainConfig config;
  bool converged = true;
  std::vector<std::string> warnings;
  double train_objective = 0.0;
  long long solver_iterations = 0;

  double score(const SparseVector& x) const {
    if (x.dim != dim) throw std::invalid_argument("predict: dimension mismatch");
    if (form == ModelForm::primal_dense) return dot_dense(weight, x);
    if (!train_samples) throw std::logic_error("dual model lacks its training samples");
    double h = 0.0;
    int last_sample = -1;
    double base = 0.0;
    for (const auto& e : support) {
      if (e.sample != last_sample) {
        base = kernel_eval(kernel, (*train_samples)[static_cast<std::size_t>(e.sample)], x);
        last_sample = e.sample;
      }
      h += e.alpha * static_cast<double>(e.y) * base;
    }
    return h;
  }
};

// h(x) plus the per-boundary margins g_k = h - theta_k - b.
struct DecisionValues {
  double h = 0.0;
  std::vector<double> g;
};

inline DecisionValues decision_values(const OrdinalModel& model, const SparseVector& x) {
  DecisionValues dv;
  dv.h = model.score(x);
  dv.g.reserve(model.thresholds.values.size());
  for (double t : model.thresholds.values) dv.g.push_back(dv.h - t - model.bias);
  return dv;
}

inline int predict(const OrdinalModel& model, const SparseVector& x) {
  return predict_label(model.score(x), model.thresholds, model.bias);
}

inline std::vector<int> predict_all(const OrdinalModel& model,
                                    const std::vector<SparseVector>& xs) {
  std::vector<int> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(model, x));
  return out;
}

}  // namespace tor
