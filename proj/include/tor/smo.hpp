#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tor/dataset.hpp"
#include "tor/kernels.hpp"
#include "tor/sparse_vector.hpp"

// SMO solver for the extended binary dual:
//
//   max_a  sum_a alpha_a - 1/2 sum_{a,b} alpha_a alpha_b y_a y_b Kaug(a, b)
//   s.t.   0 <= alpha_a <= box_a,   sum_a y_a alpha_a = 0
//
// where Kaug((i,k), (j,k')) = kernel(x_i, x_j) + I[k = k']. Working-set
// selection is the maximal KKT-violating pair; the stop rule is
// m(alpha) - M(alpha) <= tol. The perceptron kernel is only conditionally
// positive definite, so a pair whose second-order coefficient is <= 0 takes
// the boundary step that maximizes the objective along the constraint
// segment instead of the Newton step.
//
// Linear and cosine kernels run a dense-weight path: per-sample scores are
// maintained through a column index of the data, so one pair update costs
// the column mass of the two touched samples instead of a full Gram row.

namespace tor {

struct SmoSettings {
  double tol = 1e-3;
  long long max_iter = 10'000'000;
  std::size_t cache_bytes = GramRowCache::kDefaultBudget;
};

struct SolveDiagnostics {
  double kkt_violation = 0.0;  // max complementarity violation given bias
  long long iterations = 0;    // pair updates performed
  std::vector<double> slacks;  // per-point hinge values at the solution
  bool converged = false;
  double b_gap = 0.0;  // width of the empty KKT interval when no free SV pins b
};

struct DualSolution {
  std::vector<double> alphas;  // canonical augmented order
  double bias = 0.0;
  double objective = 0.0;  // dual objective value
  SolveDiagnostics diagnostics;
};

// The extended binary problem handed to the solvers. `points` follow the
// canonical augmented order (sample-major, k = 1..K-1 inner); every
// binary_label must be +1 or -1 and box entries are per-point upper bounds.
struct SmoProblem {
  std::span<const SparseVector> samples;
  std::vector<AugmentedPoint> points;
  std::vector<double> box;
  KernelKind kernel;
  int num_boundaries = 1;  // K-1

  void validate() const {
    if (points.size() != box.size()) throw std::invalid_argument("smo: box size mismatch");
    for (const auto& p : points) {
      if (p.binary_label != 1 && p.binary_label != -1)
        throw std::invalid_argument("smo: every point needs a +1/-1 label");
      if (p.base < 0 || static_cast<std::size_t>(p.base) >= samples.size())
        throw std::invalid_argument("smo: sample reference out of range");
      if (p.k < 1 || p.k > num_boundaries) throw std::invalid_argument("smo: boundary index out of range");
    }
    for (double c : box)
      if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("smo: box bounds must be >= 0");
  }
};

namespace detail {

// Bookkeeping for linear-like kernels (linear, cosine on pre-normalized
// copies). Maintains w, per-sample scores D_s = w.x_s and per-boundary sums
// A_k = sum of alpha*y at boundary k.
class LinearSmoState {
public:
  LinearSmoState(const SmoProblem& prob, std::span<const SparseVector> samples, int dim)
      : prob_(prob), samples_(samples), dim_(dim) {
    const std::size_t S = samples_.size();
    cols_.resize(static_cast<std::size_t>(dim_));
    self_k_.resize(S);
    for (std::size_t s = 0; s < S; ++s) {
      self_k_[s] = norm_sq(samples_[s]);
      for (const auto& e : samples_[s].entries)
        cols_[static_cast<std::size_t>(e.index)].push_back({static_cast<int>(s), e.value});
    }
    w_.assign(static_cast<std::size_t>(dim_), 0.0);
    scores_.assign(S, 0.0);
    boundary_sum_.assign(static_cast<std::size_t>(prob.num_boundaries), 0.0);
  }

  void rebuild(const std::vector<double>& alphas) {
    std::vector<double> coef(samples_.size(), 0.0);
    std::fill(boundary_sum_.begin(), boundary_sum_.end(), 0.0);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      if (alphas[a] == 0.0) continue;
      const auto& p = prob_.points[a];
      const double c = alphas[a] * p.binary_label;
      coef[static_cast<std::size_t>(p.base)] += c;
      boundary_sum_[static_cast<std::size_t>(p.k - 1)] += c;
    }
    std::fill(w_.begin(), w_.end(), 0.0);
    for (std::size_t s = 0; s < samples_.size(); ++s)
      if (coef[s] != 0.0) add_scaled(w_, coef[s], samples_[s]);
    for (std::size_t s = 0; s < samples_.size(); ++s) scores_[s] = dot_dense(w_, samples_[s]);
  }

  double u0(std::size_t /*index*/, const AugmentedPoint& p) const {
    return scores_[static_cast<std::size_t>(p.base)] +
           boundary_sum_[static_cast<std::size_t>(p.k - 1)];
  }

  double quad_eta(const AugmentedPoint& pi, const AugmentedPoint& pj) const {
    const double kii = self_k_[static_cast<std::size_t>(pi.base)] + 1.0;
    const double kjj = self_k_[static_cast<std::size_t>(pj.base)] + 1.0;
    const double kij = dot(samples_[static_cast<std::size_t>(pi.base)],
                           samples_[static_cast<std::size_t>(pj.base)]) +
                       (pi.k == pj.k ? 1.0 : 0.0);
    return kii + kjj - 2.0 * kij;
  }

  void apply(const AugmentedPoint& pi, const AugmentedPoint& pj, double dci, double dcj) {
    boundary_sum_[static_cast<std::size_t>(pi.k - 1)] += dci;
    boundary_sum_[static_cast<std::size_t>(pj.k - 1)] += dcj;
    apply_sample(pi.base, dci);
    apply_sample(pj.base, dcj);
  }

  const std::vector<double>& dense_weight() const { return w_; }
  const std::vector<double>& boundary_sums() const { return boundary_sum_; }
  const std::vector<double>& sample_scores() const { return scores_; }

private:
  void apply_sample(int sample, double dc) {
    if (dc == 0.0) return;
    const SparseVector& x = samples_[static_cast<std::size_t>(sample)];
    for (const auto& e : x.entries) {
      w_[static_cast<std::size_t>(e.index)] += dc * e.value;
      const double cv = dc * e.value;
      for (const auto& [s, v] : cols_[static_cast<std::size_t>(e.index)])
        scores_[static_cast<std::size_t>(s)] += cv * v;
    }
  }

  const SmoProblem& prob_;
  std::span<const SparseVector> samples_;
  int dim_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> self_k_;
  std::vector<double> w_;
  std::vector<double> scores_;        // D_s
  std::vector<double> boundary_sum_;  // A_k
};

// Bookkeeping for general kernels: per-point scores updated from cached
// base-kernel rows.
class KernelSmoState {
public:
  KernelSmoState(const SmoProblem& prob, std::size_t cache_bytes)
      : prob_(prob), cache_(cache_bytes) {
    u0_.assign(prob.points.size(), 0.0);
  }

  void rebuild(const std::vector<double>& alphas) {
    std::fill(u0_.begin(), u0_.end(), 0.0);
    std::vector<double> coef(prob_.samples.size(), 0.0);
    std::vector<double> boundary(static_cast<std::size_t>(prob_.num_boundaries), 0.0);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      if (alphas[a] == 0.0) continue;
      const auto& p = prob_.points[a];
      coef[static_cast<std::size_t>(p.base)] += alphas[a] * p.binary_label;
      boundary[static_cast<std::size_t>(p.k - 1)] += alphas[a] * p.binary_label;
    }
    for (std::size_t s = 0; s < coef.size(); ++s) {
      if (coef[s] == 0.0) continue;
      auto row = cache_.base_row(prob_.kernel, prob_.samples, static_cast<int>(s));
      for (std::size_t a = 0; a < u0_.size(); ++a)
        u0_[a] += coef[s] * (*row)[static_cast<std::size_t>(prob_.points[a].base)];
    }
    for (std::size_t a = 0; a < u0_.size(); ++a)
      u0_[a] += boundary[static_cast<std::size_t>(prob_.points[a].k - 1)];
  }

  double u0(std::size_t index, const AugmentedPoint& /*p*/) const { return u0_[index]; }

  double quad_eta(const AugmentedPoint& pi, const AugmentedPoint& pj) {
    auto row_i = cache_.base_row(prob_.kernel, prob_.samples, pi.base);
    auto row_j = cache_.base_row(prob_.kernel, prob_.samples, pj.base);
    const double kii = (*row_i)[static_cast<std::size_t>(pi.base)] + 1.0;
    const double kjj = (*row_j)[static_cast<std::size_t>(pj.base)] + 1.0;
    const double kij =
        (*row_i)[static_cast<std::size_t>(pj.base)] + (pi.k == pj.k ? 1.0 : 0.0);
    return kii + kjj - 2.0 * kij;
  }

  void apply(const AugmentedPoint& pi, const AugmentedPoint& pj, double dci, double dcj) {
    auto row_i = cache_.base_row(prob_.kernel, prob_.samples, pi.base);
    auto row_j = cache_.base_row(prob_.kernel, prob_.samples, pj.base);
    for (std::size_t a = 0; a < u0_.size(); ++a) {
      const auto& p = prob_.points[a];
      double delta = dci * (*row_i)[static_cast<std::size_t>(p.base)] +
                     dcj * (*row_j)[static_cast<std::size_t>(p.base)];
      if (p.k == pi.k) delta += dci;
      if (p.k == pj.k) delta += dcj;
      u0_[a] += delta;
    }
  }

private:
  const SmoProblem& prob_;
  GramRowCache cache_;
  std::vector<double> u0_;
};

inline std::vector<SparseVector> normalized_copies(std::span<const SparseVector> samples) {
  std::vector<SparseVector> out(samples.begin(), samples.end());
  for (auto& x : out) {
    const double nrm = norm(x);
    if (nrm == 0.0)
      throw std::invalid_argument("cosine kernel undefined on zero vector");
    for (auto& e : x.entries) e.value /= nrm;
  }
  return out;
}

struct BiasEstimate {
  double bias = 0.0;
  double gap = 0.0;
};

inline BiasEstimate recover_bias(const SmoProblem& prob, const std::vector<double>& alphas,
                                 const std::vector<double>& u0) {
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (prob.box[a] <= 0.0) continue;
    const double y = prob.points[a].binary_label;
    if (alphas[a] > 0.0 && alphas[a] < prob.box[a]) {
      free_sum += u0[a] - y;
      ++free_count;
    } else if (alphas[a] == 0.0) {
      // y*(u0 - b) >= 1
      if (y > 0.0) hi = std::min(hi, u0[a] - 1.0);
      else lo = std::max(lo, u0[a] + 1.0);
    } else {
      // at upper bound: y*(u0 - b) <= 1
      if (y > 0.0) lo = std::max(lo, u0[a] - 1.0);
      else hi = std::min(hi, u0[a] + 1.0);
    }
  }
  BiasEstimate est;
  if (free_count > 0) {
    est.bias = free_sum / static_cast<double>(free_count);
    return est;
  }
  if (!std::isfinite(lo) && !std::isfinite(hi)) return est;  // degenerate: all boxes zero
  if (!std::isfinite(lo)) {
    est.bias = hi;
  } else if (!std::isfinite(hi)) {
    est.bias = lo;
  } else {
    est.bias = 0.5 * (lo + hi);
    if (lo > hi) est.gap = lo - hi;
  }
  return est;
}

inline double complementarity_violation(const SmoProblem& prob, const std::vector<double>& alphas,
                                        const std::vector<double>& u0, double bias) {
  double worst = 0.0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (prob.box[a] <= 0.0) continue;
    const double y = prob.points[a].binary_label;
    const double margin = y * (u0[a] - bias);
    double v = 0.0;
    if (alphas[a] <= 0.0) v = std::max(0.0, 1.0 - margin);
    else if (alphas[a] >= prob.box[a]) v = std::max(0.0, margin - 1.0);
    else v = std::fabs(1.0 - margin);
    worst = std::max(worst, v);
  }
  return worst;
}

template <typename State>
DualSolution run_smo(const SmoProblem& prob, State& state, std::vector<double> alphas,
                     const SmoSettings& settings) {
  const std::size_t N = prob.points.size();
  state.rebuild(alphas);

  constexpr long long kRefreshEvery = 1 << 17;
  long long iterations = 0;
  bool converged = false;

  std::vector<std::int8_t> ylab(N);
  for (std::size_t a = 0; a < N; ++a) ylab[a] = prob.points[a].binary_label;

  while (iterations < settings.max_iter) {
    // maximal violating pair: i maximizes v over the up set, j minimizes
    // over the low set, v_a = y_a - u0_a
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    std::size_t best_i = N, best_j = N;
    for (std::size_t a = 0; a < N; ++a) {
      const double y = ylab[a];
      const double v = y - state.u0(a, prob.points[a]);
      const double alpha = alphas[a];
      const double cap = prob.box[a];
      const bool up = y > 0.0 ? alpha < cap : alpha > 0.0;
      const bool low = y > 0.0 ? alpha > 0.0 : alpha < cap;
      if (up && v > m) {
        m = v;
        best_i = a;
      }
      if (low && v < M) {
        M = v;
        best_j = a;
      }
    }
    if (!(m - M > settings.tol)) {
      converged = true;
      break;
    }

    const std::size_t i = best_i, j = best_j;
    const auto& pi = prob.points[i];
    const auto& pj = prob.points[j];
    const double yi = pi.binary_label, yj = pj.binary_label;
    const double vi = yi - state.u0(i, pi);
    const double vj = yj - state.u0(j, pj);
    const double slope = vj - vi;  // d/d(delta) of the min-form objective at 0 (< 0)

    // feasible segment for delta: alpha_i += yi*delta, alpha_j -= yj*delta
    const double lo1 = yi > 0.0 ? -alphas[i] : alphas[i] - prob.box[i];
    const double hi1 = yi > 0.0 ? prob.box[i] - alphas[i] : alphas[i];
    const double lo2 = yj > 0.0 ? alphas[j] - prob.box[j] : -alphas[j];
    const double hi2 = yj > 0.0 ? alphas[j] : prob.box[j] - alphas[j];
    const double lo = std::max(lo1, lo2);
    const double hi = std::min(hi1, hi2);
    if (!(hi > 0.0)) break;  // numerically stuck; report unconverged state

    const double eta = state.quad_eta(pi, pj);
    double delta;
    if (eta > 0.0) {
      delta = std::clamp(-slope / eta, lo, hi);
    } else {
      // objective is concave (or linear) along the segment: best endpoint
      const double f_lo = slope * lo + 0.5 * eta * lo * lo;
      const double f_hi = slope * hi + 0.5 * eta * hi * hi;
      delta = f_lo < f_hi ? lo : hi;
    }
    if (delta == 0.0) break;

    // land binding sides exactly on their bounds (no ulp dust at the box
    // edges); an interior partner is derived from the conserved yi*ai + yj*aj
    const double conserved = yi * alphas[i] + yj * alphas[j];
    double ai_new, aj_new;
    const bool i_binds = delta == hi1 || delta == lo1;
    const bool j_binds = delta == hi2 || delta == lo2;
    if (i_binds) {
      ai_new = (delta == hi1) == (yi > 0.0) ? prob.box[i] : 0.0;
      if (j_binds) aj_new = (delta == hi2) == (yj > 0.0) ? 0.0 : prob.box[j];
      else aj_new = std::clamp(yj * (conserved - yi * ai_new), 0.0, prob.box[j]);
    } else if (j_binds) {
      aj_new = (delta == hi2) == (yj > 0.0) ? 0.0 : prob.box[j];
      ai_new = std::clamp(yi * (conserved - yj * aj_new), 0.0, prob.box[i]);
    } else {
      ai_new = std::clamp(alphas[i] + yi * delta, 0.0, prob.box[i]);
      aj_new = std::clamp(yj * (conserved - yi * ai_new), 0.0, prob.box[j]);
    }
    const double dci = yi * (ai_new - alphas[i]);
    const double dcj = yj * (aj_new - alphas[j]);
    alphas[i] = ai_new;
    alphas[j] = aj_new;
    state.apply(pi, pj, dci, dcj);

    ++iterations;
    if (iterations % kRefreshEvery == 0) state.rebuild(alphas);
  }

  state.rebuild(alphas);
  std::vector<double> u0(N);
  for (std::size_t a = 0; a < N; ++a) u0[a] = state.u0(a, prob.points[a]);

  const BiasEstimate bias = recover_bias(prob, alphas, u0);

  DualSolution sol;
  sol.bias = bias.bias;
  double obj = 0.0;
  for (std::size_t a = 0; a < N; ++a) obj += alphas[a] * (1.0 - 0.5 * ylab[a] * u0[a]);
  sol.objective = obj;
  sol.diagnostics.iterations = iterations;
  sol.diagnostics.converged = converged;
  sol.diagnostics.b_gap = bias.gap;
  sol.diagnostics.kkt_violation = complementarity_violation(prob, alphas, u0, bias.bias);
  sol.diagnostics.slacks.resize(N);
  for (std::size_t a = 0; a < N; ++a)
    sol.diagnostics.slacks[a] = std::max(0.0, 1.0 - ylab[a] * (u0[a] - bias.bias));
  sol.alphas = std::move(alphas);
  return sol;
}

inline void check_warm_start(const SmoProblem& prob, const std::vector<double>& warm) {
  if (warm.size() != prob.points.size())
    throw std::invalid_argument("smo: warm start size mismatch");
  double sum_cy = 0.0, sum_alpha = 0.0;
  for (std::size_t a = 0; a < warm.size(); ++a) {
    const double tol_box = 1e-9 * std::max(1.0, prob.box[a]);
    if (warm[a] < -tol_box || warm[a] > prob.box[a] + tol_box)
      throw std::invalid_argument("smo: warm start violates box constraints");
    sum_cy += warm[a] * prob.points[a].binary_label;
    sum_alpha += std::fabs(warm[a]);
  }
  if (std::fabs(sum_cy) > 1e-8 * std::max(1.0, sum_alpha))
    throw std::invalid_argument("smo: warm start violates the equality constraint");
}

}  // namespace detail

inline DualSolution solve_smo(const SmoProblem& prob, const std::vector<double>* warm_start,
                              const SmoSettings& settings = {}) {
  prob.validate();
  std::vector<double> alphas(prob.points.size(), 0.0);
  if (warm_start) {
    detail::check_warm_start(prob, *warm_start);
    alphas = *warm_start;
    for (std::size_t a = 0; a < alphas.size(); ++a)
      alphas[a] = std::clamp(alphas[a], 0.0, prob.box[a]);
  }
  if (prob.points.empty()) return DualSolution{};

  int dim = 0;
  for (const auto& x : prob.samples) dim = std::max(dim, x.dim);

  switch (prob.kernel.variant) {
    case KernelVariant::linear: {
      detail::LinearSmoState state(prob, prob.samples, dim);
      return detail::run_smo(prob, state, std::move(alphas), settings);
    }
    case KernelVariant::cosine: {
      const auto normalized = detail::normalized_copies(prob.samples);
      detail::LinearSmoState state(prob, normalized, dim);
      return detail::run_smo(prob, state, std::move(alphas), settings);
    }
    case KernelVariant::perceptron: {
      detail::KernelSmoState state(prob, settings.cache_bytes);
      return detail::run_smo(prob, state, std::move(alphas), settings);
    }
  }
  throw std::logic_error("solve_smo: unknown kernel");
}

// Max KKT complementarity violation of a solution, recomputed from scratch.
inline double kkt_report(const DualSolution& sol, const SmoProblem& prob) {
  prob.validate();
  if (sol.alphas.size() != prob.points.size())
    throw std::invalid_argument("kkt_report: solution/problem shape mismatch");
  const std::size_t N = prob.points.size();
  std::vector<double> coef(prob.samples.size(), 0.0);
  std::vector<double> boundary(static_cast<std::size_t>(prob.num_boundaries), 0.0);
  for (std::size_t a = 0; a < N; ++a) {
    const auto& p = prob.points[a];
    coef[static_cast<std::size_t>(p.base)] += sol.alphas[a] * p.binary_label;
    boundary[static_cast<std::size_t>(p.k - 1)] += sol.alphas[a] * p.binary_label;
  }
  std::vector<double> u0(N, 0.0);
  for (std::size_t s = 0; s < coef.size(); ++s) {
    if (coef[s] == 0.0) continue;
    std::vector<double> row(prob.samples.size());
    for (std::size_t t = 0; t < prob.samples.size(); ++t)
      row[t] = kernel_eval(prob.kernel, prob.samples[s], prob.samples[t]);
    for (std::size_t a = 0; a < N; ++a)
      u0[a] += coef[s] * row[static_cast<std::size_t>(prob.points[a].base)];
  }
  for (std::size_t a = 0; a < N; ++a)
    u0[a] += boundary[static_cast<std::size_t>(prob.points[a].k - 1)];
  return detail::complementarity_violation(prob, sol.alphas, u0, sol.bias);
}

}  // namespace tor
