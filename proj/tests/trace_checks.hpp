#pragma once

// Shared validation of transduction traces: per-stage strict objective
// decrease, exact-negative swap gains, Eq-5 re-validation of every recorded
// swap against its stored pre-swap model slice, class-count conservation,
// and safety-cap bookkeeping.

#include <cmath>
#include <string>
#include <vector>

#include "tor/losses.hpp"
#include "tor/transductive.hpp"

namespace tor_test {

struct TraceCheck {
  bool ok = true;
  std::string detail;
  int swaps = 0;
  int rounds = 0;

  void fail(const std::string& what) {
    if (ok) detail = what;
    ok = false;
  }
};

inline TraceCheck validate_trace(const tor::TransductionResult& result, tor::LossKind loss,
                                 int num_classes) {
  TraceCheck check;
  std::vector<int> labels = result.trace.initial_labels;

  std::vector<int> initial_counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) ++initial_counts[static_cast<std::size_t>(y - 1)];

  for (const auto& stage : result.trace.stages) {
    if (stage.cap_hit) check.fail("stage hit the swap safety cap");
    for (std::size_t r = 0; r < stage.rounds.size(); ++r) {
      ++check.rounds;
      const auto& round = stage.rounds[r];
      if (r > 0) {
        const double prev = stage.rounds[r - 1].objective;
        if (!(round.objective < prev + 1e-6 * std::fabs(prev)))
          check.fail("objective failed to strictly decrease within a stage (" +
                     std::to_string(prev) + " -> " + std::to_string(round.objective) + ")");
      }
      for (const auto& ev : round.swaps) {
        ++check.swaps;
        if (!(ev.gain < 0.0)) check.fail("recorded swap gain is not negative");
        if (labels[static_cast<std::size_t>(ev.i)] != ev.k)
          check.fail("swap i-side label does not match the boundary");
        if (labels[static_cast<std::size_t>(ev.j)] != ev.k + 1)
          check.fail("swap j-side label does not match the boundary");
        tor::Thresholds theta{ev.theta};
        if (!theta.non_decreasing(1e-6))
          check.fail("pre-swap model thresholds are not non-decreasing");
        const int f_i = tor::predict_label(ev.h_i, theta, ev.bias);
        const int f_j = tor::predict_label(ev.h_j, theta, ev.bias);
        if (!(f_i > ev.k)) check.fail("swap i-side violates f(x_i) > y_i on re-check");
        if (!(f_j < ev.k + 1)) check.fail("swap j-side violates f(x_j) < y_j on re-check");
        const double gain =
            tor::swap_gain(loss, ev.k, ev.k + 1, ev.h_i, ev.h_j, theta, ev.bias);
        if (gain != ev.gain) check.fail("recorded swap gain does not reproduce");
        labels[static_cast<std::size_t>(ev.i)] = ev.k + 1;
        labels[static_cast<std::size_t>(ev.j)] = ev.k;
      }
    }
  }

  if (labels != result.pseudo.labels) check.fail("trace replay does not reach the final labels");
  std::vector<int> final_counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : result.pseudo.labels) ++final_counts[static_cast<std::size_t>(y - 1)];
  if (final_counts != initial_counts) check.fail("class counts were not conserved by swaps");
  return check;
}

}  // namespace tor_test
