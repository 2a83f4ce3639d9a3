#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tor/rng.hpp"

namespace tor {

enum class LossKind { hinge, square_hinge, logistic, square, laplacian };

inline const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::hinge: return "hinge";
    case LossKind::square_hinge: return "square-hinge";
    case LossKind::logistic: return "logistic";
    case LossKind::square: return "square";
    case LossKind::laplacian: return "laplacian";
  }
  return "?";
}

namespace detail {
// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
}  // namespace detail

// Binary loss l_y(a) for y in {-1,+1}.
inline double binary_loss(LossKind kind, int y, double a) {
  if (y != 1 && y != -1) throw std::invalid_argument("binary_loss: y must be +1 or -1");
  if (!std::isfinite(a)) throw std::invalid_argument("binary_loss: non-finite margin");
  const double ya = static_cast<double>(y) * a;
  switch (kind) {
    case LossKind::hinge: return std::max(0.0, 1.0 - ya);
    case LossKind::square_hinge: {
      const double t = std::max(0.0, 1.0 - ya);
      return t * t;
    }
    case LossKind::logistic: return detail::softplus(-ya);
    case LossKind::square: {
      const double t = a - static_cast<double>(y);
      return t * t;
    }
    case LossKind::laplacian: return std::fabs(a - static_cast<double>(y));
  }
  throw std::logic_error("binary_loss: unknown loss");
}

// Subgradient of l_y with respect to a.
inline double binary_loss_grad(LossKind kind, int y, double a) {
  const double yd = static_cast<double>(y);
  const double ya = yd * a;
  switch (kind) {
    case LossKind::hinge: return ya < 1.0 ? -yd : 0.0;
    case LossKind::square_hinge: return ya < 1.0 ? -2.0 * yd * (1.0 - ya) : 0.0;
    case LossKind::logistic: return -yd / (1.0 + std::exp(ya));
    case LossKind::square: return 2.0 * (a - yd);
    case LossKind::laplacian: return a > yd ? 1.0 : (a < yd ? -1.0 : 0.0);
  }
  throw std::logic_error("binary_loss_grad: unknown loss");
}

// Ordered thresholds theta_1..theta_{K-1}; theta_0 = -inf and theta_K = +inf
// are implicit.
struct Thresholds {
  std::vector<double> values;

  int num_classes() const { return static_cast<int>(values.size()) + 1; }

  bool non_decreasing(double tol = 1e-6) const {
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[i - 1] - tol) return false;
    return true;
  }
};

// Threshold-model prediction: f = 1 + #{k : h - theta_k - b > 0}.
inline int predict_label(double h, const Thresholds& theta, double bias) {
  int f = 1;
  for (double t : theta.values)
    if (h - t - bias > 0.0) ++f;
  return f;
}

// Ordinal loss superimposing K-1 binary losses at margins h - theta_k - b.
inline double ordinal_loss(LossKind kind, int y, double h, const Thresholds& theta, double bias) {
  const int num_classes = theta.num_classes();
  if (y < 1 || y > num_classes) throw std::invalid_argument("ordinal_loss: label out of 1..K");
  double sum = 0.0;
  for (int k = 1; k < num_classes; ++k) {
    const int yk = y > k ? +1 : -1;
    sum += binary_loss(kind, yk, h - theta.values[static_cast<std::size_t>(k - 1)] - bias);
  }
  return sum;
}

// Loss change from swapping adjacent labels y_i = y_j - 1 between two
// samples with fixed score values. Negative means the swap lowers the
// unlabeled loss term.
inline double swap_gain(LossKind kind, int y_i, int y_j, double h_i, double h_j,
                        const Thresholds& theta, double bias) {
  if (y_j != y_i + 1) throw std::invalid_argument("swap_gain: labels must be adjacent (y_i = y_j - 1)");
  const double before = ordinal_loss(kind, y_i, h_i, theta, bias) +
                        ordinal_loss(kind, y_j, h_j, theta, bias);
  const double after = ordinal_loss(kind, y_i + 1, h_i, theta, bias) +
                       ordinal_loss(kind, y_j - 1, h_j, theta, bias);
  return after - before;
}

struct Def3Report {
  bool pass = true;
  std::string counterexample;
};

// Randomized check of the two binary-loss axioms: l_1(-a) > l_1(a) for a > 0,
// and l_y(a) = l_{-y}(-a). Works on any callable (y, a) -> loss so that
// deliberately broken losses can be probed in tests.
template <typename LossFn>
Def3Report check_def3_fn(LossFn&& loss, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_def3: trials must be >= 1");
  Rng rng(seed);
  Def3Report report;
  for (int t = 0; t < trials; ++t) {
    const double a = rng.uniform(0.0, 10.0);
    if (a > 0.0 && !(loss(+1, -a) > loss(+1, a))) {
      std::ostringstream os;
      os << "property 1 violated at a=" << a << ": l1(-a)=" << loss(+1, -a)
         << " !> l1(a)=" << loss(+1, a);
      report.pass = false;
      report.counterexample = os.str();
      return report;
    }
    const int y = rng.uniform_int(0, 1) == 0 ? -1 : +1;
    const double c = rng.uniform(-10.0, 10.0);
    if (loss(y, c) != loss(-y, -c)) {
      std::ostringstream os;
      os << "property 2 violated at y=" << y << ", a=" << c << ": l_y(a)=" << loss(y, c)
         << " != l_-y(-a)=" << loss(-y, -c);
      report.pass = false;
      report.counterexample = os.str();
      return report;
    }
  }
  return report;
}

inline Def3Report check_def3(LossKind kind, int trials, std::uint64_t seed) {
  return check_def3_fn([kind](int y, double a) { return binary_loss(kind, y, a); }, trials, seed);
}

}  // namespace tor
