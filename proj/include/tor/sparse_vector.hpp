#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tor {

struct SparseEntry {
  int index;     // 0-based feature index
  double value;  // nonzero

  friend bool operator==(const SparseEntry& a, const SparseEntry& b) {
    return a.index == b.index && a.value == b.value;
  }
};

// Sparse feature vector: entries sorted by strictly increasing index,
// no stored zeros, every index < dim.
struct SparseVector {
  std::vector<SparseEntry> entries;
  int dim = 0;

  SparseVector() = default;
  SparseVector(std::vector<SparseEntry> e, int d) : entries(std::move(e)), dim(d) {}

  static SparseVector from_dense(const std::vector<double>& dense) {
    SparseVector v;
    v.dim = static_cast<int>(dense.size());
    for (int d = 0; d < v.dim; ++d)
      if (dense[d] != 0.0) v.entries.push_back({d, dense[d]});
    return v;
  }

  void validate() const {
    int last = -1;
    for (const auto& e : entries) {
      if (e.index <= last) throw std::invalid_argument("sparse vector indices must strictly increase");
      if (e.index >= dim) throw std::invalid_argument("sparse vector index out of range");
      if (e.value == 0.0) throw std::invalid_argument("sparse vector must not store zeros");
      if (!std::isfinite(e.value)) throw std::invalid_argument("sparse vector value not finite");
      last = e.index;
    }
  }

  std::size_t nnz() const { return entries.size(); }

  friend bool operator==(const SparseVector& a, const SparseVector& b) {
    return a.dim == b.dim && a.entries == b.entries;
  }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    const int ai = a.entries[i].index, bj = b.entries[j].index;
    if (ai == bj) {
      s += a.entries[i].value * b.entries[j].value;
      ++i;
      ++j;
    } else if (ai < bj) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

inline double norm_sq(const SparseVector& a) {
  double s = 0.0;
  for (const auto& e : a.entries) s += e.value * e.value;
  return s;
}

inline double norm(const SparseVector& a) { return std::sqrt(norm_sq(a)); }

// ||a - b||^2 via merged difference (no cancellation through norms).
inline double squared_distance(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j >= b.entries.size() || (i < a.entries.size() && a.entries[i].index < b.entries[j].index)) {
      s += a.entries[i].value * a.entries[i].value;
      ++i;
    } else if (i >= a.entries.size() || b.entries[j].index < a.entries[i].index) {
      s += b.entries[j].value * b.entries[j].value;
      ++j;
    } else {
      const double d = a.entries[i].value - b.entries[j].value;
      s += d * d;
      ++i;
      ++j;
    }
  }
  return s;
}

// y += c * x for dense y.
inline void add_scaled(std::vector<double>& y, double c, const SparseVector& x) {
  for (const auto& e : x.entries) y[static_cast<std::size_t>(e.index)] += c * e.value;
}

inline double dot_dense(const std::vector<double>& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += w[static_cast<std::size_t>(e.index)] * e.value;
  return s;
}

}  // namespace tor
