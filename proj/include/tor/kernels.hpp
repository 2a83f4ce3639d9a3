#pragma once

#include <cmath>
#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "tor/sparse_vector.hpp"

namespace tor {

enum class KernelVariant { linear, perceptron, cosine };

struct KernelKind {
  KernelVariant variant = KernelVariant::linear;
  double delta_p = 0.0;     // perceptron offset; zero by default
  bool precompute = false;  // cache full Gram rows during solves

  static KernelKind linear() { return {KernelVariant::linear, 0.0, false}; }
  static KernelKind perceptron(double delta_p = 0.0) {
    return {KernelVariant::perceptron, delta_p, false};
  }
  static KernelKind cosine() { return {KernelVariant::cosine, 0.0, false}; }
};

inline const char* kernel_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::linear: return "linear";
    case KernelVariant::perceptron: return "perceptron";
    case KernelVariant::cosine: return "cosine";
  }
  return "?";
}

inline double kernel_eval(const KernelKind& kind, const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) throw std::invalid_argument("kernel_eval: dimension mismatch");
  switch (kind.variant) {
    case KernelVariant::linear:
      return dot(a, b);
    case KernelVariant::perceptron:
      if (!std::isfinite(kind.delta_p))
        throw std::invalid_argument("kernel_eval: delta_p must be finite");
      return kind.delta_p - std::sqrt(squared_distance(a, b));
    case KernelVariant::cosine: {
      const double na = norm(a), nb = norm(b);
      if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("kernel_eval: cosine kernel undefined on zero vector");
      return dot(a, b) / (na * nb);
    }
  }
  throw std::logic_error("kernel_eval: unknown kernel");
}

// Kernel over extended points (x_i, e_k): base kernel plus e_k^T e_k' = I[k = k'].
inline double augmented_kernel(const KernelKind& kind, const SparseVector& xi, int ki,
                               const SparseVector& xj, int kj) {
  return kernel_eval(kind, xi, xj) + (ki == kj ? 1.0 : 0.0);
}

// LRU cache of base-kernel rows (one row spans all samples). Rows are
// immutable once published, so readers keep using a row after eviction.
class GramRowCache {
public:
  explicit GramRowCache(std::size_t budget_bytes = kDefaultBudget) : budget_(budget_bytes) {}

  static constexpr std::size_t kDefaultBudget = 256ull << 20;

  using Row = std::shared_ptr<const std::vector<double>>;

  Row base_row(const KernelKind& kind, std::span<const SparseVector> samples, int sample) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(sample);
      if (it != map_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        ++hits_;
        return it->second->row;
      }
    }
    auto row = std::make_shared<std::vector<double>>(samples.size());
    const SparseVector& xi = samples[static_cast<std::size_t>(sample)];
    for (std::size_t j = 0; j < samples.size(); ++j) (*row)[j] = kernel_eval(kind, xi, samples[j]);
    Row published = std::move(row);

    std::lock_guard<std::mutex> lock(mu_);
    ++misses_;
    auto it = map_.find(sample);
    if (it != map_.end()) return it->second->row;  // raced insert
    lru_.push_front(Entry{sample, published});
    map_[sample] = lru_.begin();
    bytes_ += published->size() * sizeof(double);
    while (bytes_ > budget_ && lru_.size() > 1) {
      const Entry& victim = lru_.back();
      bytes_ -= victim.row->size() * sizeof(double);
      map_.erase(victim.sample);
      lru_.pop_back();
    }
    return published;
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    map_.clear();
    lru_.clear();
    bytes_ = 0;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

private:
  struct Entry {
    int sample;
    Row row;
  };

  std::size_t budget_;
  std::size_t bytes_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::list<Entry> lru_;
  std::unordered_map<int, std::list<Entry>::iterator> map_;
  std::mutex mu_;
};

// Row of the augmented Gram matrix for point (sample, k), in canonical
// augmented order: sample-major, boundary k = 1..K-1 inner.
inline std::vector<double> gram_row(const KernelKind& kind, std::span<const SparseVector> samples,
                                    int num_classes, int sample, int k, GramRowCache& cache) {
  if (sample < 0 || static_cast<std::size_t>(sample) >= samples.size())
    throw std::invalid_argument("gram_row: sample index out of range");
  const int kb = num_classes - 1;
  auto base = cache.base_row(kind, samples, sample);
  std::vector<double> row(samples.size() * static_cast<std::size_t>(kb));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double v = (*base)[s];
    for (int kk = 1; kk <= kb; ++kk)
      row[s * static_cast<std::size_t>(kb) + static_cast<std::size_t>(kk - 1)] =
          v + (kk == k ? 1.0 : 0.0);
  }
  return row;
}

}  // namespace tor
