#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tor/sparse_vector.hpp"

namespace tor {

// Labeled + unlabeled ordinal samples sharing one feature space.
struct OrdinalDataset {
  std::vector<SparseVector> labeled;
  std::vector<int> labels;  // parallel to `labeled`, each in 1..num_classes
  std::vector<SparseVector> unlabeled;
  int num_classes = 2;
  int dim = 0;

  std::size_t n() const { return labeled.size(); }
  std::size_t u() const { return unlabeled.size(); }

  void validate() const {
    if (num_classes < 2) throw std::invalid_argument("dataset needs at least 2 classes");
    if (labels.size() != labeled.size())
      throw std::invalid_argument("labels and labeled samples must align");
    for (int y : labels)
      if (y < 1 || y > num_classes) throw std::invalid_argument("label out of 1..K");
    for (const auto& x : labeled) {
      if (x.dim != dim) throw std::invalid_argument("sample dim differs from dataset dim");
      x.validate();
    }
    for (const auto& x : unlabeled) {
      if (x.dim != dim) throw std::invalid_argument("sample dim differs from dataset dim");
      x.validate();
    }
  }
};

// One row of the extended binary problem: sample `base` paired with
// boundary k (1..K-1). The e_k block is never materialized; k stands for it.
// binary_label is +1/-1 once assigned, 0 while an unlabeled point has no
// pseudo-label yet.
struct AugmentedPoint {
  int base = 0;
  int k = 1;
  std::int8_t binary_label = 0;
};

struct ClassRatios {
  std::vector<double> ratios;  // K entries, each in [0,1], sum 1

  void validate() const {
    double sum = 0.0;
    for (double r : ratios) {
      if (r < 0.0 || r > 1.0) throw std::invalid_argument("class ratio outside [0,1]");
      sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("class ratios must sum to 1");
  }
};

inline ClassRatios compute_class_ratios(const std::vector<int>& labels, int num_classes) {
  if (labels.empty()) throw std::invalid_argument("cannot compute class ratios of empty label set");
  std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
  for (int y : labels) {
    if (y < 1 || y > num_classes) throw std::invalid_argument("label out of 1..K");
    counts[static_cast<std::size_t>(y - 1)] += 1.0;
  }
  const double total = static_cast<double>(labels.size());
  for (double& c : counts) c /= total;
  return ClassRatios{std::move(counts)};
}

// Binary label of the k-th extended copy: 1 - 2*I[y <= k].
inline int binary_label_for(int y, int k) { return y > k ? +1 : -1; }

// Extended binary encoding of an ordinal label: K-1 entries, +1s then -1s.
inline std::vector<std::int8_t> encode_extended(int y, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("encode_extended requires K >= 2");
  if (y < 1 || y > num_classes) throw std::invalid_argument("ordinal label out of 1..K");
  std::vector<std::int8_t> out(static_cast<std::size_t>(num_classes - 1));
  for (int k = 1; k < num_classes; ++k)
    out[static_cast<std::size_t>(k - 1)] = static_cast<std::int8_t>(binary_label_for(y, k));
  return out;
}

// Equal-frequency binning of real targets into K ordinal labels.
// Sorted values split into K contiguous groups; the first (N mod K) groups
// take one extra element; ties keep input order.
inline std::vector<int> quantize_targets(const std::vector<double>& values, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("quantize_targets requires K >= 2");
  if (values.size() < static_cast<std::size_t>(num_classes))
    throw std::invalid_argument("quantize_targets needs at least K values");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  const std::size_t base = n / static_cast<std::size_t>(num_classes);
  const std::size_t extra = n % static_cast<std::size_t>(num_classes);
  std::vector<int> labels(n, 0);
  std::size_t pos = 0;
  for (int g = 1; g <= num_classes; ++g) {
    const std::size_t size = base + (static_cast<std::size_t>(g) <= extra ? 1 : 0);
    for (std::size_t s = 0; s < size; ++s) labels[order[pos++]] = g;
  }
  return labels;
}

}  // namespace tor
