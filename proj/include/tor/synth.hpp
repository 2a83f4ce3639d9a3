#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tor/dataset.hpp"
#include "tor/rng.hpp"

namespace tor {

// Cluster-assumption generator configuration. Each class y owns the feature
// band [2000(y-1), 2000(y+2)); p in [0,1] opens the remaining dimensions at
// rate 0.01*p, weakening the cluster structure as it grows.
struct SynthConfig {
  int num_classes = 5;
  double p = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;

  int dim() const { return 2000 * (num_classes + 2); }

  void validate() const {
    if (num_classes < 2) throw std::invalid_argument("synth: K must be >= 2");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("synth: p must be in [0,1]");
    if (n_samples < 1) throw std::invalid_argument("synth: n_samples must be >= 1");
  }
};

namespace detail {

inline SparseVector synth_sample(Rng& rng, int y, const SynthConfig& cfg) {
  const int dim = cfg.dim();
  const int band_lo = 2000 * (y - 1);
  const int band_hi = 2000 * (y + 2);  // half-open, 1-based d
  SparseVector x;
  x.dim = dim;
  for (int d = 1; d <= dim; ++d) {
    const bool in_band = d >= band_lo && d < band_hi;
    const double prob = in_band ? 0.01 : 0.01 * cfg.p;
    if (rng.uniform() < prob) {
      const double v = rng.uniform();
      if (v != 0.0) x.entries.push_back({d - 1, v});
    }
  }
  return x;
}

}  // namespace detail

// Draws n_samples points with labels uniform on 1..K, then L2-normalizes
// each. Deterministic for a fixed seed; all-zero draws are regenerated so
// normalization stays defined.
inline OrdinalDataset gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  OrdinalDataset ds;
  ds.num_classes = cfg.num_classes;
  ds.dim = cfg.dim();
  ds.labeled.reserve(static_cast<std::size_t>(cfg.n_samples));
  ds.labels.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (int i = 0; i < cfg.n_samples; ++i) {
    const int y = static_cast<int>(rng.uniform_int(1, cfg.num_classes));
    SparseVector x = detail::synth_sample(rng, y, cfg);
    while (x.entries.empty()) x = detail::synth_sample(rng, y, cfg);
    const double inv = 1.0 / norm(x);
    for (auto& e : x.entries) e.value *= inv;
    ds.labeled.push_back(std::move(x));
    ds.labels.push_back(y);
  }
  return ds;
}

}  // namespace tor
