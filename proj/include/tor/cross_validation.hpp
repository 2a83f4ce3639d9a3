#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tor/dataset.hpp"
#include "tor/metrics.hpp"
#include "tor/model.hpp"
#include "tor/rng.hpp"
#include "tor/train.hpp"

namespace tor {

struct CvResult {
  double c1 = 1.0;
  std::vector<double> grid;         // candidate C1 values, ascending
  std::vector<double> mean_errors;  // mean zero-one error per grid point
  int folds_used = 0;
  std::vector<std::string> warnings;
};

// Five-fold (by default) stratified cross-validation over a log10 C1 grid,
// minimizing mean zero-one error; ties go to the smaller C1.
inline CvResult cross_validate_c1(const TrainConfig& base, const std::vector<SparseVector>& xs,
                                  const std::vector<int>& ys, int num_classes, int dim,
                                  const std::vector<int>& grid_exponents, int folds,
                                  std::uint64_t seed) {
  if (grid_exponents.empty()) throw std::invalid_argument("cv: empty C1 grid");
  if (folds < 2) throw std::invalid_argument("cv: need at least 2 folds");
  if (xs.size() < static_cast<std::size_t>(folds))
    throw std::invalid_argument("cv: need at least `folds` samples");

  // stratified fold assignment: shuffle within each class, deal round-robin
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < ys.size(); ++i)
    by_class[static_cast<std::size_t>(ys[i] - 1)].push_back(i);
  std::vector<std::vector<std::size_t>> fold_members(static_cast<std::size_t>(folds));
  std::size_t deal = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t m : members) fold_members[deal++ % static_cast<std::size_t>(folds)].push_back(m);
  }

  CvResult result;
  std::vector<std::vector<std::size_t>> active;
  for (auto& f : fold_members) {
    if (f.empty()) {
      result.warnings.push_back("dropped an empty cross-validation fold");
      continue;
    }
    active.push_back(std::move(f));
  }
  result.folds_used = static_cast<int>(active.size());

  std::vector<int> exps = grid_exponents;
  std::sort(exps.begin(), exps.end());
  for (int e : exps) result.grid.push_back(std::pow(10.0, e));

  double best_err = std::numeric_limits<double>::infinity();
  for (double c1 : result.grid) {
    double err_sum = 0.0;
    for (std::size_t f = 0; f < active.size(); ++f) {
      auto train_x = std::make_shared<std::vector<SparseVector>>();
      std::vector<int> train_y;
      for (std::size_t g = 0; g < active.size(); ++g) {
        if (g == f) continue;
        for (std::size_t m : active[g]) {
          train_x->push_back(xs[m]);
          train_y.push_back(ys[m]);
        }
      }
      TrainConfig cfg = base;
      cfg.c1 = c1;
      auto model = train_supervised(
          cfg, std::shared_ptr<const std::vector<SparseVector>>(train_x), train_y, num_classes,
          dim);
      std::vector<int> pred, truth;
      for (std::size_t m : active[f]) {
        pred.push_back(predict(model, xs[m]));
        truth.push_back(ys[m]);
      }
      err_sum += mean_zero_one(pred, truth);
    }
    result.mean_errors.push_back(err_sum / static_cast<double>(active.size()));
    if (result.mean_errors.back() < best_err) {
      best_err = result.mean_errors.back();
      result.c1 = c1;
    }
  }
  return result;
}

}  // namespace tor
