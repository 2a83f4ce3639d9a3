#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tor/cross_validation.hpp"
#include "tor/dataset.hpp"
#include "tor/libsvm_io.hpp"
#include "tor/metrics.hpp"
#include "tor/rng.hpp"
#include "tor/synth.hpp"
#include "tor/transductive.hpp"
#include "tor/version.hpp"

namespace tor {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Method { supervised, transductive };

inline const char* method_name(Method m) {
  return m == Method::supervised ? "supervised" : "transductive";
}

struct DatasetSource {
  enum class Kind { synthetic, file };
  Kind kind = Kind::synthetic;
  SynthConfig synth;  // per-seed realizations draw seed from the plan
  std::string path;
  std::string id;
};

struct ExperimentPlan {
  DatasetSource source;
  std::vector<int> sizes = {100, 150, 200, 250, 300, 350, 400};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int folds = 5;
  std::vector<int> grid_exponents = {-3, -2, -1, 0, 1, 2, 3, 4, 5};
  std::vector<Method> methods = {Method::supervised, Method::transductive};
  TrainConfig base_config;
  bool keep_traces = false;  // retain transduction traces alongside the rows

  void validate() const {
    if (grid_exponents.empty()) throw std::invalid_argument("plan: empty C1 grid");
    for (int s : sizes)
      if (s < 1) throw std::invalid_argument("plan: labeled sizes must be positive");
  }
};

struct EvalRow {
  std::string dataset;
  std::uint64_t seed = 0;
  int n_labeled = 0;
  std::string method;
  double c1 = 0.0;
  double zero_one = 0.0;
  double mae = 0.0;
  double wall_time_s = 0.0;
  long long solver_iterations = 0;
  std::string error;  // nonempty when this cell failed
};

struct Aggregate {
  std::string dataset;
  int n_labeled = 0;
  std::string method;
  double zero_one_mean = 0.0;
  double zero_one_std = 0.0;
  double mae_mean = 0.0;
  double mae_std = 0.0;
  int runs = 0;
};

struct TracedCell {
  std::string dataset;
  std::uint64_t seed = 0;
  int n_labeled = 0;
  TransductionTrace trace;
  PseudoLabels pseudo;
  OrdinalModel model;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<TracedCell> traces;  // populated when the plan keeps traces

  // mean/std over seeds, grouped by (dataset, size, method)
  std::vector<Aggregate> aggregates() const {
    std::vector<Aggregate> out;
    for (const auto& row : rows) {
      if (!row.error.empty()) continue;
      Aggregate* agg = nullptr;
      for (auto& a : out)
        if (a.dataset == row.dataset && a.n_labeled == row.n_labeled && a.method == row.method)
          agg = &a;
      if (!agg) {
        out.push_back({row.dataset, row.n_labeled, row.method, 0, 0, 0, 0, 0});
        agg = &out.back();
      }
      agg->zero_one_mean += row.zero_one;
      agg->mae_mean += row.mae;
      ++agg->runs;
    }
    for (auto& a : out) {
      a.zero_one_mean /= a.runs;
      a.mae_mean /= a.runs;
    }
    for (const auto& row : rows) {
      if (!row.error.empty()) continue;
      for (auto& a : out)
        if (a.dataset == row.dataset && a.n_labeled == row.n_labeled && a.method == row.method) {
          a.zero_one_std += (row.zero_one - a.zero_one_mean) * (row.zero_one - a.zero_one_mean);
          a.mae_std += (row.mae - a.mae_mean) * (row.mae - a.mae_mean);
        }
    }
    for (auto& a : out) {
      a.zero_one_std = a.runs > 1 ? std::sqrt(a.zero_one_std / (a.runs - 1)) : 0.0;
      a.mae_std = a.runs > 1 ? std::sqrt(a.mae_std / (a.runs - 1)) : 0.0;
    }
    return out;
  }
};

namespace detail {

struct SplitView {
  std::vector<SparseVector> labeled;
  std::vector<int> labels;
  std::vector<SparseVector> unlabeled;
  std::vector<int> hidden_truth;
};

inline SplitView split_dataset(const OrdinalDataset& pool, int n_labeled, std::uint64_t seed) {
  if (pool.n() < static_cast<std::size_t>(n_labeled))
    throw std::invalid_argument("split: labeled size exceeds the available pool");
  std::vector<std::size_t> order(pool.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);  // decorrelate from dataset-generation seeding
  rng.shuffle(order);
  SplitView view;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t idx = order[r];
    if (r < static_cast<std::size_t>(n_labeled)) {
      view.labeled.push_back(pool.labeled[idx]);
      view.labels.push_back(pool.labels[idx]);
    } else {
      view.unlabeled.push_back(pool.labeled[idx]);
      view.hidden_truth.push_back(pool.labels[idx]);
    }
  }
  return view;
}

}  // namespace detail

// Runs the full protocol for every (seed, size, method) cell: split the
// pool, pick C1 by cross-validation on the labeled part, train each method,
// and score predictions on the unlabeled samples against their hidden
// labels. Deterministic per seed.
inline EvalReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  EvalReport report;

  OrdinalDataset file_pool;
  if (plan.source.kind == DatasetSource::Kind::file) {
    std::ifstream in(plan.source.path);
    if (!in) throw IoError("cannot open dataset: " + plan.source.path);
    file_pool = parse_libsvm(in);
  }

  for (std::uint64_t seed : plan.seeds) {
    OrdinalDataset pool;
    if (plan.source.kind == DatasetSource::Kind::synthetic) {
      SynthConfig cfg = plan.source.synth;
      cfg.seed = seed;
      pool = gen_synthetic(cfg);
    } else {
      pool = file_pool;
    }

    for (int size : plan.sizes) {
      detail::SplitView split;
      std::string split_error;
      try {
        split = detail::split_dataset(pool, size, seed);
      } catch (const std::exception& e) {
        split_error = e.what();
      }

      double chosen_c1 = plan.base_config.c1;
      if (split_error.empty()) {
        try {
          CvResult cv = cross_validate_c1(plan.base_config, split.labeled, split.labels,
                                          pool.num_classes, pool.dim, plan.grid_exponents,
                                          plan.folds, seed);
          chosen_c1 = cv.c1;
        } catch (const std::exception& e) {
          split_error = std::string("cross-validation failed: ") + e.what();
        }
      }

      for (Method method : plan.methods) {
        EvalRow row;
        row.dataset = plan.source.id;
        row.seed = seed;
        row.n_labeled = size;
        row.method = method_name(method);
        row.c1 = chosen_c1;
        if (!split_error.empty()) {
          row.error = split_error;
          report.rows.push_back(std::move(row));
          continue;
        }
        TrainConfig cfg = plan.base_config;
        cfg.c1 = chosen_c1;
        cfg.seed = seed;
        const auto started = std::chrono::steady_clock::now();
        try {
          std::vector<int> pred;
          if (method == Method::supervised) {
            auto shared = std::make_shared<const std::vector<SparseVector>>(split.labeled);
            OrdinalModel model =
                train_supervised(cfg, shared, split.labels, pool.num_classes, pool.dim);
            row.solver_iterations = model.solver_iterations;
            pred = predict_all(model, split.unlabeled);
          } else {
            OrdinalDataset ds;
            ds.labeled = split.labeled;
            ds.labels = split.labels;
            ds.unlabeled = split.unlabeled;
            ds.num_classes = pool.num_classes;
            ds.dim = pool.dim;
            TransductionResult res = train_transductive(cfg, ds);
            row.solver_iterations = res.trace.total_solver_iterations;
            pred = res.pseudo.labels;
            if (plan.keep_traces)
              report.traces.push_back({plan.source.id, seed, size, std::move(res.trace),
                                       std::move(res.pseudo), std::move(res.model)});
          }
          row.zero_one = mean_zero_one(pred, split.hidden_truth);
          row.mae = mean_absolute(pred, split.hidden_truth);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV with a fixed header plus a sibling <path>.meta.json holding seeds,
// configuration and the code version.
inline void emit_report(const EvalReport& report, const ExperimentPlan& plan,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out << "dataset,seed,n_labeled,method,c1,mean_zero_one,mean_absolute,wall_time_s,"
         "solver_iterations,error\n";
  for (const auto& r : report.rows) {
    out << r.dataset << ',' << r.seed << ',' << r.n_labeled << ',' << r.method << ','
        << format_double(r.c1) << ',' << format_double(r.zero_one) << ','
        << format_double(r.mae) << ',' << format_double(r.wall_time_s) << ','
        << r.solver_iterations << ',' << r.error << '\n';
  }
  if (!out) throw IoError("failed while writing report: " + path);

  nlohmann::json meta;
  meta["version"] = TOR_VERSION_STRING;
  meta["dataset"] = plan.source.id;
  meta["seeds"] = plan.seeds;
  meta["sizes"] = plan.sizes;
  meta["folds"] = plan.folds;
  meta["grid_exponents"] = plan.grid_exponents;
  meta["kernel"] = kernel_name(plan.base_config.kernel.variant);
  meta["loss"] = loss_name(plan.base_config.loss);
  meta["c2_initial"] = plan.base_config.c2_initial;
  meta["c2_multiplier"] = plan.base_config.c2_multiplier;
  std::vector<std::string> methods;
  for (Method m : plan.methods) methods.push_back(method_name(m));
  meta["methods"] = methods;
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& a : report.aggregates()) {
    aggs.push_back({{"dataset", a.dataset},
                    {"n_labeled", a.n_labeled},
                    {"method", a.method},
                    {"mean_zero_one_mean", a.zero_one_mean},
                    {"mean_zero_one_std", a.zero_one_std},
                    {"mean_absolute_mean", a.mae_mean},
                    {"mean_absolute_std", a.mae_std},
                    {"runs", a.runs}});
  }
  meta["aggregates"] = aggs;
  std::ofstream mout(path + ".meta.json");
  if (!mout) throw IoError("cannot write report metadata: " + path + ".meta.json");
  mout << meta.dump(2) << '\n';
}

inline EvalReport parse_report(std::istream& in) {
  EvalReport report;
  std::string line;
  if (!std::getline(in, line)) throw IoError("report: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 10) throw IoError("report: malformed row '" + line + "'");
    EvalRow r;
    r.dataset = fields[0];
    r.seed = std::stoull(fields[1]);
    r.n_labeled = std::stoi(fields[2]);
    r.method = fields[3];
    r.c1 = std::stod(fields[4]);
    r.zero_one = std::stod(fields[5]);
    r.mae = std::stod(fields[6]);
    r.wall_time_s = std::stod(fields[7]);
    r.solver_iterations = std::stoll(fields[8]);
    r.error = fields[9];
    report.rows.push_back(std::move(r));
  }
  return report;
}

}  // namespace tor
