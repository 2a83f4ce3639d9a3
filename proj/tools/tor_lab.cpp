// tor-lab: train/predict/synth/cv/bench driver for transductive ordinal
// regression on libsvm-style data (label 0 marks unlabeled rows).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tor/cross_validation.hpp"
#include "tor/experiment.hpp"
#include "tor/libsvm_io.hpp"
#include "tor/model_io.hpp"
#include "tor/synth.hpp"
#include "tor/train.hpp"
#include "tor/transductive.hpp"
#include "tor/version.hpp"

namespace {

// exit codes: 1 config, 2 parse/data, 3 solver, 4 io
constexpr int kExitConfig = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

tor::LossKind parse_loss(const std::string& s) {
  if (s == "hinge") return tor::LossKind::hinge;
  if (s == "square-hinge") return tor::LossKind::square_hinge;
  if (s == "logistic") return tor::LossKind::logistic;
  if (s == "square") return tor::LossKind::square;
  if (s == "laplacian") return tor::LossKind::laplacian;
  throw CLI::ValidationError("--loss", "unknown loss '" + s + "'");
}

tor::KernelKind parse_kernel(const std::string& s, double delta_p) {
  if (s == "linear") return tor::KernelKind::linear();
  if (s == "perceptron") return tor::KernelKind::perceptron(delta_p);
  if (s == "cosine") return tor::KernelKind::cosine();
  throw CLI::ValidationError("--kernel", "unknown kernel '" + s + "'");
}

tor::SolverChoice parse_solver(const std::string& s) {
  if (s == "auto") return tor::SolverChoice::automatic;
  if (s == "smo") return tor::SolverChoice::smo;
  if (s == "primal") return tor::SolverChoice::primal;
  throw CLI::ValidationError("--solver", "unknown solver '" + s + "'");
}

std::size_t cache_bytes_from_env_or(double megabytes) {
  if (megabytes <= 0.0) {
    if (const char* env = std::getenv("TOR_LAB_CACHE_MB")) megabytes = std::atof(env);
  }
  if (megabytes <= 0.0) return tor::GramRowCache::kDefaultBudget;
  return static_cast<std::size_t>(megabytes * 1048576.0);
}

tor::OrdinalDataset load_dataset(const std::string& path, int classes, int dim) {
  std::ifstream in(path);
  if (!in) throw tor::IoError("cannot open data file: " + path);
  return tor::parse_libsvm(in, tor::ParseOptions{dim, classes});
}

void write_trace_csv(const tor::TransductionTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw tor::IoError("cannot write trace: " + path);
  out << "stage,c2,iteration,objective,swap_i,swap_j,k,gain\n";
  for (std::size_t s = 0; s < trace.stages.size(); ++s) {
    const auto& stage = trace.stages[s];
    for (std::size_t r = 0; r < stage.rounds.size(); ++r) {
      const auto& round = stage.rounds[r];
      if (round.swaps.empty()) {
        out << s << ',' << tor::format_double(stage.c2) << ',' << r << ','
            << tor::format_double(round.objective) << ",,,,\n";
      } else {
        for (const auto& ev : round.swaps)
          out << s << ',' << tor::format_double(stage.c2) << ',' << r << ','
              << tor::format_double(round.objective) << ',' << ev.i << ',' << ev.j << ','
              << ev.k << ',' << tor::format_double(ev.gain) << '\n';
      }
    }
  }
}

std::vector<int> parse_int_list(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (const auto& s : items) out.push_back(std::stoi(s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transductive ordinal regression lab (v" TOR_VERSION_STRING ")"};
  app.require_subcommand(1);

  std::string data_path, model_path, out_path, train_bundle, trace_path, labels_path;
  std::string mode = "supervised", loss_name = "hinge", kernel_name = "linear",
              solver_name = "auto";
  double c1 = 1.0, c2_init = 1e-5, c2_mult = 2.0, delta_p = 0.0, tol = 1e-3;
  double p = 0.0, cache_mb = 0.0;
  long long max_iter = 10'000'000;
  int epochs = 50, classes = 0, dim = 0, n_samples = 1000, folds = 5;
  std::uint64_t seed = 0;

  auto* train = app.add_subcommand("train", "train a model on a libsvm file");
  train->add_option("--data", data_path, "libsvm data file (label 0 = unlabeled)")->required();
  train->add_option("--mode", mode, "supervised|transductive")->capture_default_str();
  train->add_option("--c1", c1, "labeled-data cost C1")->capture_default_str();
  train->add_option("--c2-init", c2_init, "initial unlabeled cost C2")->capture_default_str();
  train->add_option("--c2-mult", c2_mult, "C2 stage multiplier")->capture_default_str();
  train->add_option("--loss", loss_name, "hinge|square-hinge|logistic|square|laplacian")
      ->capture_default_str();
  train->add_option("--kernel", kernel_name, "linear|perceptron|cosine")->capture_default_str();
  train->add_option("--delta-p", delta_p, "perceptron kernel offset")->capture_default_str();
  train->add_option("--solver", solver_name, "auto|smo|primal")->capture_default_str();
  train->add_option("--tol", tol, "SMO KKT tolerance")->capture_default_str();
  train->add_option("--max-iter", max_iter, "SMO pair-update cap")->capture_default_str();
  train->add_option("--epochs", epochs, "primal epochs")->capture_default_str();
  train->add_option("--seed", seed, "RNG seed")->capture_default_str();
  train->add_option("--classes", classes, "class count K (default: max label)");
  train->add_option("--dim", dim, "feature dimension (default: max index)");
  train->add_option("--cache-mb", cache_mb, "gram row cache budget (MiB)");
  train->add_option("--model-out", model_path, "write the model here");
  train->add_option("--train-out", train_bundle,
                    "bundled training-set file for dual models (default <model>.train)");
  train->add_option("--labels-out", labels_path, "write transductive pseudo-labels here");
  train->add_option("--trace-out", trace_path, "write the transduction trace CSV here");

  auto* predict_cmd = app.add_subcommand("predict", "predict labels with a saved model");
  predict_cmd->add_option("--model", model_path, "model file")->required();
  predict_cmd->add_option("--data", data_path, "libsvm data file")->required();
  predict_cmd->add_option("--out", out_path, "output file (default stdout)");

  auto* synth = app.add_subcommand("synth", "generate a cluster-assumption dataset");
  synth->add_option("--classes", classes, "class count K")->required();
  synth->add_option("--p", p, "cluster-assumption weakening in [0,1]")->capture_default_str();
  synth->add_option("--n", n_samples, "sample count")->capture_default_str();
  synth->add_option("--seed", seed, "RNG seed")->capture_default_str();
  synth->add_option("--out", out_path, "output libsvm file")->required();

  std::vector<std::string> grid_opt;
  auto* cv = app.add_subcommand("cv", "pick C1 by stratified cross-validation");
  cv->add_option("--data", data_path, "libsvm data file")->required();
  cv->add_option("--grid", grid_opt, "log10 C1 grid exponents (default -3..5)");
  cv->add_option("--folds", folds, "fold count")->capture_default_str();
  cv->add_option("--loss", loss_name)->capture_default_str();
  cv->add_option("--kernel", kernel_name)->capture_default_str();
  cv->add_option("--delta-p", delta_p)->capture_default_str();
  cv->add_option("--seed", seed)->capture_default_str();
  cv->add_option("--classes", classes);
  cv->add_option("--dim", dim);
  cv->add_option("--tol", tol)->capture_default_str();
  cv->add_option("--epochs", epochs)->capture_default_str();

  std::vector<std::string> p_list, sizes_opt, seeds_opt, methods_opt;
  std::string bench_id = "synthetic";
  auto* bench = app.add_subcommand("bench", "run an experiment plan and emit a CSV report");
  bench->add_option("--data", data_path, "libsvm pool (labeled rows only are used)");
  bench->add_option("--id", bench_id, "dataset id for report rows")->capture_default_str();
  bench->add_option("--synth-k", classes, "synthetic class count (omit --data to synthesize)");
  bench->add_option("--synth-p", p_list, "synthetic p values (one plan per value)");
  bench->add_option("--n-samples", n_samples, "synthetic pool size")->capture_default_str();
  bench->add_option("--sizes", sizes_opt, "labeled sizes (default 100..400 step 50)");
  bench->add_option("--seeds", seeds_opt, "seed list (default 1..5)");
  bench->add_option("--grid", grid_opt, "log10 C1 grid exponents");
  bench->add_option("--methods", methods_opt, "supervised and/or transductive");
  bench->add_option("--folds", folds)->capture_default_str();
  bench->add_option("--loss", loss_name)->capture_default_str();
  bench->add_option("--kernel", kernel_name)->capture_default_str();
  bench->add_option("--delta-p", delta_p)->capture_default_str();
  bench->add_option("--c2-init", c2_init)->capture_default_str();
  bench->add_option("--c2-mult", c2_mult)->capture_default_str();
  bench->add_option("--tol", tol)->capture_default_str();
  bench->add_option("--epochs", epochs)->capture_default_str();
  bench->add_option("--out", out_path, "report CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    tor::TrainConfig cfg;
    cfg.c1 = c1;
    cfg.loss = parse_loss(loss_name);
    cfg.kernel = parse_kernel(kernel_name, delta_p);
    cfg.solver = parse_solver(solver_name);
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.epochs = epochs;
    cfg.seed = seed;
    cfg.c2_initial = c2_init;
    cfg.c2_multiplier = c2_mult;
    cfg.cache_bytes = cache_bytes_from_env_or(cache_mb);

    if (train->parsed()) {
      tor::OrdinalDataset ds = load_dataset(data_path, classes, dim);
      if (mode == "supervised") {
        tor::OrdinalModel model = tor::train_supervised(cfg, ds);
        for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << "trained supervised model: K=" << model.num_classes
                  << " dim=" << model.dim << " objective=" << model.train_objective
                  << " iterations=" << model.solver_iterations << '\n';
        if (!model_path.empty()) {
          std::string bundle;
          if (model.form == tor::ModelForm::dual) {
            bundle = train_bundle.empty() ? model_path + ".train" : train_bundle;
            std::ofstream bout(bundle);
            if (!bout) throw tor::IoError("cannot write training bundle: " + bundle);
            tor::OrdinalDataset labeled_only = ds;
            labeled_only.unlabeled.clear();
            tor::write_libsvm(bout, labeled_only);
          }
          tor::save_model(model, model_path, bundle);
        }
        if (!model.converged) return kExitSolver;
      } else if (mode == "transductive") {
        if (ds.u() == 0)
          throw std::invalid_argument("transductive mode needs unlabeled rows (label 0)");
        tor::TransductionResult res = tor::train_transductive(cfg, ds);
        for (const auto& w : res.pseudo.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << "transduction finished: stages=" << res.trace.stages.size()
                  << " solver_iterations=" << res.trace.total_solver_iterations << '\n';
        if (!labels_path.empty()) {
          std::ofstream lout(labels_path);
          if (!lout) throw tor::IoError("cannot write labels: " + labels_path);
          for (int y : res.pseudo.labels) lout << y << '\n';
        }
        if (!trace_path.empty()) write_trace_csv(res.trace, trace_path);
        if (!model_path.empty()) {
          std::string bundle;
          if (res.model.form == tor::ModelForm::dual) {
            bundle = train_bundle.empty() ? model_path + ".train" : train_bundle;
            std::ofstream bout(bundle);
            if (!bout) throw tor::IoError("cannot write training bundle: " + bundle);
            tor::write_libsvm(bout, ds);
          }
          tor::save_model(res.model, model_path, bundle);
        }
      } else {
        throw std::invalid_argument("--mode must be supervised or transductive");
      }
    } else if (predict_cmd->parsed()) {
      tor::OrdinalModel model = tor::load_model(model_path);
      tor::OrdinalDataset ds = load_dataset(data_path, model.num_classes, model.dim);
      std::ostream* os = &std::cout;
      std::ofstream fout;
      if (!out_path.empty()) {
        fout.open(out_path);
        if (!fout) throw tor::IoError("cannot write predictions: " + out_path);
        os = &fout;
      }
      for (const auto& x : ds.labeled) (*os) << tor::predict(model, x) << '\n';
      for (const auto& x : ds.unlabeled) (*os) << tor::predict(model, x) << '\n';
    } else if (synth->parsed()) {
      tor::SynthConfig scfg;
      scfg.num_classes = classes;
      scfg.p = p;
      scfg.n_samples = n_samples;
      scfg.seed = seed;
      tor::OrdinalDataset ds = tor::gen_synthetic(scfg);
      std::ofstream sout(out_path);
      if (!sout) throw tor::IoError("cannot write dataset: " + out_path);
      tor::write_libsvm(sout, ds);
      std::cout << "wrote " << ds.n() << " samples, dim=" << ds.dim << '\n';
    } else if (cv->parsed()) {
      tor::OrdinalDataset ds = load_dataset(data_path, classes, dim);
      std::vector<int> grid = grid_opt.empty() ? std::vector<int>{-3, -2, -1, 0, 1, 2, 3, 4, 5}
                                               : parse_int_list(grid_opt);
      tor::CvResult res = tor::cross_validate_c1(cfg, ds.labeled, ds.labels, ds.num_classes,
                                                 ds.dim, grid, folds, seed);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      for (std::size_t g = 0; g < res.grid.size(); ++g)
        std::cout << "c1=" << res.grid[g] << " mean_zero_one=" << res.mean_errors[g] << '\n';
      std::cout << "chosen c1=" << res.c1 << '\n';
    } else if (bench->parsed()) {
      tor::ExperimentPlan plan;
      plan.base_config = cfg;
      plan.folds = folds;
      if (!grid_opt.empty()) plan.grid_exponents = parse_int_list(grid_opt);
      if (!sizes_opt.empty()) plan.sizes = parse_int_list(sizes_opt);
      if (!seeds_opt.empty()) {
        plan.seeds.clear();
        for (const auto& s : seeds_opt) plan.seeds.push_back(std::stoull(s));
      }
      if (!methods_opt.empty()) {
        plan.methods.clear();
        for (const auto& m : methods_opt) {
          if (m == "supervised") plan.methods.push_back(tor::Method::supervised);
          else if (m == "transductive") plan.methods.push_back(tor::Method::transductive);
          else throw std::invalid_argument("unknown method '" + m + "'");
        }
      }

      tor::EvalReport all;
      if (!data_path.empty()) {
        plan.source.kind = tor::DatasetSource::Kind::file;
        plan.source.path = data_path;
        plan.source.id = bench_id;
        all = tor::run_experiment(plan);
      } else {
        if (classes < 2) throw std::invalid_argument("--synth-k is required without --data");
        std::vector<double> ps;
        for (const auto& s : p_list) ps.push_back(std::stod(s));
        if (ps.empty()) ps.push_back(p);
        for (double pv : ps) {
          plan.source.kind = tor::DatasetSource::Kind::synthetic;
          plan.source.synth.num_classes = classes;
          plan.source.synth.p = pv;
          plan.source.synth.n_samples = n_samples;
          std::ostringstream id;
          id << bench_id << "-p" << pv;
          plan.source.id = id.str();
          tor::EvalReport part = tor::run_experiment(plan);
          all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
        }
      }
      tor::emit_report(all, plan, out_path);
      std::cout << "wrote " << all.rows.size() << " rows to " << out_path << '\n';
      for (const auto& a : all.aggregates())
        std::cout << a.dataset << " n=" << a.n_labeled << ' ' << a.method
                  << " zero_one=" << a.zero_one_mean << "+-" << a.zero_one_std
                  << " mae=" << a.mae_mean << "+-" << a.mae_std << '\n';
    }
  } catch (const tor::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const tor::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const tor::UnsupportedConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
