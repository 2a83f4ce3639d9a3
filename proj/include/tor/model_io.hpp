#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "tor/libsvm_io.hpp"
#include "tor/model.hpp"
#include "tor/version.hpp"

namespace tor {

// Versioned flat model record. Dual-form models reference their training
// samples by index into a bundled libsvm file (labeled rows first, then
// unlabeled, matching the canonical sample order used in training).
inline void save_model(const OrdinalModel& model, const std::string& path,
                       const std::string& train_file = "") {
  nlohmann::json j;
  j["format_version"] = 1;
  j["tool_version"] = TOR_VERSION_STRING;
  j["num_classes"] = model.num_classes;
  j["dim"] = model.dim;
  j["kernel"] = kernel_name(model.kernel.variant);
  j["delta_p"] = model.kernel.delta_p;
  j["theta"] = model.thresholds.values;
  j["bias"] = model.bias;
  j["converged"] = model.converged;
  if (model.form == ModelForm::primal_dense) {
    j["form"] = "primal";
    j["weight"] = model.weight;
  } else {
    j["form"] = "dual";
    if (train_file.empty())
      throw std::invalid_argument("save_model: dual-form models need a bundled training-set file");
    j["train_file"] = train_file;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : model.support)
      entries.push_back({e.sample, e.k, static_cast<int>(e.y), e.alpha});
    j["support"] = entries;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed while writing model: " + path);
}

inline OrdinalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format_version", 0) != 1)
    throw std::runtime_error("unsupported model format version in " + path);

  OrdinalModel model;
  model.num_classes = j.at("num_classes").get<int>();
  model.dim = j.at("dim").get<int>();
  const std::string kernel = j.at("kernel").get<std::string>();
  if (kernel == "linear") model.kernel = KernelKind::linear();
  else if (kernel == "perceptron") model.kernel = KernelKind::perceptron(j.value("delta_p", 0.0));
  else if (kernel == "cosine") model.kernel = KernelKind::cosine();
  else throw std::runtime_error("unknown kernel '" + kernel + "' in " + path);
  model.thresholds.values = j.at("theta").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  model.converged = j.value("converged", true);

  const std::string form = j.at("form").get<std::string>();
  if (form == "primal") {
    model.form = ModelForm::primal_dense;
    model.weight = j.at("weight").get<std::vector<double>>();
  } else if (form == "dual") {
    model.form = ModelForm::dual;
    const std::string train_file = j.at("train_file").get<std::string>();
    std::ifstream tin(train_file);
    if (!tin) throw std::runtime_error("cannot open bundled training set: " + train_file);
    OrdinalDataset ds = parse_libsvm(tin, ParseOptions{model.dim, model.num_classes});
    auto samples = std::make_shared<std::vector<SparseVector>>(std::move(ds.labeled));
    samples->insert(samples->end(), ds.unlabeled.begin(), ds.unlabeled.end());
    model.train_samples = std::shared_ptr<const std::vector<SparseVector>>(samples);
    for (const auto& e : j.at("support")) {
      SupportEntry s;
      s.sample = e.at(0).get<int>();
      s.k = e.at(1).get<int>();
      s.y = static_cast<std::int8_t>(e.at(2).get<int>());
      s.alpha = e.at(3).get<double>();
      if (s.sample < 0 || static_cast<std::size_t>(s.sample) >= model.train_samples->size())
        throw std::runtime_error("model references a sample outside the bundled training set");
      model.support.push_back(s);
    }
  } else {
    throw std::runtime_error("unknown model form '" + form + "' in " + path);
  }
  return model;
}

}  // namespace tor
