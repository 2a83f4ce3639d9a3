#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tor/dataset.hpp"

namespace tor {

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct ParseOptions {
  int dim_override = 0;  // 0: use max index seen
  int k_override = 0;    // 0: use max label seen (at least 2)
};

// libsvm-style text: "label idx:val idx:val ..." with 1-based strictly
// increasing indices. Label 0 marks an unlabeled row. '#' starts a comment
// line; blank lines are skipped.
inline OrdinalDataset parse_libsvm(std::istream& in, const ParseOptions& opts = {}) {
  OrdinalDataset ds;
  int max_index = 0;
  int max_label = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream row(line);
    std::string token;
    if (!(row >> token)) continue;

    int label = 0;
    try {
      std::size_t used = 0;
      label = std::stoi(token, &used);
      if (used != token.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad label token '" + token + "'");
    }
    if (label < 0) throw ParseError(line_no, "negative label");

    SparseVector x;
    int prev_index = 0;
    while (row >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= token.size())
        throw ParseError(line_no, "bad feature token '" + token + "'");
      int idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = std::stoi(token.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
        used = 0;
        const std::string vs = token.substr(colon + 1);
        val = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad feature token '" + token + "'");
      }
      if (idx < 1) throw ParseError(line_no, "feature index must be >= 1");
      if (idx <= prev_index) throw ParseError(line_no, "feature indices must strictly increase");
      prev_index = idx;
      if (val != 0.0) x.entries.push_back({idx - 1, val});
      if (idx > max_index) max_index = idx;
    }

    if (label == 0) {
      ds.unlabeled.push_back(std::move(x));
    } else {
      ds.labeled.push_back(std::move(x));
      ds.labels.push_back(label);
      if (label > max_label) max_label = label;
    }
  }

  ds.dim = opts.dim_override > 0 ? opts.dim_override : max_index;
  ds.num_classes = opts.k_override > 0 ? opts.k_override : std::max(2, max_label);
  for (auto& x : ds.labeled) x.dim = ds.dim;
  for (auto& x : ds.unlabeled) x.dim = ds.dim;
  ds.validate();
  return ds;
}

inline void write_libsvm_row(std::ostream& out, int label, const SparseVector& x) {
  out << label;
  char buf[40];
  for (const auto& e : x.entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.value);
    out << ' ' << (e.index + 1) << ':' << buf;
  }
  out << '\n';
}

// Labeled rows first, then unlabeled rows with label 0.
inline void write_libsvm(std::ostream& out, const OrdinalDataset& ds) {
  for (std::size_t i = 0; i < ds.labeled.size(); ++i)
    write_libsvm_row(out, ds.labels[i], ds.labeled[i]);
  for (const auto& x : ds.unlabeled) write_libsvm_row(out, 0, x);
}

}  // namespace tor
