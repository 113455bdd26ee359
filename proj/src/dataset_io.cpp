// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "rpo/errors.hpp"
#include "rpo/pipeline.hpp"

namespace rpo {

void write_dataset_csv(std::ostream& out, const TrainingDataset& data) {
  if (data.input_names.empty() || data.input_names.front() != "position")
    throw FormatError("dataset inputs must start with position");
  out << "position_m";
  for (std::size_t j = 1; j < data.input_names.size(); ++j) out << ',' << data.input_names[j];
  out << ",output,value_mm\n";
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.inputs.cols(); ++j)
      out << (j ? "," : "") << format_real(data.inputs(i, j));
    out << ',' << data.output_names[static_cast<std::size_t>(data.output_of_row[static_cast<std::size_t>(i)])]
        << ',' << format_real(data.values[i]) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  for (char ch : line) {
    if (ch == ',')
      out.emplace_back();
    else if (ch != '\r')
      out.back() += ch;
  }
  return out;
}

double parse_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end)
    throw FormatError("dataset line " + std::to_string(line) + ": '" + s + "' is not a number");
  return v;
}

}  // namespace

TrainingDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset is empty");
  const auto header = split(line);
  if (header.size() < 3 || header.front() != "position_m" || header[header.size() - 2] != "output" ||
      header.back() != "value_mm")
    throw FormatError("dataset header must be position_m,<parameters...>,output,value_mm");
  TrainingDataset d;
  d.input_names.push_back("position");
  d.input_names.insert(d.input_names.end(), header.begin() + 1, header.end() - 2);
  const std::size_t ni = d.input_names.size();
  std::vector<double> inputs, values;
  for (std::size_t no = 2; std::getline(in, line); ++no) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != header.size())
      throw FormatError("dataset line " + std::to_string(no) + " has " + std::to_string(f.size()) +
                        " fields, expected " + std::to_string(header.size()));
    for (std::size_t j = 0; j < ni; ++j) inputs.push_back(parse_real(f[j], no));
    const std::string& name = f[ni];
    auto it = std::find(d.output_names.begin(), d.output_names.end(), name);
    if (it == d.output_names.end()) {
      if (name.empty()) throw FormatError("dataset line " + std::to_string(no) + " has no output name");
      d.output_names.push_back(name);
      it = d.output_names.end() - 1;
    }
    d.output_of_row.push_back(static_cast<int>(it - d.output_names.begin()));
    values.push_back(parse_real(f[ni + 1], no));
  }
  const auto rows = static_cast<Eigen::Index>(values.size());
  d.inputs = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      inputs.data(), rows, static_cast<Eigen::Index>(ni));
  d.values = Eigen::Map<const Vec>(values.data(), rows);
  return d;
}

}  // namespace rpo
