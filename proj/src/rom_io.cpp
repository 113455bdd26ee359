// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/rom_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rpo/errors.hpp"

namespace rpo {

using nlohmann::json;

namespace {

json factor_to_json(const Factor& f) {
  return json{{"input", f.input}, {"grid", f.grid}, {"values", f.values}};
}

// Typed field access with a dotted path in every diagnostic.
const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw FormatError(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(path + ": missing field '" + key + "'");
  return *it;
}

double real(const json& v, const std::string& path) {
  if (!v.is_number()) throw FormatError(path + ": expected a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw FormatError(path + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> reals(const json& v, const std::string& path) {
  if (!v.is_array()) throw FormatError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(real(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Converts a parse_error byte offset into "line L, column C".
std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string rom_to_string(const RomModel& model) {
  json params = json::array();
  for (const auto& s : model.space().specs())
    params.push_back({{"name", s.name},
                      {"role", std::string(to_string(s.role))},
                      {"lower", s.lower},
                      {"upper", s.upper},
                      {"unit", s.unit}});
  json outputs = json::object();
  for (const auto& [name, terms] : model.outputs()) {
    json arr = json::array();
    for (const auto& t : terms) {
      json fs = json::array();
      for (const auto& f : t.factors) fs.push_back(factor_to_json(f));
      arr.push_back({{"weight", t.weight}, {"factors", std::move(fs)}});
    }
    outputs[name] = std::move(arr);
  }
  const auto& g = model.geometry();
  json doc = {{"format_version", kRomFormatVersion},
              {"line_length_m", model.line_length()},
              {"parameters", std::move(params)},
              {"outputs", std::move(outputs)},
              {"metadata",
               {{"gauged_geometry", {{"x0_1", g.x0_1}, {"y0_1", g.y0_1}, {"x0_2", g.x0_2}, {"y0_2", g.y0_2}}}}}};
  return doc.dump(1) + "\n";
}

RomModel rom_from_string(std::string_view text_in) {
  json doc;
  try {
    doc = json::parse(text_in.begin(), text_in.end());
  } catch (const json::parse_error& e) {
    throw FormatError("ROM file syntax error at " + locate(text_in, e.byte) + ": " + e.what());
  }

  const json& version = field(doc, "format_version", "$");
  if (!version.is_number_integer() || version.get<int>() != kRomFormatVersion)
    throw FormatError("$.format_version: unsupported version (expected " +
                      std::to_string(kRomFormatVersion) + ")");
  const double line_length = real(field(doc, "line_length_m", "$"), "$.line_length_m");

  const json& jparams = field(doc, "parameters", "$");
  if (!jparams.is_array()) throw FormatError("$.parameters: expected an array");
  std::vector<ParameterSpec> specs;
  for (std::size_t i = 0; i < jparams.size(); ++i) {
    const std::string at = "$.parameters[" + std::to_string(i) + "]";
    const json& jp = jparams[i];
    ParameterSpec s;
    s.name = text(field(jp, "name", at), at + ".name");
    s.role = role_from_string(text(field(jp, "role", at), at + ".role"));
    s.lower = real(field(jp, "lower", at), at + ".lower");
    s.upper = real(field(jp, "upper", at), at + ".upper");
    if (jp.contains("unit")) s.unit = text(jp["unit"], at + ".unit");
    specs.push_back(std::move(s));
  }
  ParameterSpace space = [&] {
    try {
      return ParameterSpace(std::move(specs));
    } catch (const DomainError& e) {
      throw FormatError(std::string("$.parameters: ") + e.what());
    }
  }();

  const json& jgeo = field(field(doc, "metadata", "$"), "gauged_geometry", "$.metadata");
  const std::string gat = "$.metadata.gauged_geometry";
  GaugedGeometry geo{real(field(jgeo, "x0_1", gat), gat + ".x0_1"),
                     real(field(jgeo, "y0_1", gat), gat + ".y0_1"),
                     real(field(jgeo, "x0_2", gat), gat + ".x0_2"),
                     real(field(jgeo, "y0_2", gat), gat + ".y0_2")};

  const json& jouts = field(doc, "outputs", "$");
  if (!jouts.is_object()) throw FormatError("$.outputs: expected an object");
  std::map<std::string, Expansion, std::less<>> outputs;
  for (const auto& [name, jterms] : jouts.items()) {
    const std::string at = "$.outputs." + name;
    if (!jterms.is_array()) throw FormatError(at + ": expected an array of terms");
    Expansion terms;
    for (std::size_t m = 0; m < jterms.size(); ++m) {
      const std::string tat = at + "[" + std::to_string(m) + "]";
      Term t;
      t.weight = real(field(jterms[m], "weight", tat), tat + ".weight");
      const json& jf = field(jterms[m], "factors", tat);
      if (!jf.is_array()) throw FormatError(tat + ".factors: expected an array");
      for (std::size_t n = 0; n < jf.size(); ++n) {
        const std::string fat = tat + ".factors[" + std::to_string(n) + "]";
        Factor f;
        f.input = text(field(jf[n], "input", fat), fat + ".input");
        f.grid = reals(field(jf[n], "grid", fat), fat + ".grid");
        f.values = reals(field(jf[n], "values", fat), fat + ".values");
        t.factors.push_back(std::move(f));
      }
      terms.push_back(std::move(t));
    }
    outputs.emplace(name, std::move(terms));
  }

  try {
    return RomModel(line_length, std::move(space), geo, std::move(outputs));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("$: ") + e.what());
  }
}

void save_rom(const RomModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << rom_to_string(model);
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

RomModel load_rom(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open ROM file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return rom_from_string(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace rpo
