// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "rpo/config.hpp"
#include "rpo/dataset_io.hpp"
#include "rpo/errors.hpp"
#include "rpo/pipeline.hpp"
#include "rpo/plant.hpp"
#include "rpo/rom_fit.hpp"
#include "rpo/rom_io.hpp"

#ifndef RPO_VERSION
#define RPO_VERSION "unknown"
#endif

namespace rpo {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fingerprint(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_label(bytes)));
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Collects output files and writes the manifest that describes them.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  template <class Fn>
  void write(const std::string& name, Fn&& fill) {
    std::ostringstream s;
    fill(s);
    put(name, s.str());
    outputs_.push_back({{"file", name}, {"fnv1a64", fingerprint(s.str())}});
  }

  void input(const std::string& role, const fs::path& path, std::string_view bytes) {
    inputs_.push_back({{"role", role}, {"path", path.string()}, {"fnv1a64", fingerprint(bytes)}});
  }

  void manifest(json m) {
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    put("manifest.json", m.dump(2) + "\n");
  }

  const fs::path& path() const { return dir_; }

 private:
  void put(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << text;
    if (!f) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
  }

  fs::path dir_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

json manifest_base(const std::string& command, const std::vector<std::string>& args) {
  return {{"tool", "rpo"},
          {"version", RPO_VERSION},
          {"command", command},
          {"arguments", args},
          {"build",
           {{"compiler", __VERSION__},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}}}};
}

double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

Vec parse_controls(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) v.push_back(parse_number(item, "--controls"));
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Options shared by the commands that build a Problem from a ROM and a RunConfig.
struct PipelineFlags {
  std::string rom;
  std::string config;
  std::string out_dir = ".";
  std::string seed, method, profile, setpoint;
  int restarts = 0, budget = 0, initial_design = 0, mc_samples = 0, workers = 0;
  double q = 0.0, alpha = 0.0;
  std::vector<std::pair<CLI::Option*, std::string>> set;

  void attach(CLI::App* app, bool search) {
    app->add_option("--rom", rom, "ROM file (JSON)")->required();
    app->add_option("--config", config, "Run configuration (JSON) or a previous manifest.json");
    app->add_option("--out-dir", out_dir, "Directory for CSV outputs and manifest.json");
    set.emplace_back(app->add_option("--seed", seed, "Master seed (default: RPO_SEED or 0)"), "seed");
    set.emplace_back(app->add_option("--mc-samples", mc_samples, "Monte-Carlo samples per evaluation"),
                     "mc_samples");
    set.emplace_back(app->add_option("--q", q, "Selection percentile level in (0, 1]"), "q");
    set.emplace_back(app->add_option("--alpha", alpha, "Control penalty weight"), "alpha");
    set.emplace_back(app->add_option("--setpoint", setpoint, "Set point r in mm, or auto"), "setpoint");
    set.emplace_back(app->add_option("--workers", workers, "Worker threads"), "workers");
    set.emplace_back(app->add_option("--profile", profile, "ci or paper"), "profile");
    if (!search) return;
    set.emplace_back(app->add_option("--method", method, "bayes, simplex or both"), "method");
    set.emplace_back(app->add_option("--restarts", restarts, "Optimisation restarts"), "restarts");
    set.emplace_back(app->add_option("--budget", budget, "Objective evaluations per Bayesian run"), "budget");
    set.emplace_back(app->add_option("--initial-design", initial_design, "Initial design size"),
                     "initial_design");
  }

  json layer() const {
    json j = json::object();
    for (const auto& [opt, key] : set) {
      if (opt->count() == 0) continue;
      if (key == "seed") j[key] = seed;
      else if (key == "method") j[key] = method;
      else if (key == "profile") j[key] = profile;
      else if (key == "setpoint") j[key] = setpoint == "auto" ? json("auto") : json(parse_number(setpoint, "--setpoint"));
      else if (key == "restarts") j[key] = restarts;
      else if (key == "budget") j[key] = budget;
      else if (key == "initial_design") j[key] = initial_design;
      else if (key == "mc_samples") j[key] = mc_samples;
      else if (key == "workers") j[key] = workers;
      else if (key == "q") j[key] = q;
      else if (key == "alpha") j[key] = alpha;
    }
    return j;
  }
};

// ROM, resolved configuration and the problem built from them.
struct Session {
  std::unique_ptr<RomModel> rom;
  RunConfig config;
  Problem problem;
  OutputDir out;
  RandomStream master{0};

  Session(const PipelineFlags& flags, const std::optional<std::string>& env_seed) : out(flags.out_dir) {
    std::vector<std::pair<std::string, json>> layers;
    if (!flags.config.empty()) {
      const std::string text = read_file(flags.config);
      json file;
      try {
        file = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError("config '" + flags.config + "': " + e.what());
      }
      // A manifest carries the resolved configuration of the run it describes.
      if (file.is_object() && file.value("tool", "") == "rpo" && file.contains("config")) file = file["config"];
      layers.emplace_back("config", file);
      out.input("config", flags.config, text);
    }
    layers.emplace_back("flag", flags.layer());
    config = resolve_config(layers, env_seed);
    master = RandomStream(config.seed);

    const std::string rom_text = read_file(flags.rom);
    rom = std::make_unique<RomModel>(rom_from_string(rom_text));
    out.input("rom", flags.rom, rom_text);

    problem.model = rom.get();
    problem.geometry = config.geometry.value_or(rom->geometry());
    problem.uncertainty = extrusion_line_uncertainty(rom->space());
    problem.spec.alpha = config.alpha;
    problem.spec.stations = config.stations;
    problem.spec.setpoint =
        config.setpoint ? *config.setpoint : auto_setpoint(*rom, problem.geometry, problem.uncertainty);
    if (!config.control_bounds.empty()) {
      const ParameterSpace& space = rom->space();
      Box box = space.controllable_box();
      const auto& ci = space.controllable_indices();
      for (const auto& [name, b] : config.control_bounds) {
        const auto it = std::find_if(ci.begin(), ci.end(), [&](std::size_t i) { return space[i].name == name; });
        if (it == ci.end()) throw DomainError("'" + name + "' is not a controllable parameter of the ROM");
        const auto k = static_cast<Eigen::Index>(it - ci.begin());
        box.lower[k] = b.first;
        box.upper[k] = b.second;
      }
      problem.controls = box;
    }
    problem.validate();
  }

  RestartOptions restart_options() const {
    RestartOptions o;
    o.bo.budget = config.budget;
    o.bo.initial_design = config.initial_design;
    o.workers = config.workers;
    return o;
  }

  std::vector<double> positions() const {
    return config.trajectory_positions.empty() ? default_trajectory_positions() : config.trajectory_positions;
  }

  void finish(const std::string& command, const std::vector<std::string>& args, json extra = json::object()) {
    json m = manifest_base(command, args);
    m["seed"] = config.seed;
    m["seed_source"] = config.seed_source;
    m["config"] = to_json(config);
    m["setpoint_mm"] = problem.spec.setpoint;
    m["streams"] = "master = RandomStream(seed); restarts of method m use derive(master, m, 0); "
                   "selection and evaluate use derive(master, \"select\", 0); trajectories use "
                   "derive(master, \"trajectory\", 0)";
    for (auto& [k, v] : extra.items()) m[k] = v;
    out.manifest(std::move(m));
  }
};

struct MethodOutcome {
  Method method;
  std::vector<RestartResult> runs;
  Selection selection;
  std::size_t chosen = 0;
  const CandidateEvaluation& best() const { return selection.evaluations[chosen]; }
};

MethodOutcome run_method(Session& s, Method m) {
  MethodOutcome r{m, run_restarts(s.problem, m, s.config.restarts, s.master.derive(to_string(m), 0),
                                  s.restart_options()),
                  {}, 0};
  r.selection = select_best(r.runs, s.problem, s.config.mc_samples, s.master.derive("select", 0),
                            s.config.workers, s.config.q);
  r.chosen = r.selection.best;
  if (m == Method::simplex) {
    const int id = simplex_representative(r.runs).run_id;
    const auto& ev = r.selection.evaluations;
    r.chosen = static_cast<std::size_t>(
        std::find_if(ev.begin(), ev.end(), [&](const auto& e) { return e.run_id == id; }) - ev.begin());
  }
  const std::string name(to_string(m));
  s.out.write(name + "_candidates.csv",
              [&](std::ostream& o) { write_candidates_csv(o, s.problem.space(), r.runs); });
  s.out.write(name + "_boxplot.csv", [&](std::ostream& o) { write_boxplot_csv(o, r.selection.evaluations); });
  return r;
}

void write_selection_csv(std::ostream& o, const ParameterSpace& space, const std::vector<MethodOutcome>& rs) {
  o << "method,run_id,q,risk,min,p1,p25,p50,p75,p99,max,mean,end_distance_p50_mm";
  for (std::size_t i : space.controllable_indices()) o << ',' << space[i].name;
  o << '\n';
  for (const auto& r : rs) {
    const auto& e = r.best();
    o << to_string(r.method) << ',' << e.run_id << ',' << format_real(e.q) << ',' << format_real(e.risk);
    for (double v : {e.cost.min, e.cost.p1, e.cost.p25, e.cost.p50, e.cost.p75, e.cost.p99, e.cost.max,
                     e.mean_cost, e.distance.p50})
      o << ',' << format_real(v);
    for (Eigen::Index k = 0; k < e.controls.size(); ++k) o << ',' << format_real(e.controls[k]);
    o << '\n';
  }
}

std::vector<Method> methods_of(const RunConfig& c) {
  if (c.method == "both") return {Method::bayes, Method::simplex};
  return {method_from_string(c.method)};
}

int cmd_optimize(const PipelineFlags& f, const std::vector<std::string>& args, std::ostream& out,
                 const std::optional<std::string>& env_seed, bool compare) {
  Session s(f, env_seed);
  if (compare) s.config.method = "both";
  std::vector<MethodOutcome> results;
  for (Method m : methods_of(s.config)) results.push_back(run_method(s, m));
  s.out.write("selection.csv", [&](std::ostream& o) { write_selection_csv(o, s.problem.space(), results); });
  if (compare) {
    std::vector<ComparisonRow> rows;
    for (const auto& r : results) rows.push_back({std::string(to_string(r.method)), r.best().risk, r.best().cost.p50});
    s.out.write("comparison.csv", [&](std::ostream& o) { write_comparison_csv(o, rows); });
    const auto pos = s.positions();
    for (const auto& r : results) {
      const auto bands = trajectory_bands(s.problem, r.best().controls, s.config.mc_samples, pos,
                                          s.master.derive("trajectory", 0), s.config.workers);
      s.out.write("bands_" + std::string(to_string(r.method)) + ".csv",
                  [&](std::ostream& o) { write_bands_csv(o, bands); });
    }
  }
  for (const auto& r : results) {
    const auto failed = std::count_if(r.runs.begin(), r.runs.end(), [](const auto& x) { return !x.ok; });
    out << to_string(r.method) << ": selected run " << r.best().run_id << ", P" << format_real(100 * s.config.q)
        << " cost " << format_real(r.best().risk) << ", median end-of-line distance "
        << format_real(r.best().distance.p50) << " mm (set point " << format_real(s.problem.spec.setpoint)
        << " mm), " << failed << " failed runs\n";
  }
  s.finish(compare ? "compare" : "optimize", args);
  return exit_ok;
}

int cmd_evaluate(const PipelineFlags& f, const std::string& controls, const std::vector<std::string>& args,
                 std::ostream& out, const std::optional<std::string>& env_seed) {
  Session s(f, env_seed);
  const Vec c = parse_controls(controls);
  const McSamples smp = mc_samples(s.problem, c, s.config.mc_samples, s.master.derive("select", 0), s.config.workers);
  s.out.write("samples.csv", [&](std::ostream& o) { write_samples_csv(o, smp); });
  const Quantiles qc = summarize(smp.cost), qd = summarize(smp.distance);
  const double risk = percentile(smp.cost, s.config.q);
  s.out.write("summary.csv", [&](std::ostream& o) {
    o << "quantity,min,p1,p25,p50,p75,p99,max\n";
    for (const auto& [name, q] : {std::pair{"cost", qc}, std::pair{"end_distance_mm", qd}}) {
      o << name;
      for (double v : {q.min, q.p1, q.p25, q.p50, q.p75, q.p99, q.max}) o << ',' << format_real(v);
      o << '\n';
    }
  });
  out << "P" << format_real(100 * s.config.q) << " cost " << format_real(risk) << ", median cost "
      << format_real(qc.p50) << ", median end-of-line distance " << format_real(qd.p50) << " mm\n";
  s.finish("evaluate", args, {{"controls", std::vector<double>(c.data(), c.data() + c.size())}});
  return exit_ok;
}

int cmd_trajectory(const PipelineFlags& f, const std::string& controls, const std::vector<std::string>& args,
                   std::ostream& out, const std::optional<std::string>& env_seed) {
  Session s(f, env_seed);
  const Vec c = parse_controls(controls);
  const auto bands = trajectory_bands(s.problem, c, s.config.mc_samples, s.positions(),
                                      s.master.derive("trajectory", 0), s.config.workers);
  s.out.write("bands.csv", [&](std::ostream& o) { write_bands_csv(o, bands); });
  out << "end-of-line median " << format_real(bands.bands.back().p50) << " mm, 1-99 band ["
      << format_real(bands.bands.back().p1) << ", " << format_real(bands.bands.back().p99) << "] mm\n";
  s.finish("trajectory", args, {{"controls", std::vector<double>(c.data(), c.data() + c.size())}});
  return exit_ok;
}

struct SynthFlags {
  std::size_t points = 50000;
  std::string seed;
  bool continuous = false;
  std::string out_dir = ".";
  CLI::Option* seed_opt = nullptr;
};

std::pair<std::uint64_t, std::string> seed_of(const std::string& flag, bool given,
                                              const std::optional<std::string>& env_seed) {
  json layer = json::object();
  if (given) layer["seed"] = flag;
  const RunConfig c = resolve_config({{"flag", layer}}, env_seed);
  return {c.seed, c.seed_source};
}

int cmd_synth(const SynthFlags& f, const std::vector<std::string>& args, std::ostream& out,
              const std::optional<std::string>& env_seed) {
  if (f.points < 1) throw ConfigError("--points must be >= 1");
  const auto [seed, source] = seed_of(f.seed, f.seed_opt->count() > 0, env_seed);
  const PlantSpec plant;
  RandomStream stream = RandomStream(seed).derive("dataset", 0);
  DatasetOptions opts;
  opts.grid_aligned = !f.continuous;
  const TrainingDataset data = generate_dataset(plant, f.points, stream, opts);
  OutputDir dir(f.out_dir);
  dir.write("dataset.csv", [&](std::ostream& o) { write_dataset_csv(o, data); });
  json m = manifest_base("synth-plant", args);
  m["seed"] = seed;
  m["seed_source"] = source;
  m["parameters"] = {{"points", f.points}, {"grid_aligned", opts.grid_aligned}, {"plant_version", plant.version},
                     {"stream", "derive(RandomStream(seed), \"dataset\", 0)"}};
  dir.manifest(std::move(m));
  out << data.rows() << " rows (" << f.points << " points, " << data.provenance << ")\n";
  return exit_ok;
}

struct FitFlags {
  std::string data;
  std::string out_dir = ".";
  std::size_t terms = 8, sweeps = 100, position_nodes = 64, parameter_nodes = 17, refine = 0;
  double tol = 1e-10;
  double line_length = 105.85;
};

int cmd_fit(const FitFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const std::string text = read_file(f.data);
  std::istringstream in(text);
  const TrainingDataset data = read_dataset_csv(in);
  const ParameterSpace space = ParameterSpace::extrusion_line();
  if (data.input_names.size() != space.size() + 1)
    throw FormatError("dataset has " + std::to_string(data.input_names.size() - 1) + " parameters, expected " +
                      std::to_string(space.size()));
  for (std::size_t j = 0; j < space.size(); ++j)
    if (data.input_names[j + 1] != space[j].name)
      throw FormatError("dataset column " + std::to_string(j + 2) + " is '" + data.input_names[j + 1] +
                        "', expected '" + space[j].name + "'");
  if (f.terms < 1 || f.sweeps < 1) throw ConfigError("--terms and --sweeps must be >= 1");
  if (f.position_nodes < 2 || f.parameter_nodes < 2) throw ConfigError("grids need at least 2 nodes");
  AlsOptions opts;
  opts.terms = f.terms;
  opts.max_sweeps = f.sweeps;
  opts.tol = f.tol;
  opts.refine_iterations = f.refine;
  const RomFit fit = fit_rom(data, space, f.line_length, GaugedGeometry{},
                             default_grids(space, f.line_length, f.position_nodes, f.parameter_nodes), opts);
  OutputDir dir(f.out_dir);
  dir.input("dataset", f.data, text);
  dir.write("rom.json", [&](std::ostream& o) { o << rom_to_string(fit.model); });
  dir.write("fit.csv", [&](std::ostream& o) {
    o << "output,rmse_mm\n";
    for (const auto& [name, rmse] : fit.rmse) o << name << ',' << format_real(rmse) << '\n';
  });
  json m = manifest_base("fit-rom", args);
  m["parameters"] = {{"terms", f.terms},
                     {"max_sweeps", f.sweeps},
                     {"tol", f.tol},
                     {"refine_iterations", f.refine},
                     {"position_nodes", f.position_nodes},
                     {"parameter_nodes", f.parameter_nodes},
                     {"line_length_m", f.line_length}};
  dir.manifest(std::move(m));
  for (const auto& [name, rmse] : fit.rmse) out << name << " training RMSE " << format_real(rmse) << " mm\n";
  return exit_ok;
}

int exit_code_of(const Error& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return exit_numerical;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const EmptyInputError*>(&e) ||
      dynamic_cast<const UnknownOutputError*>(&e))
    return exit_domain;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const FormatError*>(&e)) return exit_config;
  return exit_internal;
}

int report(std::ostream& err, std::string_view kind, int code, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  err << "rpo-error kind=" << kind << " code=" << code << " message=" << message << '\n';
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::optional<std::string> env_seed) {
  CLI::App app{"Robust process optimisation on separable reduced-order models", "rpo"};
  app.set_version_flag("--version", RPO_VERSION);
  app.require_subcommand(1);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth-plant", "Sample the synthetic plant into a training dataset CSV");
  synth_cmd->add_option("--points", synth.points, "Sample points (4 rows each)");
  synth.seed_opt = synth_cmd->add_option("--seed", synth.seed, "Seed (default: RPO_SEED or 0)");
  synth_cmd->add_flag("--continuous", synth.continuous, "Do not snap samples to the ROM grids");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");

  FitFlags fit;
  auto* fit_cmd = app.add_subcommand("fit-rom", "Fit a separable ROM to a dataset CSV by alternating least squares");
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--terms", fit.terms, "Terms per output");
  fit_cmd->add_option("--sweeps", fit.sweeps, "Maximum ALS sweeps");
  fit_cmd->add_option("--tol", fit.tol, "Relative loss decrease that stops the sweeps");
  fit_cmd->add_option("--refine", fit.refine, "Levenberg-Marquardt iterations after the sweeps");
  fit_cmd->add_option("--position-nodes", fit.position_nodes, "Grid nodes along the line");
  fit_cmd->add_option("--parameter-nodes", fit.parameter_nodes, "Grid nodes per parameter");
  fit_cmd->add_option("--line-length", fit.line_length, "Line length in m");
  fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory");

  PipelineFlags opt_flags, cmp_flags, eval_flags, traj_flags;
  std::string eval_controls, traj_controls;
  auto* opt_cmd = app.add_subcommand("optimize", "Restarted optimisation and minimum-percentile selection");
  opt_flags.attach(opt_cmd, true);
  auto* cmp_cmd = app.add_subcommand("compare", "Bayesian vs simplex percentile comparison with trajectory bands");
  cmp_flags.attach(cmp_cmd, true);
  auto* eval_cmd = app.add_subcommand("evaluate", "Monte-Carlo cost distribution of one control vector");
  eval_flags.attach(eval_cmd, false);
  eval_cmd->add_option("--controls", eval_controls, "Comma-separated controls in parameter order")->required();
  auto* traj_cmd = app.add_subcommand("trajectory", "Percentile bands of the gauged distance along the line");
  traj_flags.attach(traj_cmd, false);
  traj_cmd->add_option("--controls", traj_controls, "Comma-separated controls in parameter order")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_ok;
    }
    err << app.help();
    return report(err, "usage", exit_config, e.what());
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, args, out, env_seed);
    if (*fit_cmd) return cmd_fit(fit, args, out);
    if (*opt_cmd) return cmd_optimize(opt_flags, args, out, env_seed, false);
    if (*cmp_cmd) return cmd_optimize(cmp_flags, args, out, env_seed, true);
    if (*eval_cmd) return cmd_evaluate(eval_flags, eval_controls, args, out, env_seed);
    if (*traj_cmd) return cmd_trajectory(traj_flags, traj_controls, args, out, env_seed);
  } catch (const Error& e) {
    return report(err, e.kind(), exit_code_of(e), e.what());
  } catch (const std::exception& e) {
    return report(err, "internal", exit_internal, e.what());
  }
  return exit_internal;
}

}  // namespace rpo
