#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "hedgehog.hpp"

namespace hedgehog::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

MaterialParams parse_material(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  reject_unknown_keys(j, {"a0", "T", "T_star", "b", "c", "L", "R_phys"}, where);
  MaterialParams m;
  m.a0 = require_number(j, "a0", where);
  m.T = require_number(j, "T", where);
  m.T_star = require_number(j, "T_star", where);
  m.b = require_number(j, "b", where);
  m.c = require_number(j, "c", where);
  m.L = require_number(j, "L", where);
  m.R_phys = require_number(j, "R_phys", where);
  return m;
}

std::vector<double> number_list(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(where + ": '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

RadialGrid make_grid(const RunConfig& cfg, double R) {
  const auto n = static_cast<std::size_t>(cfg.grid_nodes);
  return cfg.grid_clustering == 1.0 ? RadialGrid::uniform(R, n) : RadialGrid::geometric(R, n, cfg.grid_clustering);
}

void require_solvable(double t, double R) {
  if (!std::isfinite(t) || !std::isfinite(R)) throw ConfigError("t and R must be finite");
  if (t >= kSuperheatingT) {
    throw ConfigError("t = " + format_double(t) + " >= 9/8: no nematic state exists above the superheating temperature");
  }
  if (t >= 1.0) throw ConfigError("t = " + format_double(t) + ": solving requires t < 1 (nematic global minimum)");
  if (!(R > 0.0)) throw ConfigError("R must be positive");
}

DiagnosticsOptions diagnostics_options(const RunConfig& cfg, std::size_t workers, double t) {
  DiagnosticsOptions opt;
  opt.tol = cfg.tolerances.diagnostics;
  opt.n_test_functions = static_cast<std::size_t>(cfg.n_test_functions);
  opt.seed = cfg.seed;
  opt.run_uniqueness = t < 1.0;
  opt.uniqueness.n_starts = static_cast<std::size_t>(cfg.n_starts);
  opt.uniqueness.seed = cfg.seed;
  opt.uniqueness.workers = workers;
  opt.uniqueness.shoot_tol = cfg.tolerances.shoot;
  opt.uniqueness.minimize.tol = cfg.tolerances.minimize;
  return opt;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

struct CaseResult {
  std::size_t index = 0;
  double t = 0.0;
  double R = 0.0;
  std::string status = "ok";  // ok | diagnostics_failed | solver_failed | invalid
  std::string message;
  int exit_code = kOk;
  double a_star = std::nan("");
  double I_min = std::nan("");
  double h1_at_R = std::nan("");
  double pohozaev = std::nan("");
  std::optional<bool> monotone_ok;
  std::optional<bool> unique_ok;
  std::vector<fs::path> files;
};

CaseResult solve_case(const RunConfig& cfg, double t, double R, const fs::path& dir, std::size_t workers) {
  CaseResult res;
  res.t = t;
  res.R = R;
  try {
    require_solvable(t, R);
  } catch (const ConfigError& e) {
    res.status = "invalid";
    res.message = e.what();
    res.exit_code = kConfigError;
    return res;
  }
  const RadialGrid grid = make_grid(cfg, R);
  std::optional<ShootingResult> shot;
  std::optional<RadialProfile> minimizer;
  try {
    shot = find_shooting_param(t, grid, cfg.tolerances.shoot);
    minimizer = minimize_energy(t, grid, std::nullopt, {cfg.tolerances.minimize, 500});
  } catch (const std::exception& e) {
    res.status = "solver_failed";
    res.message = e.what();
    res.exit_code = kSolverError;
    return res;
  }
  const RadialProfile& profile = shot->profile;
  const DiagnosticsReport report = diagnose(profile, t, diagnostics_options(cfg, workers, t));

  res.a_star = shot->a_star;
  res.I_min = energy(*minimizer, t);
  res.h1_at_R = profile.boundary_slope();
  res.pohozaev = report.pohozaev_residual;
  res.monotone_ok = report.monotone.ok;
  if (report.uniqueness && report.uniqueness->verdict) res.unique_ok = *report.uniqueness->verdict;
  if (!report.certified()) {
    res.status = "diagnostics_failed";
    res.exit_code = kDiagnosticsFailed;
  }

  fs::create_directories(dir);
  std::ostringstream csv;
  write_profile_csv(csv, profile, t);
  write_text(dir / "profile.csv", csv.str());
  res.files.push_back(dir / "profile.csv");

  double solver_gap = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    solver_gap = std::max(solver_gap, std::abs(profile.h()[i] - minimizer->h()[i]));
  }
  ordered_json diag{
      {"case", {{"t", t}, {"R", R}, {"grid_nodes", cfg.grid_nodes}, {"grid_clustering", cfg.grid_clustering}}},
      {"solver",
       {{"a_star", shot->a_star},
        {"endpoint_miss", shot->endpoint_miss},
        {"segments", shot->segments},
        {"newton_iterations", shot->newton_iterations},
        {"continuity_defect", shot->continuity_defect},
        {"I_min", res.I_min},
        {"I_profile", energy(profile, t)},
        {"minimizer_iterations", minimizer->meta().iterations},
        {"shooting_minimizer_distance", solver_gap}}},
      {"diagnostics", to_json(report)},
  };
  write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
  res.files.push_back(dir / "diagnostics.json");

  if (cfg.emit_plots) {
    std::ostringstream svg;
    std::ostringstream title;
    title << "h(r), t = " << t << ", R = " << R;
    write_profile_svg(svg, profile, t, title.str());
    write_text(dir / "profile.svg", svg.str());
    res.files.push_back(dir / "profile.svg");
  }
  return res;
}

ordered_json inventory(const fs::path& root, const std::vector<fs::path>& files) {
  ordered_json list = ordered_json::array();
  for (const auto& f : files) {
    list.push_back({{"path", fs::relative(f, root).generic_string()},
                    {"bytes", fs::file_size(f)},
                    {"sha256", sha256_hex(f)}});
  }
  return list;
}

ordered_json case_json(const CaseResult& c) {
  ordered_json j{{"t", c.t}, {"R", c.R}, {"status", c.status}, {"exit_code", c.exit_code}};
  if (!c.message.empty()) j["message"] = c.message;
  return j;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const std::string& started,
                    const std::vector<CaseResult>& cases, const std::vector<fs::path>& files) {
  ordered_json m{{"tool", "hedgehog"},
                 {"version", kToolVersion},
                 {"config", config_to_json(cfg)},
                 {"started", started},
                 {"finished", utc_timestamp()}};
  m["cases"] = ordered_json::array();
  for (const auto& c : cases) m["cases"].push_back(case_json(c));
  m["files"] = inventory(dir, files);
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

std::string bool_field(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : "na"; }

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(j,
                      {"mode", "params", "grid_nodes", "grid_clustering", "tolerances", "sweep", "output_dir",
                       "emit_plots", "seed", "n_starts", "n_test_functions", "workers"},
                      "config");
  RunConfig cfg;
  try {
    if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
    if (j.contains("params")) {
      const json& p = j.at("params");
      if (!p.is_object()) throw ConfigError("config.params: expected a JSON object");
      if (p.contains("t") || p.contains("R")) {
        reject_unknown_keys(p, {"t", "R"}, "config.params");
        cfg.reduced = ReducedParams{require_number(p, "t", "config.params"), require_number(p, "R", "config.params")};
      } else {
        cfg.material = parse_material(p, "config.params");
      }
    }
    if (j.contains("grid_nodes")) cfg.grid_nodes = j.at("grid_nodes").get<int>();
    if (j.contains("grid_clustering")) cfg.grid_clustering = j.at("grid_clustering").get<double>();
    if (j.contains("tolerances")) {
      const json& tol = j.at("tolerances");
      reject_unknown_keys(tol, {"shoot", "minimize", "diagnostics"}, "config.tolerances");
      if (tol.contains("shoot")) cfg.tolerances.shoot = tol.at("shoot").get<double>();
      if (tol.contains("minimize")) cfg.tolerances.minimize = tol.at("minimize").get<double>();
      if (tol.contains("diagnostics")) cfg.tolerances.diagnostics = tol.at("diagnostics").get<double>();
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      reject_unknown_keys(s, {"t_values", "R_values"}, "config.sweep");
      cfg.sweep = SweepLists{number_list(s, "t_values", "config.sweep"), number_list(s, "R_values", "config.sweep")};
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("emit_plots")) cfg.emit_plots = j.at("emit_plots").get<bool>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_starts")) cfg.n_starts = j.at("n_starts").get<int>();
    if (j.contains("n_test_functions")) cfg.n_test_functions = j.at("n_test_functions").get<int>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const fs::path& file) { return parse_config(read_json_file(file)); }

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j{{"mode", cfg.mode}};
  if (cfg.reduced) j["params"] = {{"t", cfg.reduced->t}, {"R", cfg.reduced->R}};
  if (cfg.material) {
    const auto& m = *cfg.material;
    j["params"] = {{"a0", m.a0}, {"T", m.T}, {"T_star", m.T_star}, {"b", m.b}, {"c", m.c}, {"L", m.L}, {"R_phys", m.R_phys}};
  }
  j["grid_nodes"] = cfg.grid_nodes;
  j["grid_clustering"] = cfg.grid_clustering;
  j["tolerances"] = {{"shoot", cfg.tolerances.shoot},
                     {"minimize", cfg.tolerances.minimize},
                     {"diagnostics", cfg.tolerances.diagnostics}};
  if (cfg.sweep) j["sweep"] = {{"t_values", cfg.sweep->t_values}, {"R_values", cfg.sweep->R_values}};
  j["output_dir"] = cfg.output_dir.generic_string();
  j["emit_plots"] = cfg.emit_plots;
  j["seed"] = cfg.seed;
  j["n_starts"] = cfg.n_starts;
  j["n_test_functions"] = cfg.n_test_functions;
  return j;
}

void validate(const RunConfig& cfg) {
  if (cfg.grid_nodes < static_cast<int>(RadialGrid::kMinIntervals + 1)) {
    throw ConfigError("grid_nodes must be at least " + std::to_string(RadialGrid::kMinIntervals + 1));
  }
  if (!(cfg.grid_clustering > 0.0)) throw ConfigError("grid_clustering must be positive");
  if (!(cfg.tolerances.shoot > 0.0) || !(cfg.tolerances.minimize > 0.0) || !(cfg.tolerances.diagnostics > 0.0)) {
    throw ConfigError("all tolerances must be positive");
  }
  if (cfg.n_starts < 1) throw ConfigError("n_starts must be at least 1");
  if (cfg.n_test_functions < 1) throw ConfigError("n_test_functions must be at least 1");
  if (cfg.workers && *cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.mode == "sweep") {
    if (!cfg.sweep || cfg.sweep->t_values.empty() || cfg.sweep->R_values.empty()) {
      throw ConfigError("sweep requires non-empty t and R lists");
    }
  }
  if ((cfg.mode == "solve" || cfg.mode == "sweep") && cfg.output_dir.empty()) {
    throw ConfigError(cfg.mode + " requires an output directory (--out or output_dir)");
  }
}

ReducedParams resolve_params(const RunConfig& cfg) {
  if (cfg.reduced) return *cfg.reduced;
  if (cfg.material) {
    try {
      return nondimensionalize(*cfg.material).reduced;
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("no parameters given (--t and --R, or params in the config file)");
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string started = utc_timestamp();
  try {
    validate(cfg);
    const ReducedParams p = resolve_params(cfg);
    require_solvable(p.t, p.R);
    fs::create_directories(cfg.output_dir);
    const std::size_t workers = cfg.workers ? static_cast<std::size_t>(*cfg.workers) : default_workers();
    const CaseResult res = solve_case(cfg, p.t, p.R, cfg.output_dir, workers);
    if (res.exit_code == kSolverError) {
      err << "solver failed: " << res.message << "\n";
    }
    write_manifest(cfg.output_dir, cfg, started, {res}, res.files);
    if (res.exit_code == kOk || res.exit_code == kDiagnosticsFailed) {
      out << "t = " << format_double(p.t) << ", R = " << format_double(p.R) << ": a* = " << format_double(res.a_star)
          << ", I_min = " << format_double(res.I_min) << ", h'(R) = " << format_double(res.h1_at_R) << "\n";
      out << (res.exit_code == kOk ? "all certificates pass" : "some certificates FAILED; see diagnostics.json") << "\n";
    }
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string started = utc_timestamp();
  try {
    validate(cfg);
    std::vector<std::pair<double, double>> points;
    for (double t : cfg.sweep->t_values) {
      for (double R : cfg.sweep->R_values) points.emplace_back(t, R);
    }
    std::stable_sort(points.begin(), points.end());
    fs::create_directories(cfg.output_dir);
    const std::size_t workers = cfg.workers ? static_cast<std::size_t>(*cfg.workers) : default_workers();

    std::vector<CaseResult> results(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) {
      const auto [t, R] = points[i];
      char name[96];
      std::snprintf(name, sizeof name, "case_%03zu_t%.6g_R%.6g", i, t, R);
      try {
        results[i] = solve_case(cfg, t, R, cfg.output_dir / name, 1);
      } catch (const std::exception& e) {
        results[i].t = t;
        results[i].R = R;
        results[i].status = "solver_failed";
        results[i].message = e.what();
        results[i].exit_code = kSolverError;
      }
      results[i].index = i;
    });

    std::ostringstream csv;
    csv << "t,R,a_star,I_min,h1_at_R,pohozaev_residual,monotone_ok,unique_ok,status\n";
    std::vector<fs::path> files;
    std::size_t failed = 0;
    for (const auto& r : results) {
      csv << format_double(r.t) << ',' << format_double(r.R) << ',' << format_double(r.a_star) << ','
          << format_double(r.I_min) << ',' << format_double(r.h1_at_R) << ',' << format_double(r.pohozaev) << ','
          << bool_field(r.monotone_ok) << ',' << bool_field(r.unique_ok) << ',' << r.status << '\n';
      files.insert(files.end(), r.files.begin(), r.files.end());
      if (r.exit_code != kOk) {
        ++failed;
        err << "case t = " << format_double(r.t) << ", R = " << format_double(r.R) << ": " << r.status
            << (r.message.empty() ? "" : " (" + r.message + ")") << "\n";
      }
    }
    write_text(cfg.output_dir / "summary.csv", csv.str());
    files.push_back(cfg.output_dir / "summary.csv");
    write_manifest(cfg.output_dir, cfg, started, results, files);
    out << results.size() - failed << " of " << results.size() << " cases certified; summary at "
        << (cfg.output_dir / "summary.csv").string() << "\n";
    return failed == 0 ? kOk : kPartialSweep;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

int cmd_convert(const MaterialParams& material, const std::optional<fs::path>& out_dir, std::ostream& out,
                std::ostream& err) {
  RescaleResult res;
  try {
    res = nondimensionalize(material);
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  ordered_json j = to_json(res);
  j["regime"] = std::string(to_string(classify_regime(res.reduced.t)));
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (out_dir) {
    try {
      fs::create_directories(*out_dir);
      write_text(*out_dir / "rescale.json", text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kConfigError;
    }
  }
  return kOk;
}

double infer_t_from_boundary(double h) {
  if (!(h >= 0.75)) throw ConfigError("boundary value h(R) = " + format_double(h) + " is below 3/4: not on the nematic branch");
  const double s = 4.0 * h - 3.0;
  return (9.0 - s * s) / 8.0;
}

int cmd_check(const RunConfig& cfg, const fs::path& profile_file, std::optional<double> t_arg, std::ostream& out,
              std::ostream& err) {
  try {
    validate(cfg);
    std::ifstream in(profile_file);
    if (!in) throw ConfigError("cannot open " + profile_file.string());
    const RadialProfile p = read_profile_csv(in, profile_file.string());
    const double t = t_arg ? *t_arg : infer_t_from_boundary(p.h().back());
    if (!(t <= kSuperheatingT)) throw ConfigError("t = " + format_double(t) + " > 9/8: no nematic state exists");
    const std::size_t workers = cfg.workers ? static_cast<std::size_t>(*cfg.workers) : default_workers();
    const DiagnosticsReport report = diagnose(p, t, diagnostics_options(cfg, workers, t));
    ordered_json j{{"profile", profile_file.generic_string()},
                   {"t", t},
                   {"t_source", t_arg ? "flag" : "inferred from h(R)"},
                   {"diagnostics", to_json(report)}};
    const std::string text = j.dump(2) + "\n";
    out << text;
    if (!cfg.output_dir.empty()) {
      fs::create_directories(cfg.output_dir);
      write_text(cfg.output_dir / "check.json", text);
    }
    return report.certified() ? kOk : kDiagnosticsFailed;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial hedgehog profiles of the reduced Landau-de Gennes model", "hedgehog"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_file, out_dir, material_file, profile_file;
  double t = 0.0, R = 0.0, cluster = 1.0;
  int nodes = 512, workers = 0, n_starts = 10;
  std::uint64_t seed = 0;
  std::vector<double> t_list, R_list;
  bool plots = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON run configuration; flags override its values")->check(CLI::ExistingFile);
    sub->add_option("--nodes", nodes, "grid nodes including both endpoints");
    sub->add_option("--cluster", cluster, "geometric spacing ratio between neighbouring intervals (1 = uniform)");
    sub->add_option("--seed", seed, "seed for random starts and test functions");
    sub->add_option("--starts", n_starts, "random starts in the uniqueness probe");
    sub->add_option("--workers", workers, "worker threads (default: HEDGEHOG_WORKERS or CPU count)");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one (t, R) case and certify it");
  solve->add_option("--t", t, "reduced temperature, t < 1");
  solve->add_option("--R", R, "reduced droplet radius");
  solve->add_option("--out", out_dir, "output directory");
  solve->add_flag("--plots", plots, "also write an SVG chart");
  add_common(solve);

  CLI::App* sweep = app.add_subcommand("sweep", "solve the Cartesian product of t and R lists");
  sweep->add_option("--t-list", t_list, "reduced temperatures (comma separated)")->delimiter(',');
  sweep->add_option("--R-list", R_list, "radii (comma separated)")->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_flag("--plots", plots, "also write an SVG chart per case");
  add_common(sweep);

  CLI::App* convert = app.add_subcommand("convert", "rescale material constants to (t, R)");
  convert->add_option("--material", material_file, "JSON file with a0, T, T_star, b, c, L, R_phys")->required();
  convert->add_option("--out", out_dir, "directory for rescale.json");

  CLI::App* check = app.add_subcommand("check", "re-run the diagnostics on a stored profile CSV");
  check->add_option("--profile", profile_file, "profile CSV written by solve")->required();
  CLI::Option* t_opt = check->add_option("--t", t, "reduced temperature (default: inferred from h(R))");
  check->add_option("--out", out_dir, "directory for check.json");
  add_common(check);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == convert) {
      const json j = read_json_file(material_file);
      const MaterialParams m = parse_material(j, material_file);
      return cmd_convert(m, out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir), out, err);
    }

    RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
    cfg.mode = sub->get_name();
    if (sub->count("--nodes")) cfg.grid_nodes = nodes;
    if (sub->count("--cluster")) cfg.grid_clustering = cluster;
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--starts")) cfg.n_starts = n_starts;
    if (sub->count("--workers")) cfg.workers = workers;
    if (sub->count("--out")) cfg.output_dir = out_dir;
    if (sub != check && sub->count("--plots")) cfg.emit_plots = plots;

    if (sub == solve) {
      if (solve->count("--t") || solve->count("--R")) {
        if (!solve->count("--t") || !solve->count("--R")) throw ConfigError("--t and --R must be given together");
        cfg.reduced = ReducedParams{t, R};
        cfg.material.reset();
      }
      return cmd_solve(cfg, out, err);
    }
    if (sub == sweep) {
      if (sweep->count("--t-list") || sweep->count("--R-list")) {
        SweepLists lists = cfg.sweep.value_or(SweepLists{});
        if (sweep->count("--t-list")) lists.t_values = t_list;
        if (sweep->count("--R-list")) lists.R_values = R_list;
        cfg.sweep = lists;
      }
      return cmd_sweep(cfg, out, err);
    }
    return cmd_check(cfg, profile_file, t_opt->count() ? std::optional<double>(t) : std::nullopt, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace hedgehog::cli
