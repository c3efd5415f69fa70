#pragma once

// Command-line front end: solve, sweep, convert, check.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hedgehog/potential.hpp"

namespace hedgehog::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kSolverError = 2,
  kDiagnosticsFailed = 3,
  kPartialSweep = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double shoot = 1e-10;
  double minimize = 1e-8;
  double diagnostics = 1e-6;
};

struct SweepLists {
  std::vector<double> t_values;
  std::vector<double> R_values;
};

struct RunConfig {
  std::string mode;
  std::optional<ReducedParams> reduced;
  std::optional<MaterialParams> material;
  int grid_nodes = 512;
  double grid_clustering = 1.0;  // spacing ratio between neighbouring intervals; 1 = uniform
  Tolerances tolerances;
  std::optional<SweepLists> sweep;
  std::filesystem::path output_dir;
  bool emit_plots = false;
  std::uint64_t seed = 0;
  int n_starts = 10;
  int n_test_functions = 100;
  std::optional<int> workers;
};

inline constexpr const char* kToolVersion = "1.0.0";

/// Reads a JSON config object. Unknown keys and wrong types are errors.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& file);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

/// Validates the mode-independent invariants (grid size, tolerances, lists).
void validate(const RunConfig& cfg);

/// Reduced (t, R) for a config, rescaling material constants when given.
ReducedParams resolve_params(const RunConfig& cfg);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_convert(const MaterialParams& material, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, const std::filesystem::path& profile, std::optional<double> t,
              std::ostream& out, std::ostream& err);

/// Parses argv (args[0] is the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::filesystem::path& file);

/// Reduced temperature whose h_plus equals h.
double infer_t_from_boundary(double h);

}  // namespace hedgehog::cli
