// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "hedgehog.hpp"

using namespace hedgehog;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::uint64_t kSeed = 20240607;
constexpr std::size_t kNodes = 512;
constexpr double kClusterRatio = 1.004;

// 1. Critical values of the bulk potential.
Outcome critical_values() {
  double worst_hp = std::max({std::abs(h_plus(0.0) - 1.5), std::abs(h_plus(1.0) - 1.0), std::abs(h_plus(9.0 / 8.0) - 0.75)});
  const double offset1 = std::abs(bulk_offset(1.0));
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> dist(-20.0, 9.0 / 8.0);
  double worst_g = 0.0, worst_gp = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double t = k == 0 ? 9.0 / 8.0 : dist(rng);
    const double hp = h_plus(t);
    worst_g = std::max(worst_g, std::abs(g(hp, t)));
    worst_gp = std::max(worst_gp, std::abs(g_prime(hp, t)));
  }
  const bool pass = worst_hp <= 1e-14 && offset1 <= 1e-12 && worst_g <= 1e-12 && worst_gp <= 1e-12;
  return {pass, "max|h_plus err| = " + fmt("%.2e", worst_hp) + " (<= 1e-14), |C(1)| = " + fmt("%.2e", offset1) +
                    ", max|g(h_plus)| = " + fmt("%.2e", worst_g) + ", max|g'(h_plus)| = " + fmt("%.2e", worst_gp) +
                    " (<= 1e-12, 50 t)"};
}

// 2. Tensor Euler-Lagrange right-hand side on uniaxial states.
Outcome pde_ode_consistency() {
  std::mt19937_64 rng(kSeed + 1);
  std::uniform_real_distribution<double> hd(-3.0, 3.0), td(-20.0, 9.0 / 8.0);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double h = hd(rng), t = td(rng);
    const UnitVector n = UnitVector::normalized(Eigen::Vector3d(normal(rng), normal(rng), normal(rng)));
    const Eigen::Matrix3d expected = std::sqrt(1.5) * g_prime(h, t) * director_projector(n);
    worst = std::max(worst, (el_rhs(uniaxial(h, n), t).matrix() - expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max entrywise error = " + fmt("%.2e", worst) + " (<= 1e-12, 100 samples)"};
}

// 3. Picard iterate gaps and the r^4 coefficient.
Outcome picard_contraction() {
  double worst_ratio = 0.0, worst_coeff = 0.0;
  std::size_t checked = 0;
  for (double t : {-8.0, -1.0, 0.5}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const auto p = hedgehog_problem(t, a);
      const double eps = contraction_radius(p);
      const double C = p.picard_constant();
      for (double frac : {1.0, 0.5, 0.1}) {
        const double r = frac * eps;
        const auto sol = picard_solve(p, r, 1e-15, 200);
        double fact = 1.0;
        for (std::size_t n = 0; n < sol.iterate_gaps().size(); ++n) {
          if (n > 0) fact *= static_cast<double>(n);
          const double bound = (1.0 + std::abs(a)) * std::pow(C, n) * std::pow(r, 2.0 * n + 2.0) / fact;
          worst_ratio = std::max(worst_ratio, sol.iterate_gaps()[n] / bound);
          ++checked;
        }
        if (frac == 1.0) {
          // Linearized oracle: r^2 -> r^4 / ((2 + alpha + beta + 1)(2 + beta + 2)) applied to t a r^2.
          const double oracle = t * a / ((2.0 - 4.0 + 3.0 + 1.0) * (2.0 + 3.0 + 2.0));
          worst_coeff = std::max(worst_coeff, std::abs((*sol.series())[4] - oracle));
        }
      }
    }
  }
  const bool pass = worst_ratio <= 1.0 + 1e-12 && worst_coeff <= 1e-10;
  return {pass, "max gap/bound = " + fmt("%.3f", worst_ratio) + " over " + std::to_string(checked) +
                    " gaps (<= 1), max|c4 - t a/14| = " + fmt("%.2e", worst_coeff) + " (<= 1e-10)"};
}

// 4. Shooting and energy minimization agree.
Outcome dual_solver() {
  bool pass = true;
  std::string detail;
  for (auto [t, R] : {std::pair{-8.0, 10.0}, std::pair{-1.0, 5.0}, std::pair{-0.1, 2.0}}) {
    const auto grid = RadialGrid::geometric(R, kNodes, kClusterRatio);
    const double d = sup_diff(find_shooting_param(t, grid, 1e-10).profile.h(), minimize_energy(t, grid).h());
    const auto uni = RadialGrid::uniform(R, kNodes);
    const double du = sup_diff(find_shooting_param(t, uni, 1e-10).profile.h(), minimize_energy(t, uni).h());
    pass = pass && d <= 1e-4;
    detail += "(" + fmt("%g", t) + "," + fmt("%g", R) + "): " + fmt("%.2e", d) + " [uniform " + fmt("%.2e", du) + "]  ";
  }
  return {pass, detail + "(<= 1e-4, 512 nodes, spacing ratio 1.004)"};
}

// 5. Discrete gradient against central differences.
Outcome gradient_check() {
  const double t = -8.0, R = 10.0;
  const auto grid = RadialGrid::uniform(R, kNodes);
  const auto base = find_shooting_param(t, grid, 1e-10).profile.h();
  std::mt19937_64 rng(kSeed + 5);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  const DiscreteEnergy E(grid, t);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    auto h = base;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) h[i] += noise(rng);
    const auto grad = discrete_gradient(RadialProfile(grid, h), t);
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double step = 1e-5;
      auto hp = h, hm = h;
      hp[k + 1] += step;
      hm[k + 1] -= step;
      const double fd = (E.value(hp) - E.value(hm)) / (2 * step);
      err = std::max(err, std::abs(fd - grad[k]));
      scale = std::max(scale, std::abs(grad[k]));
    }
    worst = std::max(worst, err / scale);
  }
  return {worst <= 1e-6, "max relative error = " + fmt("%.2e", worst) + " (<= 1e-6, 10 perturbed profiles, 512 nodes)"};
}

// 6. Certified properties over the 9-case sweep.
Outcome certified_properties() {
  bool pass = true;
  double worst_bound = 0.0, min_slope = INFINITY, min_boundary = INFINITY, min_sv = INFINITY;
  for (double t : {-10.0, -1.0, -0.1}) {
    for (double R : {1.0, 5.0, 20.0}) {
      const auto grid = RadialGrid::uniform(R, kNodes);
      for (const RadialProfile& p : {find_shooting_param(t, grid, 1e-10).profile, minimize_energy(t, grid)}) {
        const auto bounds = check_bounds(p, t, 1e-8);
        const auto mono = check_monotone(p, 1e-8);
        const double sv = second_variation_min(p, t, 100, kSeed);
        worst_bound = std::max(worst_bound, bounds.max_violation);
        min_slope = std::min(min_slope, mono.min_slope);
        min_boundary = std::min(min_boundary, p.boundary_slope());
        min_sv = std::min(min_sv, sv);
        pass = pass && bounds.ok && mono.ok && p.boundary_slope() > 0.0 && sv >= -1e-8;
      }
    }
  }
  return {pass, "18 profiles (shooting + minimizer): max bound violation = " + fmt("%.1e", worst_bound) +
                    " (<= 1e-8), min slope = " + fmt("%.2e", min_slope) + " (> 0), min h'(R) = " +
                    fmt("%.3e", min_boundary) + " (> 0), min second variation = " + fmt("%.3e", min_sv) +
                    " (>= -1e-8)"};
}

// 7. Pohozaev residual and its second-order decay.
Outcome pohozaev() {
  bool pass = true;
  std::string detail;
  for (auto [t, R] : {std::pair{-8.0, 10.0}, std::pair{-1.0, 5.0}, std::pair{-0.1, 2.0}}) {
    std::vector<double> res;
    for (std::size_t n : {128, 256, 512}) {
      res.push_back(pohozaev_residual(find_shooting_param(t, RadialGrid::uniform(R, n), 1e-10).profile, t));
    }
    const double q1 = res[0] / res[1], q2 = res[1] / res[2];
    const bool ok = res[2] <= 1e-4 && q1 >= 3.5 && q1 <= 4.5 && q2 >= 3.5 && q2 <= 4.5;
    pass = pass && ok;
    detail += "(" + fmt("%g", t) + "," + fmt("%g", R) + "): " + fmt("%.2e", res[2]) + " ratios " + fmt("%.2f", q1) +
              "/" + fmt("%.2f", q2) + "  ";
  }
  double sweep_worst = 0.0;
  for (double t : {-10.0, -1.0, -0.1}) {
    for (double R : {1.0, 5.0, 20.0}) {
      sweep_worst = std::max(
          sweep_worst, pohozaev_residual(find_shooting_param(t, RadialGrid::uniform(R, kNodes), 1e-10).profile, t));
    }
  }
  pass = pass && sweep_worst <= 1e-4;
  return {pass, detail + "9-case sweep max " + fmt("%.2e", sweep_worst) + " (<= 1e-4 at 512, ratio in [3.5, 4.5])"};
}

// 8. Uniqueness probe at t < 0.
Outcome uniqueness() {
  UniquenessOptions opt;
  opt.n_starts = 10;
  opt.seed = kSeed;
  const auto rec = uniqueness_probe(-8.0, RadialGrid::geometric(10.0, kNodes, kClusterRatio), opt);
  const double spread = std::max(rec.max_pairwise_distance, rec.shooting_distance);
  const bool pass = rec.n_failed == 0 && spread <= 1e-4 && rec.shooting_root_count == 1;
  return {pass, "(-8,10): " + std::to_string(rec.minimizers.size()) + "/10 starts converged, max pairwise = " +
                    fmt("%.2e", rec.max_pairwise_distance) + ", shooting vs minimizers = " +
                    fmt("%.2e", rec.shooting_distance) + " (<= 1e-4), roots in a-scan = " +
                    std::to_string(rec.shooting_root_count) + " (== 1)"};
}

// 9. CLI round trip and worker-count independence.
Outcome cli_contract() {
  const fs::path root = fs::temp_directory_path() / ("hedgehog_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream out, err;
  auto call = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "hedgehog");
    out.str("");
    err.str("");
    return cli::run(args, out, err);
  };
  bool pass = true;
  std::string detail;

  const int solve_code = call({"solve", "--t", "-8", "--R", "10", "--out", (root / "solve").string()});
  const nlohmann::json solved = nlohmann::json::parse(slurp(root / "solve" / "diagnostics.json"));
  const int check_code = call({"check", "--profile", (root / "solve" / "profile.csv").string(), "--t", "-8"});
  const nlohmann::json checked = nlohmann::json::parse(out.str());
  const bool same = checked["diagnostics"] == solved["diagnostics"];
  pass = pass && solve_code == 0 && check_code == 0 && same;
  detail += "solve exit " + std::to_string(solve_code) + ", check exit " + std::to_string(check_code) +
            (same ? ", diagnostics identical" : ", diagnostics DIFFER");

  std::vector<std::string> reference;
  bool identical = true;
  int sweep_codes = 0;
  for (int workers : {1, 4, 8}) {
    const fs::path dir = root / ("sweep_w" + std::to_string(workers));
    sweep_codes |= call({"sweep", "--t-list", "-10,-1,-0.1", "--R-list", "1,5,20", "--out", dir.string(), "--workers",
                         std::to_string(workers)});
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().filename() != "manifest.json") {
        files.push_back(fs::relative(e.path(), dir).generic_string() + "\n" + slurp(e.path()));
      }
    }
    std::sort(files.begin(), files.end());
    if (reference.empty()) {
      reference = files;
    } else if (files != reference) {
      identical = false;
    }
  }
  pass = pass && identical && sweep_codes == 0 && reference.size() == 19;
  detail += "; sweep (9 cases, " + std::to_string(reference.size()) + " files) " +
            (identical ? "byte-identical" : "DIFFERS") + " for workers 1/4/8, exit " + std::to_string(sweep_codes);
  fs::remove_all(root);
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "critical values", 1.0, critical_values},
      {2, "PDE/ODE consistency", 1.0, pde_ode_consistency},
      {3, "Picard contraction", 5.0, picard_contraction},
      {4, "dual-solver agreement", 60.0, dual_solver},
      {5, "gradient correctness", 10.0, gradient_check},
      {6, "certified properties", 120.0, certified_properties},
      {7, "Pohozaev certificate", 30.0, pohozaev},
      {8, "uniqueness at t < 0", 120.0, uniqueness},
      {9, "CLI contract", 120.0, cli_contract},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs <= c.time_limit;
    if (!pass) ++failures;
    std::printf("criterion %d %s: %s | %s | %.2f s (limit %.0f s)\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), secs, c.time_limit);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
