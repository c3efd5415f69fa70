#pragma once

// Reduced Landau-de Gennes bulk potential restricted to uniaxial states,
// its critical values, and the physical -> reduced rescaling.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hedgehog {

/// Largest reduced temperature for which a nematic branch exists.
inline constexpr double kSuperheatingT = 9.0 / 8.0;

struct MaterialParams {
  double a0 = 0.0;      // temperature slope of a [1/K]
  double T = 0.0;       // temperature [K]
  double T_star = 0.0;  // spinodal temperature [K]
  double b = 0.0;
  double c = 0.0;
  double L = 0.0;       // elastic constant
  double R_phys = 0.0;  // droplet radius (physical length)

  double a() const { return a0 * (T - T_star); }
};

struct ReducedParams {
  double t = 0.0;  // reduced temperature
  double R = 1.0;  // reduced droplet radius
};

enum class TemperatureRegime {
  IsotropicUnstable,  // t < 0
  NematicGlobal,      // 0 <= t < 1
  NematicMetastable,  // 1 <= t < 9/8
  IsotropicOnly,      // t >= 9/8
};

inline std::string_view to_string(TemperatureRegime regime) {
  switch (regime) {
    case TemperatureRegime::IsotropicUnstable: return "IsotropicUnstable";
    case TemperatureRegime::NematicGlobal: return "NematicGlobal";
    case TemperatureRegime::NematicMetastable: return "NematicMetastable";
    case TemperatureRegime::IsotropicOnly: return "IsotropicOnly";
  }
  return "unknown";
}

struct RescaleResult {
  ReducedParams reduced;
  double xi = 0.0;            // coherence length
  double q0 = 0.0;            // tensor amplitude scale
  double energy_scale = 0.0;  // physical energy per unit reduced energy
};

namespace detail {
inline void require_nematic_branch(double t, const char* what) {
  if (!(t <= kSuperheatingT)) {
    throw std::domain_error(std::string(what) + ": t = " + std::to_string(t) +
                            " exceeds 9/8, no nematic state exists");
  }
}
}  // namespace detail

/// Positive minimizer of the uniaxial bulk potential, (3 + sqrt(9 - 8t)) / 4.
inline double h_plus(double t) {
  detail::require_nematic_branch(t, "h_plus");
  return (3.0 + std::sqrt(9.0 - 8.0 * t)) / 4.0;
}

/// Constant C(t) that shifts the bulk potential so that its minimum is zero.
inline double bulk_offset(double t) {
  const double hp = h_plus(t);
  const double hp2 = hp * hp;
  return -(0.5 * t * hp2 - hp2 * hp + 0.5 * hp2 * hp2);
}

inline double g(double h, double t) {
  const double h2 = h * h;
  return 0.5 * t * h2 - h2 * h + 0.5 * h2 * h2 + bulk_offset(t);
}

inline double g_prime(double h, double t) { return h * (t - 3.0 * h + 2.0 * h * h); }

inline double g_second(double h, double t) { return t - 6.0 * h + 6.0 * h * h; }

/// g, g', g'' at fixed t with h_plus and C(t) cached. Used in inner loops.
class BulkPotential {
 public:
  explicit BulkPotential(double t) : t_(t), h_plus_(hedgehog::h_plus(t)), offset_(bulk_offset(t)) {}

  double t() const { return t_; }
  double h_plus() const { return h_plus_; }
  double offset() const { return offset_; }

  double value(double h) const {
    const double h2 = h * h;
    return 0.5 * t_ * h2 - h2 * h + 0.5 * h2 * h2 + offset_;
  }
  double slope(double h) const { return g_prime(h, t_); }
  double curvature(double h) const { return g_second(h, t_); }

 private:
  double t_;
  double h_plus_;
  double offset_;
};

/// Half-open convention: each breakpoint belongs to the higher-t regime.
inline TemperatureRegime classify_regime(double t) {
  if (t < 0.0) return TemperatureRegime::IsotropicUnstable;
  if (t < 1.0) return TemperatureRegime::NematicGlobal;
  if (t < kSuperheatingT) return TemperatureRegime::NematicMetastable;
  return TemperatureRegime::IsotropicOnly;
}

inline RescaleResult nondimensionalize(const MaterialParams& p) {
  if (!(p.b > 0.0) || !(p.c > 0.0) || !(p.L > 0.0) || !(p.R_phys > 0.0)) {
    throw std::domain_error("nondimensionalize: b, c, L and R_phys must be strictly positive");
  }
  const double b2 = p.b * p.b;
  RescaleResult out;
  out.xi = std::sqrt(27.0 * p.c * p.L / b2);
  out.q0 = std::sqrt(27.0 * p.c * p.c / (2.0 * b2));
  out.energy_scale = std::sqrt(4.0 * b2 * p.L * p.L * p.L / (27.0 * p.c * p.c * p.c));
  out.reduced.t = 27.0 * p.a() * p.c / b2;
  out.reduced.R = p.R_phys / out.xi;
  return out;
}

}  // namespace hedgehog
