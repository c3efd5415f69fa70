#pragma once

// Profile CSV (r, h, h_prime, ode_residual), JSON views of reports and
// rescaling results, and a minimal SVG chart of h against r.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hedgehog/diagnostics.hpp"
#include "hedgehog/grid.hpp"
#include "hedgehog/potential.hpp"

namespace hedgehog {

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kProfileCsvHeader = "r,h,h_prime,ode_residual";

/// Shortest text that round-trips doubles: 17 significant digits.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One row per node; ode_residual is "nan" at r = 0 and r = R where the
/// three-point stencil is not defined.
inline void write_profile_csv(std::ostream& os, const RadialProfile& p, double t) {
  const auto res = ode_residual(p, t);
  os << kProfileCsvHeader << '\n';
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double rv = (i == 0 || i + 1 == n) ? std::nan("") : res[i - 1];
    os << format_double(p.r(i)) << ',' << format_double(p.h()[i]) << ',' << format_double(p.h1()[i]) << ','
       << format_double(rv) << '\n';
  }
}

namespace io_detail {

inline double parse_field(std::string_view field, const std::string& source, std::size_t line, const char* name) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw CsvError(source, line, std::string("column ") + name + ": cannot parse '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace io_detail

/// Reads a profile written by `write_profile_csv`. The derivative column is
/// kept as-is, so a written profile reads back bit for bit.
inline RadialProfile read_profile_csv(std::istream& is, const std::string& source = "<profile>") {
  static constexpr const char* kNames[] = {"r", "h", "h_prime", "ode_residual"};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw CsvError(source, 1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kProfileCsvHeader) {
    throw CsvError(source, line_no, "expected header '" + std::string(kProfileCsvHeader) + "'");
  }
  std::vector<double> r, h, h1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4) {
      throw CsvError(source, line_no, "expected 4 columns, found " + std::to_string(fields.size()));
    }
    double v[3];
    for (int k = 0; k < 3; ++k) {
      v[k] = io_detail::parse_field(fields[k], source, line_no, kNames[k]);
      if (!std::isfinite(v[k])) throw CsvError(source, line_no, std::string("column ") + kNames[k] + " is not finite");
    }
    io_detail::parse_field(fields[3], source, line_no, kNames[3]);
    if (r.empty() && v[0] != 0.0) throw CsvError(source, line_no, "first node must be r = 0");
    if (!r.empty() && !(v[0] > r.back())) throw CsvError(source, line_no, "r must be strictly increasing");
    r.push_back(v[0]);
    h.push_back(v[1]);
    h1.push_back(v[2]);
  }
  if (r.size() < RadialGrid::kMinIntervals + 1) {
    throw CsvError(source, line_no, "need at least " + std::to_string(RadialGrid::kMinIntervals + 1) + " rows, found " +
                                        std::to_string(r.size()));
  }
  ProfileMeta meta{"file", 0.0, 0, true};
  return RadialProfile(RadialGrid(std::move(r)), std::move(h), std::move(h1), std::move(meta));
}

inline nlohmann::ordered_json to_json(const RescaleResult& res) {
  return {{"t", res.reduced.t}, {"R", res.reduced.R}, {"xi", res.xi}, {"q0", res.q0}, {"energy_scale", res.energy_scale}};
}

inline nlohmann::ordered_json to_json(const UniquenessRecord& u) {
  nlohmann::ordered_json j{{"n_starts", u.n_starts},
                           {"n_failed", u.n_failed},
                           {"max_pairwise_profile_distance", u.max_pairwise_distance},
                           {"shooting_distance", u.shooting_distance},
                           {"shooting_root_count", u.shooting_root_count}};
  j["verdict"] = u.verdict ? nlohmann::ordered_json(*u.verdict) : nlohmann::ordered_json(nullptr);
  return j;
}

inline nlohmann::ordered_json to_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j{
      {"t", r.t},
      {"R", r.R},
      {"bounds_ok", r.bounds.ok},
      {"bounds_max_violation", r.bounds.max_violation},
      {"monotone_ok", r.monotone.ok},
      {"monotone_min_slope", r.monotone.min_slope},
      {"boundary_slope", r.boundary_slope},
      {"pohozaev_residual", r.pohozaev_residual},
      {"pohozaev_relative", r.pohozaev_relative},
      {"pohozaev_ok", r.pohozaev_ok},
      {"ode_residual_max", r.ode_residual_max},
      {"second_variation_min", r.second_variation_min},
      {"second_variation_ok", r.second_variation_ok},
  };
  j["uniqueness"] = r.uniqueness ? to_json(*r.uniqueness) : nlohmann::ordered_json(nullptr);
  j["certified"] = r.certified();
  return j;
}

/// Line chart of h(r) with a dashed reference line at h_plus.
inline void write_profile_svg(std::ostream& os, const RadialProfile& p, double t, const std::string& title) {
  const double W = 640, H = 400, left = 60, right = 20, top = 40, bottom = 50;
  const double hp = h_plus(t);
  const double ymax = std::max(hp, *std::max_element(p.h().begin(), p.h().end())) * 1.05;
  const double R = p.R();
  auto X = [&](double r) { return left + (W - left - right) * r / R; };
  auto Y = [&](double h) { return H - bottom - (H - top - bottom) * h / ymax; };
  std::ostringstream path;
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i == 0 ? "M" : " L", X(p.r(i)), Y(p.h()[i]));
    path << buf;
  }
  char hp_label[32];
  std::snprintf(hp_label, sizeof hp_label, "h+ = %.4g", hp);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
     << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">r</text>\n"
     << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (top + H - bottom) / 2 << ")\">h(r)</text>\n"
     << "<text x=\"" << left << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">0</text>\n"
     << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << format_double(R) << "</text>\n"
     << "<line x1=\"" << left << "\" y1=\"" << Y(hp) << "\" x2=\"" << W - right << "\" y2=\"" << Y(hp) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n"
     << "<text x=\"" << W - right - 4 << "\" y=\"" << Y(hp) - 6 << "\" text-anchor=\"end\" fill=\"gray\">" << hp_label << "</text>\n"
     << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n"
     << "</svg>\n";
}

}  // namespace hedgehog
