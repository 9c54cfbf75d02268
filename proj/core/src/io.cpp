#include "exspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "exspec/conventions.hpp"
#include "exspec/errors.hpp"

namespace exspec::io {

std::string format_double(double x) {
  char buf[40];
  // probe increasing precision until the value round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  return buf;
}

std::string digest(const std::string& payload) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : payload) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_meta_line(const std::string& config_digest) {
  return "# exspec config_digest=" + config_digest +
         " conventions_version=" + conventions::version +
         " kappa=" + format_double(conventions::kappa) + "\n";
}

void stamp_meta(json& j, const std::string& config_digest) {
  j["config_digest"] = config_digest;
  j["conventions_version"] = conventions::version;
  j["kappa"] = conventions::kappa;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open output file: " + path);
  out << content;
}

namespace {

double get_number(const json& j, const std::string& field, double fallback,
                  bool required = false) {
  if (!j.contains(field)) {
    if (required) throw InvalidInput("potential spec: missing field '" + field + "'");
    return fallback;
  }
  if (!j[field].is_number()) {
    throw InvalidInput("potential spec: field '" + field + "' must be a number");
  }
  return j[field].get<double>();
}

}  // namespace

RadialPotential potential_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("potential spec: expected a JSON object");
  if (!j.contains("type")) throw InvalidInput("potential spec: missing field 'type'");
  if (!j["type"].is_string()) throw InvalidInput("potential spec: field 'type' must be a string");
  const std::string type = j["type"].get<std::string>();

  RadialPotential pot;
  if (type == "yukawa") {
    pot = make_yukawa(get_number(j, "g", 1.0), get_number(j, "mu", 1.0, true));
  } else if (type == "gaussian") {
    pot = make_gaussian(get_number(j, "amplitude", 1.0), get_number(j, "width", 1.0));
  } else if (type == "lennard-jones") {
    pot = make_lennard_jones(get_number(j, "epsilon", 1.0), get_number(j, "sigma", 1.0),
                             get_number(j, "core_cutoff", -1.0));
  } else if (type == "r4tail") {
    pot = make_r4_tail(get_number(j, "amplitude", -1.0), get_number(j, "r0", 1.0));
  } else if (type == "bump") {
    pot = make_bump(get_number(j, "amplitude", 1.0), get_number(j, "radius", 1.0));
  } else if (type == "table") {
    if (!j.contains("path") || !j["path"].is_string()) {
      throw InvalidInput("potential spec: table type requires string field 'path'");
    }
    pot = load_potential_csv(j["path"].get<std::string>(), get_number(j, "tail_exponent", 4.0),
                             get_number(j, "tail_coefficient", 0.0));
  } else {
    throw InvalidInput("potential spec: unknown type '" + type + "'");
  }

  if (j.contains("core_cutoff") && type != "lennard-jones") {
    pot.core_cutoff = get_number(j, "core_cutoff", pot.core_cutoff);
  }
  if (j.contains("tail_exponent")) pot.tail_exponent = get_number(j, "tail_exponent", 0);
  if (j.contains("tail_coefficient")) pot.tail_coefficient = get_number(j, "tail_coefficient", 0);
  if (j.contains("tail_start")) pot.tail_start = get_number(j, "tail_start", 0);
  return pot;
}

RadialPotential load_potential_csv(const std::string& path, double tail_exponent,
                                   double tail_coefficient) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("table potential: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("r,V", 0) != 0) {
    throw InvalidInput("table potential: first line must be the header 'r,V'");
  }
  std::vector<double> rs, vs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double r, v;
    if (std::sscanf(line.c_str(), "%lf,%lf", &r, &v) != 2) {
      throw InvalidInput("table potential: malformed row '" + line + "'");
    }
    rs.push_back(r);
    vs.push_back(v);
  }
  return make_table(std::move(rs), std::move(vs), tail_exponent, tail_coefficient);
}

std::string spectrum_csv(const RadialSpectrum& spec, const std::string& config_digest) {
  std::ostringstream out;
  out << csv_meta_line(config_digest) << "p,V_tilde\n";
  for (std::size_t i = 0; i < spec.p_grid().size(); ++i) {
    out << format_double(spec.p_grid()[i]) << "," << format_double(spec.values()[i]) << "\n";
  }
  return out.str();
}

std::string coefficients_csv(const FourierCoefficients& table, const std::string& config_digest) {
  std::ostringstream out;
  out << csv_meta_line(config_digest) << "n1,n2,n3,v_q\n";
  table.for_each([&](const Vec3i& n, double v) {
    out << n.x << "," << n.y << "," << n.z << "," << format_double(v) << "\n";
  });
  return out.str();
}

std::string solution_csv(const PairFieldSolution& sol, const std::string& config_digest) {
  std::ostringstream out;
  out << csv_meta_line(config_digest) << "n1,n2,n3,re_phi,im_phi,b\n";
  sol.for_each_table_entry([&](const Vec3i& n, const PairEntry& e) {
    out << n.x << "," << n.y << "," << n.z << "," << format_double(e.phi.real()) << ","
        << format_double(e.phi.imag()) << "," << format_double(e.b) << "\n";
  });
  return out.str();
}

std::string curve_csv(const DispersionCurve& curve, const std::string& config_digest,
                      bool drift_column) {
  std::ostringstream out;
  out << csv_meta_line(config_digest);
  out << "p,epsilon,lambda";
  if (curve.statistics == Statistics::bose) out << ",unstable";
  if (drift_column) out << ",drift";
  out << "\n";
  const double v_parallel = curve.direction.dot(curve.v);
  const double h2 = curve.units.hbar * curve.units.hbar;
  for (std::size_t i = 0; i < curve.p_grid.size(); ++i) {
    out << format_double(curve.p_grid[i]) << "," << format_double(curve.epsilon[i]) << ","
        << format_double(curve.lambda[i]);
    if (curve.statistics == Statistics::bose) out << "," << (curve.unstable[i] ? 1 : 0);
    if (drift_column) out << "," << format_double(-h2 * curve.p_grid[i] * v_parallel);
    out << "\n";
  }
  return out.str();
}

json residual_report_json(const PairFieldSolution& sol, const ResidualReport& rep,
                          const std::string& config_digest) {
  json j;
  j["statistics"] = to_string(sol.statistics());
  j["k1"] = {sol.k1_index().x, sol.k1_index().y, sol.k1_index().z};
  j["k2"] = {sol.k2_index().x, sol.k2_index().y, sol.k2_index().z};
  j["l_max"] = sol.l_max();
  j["omega"] = sol.omega();
  j["sup_residual_first"] = rep.sup_residual_first;
  j["sup_residual_second"] = rep.sup_residual_second;
  j["normalization_magnitude"] = rep.normalization_magnitude;
  j["omega_consistency"] = rep.omega_consistency;
  j["boundary_phi"] = rep.boundary_phi;
  j["modes_scanned"] = rep.modes_scanned;
  j["scan_radius"] = rep.scan_radius;
  j["truncation_warning"] = rep.truncation_warning;
  stamp_meta(j, config_digest);
  return j;
}

json features_json(const LandauFeatures& features, const std::string& config_digest) {
  json j;
  j["sound_slope"] = features.sound_slope;
  if (features.maxon) {
    j["maxon"] = {{"p", features.maxon->p}, {"eps", features.maxon->eps}};
  } else {
    j["maxon"] = nullptr;
  }
  if (features.roton) {
    j["roton"] = {{"p", features.roton->p}, {"eps", features.roton->eps}};
  } else {
    j["roton"] = nullptr;
  }
  j["n_maxima"] = features.n_maxima;
  j["n_minima"] = features.n_minima;
  j["critical_velocity"] = features.critical_velocity;
  j["predicted_slope"] = features.predicted_slope;
  j["has_prediction"] = features.has_prediction;
  j["slope_ratio"] = features.slope_ratio;
  j["degenerate"] = features.degenerate;
  stamp_meta(j, config_digest);
  return j;
}

json matrix_json(const VariationalBlock& block, const std::string& config_digest) {
  json j;
  j["statistics"] = to_string(block.statistics);
  j["l"] = {block.l.x, block.l.y, block.l.z};
  j["k1"] = {block.k1.x, block.k1.y, block.k1.z};
  j["k2"] = {block.k2.x, block.k2.y, block.k2.z};
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) {
      row.push_back({block.M(r, c).real(), block.M(r, c).imag()});
    }
    rows.push_back(row);
  }
  j["M"] = rows;
  j["B_l"] = {block.B_l.real(), block.B_l.imag()};
  j["B_l1"] = {block.B_l1.real(), block.B_l1.imag()};
  j["V_l"] = block.V_l;
  j["V_l_plus"] = block.V_l_plus;
  j["V_l_minus"] = block.V_l_minus;  // defined by the derivation, unused downstream
  stamp_meta(j, config_digest);
  return j;
}

json theorem_report_json(const TheoremReport& rep, const std::string& config_digest) {
  json j;
  j["hypothesis_met"] = rep.hypothesis_met;
  j["core_strength"] = rep.core_strength;
  j["lim_p2_vtilde"] = rep.lim_p2_vtilde;
  j["lim_p2_error"] = rep.lim_p2_error;
  j["lim_r4_v"] = rep.lim_r4_v;
  j["lim_r4_error"] = rep.lim_r4_error;
  j["slope_at_zero"] = rep.slope_at_zero;
  j["slope_residual"] = rep.slope_residual;
  j["predicted_slope"] = rep.predicted_slope;
  j["proportionality_ratio"] = rep.proportionality_ratio;
  j["sound_coefficient"] = rep.sound_coefficient;
  j["sign_check"] = rep.sign_check;
  j["pass"] = rep.proportionality_pass;
  j["tolerance"] = rep.tolerance;
  stamp_meta(j, config_digest);
  return j;
}

}  // namespace exspec::io
