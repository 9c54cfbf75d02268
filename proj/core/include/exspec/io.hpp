#pragma once

#include <string>

#include <json.hpp>

#include "exspec/dispersion.hpp"
#include "exspec/pairfield.hpp"
#include "exspec/potentials.hpp"
#include "exspec/torus.hpp"
#include "exspec/variational.hpp"

namespace exspec::io {

using json = nlohmann::json;

/// Shortest round-trippable decimal form of a double (printf %.17g with a
/// shorter-form probe); deterministic across runs.
std::string format_double(double x);

/// FNV-1a 64-bit digest, hex encoded; applied to canonical JSON dumps.
std::string digest(const std::string& payload);

/// First line stamped into every CSV: config digest plus the conventions
/// version and kappa.
std::string csv_meta_line(const std::string& config_digest);

/// Adds config_digest / conventions_version / kappa fields to a JSON object.
void stamp_meta(json& j, const std::string& config_digest);

void write_text_file(const std::string& path, const std::string& content);

/// Potential specification record:
/// {"type": "yukawa"|"gaussian"|"lennard-jones"|"r4tail"|"bump"|"table", ...}
/// with optional core_cutoff / tail_exponent / tail_coefficient / tail_start
/// overrides. Table type reads CSV with header `r,V` from "path".
RadialPotential potential_from_json(const json& j);

RadialPotential load_potential_csv(const std::string& path, double tail_exponent = 4.0,
                                   double tail_coefficient = 0.0);

// ---- export formats (external interfaces) ----

std::string spectrum_csv(const RadialSpectrum& spec, const std::string& config_digest);
std::string coefficients_csv(const FourierCoefficients& table, const std::string& config_digest);
std::string solution_csv(const PairFieldSolution& sol, const std::string& config_digest);
std::string curve_csv(const DispersionCurve& curve, const std::string& config_digest,
                      bool drift_column);

json residual_report_json(const PairFieldSolution& sol, const ResidualReport& rep,
                          const std::string& config_digest);
json features_json(const LandauFeatures& features, const std::string& config_digest);
json matrix_json(const VariationalBlock& block, const std::string& config_digest);
json theorem_report_json(const TheoremReport& rep, const std::string& config_digest);

}  // namespace exspec::io
