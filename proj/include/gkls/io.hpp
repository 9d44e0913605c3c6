#pragma once

// Generator files, report JSON and CSV output.
//
// Generator file:
//   { "dim": 2,
//     "hamiltonian": [[[re, im], ...], ...],
//     "channels": [ { "rate": 0.5 | "1 - 0.5*tanh(t)", "matrix": [[[re, im], ...], ...] } ],
//     "label": "optional" }
// A string rate makes the generator time-dependent.

#include <string>
#include <vector>

#include "json.hpp"

#include "gkls/classical.hpp"
#include "gkls/generator.hpp"
#include "gkls/lyapunov.hpp"
#include "gkls/spectra.hpp"
#include "gkls/witness.hpp"

namespace gkls {

using json = nlohmann::json;

/// 17 significant digits, so doubles survive a round trip; "nan", "inf", "-inf".
std::string format_double(double v);

std::string csv_row(const std::vector<std::string>& fields);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& j, const std::string& where, Eigen::Index rows, Eigen::Index cols);

json generator_to_json(const GklsGenerator& g);
/// Throws Errc::SchemaError (with the JSON pointer of the offending value)
/// or Errc::ValidationError (the document is well-formed but not a generator).
GklsGenerator generator_from_json(const json& j);
GklsGenerator load_generator_file(const std::string& path);

json parse_json_text(const std::string& text);

json spectrum_to_json(const RelaxationSpectrum& spec);
json bound_to_json(const BoundReport& b);
json witness_to_json(const WitnessReport& r);
json lyapunov_to_json(const LyapunovEstimate& e);
json kolmogorov_to_json(const KolmogorovGenerator& k);

/// { "k": [[...], ...] } with a real square matrix.
RealMatrix kolmogorov_matrix_from_json(const json& j);

std::string lyapunov_windows_csv(const LyapunovEstimate& e);

}  // namespace gkls
