#include "gkls/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "gkls/error.hpp"

namespace gkls {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw Error(Errc::SchemaError, (where.empty() ? std::string("/") : where) + ": " + what);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_to_json(Complex z) { return json::array({number_or_null(z.real()), number_or_null(z.imag())}); }

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) schema(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema(where, "number is not finite");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(Errc::FileNotFound, "cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw Error(Errc::FileNotFound, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::FileNotFound, "cannot move output into place at " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::FileNotFound, path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

json complex_matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix complex_matrix_from_json(const json& j, const std::string& where, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) schema(where, "expected an array of rows");
  if (static_cast<Eigen::Index>(j.size()) != rows)
    schema(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rw = where + "/" + std::to_string(i);
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) schema(rw, "expected an array of [re, im] pairs");
    if (static_cast<Eigen::Index>(row.size()) != cols)
      schema(rw, "expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::string cw = rw + "/" + std::to_string(c);
      const json& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2) schema(cw, "expected a [re, im] pair");
      m(i, c) = Complex(number_at(z[0], cw + "/0"), number_at(z[1], cw + "/1"));
    }
  }
  return m;
}

json generator_to_json(const GklsGenerator& g) {
  json j;
  j["dim"] = g.dim;
  j["hamiltonian"] = complex_matrix_to_json(g.hamiltonian);
  json channels = json::array();
  for (const auto& c : g.channels) {
    json cj;
    if (const auto* v = std::get_if<double>(&c.rate)) {
      cj["rate"] = *v;
    } else {
      cj["rate"] = std::get<RateExpr>(c.rate).to_string();
    }
    cj["matrix"] = complex_matrix_to_json(c.op);
    channels.push_back(std::move(cj));
  }
  j["channels"] = std::move(channels);
  if (!g.label.empty()) j["label"] = g.label;
  return j;
}

GklsGenerator generator_from_json(const json& j) {
  if (!j.is_object()) schema("", "expected an object");
  if (!j.contains("dim")) schema("/dim", "missing");
  if (!j["dim"].is_number_integer()) schema("/dim", "expected an integer");
  const auto dim = j["dim"].get<long long>();
  if (dim < 2) schema("/dim", "must be at least 2");
  if (dim > 64) schema("/dim", "too large");
  const auto d = static_cast<Eigen::Index>(dim);
  if (!j.contains("hamiltonian")) schema("/hamiltonian", "missing");
  const ComplexMatrix h = complex_matrix_from_json(j["hamiltonian"], "/hamiltonian", d, d);

  std::vector<Channel> channels;
  if (j.contains("channels")) {
    const json& cs = j["channels"];
    if (!cs.is_array()) schema("/channels", "expected an array");
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::string where = "/channels/" + std::to_string(k);
      const json& c = cs[k];
      if (!c.is_object()) schema(where, "expected an object");
      if (!c.contains("rate")) schema(where + "/rate", "missing");
      if (!c.contains("matrix")) schema(where + "/matrix", "missing");
      Rate rate;
      const json& r = c["rate"];
      if (r.is_number()) {
        rate = number_at(r, where + "/rate");
      } else if (r.is_string()) {
        try {
          rate = parse_rate(r.get<std::string>());
        } catch (const Error& e) {
          schema(where + "/rate", e.what());
        }
      } else {
        schema(where + "/rate", "expected a number or an expression string");
      }
      channels.push_back({std::move(rate), complex_matrix_from_json(c["matrix"], where + "/matrix", d, d)});
    }
  }
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) schema("/label", "expected a string");
    label = j["label"].get<std::string>();
  }
  try {
    return build(h, std::move(channels), nullptr, std::move(label));
  } catch (const Error& e) {
    throw Error(Errc::ValidationError, e.what());
  }
}

GklsGenerator load_generator_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::FileNotFound, path);
  return generator_from_json(parse_json_text(read_file(path)));
}

json spectrum_to_json(const RelaxationSpectrum& spec) {
  json j;
  json values = json::array();
  for (const auto& z : spec.eigenvalues) values.push_back(complex_to_json(z));
  j["eigenvalues"] = std::move(values);
  j["rates"] = spec.rates;
  j["diagonalizable"] = spec.diagonalizable;
  j["vector_condition"] = number_or_null(spec.vector_condition);
  return j;
}

json bound_to_json(const BoundReport& b) {
  return json{{"gamma_max", b.gamma_max},
              {"total_over_d", b.total_over_d},
              {"margin", b.margin},
              {"satisfied", b.satisfied},
              {"saturated", b.saturated}};
}

json witness_to_json(const WitnessReport& r) {
  json j;
  j["grid"] = r.grid;
  j["gammas"] = r.local_rates;
  j["rates"] = r.relax_rates;
  j["margin"] = r.margin;
  json v = json::array();
  for (const auto& iv : r.violations) v.push_back(json{{"start", iv.start}, {"end", iv.end}});
  j["violations"] = std::move(v);
  j["cp_divisible"] = r.cp_divisible;
  return j;
}

json lyapunov_to_json(const LyapunovEstimate& e) {
  json j;
  j["chi"] = e.chi;
  if (e.spectrum) j["spectrum"] = *e.spectrum;
  j["burn_in"] = e.burn_in;
  j["horizon"] = e.horizon;
  j["convergence_gap"] = e.convergence_gap;
  j["converged"] = e.converged;
  return j;
}

json kolmogorov_to_json(const KolmogorovGenerator& k) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < k.k.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < k.k.cols(); ++c) row.push_back(k.k(i, c));
    rows.push_back(std::move(row));
  }
  return json{{"dim", k.dim}, {"k", std::move(rows)}};
}

RealMatrix kolmogorov_matrix_from_json(const json& j) {
  if (!j.is_object()) schema("", "expected an object");
  if (!j.contains("k")) schema("/k", "missing");
  const json& rows = j["k"];
  if (!rows.is_array() || rows.empty()) schema("/k", "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  RealMatrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string where = "/k/" + std::to_string(i);
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      schema(where, "expected " + std::to_string(n) + " numbers");
    for (Eigen::Index c = 0; c < n; ++c) k(i, c) = number_at(row[static_cast<std::size_t>(c)], where + "/" + std::to_string(c));
  }
  return k;
}

std::string lyapunov_windows_csv(const LyapunovEstimate& e) {
  std::string out = csv_row({"window_start", "window_chi", "cumulative_chi"});
  for (const auto& w : e.windows)
    out += csv_row({format_double(w.window_start), format_double(w.window_chi), format_double(w.cumulative_chi)});
  return out;
}

}  // namespace gkls
