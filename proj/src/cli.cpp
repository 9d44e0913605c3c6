#include "gkls/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"

#include "gkls/classical.hpp"
#include "gkls/error.hpp"
#include "gkls/generator.hpp"
#include "gkls/io.hpp"
#include "gkls/lyapunov.hpp"
#include "gkls/parallel.hpp"
#include "gkls/pauli.hpp"
#include "gkls/spectra.hpp"
#include "gkls/witness.hpp"

namespace gkls::cli {

namespace {

std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", std::abs(v) < 1e-13 ? 0.0 : v);
  return buf;
}

std::string show(Complex z) {
  if (std::abs(z.imag()) < 1e-13) return show(z.real());
  return show(z.real()) + (z.imag() < 0 ? " - " : " + ") + show(std::abs(z.imag())) + "i";
}

template <class Seq>
std::string join(const Seq& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ", ";
    out += show(v);
  }
  return out;
}

GklsGenerator resolve(const Source& s) {
  if (!s.force_file && is_preset(s.path)) return preset(s.path);
  return load_generator_file(s.path);
}

std::string name_of(const GklsGenerator& g, const Source& s) { return g.label.empty() ? s.path : g.label; }

std::vector<double> linspace(double a, double b, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * k / steps;
  return out;
}

NormKind parse_norm(const std::string& name) {
  if (name == "one") return NormKind::one;
  if (name == "two") return NormKind::two;
  if (name == "inf") return NormKind::inf;
  throw Error(Errc::InvalidArgument, "norm must be one, two or inf, got '" + name + "'");
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::Unconverged ? kUnconverged : kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_file_atomic(path, j.dump(2) + "\n");
  }
}

}  // namespace

std::string_view describe_exit(int code) {
  switch (code) {
    case kOk: return "ok";
    case kInternalError: return "internal error";
    case kInputError: return "input error";
    case kBoundViolated: return "bound violated";
    case kWitnessFired: return "non-Markovianity witness fired";
    case kUnconverged: return "unconverged";
    default: return "unknown";
  }
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(o.tol >= 0.0)) throw Error(Errc::InvalidArgument, "--tol must be nonnegative");
    const GklsGenerator g0 = resolve(o.source);
    const GklsGenerator g = g0.time_dependent ? frozen(g0, o.time) : g0;
    const CanonicalForm cf = canonical_form(g);
    const RelaxationSpectrum spec = relaxation_spectrum(g);
    BoundReport b = check_bound(spec, g.dim);
    const double tol = o.tol * std::max(1.0, b.gamma_max);
    b.satisfied = b.margin >= -tol;
    b.saturated = std::abs(b.margin) <= tol;

    std::vector<double> gammas;
    for (std::size_t k = 0; k < cf.channels().size(); ++k) gammas.push_back(cf.gamma(k));

    out << "generator: " << name_of(g0, o.source) << " (d = " << g.dim << ")\n";
    if (g0.time_dependent) out << "frozen at t = " << show(o.time) << '\n';
    out << "canonical rates: " << (gammas.empty() ? std::string("none") : join(gammas)) << '\n';
    out << "completely positive: " << (cf.completely_positive ? "yes" : "no") << '\n';
    out << "relaxation rates: " << join(spec.rates) << '\n';
    if (!spec.diagonalizable) out << "warning: near-defective (eigenvector condition " << show(spec.vector_condition) << ")\n";
    out << "Gamma_max = " << show(b.gamma_max) << ", (1/d) sum Gamma = " << show(b.total_over_d)
        << ", margin = " << show(b.margin) << '\n';
    out << "bound: " << (b.satisfied ? "satisfied" : "VIOLATED") << (b.saturated ? " (saturated)" : "") << '\n';

    if (!o.json_out.empty()) {
      json j;
      j["label"] = g0.label;
      j["dim"] = g.dim;
      j["time"] = o.time;
      j["canonical_rates"] = gammas;
      j["completely_positive"] = cf.completely_positive;
      j["spectrum"] = spectrum_to_json(spec);
      j["bound"] = bound_to_json(b);
      emit_json(j, o.json_out, out);
    }
    return b.satisfied ? kOk : kBoundViolated;
  });
}

int cmd_witness(const WitnessOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.steps < 1) throw Error(Errc::InvalidArgument, "--steps must be at least 1");
    if (!(o.t1 > o.t0)) throw Error(Errc::InvalidArgument, "--t1 must exceed --t0");
    if (o.t0 < 0.0) throw Error(Errc::InvalidArgument, "--t0 must be nonnegative");
    const GklsGenerator g = resolve(o.source);
    const WitnessReport r = scan(g, linspace(o.t0, o.t1, o.steps));
    const auto worst = std::min_element(r.margin.begin(), r.margin.end());

    out << "generator: " << name_of(g, o.source) << " (d = " << g.dim << ")"
        << (g.time_dependent ? "" : ", time-autonomous") << '\n';
    out << "grid: " << r.grid.size() << " points on [" << show(o.t0) << ", " << show(o.t1) << "]\n";
    out << "CP-divisible on grid: " << (r.cp_divisible ? "yes" : "no") << '\n';
    out << "smallest margin: " << show(*worst) << " at t = " << show(r.grid[worst - r.margin.begin()]) << '\n';
    if (r.violations.empty()) {
      out << "no violation of the relaxation-rate bound\n";
    } else {
      out << "violation intervals:";
      for (const auto& iv : r.violations) out << " [" << show(iv.start) << ", " << show(iv.end) << "]";
      out << "\nnon-Markovian: the bound is violated\n";
    }
    if (!o.json_out.empty()) emit_json(witness_to_json(r), o.json_out, out);
    return r.violations.empty() ? kOk : kWitnessFired;
  });
}

int cmd_lyapunov(const LyapunovCliOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(o.horizon > 0.0)) throw Error(Errc::InvalidArgument, "--horizon must be positive");
    if (o.mode != "backward" && o.mode != "qr") throw Error(Errc::InvalidArgument, "--mode must be backward or qr");
    const GklsGenerator g = resolve(o.source);
    LyapunovOptions opts;
    opts.norm = parse_norm(o.norm);
    opts.throw_on_unconverged = false;

    LyapunovEstimate est;
    out << "generator: " << name_of(g, o.source) << " (d = " << g.dim << ")\n";
    if (o.mode == "backward") {
      est = max_exponent_backward(g, random_state(g.dim, o.seed), o.horizon, o.interval, opts);
      const double gmax = relaxation_spectrum(g).rates.back();
      out << "chi = " << show(est.chi) << '\n';
      out << "Gamma_max = " << show(gmax) << ", relative difference = "
          << show(std::abs(est.chi - gmax) / std::max(1.0, gmax)) << '\n';
    } else if (g.time_dependent) {
      const DivisibilityReport rep = divisibility_bounds(g, o.horizon, o.interval, opts);
      est = rep.estimate;
      out << "spectrum: " << join(*est.spectrum) << '\n';
      out << "chi_max = " << show(rep.lhs) << ", (1/d) sum chi = " << show(rep.rhs_cp) << '\n';
      out << "correction: sup = " << show(rep.correction_sup) << ", mean = " << show(rep.correction_mean) << '\n';
      out << "CP bound on exponents: " << (rep.cp_bound_holds ? "holds" : "violated") << '\n';
      out << "corrected bound: " << (rep.corrected_bound_holds ? "holds" : "violated") << '\n';
    } else {
      est = qr_spectrum(g, o.horizon, o.interval, opts);
      out << "spectrum: " << join(*est.spectrum) << '\n';
      out << "relaxation rates: " << join(relaxation_spectrum(g).rates) << '\n';
    }
    out << "convergence gap: " << show(est.convergence_gap) << (est.converged ? "" : " (UNCONVERGED)") << '\n';
    if (!o.csv_out.empty()) write_file_atomic(o.csv_out, lyapunov_windows_csv(est));
    return est.converged ? kOk : kUnconverged;
  });
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.dim < 2 || o.dim > 6) throw Error(Errc::InvalidArgument, "--dim must be in [2, 6]");
    if (o.count < 1) throw Error(Errc::InvalidArgument, "--count must be at least 1");
    const int max_channels = o.dim * o.dim - 1;
    if (o.channels < 0 || o.channels > max_channels)
      throw Error(Errc::InvalidArgument, "--channels must be in [0, " + std::to_string(max_channels) + "]");
    if (!(o.tol >= 0.0)) throw Error(Errc::InvalidArgument, "--tol must be nonnegative");
    const int n = o.channels == 0 ? max_channels : o.channels;

    struct Row {
      std::uint64_t seed;
      double gamma_sum;
      BoundReport bound;
    };
    std::vector<Row> rows(static_cast<std::size_t>(o.count));
    parallel_for(rows.size(), [&](std::size_t i) {
      const std::uint64_t seed = o.seed + i;
      const GklsGenerator g = random_cp(o.dim, n, seed);
      double sum = 0.0;
      for (const double r : g.rates_at(0.0)) sum += r;
      rows[i] = {seed, sum, check_bound(relaxation_spectrum(g), o.dim)};
    });

    std::size_t violated = 0, saturated = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string csv = csv_row({"seed", "gamma_sum", "gamma_max", "margin", "saturated"});
    for (auto& r : rows) {
      const double tol = o.tol * std::max(1.0, r.bound.gamma_max);
      r.bound.satisfied = r.bound.margin >= -tol;
      r.bound.saturated = std::abs(r.bound.margin) <= tol;
      violated += r.bound.satisfied ? 0 : 1;
      saturated += r.bound.saturated ? 1 : 0;
      worst = std::min(worst, r.bound.margin);
      csv += csv_row({std::to_string(r.seed), format_double(r.gamma_sum), format_double(r.bound.gamma_max),
                      format_double(r.bound.margin), r.bound.saturated ? "1" : "0"});
    }
    if (!o.csv_out.empty()) write_file_atomic(o.csv_out, csv);
    out << "samples: " << rows.size() << " (d = " << o.dim << ", channels = " << n << ", seeds " << o.seed << ".."
        << o.seed + rows.size() - 1 << ")\n";
    out << "smallest margin: " << show(worst) << '\n';
    out << "saturated: " << saturated << ", violated: " << violated << '\n';
    return violated == 0 ? kOk : kBoundViolated;
  });
}

int cmd_classical(const ClassicalOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.rates.empty() == o.path.empty())
      throw Error(Errc::InvalidArgument, "give exactly one of --rates or a Kolmogorov matrix file");
    KolmogorovGenerator k;
    if (!o.rates.empty()) {
      std::vector<double> r;
      std::stringstream ss(o.rates);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) throw Error(Errc::InvalidArgument, "empty entry in --rates");
        const std::string tok = item.substr(first, last - first + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
          throw Error(Errc::InvalidArgument, "cannot read rate '" + tok + "'");
        r.push_back(v);
      }
      if (r.empty()) throw Error(Errc::InvalidArgument, "--rates is empty");
      k = from_rates(r);
    } else {
      if (!std::filesystem::exists(o.path)) throw Error(Errc::FileNotFound, o.path);
      const RealMatrix m = kolmogorov_matrix_from_json(parse_json_text(read_file(o.path)));
      try {
        k = validate(m);
      } catch (const Error& e) {
        throw Error(Errc::ValidationError, e.what());
      }
    }
    const ClassicalSpectrum s = classical_spectrum(k);
    out << "d = " << k.dim << '\n';
    out << "spectrum: " << join(s.eigenvalues) << '\n';
    out << "rates: " << join(s.rates) << '\n';
    double total = 0.0;
    for (const double r : s.rates) total += r;
    const double top = s.rates.empty() ? 0.0 : s.rates.back();
    out << "max rate " << show(top) << (top > total / k.dim ? " exceeds" : " is within") << " (1/d) sum = "
        << show(total / k.dim) << "; classical generators are not bound by this inequality\n";
    return kOk;
  });
}

int cmd_track(const TrackOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.steps < 2) throw Error(Errc::InvalidArgument, "--steps must be at least 2");
    if (!(o.t1 > o.t0)) throw Error(Errc::InvalidArgument, "--t1 must exceed --t0");
    const GklsGenerator g = resolve(o.source);
    const Trajectory traj = evolve(g, random_state(g.dim, o.seed), linspace(o.t0, o.t1, o.steps));
    const EigenTrack track = spectral_track(traj);
    const auto rows = track_table(g, track);

    std::vector<std::string> header{"time"};
    for (int i = 1; i <= g.dim; ++i) header.push_back("p_" + std::to_string(i));
    header.insert(header.end(), {"residual", "w_inf_norm", "min_w_slack"});
    std::string csv = csv_row(header);
    double worst_residual = 0.0, worst_w = 0.0, min_slack = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      std::vector<std::string> fields{format_double(r.time)};
      for (Eigen::Index i = 0; i < r.populations.size(); ++i) fields.push_back(format_double(r.populations(i)));
      fields.insert(fields.end(), {format_double(r.residual), format_double(r.w_inf_norm), format_double(r.min_w_slack)});
      csv += csv_row(fields);
      if (std::isfinite(r.residual)) worst_residual = std::max(worst_residual, r.residual);
      worst_w = std::max(worst_w, r.w_inf_norm);
      min_slack = std::min(min_slack, r.min_w_slack);
    }
    if (!o.csv_out.empty()) {
      write_file_atomic(o.csv_out, csv);
    } else {
      out << csv;
    }
    out << "largest Pauli residual: " << show(worst_residual) << ", largest |W|_inf: " << show(worst_w)
        << ", smallest w slack: " << show(min_slack) << '\n';
    return kOk;
  });
}

int cmd_preset(const PresetOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    emit_json(generator_to_json(preset(o.name)), o.json_out, out);
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relaxation-rate analysis of GKLS generators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gkls_rates 1.0");

  auto add_source = [](CLI::App* sub, Source& s) {
    sub->add_option("generator", s.path, "generator JSON file or preset name")->required();
    sub->add_flag("--file", s.force_file, "treat the argument as a file even if it names a preset");
  };

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "canonical rates, relaxation spectrum and the rate bound");
  add_source(a, analyze.source);
  a->add_option("--json", analyze.json_out, "write the report as JSON ('-' for stdout)");
  a->add_option("--tol", analyze.tol, "relative tolerance on the margin");
  a->add_option("--time", analyze.time, "freeze a time-dependent generator at this time");

  WitnessOptions witness;
  auto* w = app.add_subcommand("witness", "scan the time-local bound of a time-dependent generator");
  add_source(w, witness.source);
  w->add_option("--t0", witness.t0);
  w->add_option("--t1", witness.t1);
  w->add_option("--steps", witness.steps, "number of grid intervals");
  w->add_option("--json", witness.json_out);

  LyapunovCliOptions lyap;
  auto* l = app.add_subcommand("lyapunov", "Lyapunov exponents of the backward or auxiliary flow");
  add_source(l, lyap.source);
  l->add_option("--horizon", lyap.horizon);
  l->add_option("--mode", lyap.mode)->check(CLI::IsMember({"backward", "qr"}));
  l->add_option("--norm", lyap.norm)->check(CLI::IsMember({"one", "two", "inf"}));
  l->add_option("--interval", lyap.interval, "renormalization interval (0 = automatic)");
  l->add_option("--seed", lyap.seed, "seed of the initial state");
  l->add_option("--csv", lyap.csv_out, "per-window growth rates");

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep", "check the bound on random completely positive generators");
  s->add_option("--dim", sweep.dim);
  s->add_option("--count", sweep.count);
  s->add_option("--seed", sweep.seed);
  s->add_option("--channels", sweep.channels, "channels per generator (0 = d^2 - 1)");
  s->add_option("--tol", sweep.tol);
  s->add_option("--csv", sweep.csv_out);

  ClassicalOptions classical;
  auto* c = app.add_subcommand("classical", "Kolmogorov generator with prescribed relaxation rates");
  c->add_option("--rates", classical.rates, "comma-separated nonnegative rates");
  c->add_option("matrix", classical.path, "JSON file with a Kolmogorov matrix under \"k\"");

  TrackOptions track;
  auto* t = app.add_subcommand("track", "populations and Pauli rate-equation diagnostics along a trajectory");
  add_source(t, track.source);
  t->add_option("--t0", track.t0);
  t->add_option("--t1", track.t1);
  t->add_option("--steps", track.steps);
  t->add_option("--seed", track.seed);
  t->add_option("--csv", track.csv_out);

  PresetOptions pre;
  auto* p = app.add_subcommand("preset", "print a built-in generator as JSON");
  p->add_option("name", pre.name)->required();
  p->add_option("--json", pre.json_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (a->parsed()) return cmd_analyze(analyze, out, err);
  if (w->parsed()) return cmd_witness(witness, out, err);
  if (l->parsed()) return cmd_lyapunov(lyap, out, err);
  if (s->parsed()) return cmd_sweep(sweep, out, err);
  if (c->parsed()) return cmd_classical(classical, out, err);
  if (t->parsed()) return cmd_track(track, out, err);
  if (p->parsed()) return cmd_preset(pre, out, err);
  return kInputError;
}

}  // namespace gkls::cli
