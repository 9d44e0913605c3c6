#pragma once

// Command-line front end. Exit codes:
//   0  success / bound satisfied / no witness
//   2  input error (missing file, malformed JSON, invalid generator or flags)
//   3  autonomous bound violated
//   4  non-Markovianity witness fired
//   5  Lyapunov estimate did not converge (partial results are still written)

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace gkls::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kInputError = 2,
  kBoundViolated = 3,
  kWitnessFired = 4,
  kUnconverged = 5,
};

struct Source {
  std::string path;         // preset name or file path
  bool force_file = false;  // never interpret `path` as a preset name
};

struct AnalyzeOptions {
  Source source;
  std::string json_out;
  double tol = 1e-8;
  double time = 0.0;  // time at which a time-dependent generator is frozen
};

struct WitnessOptions {
  Source source;
  double t0 = 0.0;
  double t1 = 10.0;
  int steps = 1000;
  std::string json_out;
};

struct LyapunovCliOptions {
  Source source;
  double horizon = 50.0;
  std::string mode = "backward";  // backward | qr
  std::string norm = "two";       // one | two | inf
  double interval = 0.0;          // renormalization interval, 0 = automatic
  std::uint64_t seed = 1;         // initial state for backward mode
  std::string csv_out;
};

struct SweepOptions {
  int dim = 2;
  long count = 100;
  std::uint64_t seed = 0;
  int channels = 0;  // 0 = d^2 - 1
  double tol = 1e-8;
  std::string csv_out;
};

struct ClassicalOptions {
  std::string rates;  // "r1,r2,..."
  std::string path;   // JSON file with a "k" matrix
};

struct TrackOptions {
  Source source;
  double t0 = 0.0;
  double t1 = 5.0;
  int steps = 500;
  std::uint64_t seed = 1;
  std::string csv_out;
};

struct PresetOptions {
  std::string name;
  std::string json_out;
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err);
int cmd_witness(const WitnessOptions& o, std::ostream& out, std::ostream& err);
int cmd_lyapunov(const LyapunovCliOptions& o, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err);
int cmd_classical(const ClassicalOptions& o, std::ostream& out, std::ostream& err);
int cmd_track(const TrackOptions& o, std::ostream& out, std::ostream& err);
int cmd_preset(const PresetOptions& o, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string_view describe_exit(int code);

}  // namespace gkls::cli
