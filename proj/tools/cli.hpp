#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nktoric::cli {

enum class Command { Verify, Region, Spectrum, SingularOrbits, Surface, Radial, Sweep, Search, Lemmas };
enum class Format { Json, Csv };

std::string to_string(Command c);

struct RunConfig {
  Command command = Command::Verify;
  std::string phi;  // file path or polynomial text; empty selects the built-in solution
  int degree = 3;
  int starts = 100;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  std::string out;  // empty writes to the output stream
  Format format = Format::Json;
  int jobs = 1;
  double t0 = 1.0, x0 = 5.0, xp0 = 2.0;
  double max_step = std::numeric_limits<double>::infinity();
  std::optional<double> radius;
  int seeds = 64;
  int directions = 2000;
  int samples = 0;  // 0 picks the per-command default
  int grid = 20;
  std::string command_line;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses arguments (argv[0] is the program name). Returns nullopt after
/// printing help to out. Throws UsageError on bad input.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out);

/// Exit code 0 on success, 1 when the mathematics fails (nonzero residual,
/// counterexample found), 2 on usage or input errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args followed by run, mapping usage errors to exit code 2.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Locale-independent shortest form with 17 significant digits.
std::string format_double(double v);

}  // namespace nktoric::cli
