#include "cli.hpp"

#include "nktoric/nk_core.hpp"
#include "nktoric/radial.hpp"
#include "nktoric/region.hpp"
#include "nktoric/search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#ifndef NKTORIC_VERSION
#define NKTORIC_VERSION "0.0.0"
#endif

namespace nktoric::cli {
namespace {

using json = nlohmann::ordered_json;

const std::map<std::string, Command> kCommands{
    {"verify", Command::Verify},   {"region", Command::Region},
    {"spectrum", Command::Spectrum}, {"singular-orbits", Command::SingularOrbits},
    {"surface", Command::Surface}, {"radial", Command::Radial},
    {"sweep", Command::Sweep},     {"search", Command::Search},
    {"lemmas", Command::Lemmas},
};

constexpr double kSpectrumTolerance = 1e-9;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Poly3 load_phi(const std::string& source) {
  if (source.empty()) return phi0();
  std::string text = source;
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) {
    std::ifstream in(source);
    if (!in) throw InputError("cannot read " + source);
    text.clear();
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      text += line + ' ';
    }
  } else if (source.find('/') != std::string::npos || source.ends_with(".txt")) {
    throw InputError("cannot read " + source);
  }
  try {
    return parse_poly(text);
  } catch (const ParseError& e) {
    throw InputError(std::string("malformed polynomial: ") + e.what());
  }
}

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

class Emitter {
 public:
  Emitter(const RunConfig& config, std::ostream& out) : config_(config), out_(out) {}

  json meta(const std::map<std::string, double>& tolerances) const {
    json m;
    // Infinite settings mean "unbounded" and are left out.
    m["tool"] = "nktoric";
    m["version"] = NKTORIC_VERSION;
    m["command_line"] = config_.command_line;
    m["seed"] = config_.seed;
    json t = json::object();
    for (const auto& [k, v] : tolerances) {
      if (std::isfinite(v)) t[k] = v;
    }
    m["tolerances"] = t;
    return m;
  }

  void json_doc(const json& doc) const { write(doc.dump(2) + "\n"); }

  void csv_doc(const json& meta, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) const {
    std::string s;
    s += "# tool: nktoric " + meta["version"].get<std::string>() + "\n";
    s += "# command_line: " + meta["command_line"].get<std::string>() + "\n";
    s += "# seed: " + std::to_string(meta["seed"].get<std::uint64_t>()) + "\n";
    for (const auto& [k, v] : meta["tolerances"].items()) s += "# " + k + ": " + format_double(v.get<double>()) + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
      s += "\n";
    }
    write(s);
  }

 private:
  void write(const std::string& s) const {
    if (config_.out.empty()) {
      out_ << s;
      return;
    }
    std::ofstream f(config_.out, std::ios::binary);
    if (!f) throw InputError("cannot write " + config_.out);
    f << s;
  }

  const RunConfig& config_;
  std::ostream& out_;
};

Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> d(-radius, radius);
  for (;;) {
    const Vec3 p(d(rng), d(rng), d(rng));
    if (p.norm() < radius) return p;
  }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <class F>
void parallel_for(int n, int jobs, F&& fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(jobs, n); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

int cmd_verify(const RunConfig& c, const Emitter& em, std::ostream& out) {
  const Poly3 phi = load_phi(c.phi);
  const Poly3 residual = star_residual(phi);
  const bool zero = residual.is_zero();
  if (zero) {
    out << "residual: 0 (exact)\n";
  } else {
    out << "residual: " << to_string(residual) << "\n";
  }
  if (!c.out.empty()) {
    json doc;
    doc["meta"] = em.meta({});
    doc["phi"] = to_string(phi);
    doc["residual"] = to_string(residual);
    doc["exact_zero"] = zero;
    em.json_doc(doc);
  }
  return zero ? 0 : 1;
}

int cmd_region(const RunConfig& c, const Emitter& em) {
  const PotentialField field(load_phi(c.phi));
  const double radius = c.radius.value_or(std::sqrt(3.0));
  const int samples = c.samples > 0 ? c.samples : 10000;
  std::mt19937_64 rng(c.seed);
  int hat = 0, full = 0;
  json counterexamples = json::array();
  for (int i = 0; i < samples; ++i) {
    const Vec3 p = random_in_ball(rng, radius);
    if (!in_U0_hat(field, p)) continue;
    ++hat;
    if (in_U0(field, p)) {
      ++full;
    } else {
      counterexamples.push_back(vec(p));
    }
  }
  json doc;
  doc["meta"] = em.meta({{"positive_definite", 1e-10}});
  doc["radius"] = radius;
  doc["samples"] = samples;
  doc["in_U0_hat"] = hat;
  doc["in_U0"] = full;
  doc["counterexamples"] = counterexamples;
  em.json_doc(doc);
  return counterexamples.empty() ? 0 : 1;
}

int cmd_spectrum(const RunConfig& c, const Emitter& em) {
  const PotentialField field(load_phi(c.phi));
  const double radius = c.radius.value_or(std::sqrt(3.0));
  const int samples = c.samples > 0 ? c.samples : 100;
  std::mt19937_64 rng(c.seed);
  json points = json::array();
  double worst = 0.0;
  int found = 0;
  for (long attempt = 0; found < samples && attempt < 1000L * samples; ++attempt) {
    const Vec3 p = random_in_ball(rng, radius);
    if (!in_U0_hat(field, p)) continue;
    const JSpectrum s = j_squared_spectrum_check(field, p);
    worst = std::max(worst, s.max_mismatch);
    points.push_back({{"point", vec(p)},
                      {"eigenvalues", json::array({s.eigenvalues[0], s.eigenvalues[1], s.eigenvalues[2]})},
                      {"predicted", s.predicted},
                      {"mismatch", s.max_mismatch}});
    ++found;
  }
  json doc;
  doc["meta"] = em.meta({{"spectrum", kSpectrumTolerance}});
  doc["samples"] = found;
  doc["max_mismatch"] = worst;
  doc["points"] = points;
  em.json_doc(doc);
  return worst < kSpectrumTolerance && found == samples ? 0 : 1;
}

int cmd_singular_orbits(const RunConfig& c, const Emitter& em) {
  const double radius = c.radius.value_or(10.0);
  SingularOrbitOptions opt;
  opt.newton_tol = c.tol;
  const auto orbits = find_singular_orbits(load_phi(c.phi), radius, c.seeds, opt);
  const auto meta = em.meta({{"newton", opt.newton_tol}, {"dedup", opt.dedup_distance}});
  if (c.format == Format::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& o : orbits) {
      rows.push_back({format_double(o.point[0]), format_double(o.point[1]), format_double(o.point[2]),
                      format_double(o.eps2), format_double(o.cvv)});
    }
    em.csv_doc(meta, {"mu1", "mu2", "mu3", "eps2", "cvv"}, rows);
    return 0;
  }
  json list = json::array();
  for (const auto& o : orbits) {
    list.push_back({{"point", vec(o.point)}, {"direction", vec(o.collapse_direction)}, {"eps2", o.eps2}, {"cvv", o.cvv}});
  }
  json doc;
  doc["meta"] = meta;
  doc["radius"] = radius;
  doc["seeds"] = c.seeds;
  doc["count"] = orbits.size();
  doc["orbits"] = list;
  em.json_doc(doc);
  return 0;
}

int cmd_surface(const RunConfig& c, const Emitter& em) {
  BoundaryOptions opt;
  if (c.radius) opt.max_radius = *c.radius;
  const auto points = boundary_surface(load_phi(c.phi), c.directions, opt);
  const auto meta = em.meta({{"root", opt.tol}, {"scan_step", opt.scan_step}});
  if (c.format == Format::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : points) {
      rows.push_back({format_double(p.point[0]), format_double(p.point[1]), format_double(p.point[2]),
                      format_double(p.radius)});
    }
    em.csv_doc(meta, {"x", "y", "z", "r"}, rows);
    return 0;
  }
  json list = json::array();
  for (const auto& p : points) list.push_back({{"direction", vec(p.direction)}, {"r", p.radius}});
  json doc;
  doc["meta"] = meta;
  doc["count"] = points.size();
  doc["points"] = list;
  em.json_doc(doc);
  return 0;
}

IntegratorOptions integrator_options(const RunConfig& c) {
  IntegratorOptions opt;
  opt.tol = c.tol;
  opt.max_step = c.max_step;
  return opt;
}

int cmd_radial(const RunConfig& c, const Emitter& em) {
  const RadialState start{c.t0, c.x0, c.xp0};
  if (!start.admissible()) throw UsageError("inadmissible start: need x0 > 2 t0 xp0 > 2 t0 sqrt(2 t0), t0 > 0");
  const IntegratorOptions opt = integrator_options(c);
  const Trajectory fwd = integrate(start, Direction::Forward, opt);
  const Trajectory bwd = integrate(start, Direction::Backward, opt);
  std::vector<RadialState> states = bwd.states;
  states.insert(states.end(), fwd.states.begin() + 1, fwd.states.end());
  const auto meta = em.meta({{"integrator", opt.tol}, {"max_step", opt.max_step}, {"step_fraction", opt.regularity_step_fraction}, {"t_floor", opt.t_floor}});
  if (c.format == Format::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : states) {
      rows.push_back({format_double(s.t), format_double(s.x), format_double(s.xp), format_double(s.eps2())});
    }
    em.csv_doc(meta, {"t", "x", "xp", "eps2"}, rows);
    return 0;
  }
  const BoundsReport bounds = check_bounds(fwd);
  json doc;
  doc["meta"] = meta;
  doc["start"] = {{"t0", c.t0}, {"x0", c.x0}, {"xp0", c.xp0}};
  doc["forward"] = {{"t_plus", fwd.t_plus},
                    {"termination", to_string(fwd.termination)},
                    {"final_eps2", fwd.states.back().eps2()},
                    {"steps", fwd.states.size() - 1}};
  doc["backward"] = {{"t_minus", bwd.t_minus}, {"termination", to_string(bwd.termination)}, {"steps", bwd.states.size() - 1}};
  doc["bounds"] = {{"upper_holds", bounds.upper_holds},
                   {"lower_holds", bounds.lower_holds},
                   {"min_upper_slack", bounds.min_upper_slack},
                   {"min_lower_slack", bounds.min_lower_slack}};
  if (fwd.states.size() >= 5) {
    const DecayReport decay = decay_identity_check(fwd);
    doc["decay_identity"] = {{"max_error", decay.max_error}, {"checked", decay.checked}, {"skipped", decay.skipped}};
  }
  json rows = json::array();
  for (const auto& s : states) rows.push_back(json::array({s.t, s.x, s.xp, s.eps2()}));
  doc["columns"] = json::array({"t", "x", "xp", "eps2"});
  doc["states"] = rows;
  em.json_doc(doc);
  return 0;
}

int cmd_sweep(const RunConfig& c, const Emitter& em) {
  if (!(c.t0 > 0.0)) throw UsageError("sweep needs t0 > 0");
  const int n = c.grid;
  const std::vector<RadialState> starts = admissible_grid(c.t0, n);
  const IntegratorOptions opt = integrator_options(c);
  std::vector<Trajectory> runs(starts.size());
  parallel_for(static_cast<int>(starts.size()), c.jobs,
               [&](int i) { runs[i] = integrate(starts[i], Direction::Forward, opt); });
  const auto meta = em.meta({{"integrator", opt.tol}, {"max_step", opt.max_step}, {"step_fraction", opt.regularity_step_fraction}});
  int eps2_zero = 0;
  for (const auto& r : runs) eps2_zero += r.termination == Termination::Eps2Zero;
  if (c.format == Format::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      rows.push_back({format_double(starts[i].t), format_double(starts[i].x), format_double(starts[i].xp),
                      format_double(runs[i].t_plus), to_string(runs[i].termination)});
    }
    em.csv_doc(meta, {"t0", "x0", "xp0", "t_plus", "termination"}, rows);
    return 0;
  }
  json list = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    list.push_back({{"t0", starts[i].t},
                    {"x0", starts[i].x},
                    {"xp0", starts[i].xp},
                    {"t_plus", runs[i].t_plus},
                    {"termination", to_string(runs[i].termination)}});
  }
  json doc;
  doc["meta"] = meta;
  doc["grid"] = n;
  doc["eps2_zero"] = eps2_zero;
  doc["runs"] = list;
  em.json_doc(doc);
  return 0;
}

int cmd_search(const RunConfig& c, const Emitter& em) {
  const CoeffSystem system = build_system(c.degree);
  SearchOptions opt;
  opt.converge_tol = c.tol;
  opt.jobs = c.jobs;
  const SearchSummary summary = newton_search(system, c.starts, c.seed, opt);
  json list = json::array();
  for (const auto& r : summary.converged) {
    json item{{"coeffs", r.coeffs},
              {"residual_norm", r.residual_norm},
              {"higher_norm", r.higher_norm},
              {"classified_as", r.classified_as}};
    if (r.lambda) item["lambda"] = *r.lambda;
    list.push_back(item);
  }
  json monomials = json::array();
  for (const auto& e : system.ansatz().unknowns()) monomials.push_back(json::array({e[0], e[1], e[2]}));
  json doc;
  doc["meta"] = em.meta({{"converge", opt.converge_tol}, {"dedup", opt.dedup_distance}});
  doc["degree"] = c.degree;
  doc["seed"] = c.seed;
  doc["starts"] = c.starts;
  doc["unknowns"] = monomials;
  doc["equations"] = system.equation_count();
  doc["converged"] = list;
  em.json_doc(doc);
  return 0;
}

int cmd_lemmas(const RunConfig& c, const Emitter& em) {
  const int samples = c.samples > 0 ? c.samples : 1000;
  const LemmaReport r = lemma_identity_checks(samples, c.seed);
  json doc;
  doc["meta"] = em.meta({});
  doc["quadratic"] = {{"samples", r.quadratic_samples}, {"failures", r.quadratic_failures}};
  doc["expansion"] = {{"samples", r.expansion_samples}, {"failures", r.expansion_failures}};
  doc["bilinear"] = {{"samples", r.bilinear_samples}, {"failures", r.bilinear_failures}};
  doc["identity_pairing"] = r.identity_pairing;
  doc["zero_pairing"] = r.zero_pairing;
  doc["ok"] = r.ok();
  em.json_doc(doc);
  return r.ok() ? 0 : 1;
}

void validate(const RunConfig& c) {
  if (!(c.tol > 0.0)) throw UsageError("--tol must be positive");
  if (c.starts <= 0) throw UsageError("--starts must be positive");
  if (c.jobs <= 0) throw UsageError("--jobs must be positive");
  if (c.directions <= 0) throw UsageError("--directions must be positive");
  if (c.seeds <= 0) throw UsageError("--seeds must be positive");
  if (c.grid <= 0) throw UsageError("--grid must be positive");
  if (c.samples < 0) throw UsageError("--samples must be nonnegative");
  if (!(c.max_step > 0.0)) throw UsageError("--max-step must be positive");
  if (c.radius && !(*c.radius > 0.0)) throw UsageError("--radius must be positive");
  if (c.degree < 3 || c.degree > 5) throw UsageError("--degree must be 3, 4 or 5");
  const bool tabular = c.command == Command::SingularOrbits || c.command == Command::Surface ||
                       c.command == Command::Radial || c.command == Command::Sweep;
  if (c.format == Format::Csv && !tabular) throw UsageError("csv output is not available for " + to_string(c.command));
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [name, cmd] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out) {
  RunConfig c;
  std::string command, format = "json";
  double radius = 0.0;

  CLI::App app{"Computations for toric nearly Kaehler potentials", "nktoric"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.add_option("command", command, "verify | region | spectrum | singular-orbits | surface | radial | sweep | search | lemmas")
      ->required();
  app.add_option("--phi", c.phi, "Potential: file path or polynomial text (default: the cubic solution)");
  app.add_option("--degree", c.degree, "Ansatz degree for search (3..5)");
  app.add_option("--starts", c.starts, "Newton starts for search");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--tol", c.tol, "Numerical tolerance");
  app.add_option("--out", c.out, "Output file (default: stdout)");
  app.add_option("--format", format, "json or csv");
  app.add_option("--jobs", c.jobs, "Worker threads for search and sweep");
  app.add_option("--t0", c.t0, "Radial start t");
  app.add_option("--x0", c.x0, "Radial start x");
  app.add_option("--xp0", c.xp0, "Radial start x'");
  app.add_option("--max-step", c.max_step, "Largest radial step");
  auto* radius_opt = app.add_option("--radius", radius, "Sampling or search radius");
  app.add_option("--seeds", c.seeds, "Seeds for the singular-orbit search");
  app.add_option("--directions", c.directions, "Ray count for surface");
  app.add_option("--samples", c.samples, "Sample count for region, spectrum and lemmas");
  app.add_option("--grid", c.grid, "Grid size per axis for sweep");

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const auto it = kCommands.find(command);
  if (it == kCommands.end()) throw UsageError("unknown command: " + command);
  c.command = it->second;
  if (format == "json") {
    c.format = Format::Json;
  } else if (format == "csv") {
    c.format = Format::Csv;
  } else {
    throw UsageError("--format must be json or csv");
  }
  if (radius_opt->count() > 0) c.radius = radius;

  std::string line = "nktoric";
  for (std::size_t i = 1; i < args.size(); ++i) line += " " + args[i];
  c.command_line = line;
  validate(c);
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Emitter em(config, out);
  try {
    switch (config.command) {
      case Command::Verify: return cmd_verify(config, em, out);
      case Command::Region: return cmd_region(config, em);
      case Command::Spectrum: return cmd_spectrum(config, em);
      case Command::SingularOrbits: return cmd_singular_orbits(config, em);
      case Command::Surface: return cmd_surface(config, em);
      case Command::Radial: return cmd_radial(config, em);
      case Command::Sweep: return cmd_sweep(config, em);
      case Command::Search: return cmd_search(config, em);
      case Command::Lemmas: return cmd_lemmas(config, em);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse_args(args, out);
    if (!config) return 0;
    return run(*config, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace nktoric::cli
