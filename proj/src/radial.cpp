#include "nktoric/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace nktoric {
namespace {

using State2 = std::array<double, 2>;  // (x, x')

// x'' with the 3 cleared so that integer inputs round once:
//   x'' = (8 (x - 2t x') - 3 x' q) / (6 t q),  q = x'^2 - 2t.
double second_derivative(double t, double x, double xp) {
  const double q = xp * xp - 2.0 * t;
  return (8.0 * (x - 2.0 * t * xp) - 3.0 * xp * q) / (6.0 * t * q);
}

bool field(double t, const State2& y, State2& dy) {
  if (!(t > 0.0)) return false;
  const double q = y[1] * y[1] - 2.0 * t;
  if (!(q > 0.0)) return false;
  dy = {y[1], second_derivative(t, y[0], y[1])};
  return std::isfinite(dy[1]);
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  bool valid = false;
  State2 y{};
  double error = 0.0;  // scaled, accept when <= 1
};

StepResult dp_step(double t, const State2& y, double h, double tol) {
  StepResult out;
  std::array<State2, 7> k;
  auto stage = [&](double tt, std::initializer_list<std::pair<int, double>> comb, State2& dst) {
    State2 yy = y;
    for (auto [idx, a] : comb) {
      yy[0] += h * a * k[idx][0];
      yy[1] += h * a * k[idx][1];
    }
    return field(tt, yy, dst);
  };
  if (!field(t, y, k[0])) return out;
  if (!stage(t + c2 * h, {{0, a21}}, k[1])) return out;
  if (!stage(t + c3 * h, {{0, a31}, {1, a32}}, k[2])) return out;
  if (!stage(t + c4 * h, {{0, a41}, {1, a42}, {2, a43}}, k[3])) return out;
  if (!stage(t + c5 * h, {{0, a51}, {1, a52}, {2, a53}, {3, a54}}, k[4])) return out;
  if (!stage(t + h, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}}, k[5])) return out;
  State2 y5;
  for (int i = 0; i < 2; ++i) {
    y5[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] + b6 * k[5][i]);
  }
  if (!field(t + h, y5, k[6])) {
    // The endpoint left the regular region; report the state for event handling.
    out.y = y5;
    out.valid = false;
    return out;
  }
  double err = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double d = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
    const double scale = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
    err = std::max(err, std::abs(d) / scale);
  }
  out.valid = true;
  out.y = y5;
  out.error = err;
  return out;
}

bool past_boundary(const StepResult& r, double t_new) {
  if (!r.valid) return true;
  const RadialState s{t_new, r.y[0], r.y[1]};
  return !(s.eps2() > 0.0);
}

}  // namespace

bool RadialState::admissible() const {
  if (!(t > 0.0)) return false;
  const double two_t = 2.0 * t;
  return x > two_t * xp && two_t * xp > two_t * std::sqrt(two_t);
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Eps2Zero: return "EPS2_ZERO";
    case Termination::TZeroSingularity: return "T_ZERO_SINGULARITY";
    case Termination::MaxSteps: return "MAX_STEPS";
    case Termination::ConstraintViolation: return "CONSTRAINT_VIOLATION";
  }
  return "UNKNOWN";
}

double rhs(double t, double x, double xp) {
  if (!(t > 0.0)) throw std::domain_error("t <= 0: singular point of the radial ODE");
  if (!(xp * xp - 2.0 * t > 0.0)) throw std::domain_error("x'^2 - 2t <= 0: degenerate radial ODE");
  return second_derivative(t, x, xp);
}

Trajectory integrate(const RadialState& start, Direction direction, const IntegratorOptions& options) {
  if (!start.admissible()) throw std::invalid_argument("inadmissible radial start state");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;

  Trajectory traj;
  traj.states.push_back(start);
  double t = start.t;
  State2 y{start.x, start.xp};
  double h = sign * std::min(options.max_step, 1e-3 * std::max(t, 1e-3));
  bool done = false;

  for (std::size_t step = 0; step < options.max_steps && !done; ++step) {
    if (direction == Direction::Backward && t + h < options.t_floor) h = options.t_floor - t;
    if (std::abs(h) > options.max_step) h = sign * options.max_step;
    // Below tolerance scale the cap would stall the run; the event bisection
    // takes over from there.
    const double cap = options.regularity_step_fraction * (y[1] * y[1] - 2.0 * t);
    if (std::abs(h) > cap && cap > 1e3 * options.tol * std::max(1.0, t)) h = sign * cap;

    StepResult r = dp_step(t, y, h, options.tol);
    const double t_new = t + h;
    if (!r.valid) {
      // A stage left the regular region x'^2 > 2t: shrink towards it.
      h *= 0.5;
      if (direction == Direction::Forward && std::abs(h) < options.tol * std::max(1.0, t)) {
        traj.termination = RadialState{t, y[0], y[1]}.eps2() < std::sqrt(options.tol)
                               ? Termination::Eps2Zero
                               : Termination::ConstraintViolation;
        traj.t_plus = t + 2.0 * h;
        done = true;
        break;
      }
      if (std::abs(h) < options.min_step * std::max(1.0, std::abs(t))) {
        if (direction == Direction::Backward) {
          traj.termination = Termination::ConstraintViolation;
          done = true;
          break;
        }
        throw std::runtime_error("step size underflow");
      }
      continue;
    }
    if (r.error > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(r.error, -0.2));
      if (std::abs(h) < options.min_step * std::max(1.0, std::abs(t))) throw std::runtime_error("step size underflow");
      continue;
    }
    if (direction == Direction::Forward && past_boundary(r, t_new)) {
      // An accurate step crossed eps^2 = 0: bisect on its length for the
      // last state with eps^2 > 0.
      double lo = 0.0, hi = h;
      State2 y_lo = y;
      while (hi - lo > options.tol * std::max(1.0, t)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const StepResult m = dp_step(t, y, mid, options.tol);
        if (!past_boundary(m, t + mid)) {
          lo = mid;
          y_lo = m.y;
        } else {
          hi = mid;
        }
      }
      if (lo > 0.0) {
        t += lo;
        y = y_lo;
        traj.states.push_back({t, y[0], y[1]});
      }
      traj.termination = Termination::Eps2Zero;
      traj.t_plus = t + (hi - lo);
      done = true;
      break;
    }
    const RadialState next{t_new, r.y[0], r.y[1]};
    if (!next.admissible()) {
      traj.termination = Termination::ConstraintViolation;
      done = true;
      break;
    }
    t = t_new;
    y = r.y;
    traj.states.push_back(next);
    if (direction == Direction::Backward && t <= options.t_floor * (1.0 + 1e-12)) {
      traj.termination = Termination::TZeroSingularity;
      done = true;
      break;
    }
    const double grow = r.error > 0.0 ? std::min(5.0, 0.9 * std::pow(r.error, -0.2)) : 5.0;
    h *= std::max(0.2, grow);
  }
  if (!done) traj.termination = Termination::MaxSteps;

  if (direction == Direction::Backward) std::reverse(traj.states.begin(), traj.states.end());
  traj.t_minus = traj.states.front().t;
  if (direction == Direction::Backward || traj.termination != Termination::Eps2Zero) {
    traj.t_plus = traj.states.back().t;
  }
  return traj;
}

std::vector<RadialState> admissible_grid(double t0, int n) {
  if (!(t0 > 0.0) || n <= 0) throw std::invalid_argument("grid needs t0 > 0 and n > 0");
  std::vector<RadialState> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double xp0 = std::sqrt(2.0 * t0) * (1.0 + 0.05 * (i + 1));
    for (int j = 0; j < n; ++j) out.push_back({t0, 2.0 * t0 * xp0 * (1.0 + 0.1 * (j + 1)), xp0});
  }
  return out;
}

BoundsReport check_bounds(const Trajectory& trajectory) {
  BoundsReport report;
  if (trajectory.states.empty()) return report;
  const RadialState& s0 = trajectory.states.front();
  const double lower0 = std::pow(2.0 * s0.t, 1.5);
  for (std::size_t i = 1; i < trajectory.states.size(); ++i) {
    const RadialState& s = trajectory.states[i];
    const double upper = s0.x * std::sqrt(s.t / s0.t);
    const double lower = (std::pow(2.0 * s.t, 1.5) - lower0) / 3.0;
    const double upper_slack = upper - s.x;
    const double lower_slack = (s.x - s0.x) - lower;
    report.min_upper_slack = std::min(report.min_upper_slack, upper_slack);
    report.min_lower_slack = std::min(report.min_lower_slack, lower_slack);
    if (!(upper_slack > 0.0)) report.upper_holds = false;
    if (!(lower_slack > 0.0)) report.lower_holds = false;
    ++report.checked;
  }
  return report;
}

DecayReport decay_identity_check(const Trajectory& trajectory, double min_regularity) {
  const auto& s = trajectory.states;
  if (s.size() < 3) throw std::invalid_argument("decay identity check needs at least three states");
  const std::size_t width = std::min<std::size_t>(5, s.size() % 2 ? s.size() : s.size() - 1);
  DecayReport report;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i].regularity() >= min_regularity)) {
      ++report.skipped;
      continue;
    }
    const std::size_t lo = std::min(i > width / 2 ? i - width / 2 : 0, s.size() - width);
    // Derivative at t_i of the Lagrange interpolant through the window.
    double fd = 0.0;
    for (std::size_t j = lo; j < lo + width; ++j) {
      double weight = 0.0;
      for (std::size_t k = lo; k < lo + width; ++k) {
        if (k == j) continue;
        double term = 1.0 / (s[j].t - s[k].t);
        for (std::size_t m = lo; m < lo + width; ++m) {
          if (m != j && m != k) term *= (s[i].t - s[m].t) / (s[j].t - s[m].t);
        }
        weight += term;
      }
      fd += weight * s[j].eps2();
    }
    const double e = s[i].eps2();
    const double analytic = -(8.0 / 3.0) * e / s[i].regularity();
    report.max_error = std::max(report.max_error, std::abs(fd - analytic) / (std::abs(e) + 1.0));
    ++report.checked;
  }
  return report;
}

}  // namespace nktoric
