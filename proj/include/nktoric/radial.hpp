#pragma once

// Radially symmetric potentials phi(mu) = x(t), t = |mu|^2 / 2. The equation
// reduces to the second-order ODE
//
//   3 (x'^2 - 2t)(x' + 2t x'') = 8 (x - 2t x')
//
// subject to x > 2t x' > 2t sqrt(2t); eps^2 = (8/3)(x - 2t x').

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace nktoric {

struct RadialState {
  double t = 0.0;
  double x = 0.0;
  double xp = 0.0;

  double eps2() const { return (8.0 / 3.0) * (x - 2.0 * t * xp); }
  /// x'^2 - 2t; the ODE is regular where this is positive.
  double regularity() const { return xp * xp - 2.0 * t; }
  /// x > 2t x' > 2t sqrt(2t), t > 0.
  bool admissible() const;
};

enum class Termination { Eps2Zero, TZeroSingularity, MaxSteps, ConstraintViolation };

std::string to_string(Termination t);

enum class Direction { Forward, Backward };

struct Trajectory {
  std::vector<RadialState> states;  // t strictly increasing
  double t_minus = 0.0;
  double t_plus = 0.0;
  Termination termination = Termination::MaxSteps;
};

struct IntegratorOptions {
  double tol = 1e-10;
  double t_floor = 1e-8;
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  /// Caps the step at this multiple of x'^2 - 2t, which is proportional to
  /// the distance to t+; a small value resolves the approach to the boundary.
  double regularity_step_fraction = 1e-2;
  std::size_t max_steps = 1'000'000;
};

/// x'' from the ODE. Throws std::domain_error for t <= 0 (the singular point)
/// or x'^2 - 2t <= 0.
double rhs(double t, double x, double xp);

/// Adaptive Dormand-Prince 5(4) integration from an admissible start.
///
/// Forward runs stop at the eps^2 = 0 event, located by bisection on the
/// last step to within tol; backward runs stop at t_floor or when the
/// constraint fails. Throws std::invalid_argument for an inadmissible start
/// and std::runtime_error on step-size underflow.
Trajectory integrate(const RadialState& start, Direction direction, const IntegratorOptions& options = {});

struct BoundsReport {
  bool upper_holds = true;   // x < x0 sqrt(t / t0)
  bool lower_holds = true;   // x - x0 > ((2t)^{3/2} - (2 t0)^{3/2}) / 3
  double min_upper_slack = std::numeric_limits<double>::infinity();
  double min_lower_slack = std::numeric_limits<double>::infinity();
  std::size_t checked = 0;

  bool ok() const { return upper_holds && lower_holds; }
};

/// An n x n grid of admissible starts at time t0:
/// x'0 = sqrt(2 t0)(1 + 0.05 (i+1)), x0 = 2 t0 x'0 (1 + 0.1 (j+1)), row-major in (i, j).
/// Throws std::invalid_argument unless t0 > 0 and n > 0.
std::vector<RadialState> admissible_grid(double t0, int n);

/// Growth bounds for t > t0 relative to the first state.
BoundsReport check_bounds(const Trajectory& trajectory);

struct DecayReport {
  double max_error = 0.0;  // largest mismatch divided by |eps^2| + 1
  std::size_t checked = 0;
  std::size_t skipped = 0;  // states with x'^2 - 2t below the cutoff
};

/// Compares a finite-difference derivative of eps^2 (five-point stencil, or
/// three-point for short trajectories) with -(8/3) eps^2 / (x'^2 - 2t).
/// States where x'^2 - 2t is below min_regularity are skipped: there the
/// quotient is 0/0 and amplifies the integration error. Throws
/// std::invalid_argument for fewer than three states.
DecayReport decay_identity_check(const Trajectory& trajectory, double min_regularity = 1e-4);

}  // namespace nktoric
