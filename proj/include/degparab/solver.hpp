#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "degparab/grid.hpp"
#include "degparab/operators.hpp"

namespace degparab {

// Boundary handling for the explicit stepper: either hold the previous
// slice value, or impose time-dependent Dirichlet data (typically sampled
// from a catalog solution).
struct Boundary {
  enum class Kind { clamp_last_value, dirichlet_from_field };
  Kind kind = Kind::clamp_last_value;
  std::function<double(std::span<const double>, double)> values;  // required for dirichlet

  static Boundary clamp() { return Boundary{}; }
  static Boundary dirichlet(std::function<double(std::span<const double>, double)> f) {
    return Boundary{Kind::dirichlet_from_field, std::move(f)};
  }
};

struct SolverConfig {
  OperatorSpec op;
  double cfl_safety = 0.4;
  Boundary boundary;
  double delta = 1e-8;  // gradient regularization used while stepping (must be > 0)
  std::optional<ScalarField> coefficient;  // multiplies the right-hand side

  void validate() const;
  // effective operator spec with the stepping regularization applied
  OperatorSpec stepping_op() const;
};

struct StepReport {
  int step = 0;
  double t = 0.0;
  double effective_dt = 0.0;
  double max_abs_gradient = 0.0;
  double residual_norm = 0.0;  // L_inf of the applied right-hand side
  double min_value = 0.0;
  double max_value = 0.0;
  int substeps = 1;
};

// largest stable dt for one explicit step from this slice:
// cfl_safety * dx^2 / (2 n Lambda max|grad u|_delta^(p-2) max coeff)
double cfl_dt_bound(const Grid& g, std::span<const double> slice, const SolverConfig& cfg,
                    double t_slice);

// One forward-Euler step. Refuses (CflError with the admissible dt) if dt
// exceeds the CFL bound. Gradient by central differences; Hessian by the
// standard 3-point diagonal and 4-point cross stencils. Interior nodes
// only; boundary per cfg.
std::vector<double> step(const Grid& g, std::span<const double> u_slice, const SolverConfig& cfg,
                         double t_slice, double dt, StepReport* report = nullptr);

// March the initial slice across the output grid. Each output interval is
// integrated with an integral number of substeps; the substep count starts
// from the first-slice CFL bound, is re-validated against every substep's
// bound, and on violation is doubled with the interval restarted from the
// last completed output slice.
ScalarField evolve(const Grid& out_grid, std::span<const double> initial, const SolverConfig& cfg,
                   std::vector<StepReport>* reports = nullptr);

// u_eps(x,t) = min over nodes (y,s) of u(y,s) + (|x-y|^2 + (t-s)^2)/(2 eps),
// computed exactly on the grid by the separable lower-envelope transform,
// one pass per axis (time included).
ScalarField inf_convolution(const ScalarField& u, double eps);

struct SupersolutionReport {
  long checked = 0;
  long violations = 0;
  double worst_residual = 0.0;  // most negative residual encountered
  std::vector<double> worst_x;
  double worst_t = 0.0;
};

// Backward-in-time difference quotient minus the degenerate right-hand
// side at every interior node; nodes with residual < -tol are violations.
SupersolutionReport check_supersolution(const ScalarField& u, const OperatorSpec& spec, double tol,
                                        const std::optional<ScalarField>& coefficient = {});

}  // namespace degparab
