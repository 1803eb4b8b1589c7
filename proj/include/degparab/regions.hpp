#pragma once

#include <functional>
#include <span>
#include <vector>

#include "degparab/grid.hpp"
#include "degparab/params.hpp"

namespace degparab {

// Intrinsic space-time cylinder of radius rho and scaling theta. The time
// height is theta*rho^p, so membership depends on the exponent p. Time
// conventions are half-open: past = B_rho(x0) x (t0 - theta rho^p, t0],
// future = B_rho(x0) x [t0, t0 + theta rho^p), full = the open union.
struct Cylinder {
  enum class Orientation { past, future, full };

  std::vector<double> x0;
  double t0 = 0.0;
  double rho = 1.0;
  double theta = 1.0;
  Orientation orientation = Orientation::past;

  void validate() const {
    if (!(rho > 0.0) || !(theta > 0.0)) throw ValidationError("Cylinder: requires rho, theta > 0");
  }
  double time_height(double p) const;
  // time interval covered, as [lo, hi] with the stated open/closed ends
  double t_lo(double p) const;
  double t_hi(double p) const;
};

bool cylinder_contains(const Cylinder& c, std::span<const double> x, double t,
                       const EllipticityParams& params);

// Paraboloid-type set: theta |x - x0|^p <= t - t0 <= r.
struct ParaboloidSet {
  std::vector<double> x0;
  double t0 = 0.0;
  double theta = 1.0;
  double r = 1.0;

  void validate() const {
    if (!(theta > 0.0) || !(r > 0.0)) throw ValidationError("ParaboloidSet: requires theta, r > 0");
  }
};

bool paraboloid_contains(const ParaboloidSet& b, std::span<const double> x, double t,
                         const EllipticityParams& params);

// Discrete measure of a region: (nodes inside) * dx^n * dt. Midpoint node
// counting, no boundary-cell weighting; converges first order in dx, dt.
using RegionPredicate = std::function<bool(std::span<const double>, double)>;
double region_measure(const RegionPredicate& inside, const Grid& g);
double region_measure(const Cylinder& c, const Grid& g, const EllipticityParams& params);
double region_measure(const ParaboloidSet& b, const Grid& g, const EllipticityParams& params);

// theta = (c / u0)^(p-2), the intrinsic scaling attached to the value u0.
double theta_from_value(double c, double u0, const EllipticityParams& params);

// v(x,t) = u(r x, r^p M^(2-p) t) / M on the correspondingly rescaled grid.
// The target grid is the exact image of the source grid, so every node
// value is the exact quotient of a source node value; no interpolation.
ScalarField intrinsic_rescale(const ScalarField& u, double r, double M,
                              const EllipticityParams& params);

// Rescale onto a caller-supplied grid. Every target node must map onto a
// source node (within tol, in step units) unless interpolate is set, in
// which case multilinear interpolation in space and linear in time is used.
ScalarField intrinsic_rescale_onto(const ScalarField& u, double r, double M,
                                   const EllipticityParams& params, const Grid& target,
                                   bool interpolate = false, double tol = 1e-9);

}  // namespace degparab
