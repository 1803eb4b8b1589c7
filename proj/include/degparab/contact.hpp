#pragma once

#include <optional>
#include <span>
#include <vector>

#include "degparab/grid.hpp"
#include "degparab/solutions.hpp"

namespace degparab {

// Finite set of sliding parameters (y, s), each representing cell_volume
// worth of the continuum parameter box.
struct ParameterSet {
  std::vector<std::vector<double>> y;
  std::vector<double> s;
  double cell_volume = 0.0;

  size_t size() const { return s.size(); }
  void validate() const;

  // uniform lattice over the box |y - y_center| <= y_half (per axis),
  // s in [s_lo, s_hi]; cell_volume = box volume / samples
  static ParameterSet box(std::span<const double> y_center, std::span<const double> y_half,
                          int ny_per_axis, double s_lo, double s_hi, int ns);
};

struct ContactRecord {
  std::vector<double> y;
  double s = 0.0;
  bool touched = false;
  std::vector<double> x;  // contact node
  double t = 0.0;         // contact slice
  long x_flat = -1;
  int t_index = -1;
  double gap = 0.0;  // min of u - phi at the contact slice (global min if untouched)
  double value_at_contact = 0.0;
  double tolerance = 0.0;  // resolution-aware contact band used
  std::vector<double> gradient_at_contact;
  bool on_boundary = false;  // contact node touches the grid boundary
};

// Sweep time slices forward; the contact slice is the first one where
// min_x (u - phi)(., t) falls inside the resolution-aware band
// 2 * (local Lipschitz estimate) * dx. Ties in the argmin break to the
// lexicographically smallest node.
ContactRecord find_contact(const ScalarField& u, const ContactFnSpec& phi);

struct ContactMapResidual {
  double y_error = 0.0;
  double s_error = 0.0;
  bool reliable = true;  // false when the contact sits on the grid boundary
};

// Invert the touching condition: y_pred = x + a^-1 |Du|^(p-2) Du and
// s_pred = t - a^-1 u - (p-1)/p a^-2 |Du|^p, with Du estimated by central
// differences at the contact node.
ContactMapResidual contact_map_check(const ContactRecord& rec, const ScalarField& u, double a,
                                     const EllipticityParams& params);

struct ContactSetMeasure {
  double gamma_measure = 0.0;
  double e_measure = 0.0;
  double ratio = 0.0;
  long touched = 0;
  long untouched = 0;  // excluded with a warning, not an error
  std::vector<ContactRecord> records;
};

// Measure of the union of contact nodes dilated by `dilation` grid cells
// (in space and time), against the parameter measure of E.
ContactSetMeasure contact_set_measure(const ScalarField& u, const ParameterSet& E, double a,
                                      const EllipticityParams& params, int dilation = 1,
                                      int threads = 1);

// |{u < 4} ∩ Q_1^-| for nonnegative u with u(0,0) <= 1; the empirical
// version of the basic measure estimate.
double basic_measure_estimate(const ScalarField& u, const EllipticityParams& params);

struct QuantifiedMeasure {
  double measure = 0.0;
  double bound = 0.0;  // reference c1 * rho^(n+p)
};

// Measure of {u < 4 L0 m0} inside the unit-scaling paraboloid with vertex
// (x0, -rho^p) and height rho^p, intersected with x in B_1. Requires
// inf over B_rho(x0) ∩ B_1 of u(., 0) <= m0 and u >= 0.
QuantifiedMeasure quantified_measure_estimate(const ScalarField& u, std::span<const double> x0,
                                              double rho, double m0, double L0,
                                              const EllipticityParams& params, double c1);

}  // namespace degparab
