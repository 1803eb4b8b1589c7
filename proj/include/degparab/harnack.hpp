#pragma once

#include <span>
#include <vector>

#include "degparab/grid.hpp"
#include "degparab/params.hpp"
#include "degparab/regions.hpp"

namespace degparab {

// Constants steering the measurement harness. The inequalities only assert
// existence of universal constants, so these are knobs whose measured
// consequences get reported, not asserted against targets.
struct HarnackConfig {
  double c_weak = 1.0;   // intrinsic scaling constant for the weak inequality
  double c1_h = 1.0;     // backward constant
  double c2_h = 1.0;     // forward (waiting time) constant, >= c1_h
  double eps_weak = 0.5; // integrability exponent of the averaged side
  double m0 = 0.25;
  double L0 = 2.0;
  double L1 = 8.0;
  double nu = 2.0;
  double rho0 = 1.0 / 32.0;

  void validate() const {
    if (!(c_weak > 0.0 && c1_h > 0.0 && c2_h > 0.0 && eps_weak > 0.0 && m0 > 0.0 && L0 > 0.0 &&
          L1 > 0.0))
      throw ValidationError("HarnackConfig: all constants must be positive");
    if (!(c2_h >= c1_h)) throw ValidationError("HarnackConfig: requires c2_h >= c1_h");
    if (!(nu > 1.0)) throw ValidationError("HarnackConfig: requires nu > 1");
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw ValidationError("HarnackConfig: requires rho0 in (0,1)");
  }
};

struct WeakHarnackResult {
  double lhs = 0.0;    // (average of u^eps over Q)^(1/eps)
  double rhs = 0.0;    // u(x0, t0)
  double ratio = 0.0;  // the measured constant
  double theta = 0.0;
  long nodes = 0;
};

// Average u^eps over Q = (x0, t0 - theta rho^p) + Q_rho^-(theta) with
// theta = (c_weak / u(x0,t0))^(p-2). The hypothesis cylinder
// (x0,t0) + Q_3rho^-(theta) must lie inside the field domain with u >= 0.
WeakHarnackResult weak_harnack_ratio(const ScalarField& u, std::span<const double> x0, double t0,
                                     double rho, const HarnackConfig& cfg,
                                     const EllipticityParams& params);

struct HarnackRatios {
  double sup_ratio = 0.0;  // sup over the past cylinder / u(x0,t0)
  double inf_ratio = 0.0;  // u(x0,t0) / inf over the future cylinder; +inf when inf = 0
  double theta1 = 0.0;
  double theta2 = 0.0;
  double sup_value = 0.0;
  double inf_value = 0.0;
};

// Backward and forward intrinsic ratios. The backward query needs
// (x0,t0) + Q_4rho^-(theta1) in the domain, the forward one
// (x0, t0 + 2 theta2 rho^p) + Q_4rho^-(theta2); both with u >= 0. The
// operation fails naming the missing cylinder rather than clipping it.
HarnackRatios harnack_ratios(const ScalarField& u, std::span<const double> x0, double t0,
                             double rho, const HarnackConfig& cfg,
                             const EllipticityParams& params);

struct PropagationResult {
  bool found = false;
  std::vector<double> xbar;
  double value = 0.0;
  double threshold = 0.0;
};

// Search B_{32^-k}(x0) at the slice nearest t0 for a node with
// u <= L0^k m0. Requires (x0,t0) in B_{4/3} x (-3, -1 + 32^(-k p)].
PropagationResult propagation_check(const ScalarField& u, std::span<const double> x0, double t0,
                                    int k, const HarnackConfig& cfg,
                                    const EllipticityParams& params);

struct PropagationScan {
  int nx0 = 9;        // query lattice per axis over B_{4/3}
  int nt0 = 4;        // query times in (-3, -1/2]
  double L0_lo = 1.02;
  double L0_hi = 1024.0;
  int nL0 = 41;       // geometric grid
};

struct PropagationConstants {
  bool found = false;
  double m0 = 0.0;
  double L0 = 0.0;           // smallest grid value that passes everywhere
  double required = 0.0;     // max over queries of min_ball / m0
  int worst_member = -1;
  std::vector<double> worst_x0;
  double worst_t0 = 0.0;
};

// Smallest L0 on the geometric grid such that the k = 1 propagation check
// passes for every family member and every sampled (x0, t0).
PropagationConstants find_propagation_constants(std::span<const ScalarField> family, double m0,
                                                const PropagationScan& scan,
                                                const EllipticityParams& params);

struct DecayRow {
  int k = 0;
  double threshold = 0.0;
  double measure = 0.0;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  double C = 0.0;
  double eta = 0.0;
  bool degenerate = false;  // fewer than two positive measures
  std::vector<double> fit_residuals;
};

// Measures of {u > L^k m0} ∩ B_1 x (-2,-1] for k = 1..k_max and the
// log-linear decay fit through the positive entries.
DecayTable level_set_decay(const ScalarField& u, double m0, double L, int k_max,
                           const EllipticityParams& params);

struct DensityResult {
  double measure = 0.0;
  double bound = 0.0;  // omega_n / 4^(n+1)
  bool pass = false;
};

// |{u >= L1 m0} ∩ B_1 x (-2,-1]| against the dimensional bound.
DensityResult density_check(const ScalarField& u, double m0, double L1,
                            const EllipticityParams& params);

struct BarrierScan {
  double q_lo = 2.0, q_hi = 64.0;
  int nq = 13;
  double alpha_lo = 1e-4;  // alpha_hi defaults to 1/(2p)
  int nalpha = 14;
  int ns = 400;  // radial samples (profile argument in [0,1))
  int nt = 250;  // time samples in [1/4, 4]
  double margin = 0.1;
};

struct BarrierScanResult {
  bool found = false;
  double q = 0.0;
  double alpha = 0.0;
  double worst_residual = 0.0;  // max residual over the sample at (q, alpha)
  bool eigen_sign_ok = false;   // lambda (q+1) - Lambda (n-1) > 0
  bool proof_margin_ok = false; // lambda (q+1) - Lambda (n-1) >= lambda q
  // infeasibility witness: closest-to-feasible pair and its worst point
  double witness_q = 0.0, witness_alpha = 0.0;
  double witness_r = 0.0, witness_t = 0.0, witness_residual = 0.0;
  long samples_checked = 0;
};

// Scan q ascending / alpha descending on geometric grids for the first
// pair whose subsolution residual stays below -margin * (local scale) on a
// dense sample of {|x| < (3/2) t^alpha, t in [1/4, 4]}.
BarrierScanResult find_barrier_params(const EllipticityParams& params, const BarrierScan& scan);

struct WaitingTimeRow {
  double C0 = 0.0;
  double theta1 = 0.0;     // largest passing waiting factor
  double bound = 0.0;      // 8^p / C0
  bool bracket_ok = true;  // bisection bracket held
};

// For each C0, the largest theta1 (log-bisection) with
// sup over (0, -theta1 rho^p) + Q_rho^-(theta1) of u_k <= C * u_k(0,0),
// evaluated on the blow-up example in closed form with rho = 1/8.
std::vector<WaitingTimeRow> waiting_time_scan(std::span<const double> C0_values, double C, int k,
                                              const EllipticityParams& params);

}  // namespace degparab
