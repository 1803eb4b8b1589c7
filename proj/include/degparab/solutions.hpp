#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "degparab/grid.hpp"
#include "degparab/operators.hpp"
#include "degparab/params.hpp"
#include "degparab/sym_matrix.hpp"

namespace degparab {

// Derivative bundle at a point. `one_sided` marks points where the stored
// derivatives are one-sided limits or omitted because no two-sided limit
// exists (free boundaries, radial axis, piecewise junctions); values are
// always valid.
struct Jet {
  double value = 0.0;
  std::vector<double> gradient;
  SymMatrix hessian;
  double dt = 0.0;
  bool one_sided = false;
};

class AnalyticSolution {
public:
  virtual ~AnalyticSolution() = default;
  virtual int dim() const = 0;
  virtual Jet eval(std::span<const double> x, double t) const = 0;
  virtual double value(std::span<const double> x, double t) const { return eval(x, t).value; }
  virtual std::string name() const = 0;
};

// time derivative minus the degenerate right-hand side, from exact jets
double solution_residual(const AnalyticSolution& sol, const OperatorSpec& spec,
                         std::span<const double> x, double t);

ScalarField sample_solution(const AnalyticSolution& sol, const Grid& g);

// ---------------------------------------------------------------------------
// Self-similar source-type solution of the p-parabolic equation,
//   u(x,t) = t^(-n a) (1 - c (|x| t^(-a))^(p/(p-1)))_+^((p-1)/(p-2)),
// a = 1/(n(p-2)+p), c = ((p-2)/p) a^(1/(p-1)). Compactly supported for
// p > 2; for p in (2n/(n+1), 2) the same formula gives the globally
// positive fast-diffusion profile (c < 0).
struct BarenblattSpec {
  EllipticityParams params;
  double alpha = 0.0;  // derived
  double c = 0.0;      // derived

  explicit BarenblattSpec(const EllipticityParams& prm);
  // radius of {u(.,t) > 0}; +inf when there is no free boundary
  double support_radius(double t) const;
};

class Barenblatt : public AnalyticSolution {
public:
  explicit Barenblatt(const EllipticityParams& prm) : spec_(prm) {}
  const BarenblattSpec& spec() const { return spec_; }
  int dim() const override { return spec_.params.n; }
  Jet eval(std::span<const double> x, double t) const override;
  double value(std::span<const double> x, double t) const override;
  std::string name() const override { return "barenblatt"; }

private:
  BarenblattSpec spec_;
};

// ---------------------------------------------------------------------------
// Decreasing C^2 profile: g(s) = 2^q on [0, 1/2 - eta], a quintic drop on
// [1/2 - eta, 1/2], g(s) = s^(-q) - 1 on [1/2, 1], and 0 beyond 1. The drop
// rate is a nonnegative quartic fixed by the C^2 matching at s = 1/2 and
// the total drop of 1; the ramp width eta <= 1/4 shrinks as q grows so the
// quartic stays one-signed.
struct GProfile {
  double q = 2.0;
  double flat_value = 0.0;  // 2^q
  double eta = 0.25;        // ramp width
  double pa = 0.0, pb = 0.0, pc = 0.0;  // drop rate P(tau) = pa tau^2 + pb tau^3 + pc tau^4

  explicit GProfile(double q);
  double g(double s) const;
  double dg(double s) const;
  double ddg(double s) const;
};

// Global barrier psi(x,t) = alpha^(1/(p-2)) t^(-beta) g(2|x| / (3 t^alpha)),
// beta = (1 - alpha p)/(p-2). Positive exactly on {|x| < (3/2) t^alpha}.
struct BarrierSpec {
  double q = 2.0;
  double alpha = 0.0;
  EllipticityParams params;
  double beta = 0.0;    // derived
  double a_coef = 0.0;  // derived alpha^(1/(p-2))
  GProfile profile;

  BarrierSpec(double q, double alpha, const EllipticityParams& prm);
};

// radial derivative bundle for rotationally symmetric functions
struct RadialJet {
  double value = 0.0;
  double ur = 0.0;    // d/dr
  double urr = 0.0;   // radial Hessian eigenvalue
  double utan = 0.0;  // tangential Hessian eigenvalue (ur / r), multiplicity n-1
  double dt = 0.0;
  bool one_sided = false;
};

class Barrier : public AnalyticSolution {
public:
  Barrier(double q, double alpha, const EllipticityParams& prm) : spec_(q, alpha, prm) {}
  explicit Barrier(BarrierSpec spec) : spec_(std::move(spec)) {}
  const BarrierSpec& spec() const { return spec_; }
  int dim() const override { return spec_.params.n; }
  Jet eval(std::span<const double> x, double t) const override;
  double value(std::span<const double> x, double t) const override;
  RadialJet radial(double r, double t) const;
  std::string name() const override { return "barrier"; }

private:
  BarrierSpec spec_;
};

// d/dt psi - |D psi|^(p-2) P^-(D^2 psi), defined on {|x| < (3/2) t^alpha}.
double barrier_subsolution_residual(const BarrierSpec& spec, std::span<const double> x, double t,
                                    const EllipticityParams& params);
// radial version with the magnitude scale used for margin checks
struct BarrierResidual {
  double residual = 0.0;
  double scale = 0.0;  // |dt psi| + |D psi|^(p-2) |P^-| magnitudes
};
BarrierResidual barrier_residual_radial(const BarrierSpec& spec, double r, double t,
                                        const EllipticityParams& params);

// ---------------------------------------------------------------------------
// One-dimensional separable solution with finite-time blow-up:
//   u(x,t) = A(t) (1 - |x|^(p/(p-1))) for t > t_k, affine continuation in t
// below t_k, where A(t) = (1 + C0 t)^(-1/(p-2)) and t_k = -1/C0 + 1/k.
// Solves d/dt u = a(x,t) |u'|^(p-2) u'' with the piecewise coefficient
// returned by `coefficient`.
struct BlowupExampleSpec {
  double C0 = 10.0;
  int k = 50;
  EllipticityParams params;
  double t_k = 0.0;  // derived

  BlowupExampleSpec(double C0, int k, const EllipticityParams& prm);
  double A(double t) const;       // (1 + C0 t)^(-1/(p-2)), requires t > -1/C0
  double A_prime(double t) const; // -(C0/(p-2)) A(t)^(p-1)
};

class BlowupExample : public AnalyticSolution {
public:
  BlowupExample(double C0, int k, const EllipticityParams& prm) : spec_(C0, k, prm) {}
  const BlowupExampleSpec& spec() const { return spec_; }
  int dim() const override { return 1; }
  Jet eval(std::span<const double> x, double t) const override;
  double value(std::span<const double> x, double t) const override;
  double coefficient(double x, double t) const;
  // d/dt u - a(x,t) |u'|^(p-2) u''; requires x != 0 and t != t_k
  double equation_residual(double x, double t) const;
  std::string name() const override { return "blowup_example"; }

private:
  BlowupExampleSpec spec_;
};

// ---------------------------------------------------------------------------
// Sliding comparison function
//   phi_(y,s)(x,t) = -a^(1/(p-1)) ((p-1)/p) |x-y|^(p/(p-1)) + a (t-s),
// the test-function family whose degenerate right-hand side is constant.
struct ContactFnSpec {
  std::vector<double> y;
  double s = 0.0;
  double a = 1.0;
  EllipticityParams params;

  ContactFnSpec(std::vector<double> y, double s, double a, const EllipticityParams& prm);
  double amplitude() const { return amp_; }  // a^(1/(p-1)) (p-1)/p
  double value(std::span<const double> x, double t) const;

private:
  double amp_ = 0.0;
};

class ContactFunction : public AnalyticSolution {
public:
  ContactFunction(std::vector<double> y, double s, double a, const EllipticityParams& prm)
      : spec_(std::move(y), s, a, prm) {}
  const ContactFnSpec& spec() const { return spec_; }
  int dim() const override { return static_cast<int>(spec_.y.size()); }
  Jet eval(std::span<const double> x, double t) const override;
  double value(std::span<const double> x, double t) const override { return spec_.value(x, t); }
  std::string name() const override { return "contact_fn"; }

private:
  ContactFnSpec spec_;
};

// ---------------------------------------------------------------------------
class ConstantSolution : public AnalyticSolution {
public:
  ConstantSolution(double c, int n) : c_(c), n_(n) {}
  int dim() const override { return n_; }
  Jet eval(std::span<const double>, double) const override {
    Jet j;
    j.value = c_;
    j.gradient.assign(n_, 0.0);
    j.hessian = SymMatrix(n_);
    return j;
  }
  double value(std::span<const double>, double) const override { return c_; }
  std::string name() const override { return "constant"; }

private:
  double c_;
  int n_;
};

// w(x,t) = base(r (x - x_shift), tau (t - t_shift) + t_base) / M. With
// tau = r^p M^(2-p) this is the scaling that preserves the supersolution
// and subsolution properties.
class ScaledShifted : public AnalyticSolution {
public:
  ScaledShifted(std::shared_ptr<const AnalyticSolution> base, double space_scale,
                double time_scale, double value_scale, std::vector<double> x_shift,
                double t_shift, double t_base);
  static ScaledShifted intrinsic(std::shared_ptr<const AnalyticSolution> base, double r, double M,
                                 const EllipticityParams& params, std::vector<double> x_shift,
                                 double t_shift, double t_base);
  int dim() const override { return base_->dim(); }
  Jet eval(std::span<const double> x, double t) const override;
  double value(std::span<const double> x, double t) const override;
  std::string name() const override { return "scaled[" + base_->name() + "]"; }

private:
  std::shared_ptr<const AnalyticSolution> base_;
  double r_, tau_, M_, t_shift_, t_base_;
  std::vector<double> x_shift_;
};

}  // namespace degparab
