#include "degparab/solutions.hpp"

#include <cmath>
#include <limits>

namespace degparab {

namespace {

double norm_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// assemble a full jet from radial data: grad = ur * xhat,
// hess = utan I + (urr - utan) xhat (x) xhat
Jet radial_to_jet(std::span<const double> x, double r, const RadialJet& rj) {
  const int n = static_cast<int>(x.size());
  Jet j;
  j.value = rj.value;
  j.dt = rj.dt;
  j.one_sided = rj.one_sided;
  j.gradient.assign(n, 0.0);
  j.hessian = SymMatrix(n);
  if (r > 0.0) {
    for (int a = 0; a < n; ++a) j.gradient[a] = rj.ur * x[a] / r;
    for (int a = 0; a < n; ++a) {
      j.hessian.set(a, a, rj.utan + (rj.urr - rj.utan) * (x[a] / r) * (x[a] / r));
      for (int b = a + 1; b < n; ++b)
        j.hessian.set(a, b, (rj.urr - rj.utan) * (x[a] / r) * (x[b] / r));
    }
  } else {
    for (int a = 0; a < n; ++a) j.hessian.set(a, a, rj.urr);
  }
  return j;
}

}  // namespace

double solution_residual(const AnalyticSolution& sol, const OperatorSpec& spec,
                         std::span<const double> x, double t) {
  const Jet j = sol.eval(x, t);
  return j.dt - degenerate_rhs(j.gradient, j.hessian, spec);
}

ScalarField sample_solution(const AnalyticSolution& sol, const Grid& g) {
  if (sol.dim() != g.dim()) throw ValidationError("sample_solution: dimension mismatch");
  ScalarField u(g);
  std::vector<double> x(g.dim());
  const long S = g.spatial_size();
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    for (long jj = 0; jj < S; ++jj) {
      g.node_coords(jj, x);
      u.at(jj, k) = sol.value(x, t);
    }
  }
  return u;
}

// --------------------------------------------------------------------------
// Barenblatt

BarenblattSpec::BarenblattSpec(const EllipticityParams& prm) : params(prm) {
  params.validate();
  const double p = params.p;
  const double denom = params.n * (p - 2.0) + p;
  if (p == 2.0 || !(denom > 0.0))
    throw ValidationError("BarenblattSpec: requires p > 2 or the fast-diffusion range p > 2n/(n+1)");
  alpha = 1.0 / denom;
  c = (p - 2.0) / p * std::pow(alpha, 1.0 / (p - 1.0));
}

double BarenblattSpec::support_radius(double t) const {
  if (params.p < 2.0) return std::numeric_limits<double>::infinity();
  return std::pow(1.0 / c, (params.p - 1.0) / params.p) * std::pow(t, alpha);
}

double Barenblatt::value(std::span<const double> x, double t) const {
  if (!(t > 0.0)) throw ValidationError("barenblatt: requires t > 0");
  const double p = spec_.params.p;
  const double kappa = p / (p - 1.0);
  const double m = (p - 1.0) / (p - 2.0);
  const double s = norm_of(x) * std::pow(t, -spec_.alpha);
  const double w = 1.0 - spec_.c * std::pow(s, kappa);
  if (w <= 0.0) return 0.0;
  return std::pow(t, -spec_.params.n * spec_.alpha) * std::pow(w, m);
}

Jet Barenblatt::eval(std::span<const double> x, double t) const {
  if (!(t > 0.0)) throw ValidationError("barenblatt: requires t > 0");
  const int n = spec_.params.n;
  const double p = spec_.params.p;
  const double alpha = spec_.alpha;
  const double c = spec_.c;
  const double kappa = p / (p - 1.0);
  const double m = (p - 1.0) / (p - 2.0);

  const double r = norm_of(x);
  const double ta = std::pow(t, alpha);
  const double s = r / ta;
  const double sk = std::pow(s, kappa);
  const double w = 1.0 - c * sk;

  RadialJet rj;
  if (w <= 0.0) {
    // outside the support; the free boundary itself carries one-sided data
    rj.one_sided = (w == 0.0);
    return radial_to_jet(x, r, rj);
  }

  const double tna = std::pow(t, -n * alpha);
  const double wm = std::pow(w, m);
  rj.value = tna * wm;
  rj.dt = std::pow(t, -n * alpha - 1.0) * (-n * alpha * wm + m * c * kappa * alpha * std::pow(w, m - 1.0) * sk);

  if (r == 0.0) {
    // gradient vanishes; for p > 2 the Hessian has no two-sided limit here
    if (p > 2.0) {
      rj.one_sided = true;
    }
    return radial_to_jet(x, r, rj);
  }

  const double sk1 = std::pow(s, kappa - 1.0);
  rj.ur = -m * c * kappa * std::pow(t, -n * alpha - alpha) * std::pow(w, m - 1.0) * sk1;
  rj.urr = -m * c * kappa * std::pow(t, -n * alpha - 2.0 * alpha) *
           (-c * kappa * (m - 1.0) * std::pow(w, m - 2.0) * sk1 * sk1 +
            (kappa - 1.0) * std::pow(w, m - 1.0) * std::pow(s, kappa - 2.0));
  rj.utan = rj.ur / r;
  return radial_to_jet(x, r, rj);
}

// --------------------------------------------------------------------------
// Barrier profile g

GProfile::GProfile(double q_in) : q(q_in) {
  if (!(q > 1.0)) throw ValidationError("GProfile: requires q > 1");
  flat_value = std::exp2(q);
  const double d1 = q * 2.0 * flat_value;          // |g'(1/2)|
  const double dd1 = q * (q + 1.0) * 4.0 * flat_value;  // g''(1/2)
  // ramp scaling: target drop-rate endpoint K with C^2 matching; beta0 is
  // dd1/d1^2, and K solves K = 2.5 - (beta0/8) K^2 (positive root)
  const double beta0 = (q + 1.0) / (q * flat_value);
  double K = 5.0 / (1.0 + std::sqrt(1.0 + 1.25 * beta0));
  eta = K / d1;
  if (eta > 0.25) {
    eta = 0.25;
    K = d1 * eta;
  }
  const double G = dd1 * eta * eta;
  pa = 30.0 - 12.0 * K - 1.5 * G;
  pc = 30.0 - 15.0 * K - 2.5 * G;
  pb = 28.0 * K + 4.0 * G - 60.0;
  // the drop rate must stay nonnegative for g to be decreasing
  for (int i = 0; i <= 2000; ++i) {
    const double tau = i / 2000.0;
    const double P = tau * tau * (pa + tau * (pb + tau * pc));
    if (P < -1e-9 * std::max(1.0, K))
      throw NumericError("GProfile: drop rate goes negative at q=" + std::to_string(q));
  }
}

double GProfile::g(double s) const {
  const double j0 = 0.5 - eta;
  if (s <= j0) return flat_value;
  if (s < 0.5) {
    const double tau = (s - j0) / eta;
    const double drop = tau * tau * tau * (pa / 3.0 + tau * (pb / 4.0 + tau * pc / 5.0));
    return flat_value - drop;
  }
  if (s < 1.0) return std::pow(s, -q) - 1.0;
  return 0.0;
}

double GProfile::dg(double s) const {
  const double j0 = 0.5 - eta;
  if (s <= j0) return 0.0;
  if (s < 0.5) {
    const double tau = (s - j0) / eta;
    return -(tau * tau * (pa + tau * (pb + tau * pc))) / eta;
  }
  if (s < 1.0) return -q * std::pow(s, -q - 1.0);
  return 0.0;
}

double GProfile::ddg(double s) const {
  const double j0 = 0.5 - eta;
  if (s <= j0) return 0.0;
  if (s < 0.5) {
    const double tau = (s - j0) / eta;
    return -(tau * (2.0 * pa + tau * (3.0 * pb + tau * 4.0 * pc))) / (eta * eta);
  }
  if (s < 1.0) return q * (q + 1.0) * std::pow(s, -q - 2.0);
  return 0.0;
}

BarrierSpec::BarrierSpec(double q_in, double alpha_in, const EllipticityParams& prm)
    : q(q_in), alpha(alpha_in), params(prm), profile(q_in) {
  params.require_degenerate("BarrierSpec");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("BarrierSpec: requires alpha in (0,1)");
  beta = (1.0 - alpha * params.p) / (params.p - 2.0);
  a_coef = std::pow(alpha, 1.0 / (params.p - 2.0));
}

RadialJet Barrier::radial(double r, double t) const {
  if (!(t > 0.0)) throw ValidationError("barrier: requires t > 0");
  const BarrierSpec& sp = spec_;
  const double ta = std::pow(t, sp.alpha);
  const double s = 2.0 * r / (3.0 * ta);
  const double fs = 2.0 / (3.0 * ta);
  const double tb = std::pow(t, -sp.beta);
  const double g = sp.profile.g(s);
  const double dg = sp.profile.dg(s);
  const double ddg = sp.profile.ddg(s);

  RadialJet rj;
  rj.value = sp.a_coef * tb * g;
  rj.ur = sp.a_coef * tb * dg * fs;
  rj.urr = sp.a_coef * tb * ddg * fs * fs;
  rj.utan = (r > 0.0) ? rj.ur / r : rj.urr;
  rj.dt = -sp.beta * sp.a_coef * tb / t * g - sp.alpha * sp.a_coef * tb / t * s * dg;
  rj.one_sided = std::abs(s - 1.0) < 1e-14;
  return rj;
}

double Barrier::value(std::span<const double> x, double t) const {
  if (!(t > 0.0)) throw ValidationError("barrier: requires t > 0");
  const double s = 2.0 * norm_of(x) / (3.0 * std::pow(t, spec_.alpha));
  return spec_.a_coef * std::pow(t, -spec_.beta) * spec_.profile.g(s);
}

Jet Barrier::eval(std::span<const double> x, double t) const {
  const double r = norm_of(x);
  return radial_to_jet(x, r, radial(r, t));
}

BarrierResidual barrier_residual_radial(const BarrierSpec& spec, double r, double t,
                                        const EllipticityParams& params) {
  Barrier psi(spec);
  const RadialJet rj = psi.radial(r, t);
  // eigenvalues of the Hessian: urr (radial) and utan with multiplicity n-1
  double pos = std::max(rj.urr, 0.0) + (params.n - 1) * std::max(rj.utan, 0.0);
  double neg = std::min(rj.urr, 0.0) + (params.n - 1) * std::min(rj.utan, 0.0);
  const double pucci = params.lambda * pos + params.Lambda * neg;
  const double fac = std::pow(std::abs(rj.ur), params.p - 2.0);
  BarrierResidual out;
  out.residual = rj.dt - fac * pucci;
  out.scale = std::abs(rj.dt) + fac * (params.lambda * pos - params.Lambda * neg);
  return out;
}

double barrier_subsolution_residual(const BarrierSpec& spec, std::span<const double> x, double t,
                                    const EllipticityParams& params) {
  if (!(t > 0.0)) throw ValidationError("barrier_subsolution_residual: requires t > 0");
  const double r = norm_of(x);
  if (!(r < 1.5 * std::pow(t, spec.alpha)))
    throw ValidationError("barrier_subsolution_residual: point outside {|x| < (3/2) t^alpha}");
  return barrier_residual_radial(spec, r, t, params).residual;
}

// --------------------------------------------------------------------------
// Blow-up example

BlowupExampleSpec::BlowupExampleSpec(double C0_in, int k_in, const EllipticityParams& prm)
    : C0(C0_in), k(k_in), params(prm) {
  params.require_degenerate("BlowupExampleSpec");
  if (params.n != 1) throw ValidationError("BlowupExampleSpec: one-dimensional construction only");
  if (!(C0 > 1.0)) throw ValidationError("BlowupExampleSpec: requires C0 > 1");
  if (k < 1) throw ValidationError("BlowupExampleSpec: requires k >= 1");
  t_k = -1.0 / C0 + 1.0 / k;
  if (!(t_k < 0.0))
    throw ValidationError("BlowupExampleSpec: k too small, needs -1/C0 + 1/k < 0");
}

double BlowupExampleSpec::A(double t) const {
  const double arg = 1.0 + C0 * t;
  if (!(arg > 0.0)) throw ValidationError("BlowupExampleSpec: A(t) undefined at t <= -1/C0");
  return std::pow(arg, -1.0 / (params.p - 2.0));
}

double BlowupExampleSpec::A_prime(double t) const {
  return -(C0 / (params.p - 2.0)) * std::pow(A(t), params.p - 1.0);
}

Jet BlowupExample::eval(std::span<const double> x, double t) const {
  const double xx = x[0];
  const double ax = std::abs(xx);
  if (!(ax < 1.0)) throw ValidationError("blowup_example: requires |x| < 1");
  const double p = spec_.params.p;
  const double kappa = p / (p - 1.0);
  const bool upper = t > spec_.t_k;
  const double Ac = upper ? spec_.A(t) : spec_.A(spec_.t_k);

  Jet j;
  j.gradient.assign(1, 0.0);
  j.hessian = SymMatrix(1);
  const double profile = 1.0 - std::pow(ax, kappa);
  if (upper) {
    j.value = Ac * profile;
    j.dt = spec_.A_prime(t) * profile;
  } else {
    j.value = spec_.A_prime(spec_.t_k) * (t - spec_.t_k) + Ac * profile;
    j.dt = spec_.A_prime(spec_.t_k);
  }
  const bool at_kink = std::abs(t - spec_.t_k) <= 1e-14 * std::max(1.0, std::abs(spec_.t_k));
  if (xx == 0.0) {
    j.one_sided = true;  // |x|^(p/(p-1)) is not twice differentiable at 0
    return j;
  }
  const double sgn = xx > 0.0 ? 1.0 : -1.0;
  j.gradient[0] = -Ac * kappa * std::pow(ax, kappa - 1.0) * sgn;
  j.hessian.set(0, 0, -Ac * kappa * (kappa - 1.0) * std::pow(ax, kappa - 2.0));
  j.one_sided = at_kink;
  return j;
}

double BlowupExample::value(std::span<const double> x, double t) const {
  const double ax = std::abs(x[0]);
  if (!(ax < 1.0)) throw ValidationError("blowup_example: requires |x| < 1");
  const double kappa = spec_.params.p / (spec_.params.p - 1.0);
  const double profile = 1.0 - std::pow(ax, kappa);
  if (t > spec_.t_k) return spec_.A(t) * profile;
  return spec_.A_prime(spec_.t_k) * (t - spec_.t_k) + spec_.A(spec_.t_k) * profile;
}

double BlowupExample::coefficient(double x, double t) const {
  const double ax = std::abs(x);
  if (!(ax < 1.0)) throw ValidationError("blowup_example: requires |x| < 1");
  const double p = spec_.params.p;
  const double base = std::pow(p - 1.0, p) / ((p - 2.0) * std::pow(p, p - 1.0));
  if (t > spec_.t_k) return base * (1.0 - std::pow(ax, p / (p - 1.0))) * spec_.C0;
  return base * spec_.C0;
}

double BlowupExample::equation_residual(double x, double t) const {
  if (x == 0.0) throw ValidationError("blowup_example: residual undefined at x = 0");
  if (std::abs(t - spec_.t_k) <= 1e-14 * std::max(1.0, std::abs(spec_.t_k)))
    throw ValidationError("blowup_example: residual undefined at t = t_k");
  const Jet j = eval(std::span<const double>(&x, 1), t);
  const double a = coefficient(x, t);
  return j.dt - a * std::pow(std::abs(j.gradient[0]), spec_.params.p - 2.0) * j.hessian(0, 0);
}

// --------------------------------------------------------------------------
// Contact function

ContactFnSpec::ContactFnSpec(std::vector<double> y_in, double s_in, double a_in,
                             const EllipticityParams& prm)
    : y(std::move(y_in)), s(s_in), a(a_in), params(prm) {
  params.validate();
  if (static_cast<int>(y.size()) != params.n)
    throw ValidationError("ContactFnSpec: parameter point has wrong dimension");
  if (!(a > 0.0)) throw ValidationError("ContactFnSpec: requires slope a > 0");
  amp_ = std::pow(a, 1.0 / (params.p - 1.0)) * (params.p - 1.0) / params.p;
}

double ContactFnSpec::value(std::span<const double> x, double t) const {
  double r2 = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double d = x[i] - y[i];
    r2 += d * d;
  }
  return -amp_ * std::pow(r2, 0.5 * params.p / (params.p - 1.0)) + a * (t - s);
}

Jet ContactFunction::eval(std::span<const double> x, double t) const {
  const int n = dim();
  const double p = spec_.params.p;
  const double kappa = p / (p - 1.0);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = x[i] - spec_.y[i];
  const double r = norm_of(d);
  const double A1 = std::pow(spec_.a, 1.0 / (p - 1.0));

  RadialJet rj;
  rj.value = -spec_.amplitude() * std::pow(r, kappa) + spec_.a * (t - spec_.s);
  rj.dt = spec_.a;
  if (r == 0.0) {
    rj.one_sided = p > 2.0;  // gradient is the zero vector; cusp marker in the degenerate range
    if (p == 2.0) {
      rj.urr = -A1;
      rj.utan = -A1;
    }
    return radial_to_jet(d, r, rj);
  }
  rj.ur = -A1 * std::pow(r, kappa - 1.0);
  rj.urr = -A1 * (kappa - 1.0) * std::pow(r, kappa - 2.0);
  rj.utan = rj.ur / r;
  return radial_to_jet(d, r, rj);
}

// --------------------------------------------------------------------------
// Scaled / shifted wrapper

ScaledShifted::ScaledShifted(std::shared_ptr<const AnalyticSolution> base, double space_scale,
                             double time_scale, double value_scale, std::vector<double> x_shift,
                             double t_shift, double t_base)
    : base_(std::move(base)),
      r_(space_scale),
      tau_(time_scale),
      M_(value_scale),
      t_shift_(t_shift),
      t_base_(t_base),
      x_shift_(std::move(x_shift)) {
  if (!(r_ > 0.0) || !(tau_ > 0.0) || !(M_ > 0.0))
    throw ValidationError("ScaledShifted: requires positive scales");
  if (static_cast<int>(x_shift_.size()) != base_->dim())
    throw ValidationError("ScaledShifted: shift has wrong dimension");
}

ScaledShifted ScaledShifted::intrinsic(std::shared_ptr<const AnalyticSolution> base, double r,
                                       double M, const EllipticityParams& params,
                                       std::vector<double> x_shift, double t_shift,
                                       double t_base) {
  const double tau = std::pow(r, params.p) * std::pow(M, 2.0 - params.p);
  return ScaledShifted(std::move(base), r, tau, M, std::move(x_shift), t_shift, t_base);
}

Jet ScaledShifted::eval(std::span<const double> x, double t) const {
  const int n = base_->dim();
  std::vector<double> xm(n);
  for (int i = 0; i < n; ++i) xm[i] = r_ * (x[i] - x_shift_[i]);
  Jet j = base_->eval(xm, tau_ * (t - t_shift_) + t_base_);
  j.value /= M_;
  for (double& gi : j.gradient) gi *= r_ / M_;
  j.hessian *= r_ * r_ / M_;
  j.dt *= tau_ / M_;
  return j;
}

double ScaledShifted::value(std::span<const double> x, double t) const {
  const int n = base_->dim();
  std::vector<double> xm(n);
  for (int i = 0; i < n; ++i) xm[i] = r_ * (x[i] - x_shift_[i]);
  return base_->value(xm, tau_ * (t - t_shift_) + t_base_) / M_;
}

}  // namespace degparab
