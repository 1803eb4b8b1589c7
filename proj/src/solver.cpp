#include "degparab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degparab/sym_matrix.hpp"

namespace degparab {

namespace {

// packed upper-triangle index for small n
inline int pack(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * (2 * n - i - 1) / 2 + j;
}

struct StencilWorkspace {
  std::vector<long> stride;
  std::vector<int> idx;
  std::vector<double> grad;
  std::vector<double> hess;  // packed upper triangle

  explicit StencilWorkspace(const Grid& g)
      : stride(g.spatial_strides()),
        idx(g.dim()),
        grad(g.dim()),
        hess(static_cast<size_t>(g.dim()) * (g.dim() + 1) / 2) {}
};

inline bool is_interior(const Grid& g, std::span<const int> idx) {
  for (int a = 0; a < g.dim(); ++a)
    if (idx[a] < 1 || idx[a] > g.nx[a] - 2) return false;
  return true;
}

// central gradient and second differences at an interior node
void stencil_eval(const Grid& g, std::span<const double> u, long j, StencilWorkspace& ws) {
  const int n = g.dim();
  const double inv2dx = 0.5 / g.dx;
  const double invdx2 = 1.0 / (g.dx * g.dx);
  for (int a = 0; a < n; ++a) {
    const long sa = ws.stride[a];
    ws.grad[a] = (u[j + sa] - u[j - sa]) * inv2dx;
    ws.hess[pack(n, a, a)] = (u[j + sa] - 2.0 * u[j] + u[j - sa]) * invdx2;
    for (int b = a + 1; b < n; ++b) {
      const long sb = ws.stride[b];
      ws.hess[pack(n, a, b)] =
          (u[j + sa + sb] - u[j + sa - sb] - u[j - sa + sb] + u[j - sa - sb]) * 0.25 * invdx2;
    }
  }
}

inline double grad_norm_delta(std::span<const double> grad, double delta) {
  double s = delta * delta;
  for (double v : grad) s += v * v;
  return std::sqrt(s);
}

// |grad|_delta^(p-2) * K(grad, hess) on the packed workspace data
double rhs_kernel(const OperatorSpec& spec, const StencilWorkspace& ws) {
  const int n = static_cast<int>(ws.grad.size());
  const double norm = grad_norm_delta(ws.grad, spec.delta);
  const double p = spec.params.p;
  if (norm == 0.0) return 0.0;  // p > 2 enforced by SolverConfig
  const double factor = std::pow(norm, p - 2.0);

  double k = 0.0;
  switch (spec.kind) {
    case OperatorSpec::Kind::model: {
      double tr = 0.0, quad = 0.0;
      for (int a = 0; a < n; ++a) {
        tr += ws.hess[pack(n, a, a)];
        quad += ws.hess[pack(n, a, a)] * ws.grad[a] * ws.grad[a];
        for (int b = a + 1; b < n; ++b)
          quad += 2.0 * ws.hess[pack(n, a, b)] * ws.grad[a] * ws.grad[b];
      }
      k = tr + (spec.q - 2.0) * quad / (norm * norm);
      break;
    }
    case OperatorSpec::Kind::pucci_minus:
    case OperatorSpec::Kind::pucci_plus: {
      const bool minus = spec.kind == OperatorSpec::Kind::pucci_minus;
      const double up = minus ? spec.params.lambda : spec.params.Lambda;
      const double dn = minus ? spec.params.Lambda : spec.params.lambda;
      if (n == 1) {
        const double e0 = ws.hess[0];
        k = (e0 > 0.0 ? up : dn) * e0;
      } else if (n == 2) {
        const double a = ws.hess[pack(2, 0, 0)], b = ws.hess[pack(2, 0, 1)],
                     c = ws.hess[pack(2, 1, 1)];
        const double mean = 0.5 * (a + c), r = std::hypot(0.5 * (a - c), b);
        const double e0 = mean - r, e1 = mean + r;
        k = (e0 > 0.0 ? up : dn) * e0 + (e1 > 0.0 ? up : dn) * e1;
      } else {
        SymMatrix m(n);
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) m.set(a, b, ws.hess[pack(n, a, b)]);
        for (double e : m.eigenvalues()) k += (e > 0.0 ? up : dn) * e;
      }
      break;
    }
  }
  return factor * k;
}

// coefficient field lookup, piecewise constant in time from below
struct CoeffView {
  const ScalarField* field = nullptr;
  int slice = 0;
  double max_abs = 1.0;

  CoeffView(const std::optional<ScalarField>& c, const Grid& g, double t) {
    if (!c) return;
    if (c->grid.nx != g.nx)
      throw ValidationError("SolverConfig: coefficient field layout does not match the grid");
    field = &*c;
    const double q = (t - field->grid.t_start) / field->grid.dt;
    slice = std::clamp(static_cast<int>(std::floor(q + 1e-9)), 0, field->grid.nt - 1);
    max_abs = 0.0;
    for (double v : field->slice(slice)) max_abs = std::max(max_abs, std::abs(v));
  }
  double at(long j) const { return field ? field->at(j, slice) : 1.0; }
};

}  // namespace

void SolverConfig::validate() const {
  op.validate();
  op.params.require_degenerate("SolverConfig");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw ValidationError("SolverConfig: requires cfl_safety in (0,1]");
  if (!(delta > 0.0))
    throw ValidationError("SolverConfig: time stepping requires gradient delta > 0");
  if (boundary.kind == Boundary::Kind::dirichlet_from_field && !boundary.values)
    throw ValidationError("SolverConfig: dirichlet boundary needs a data source");
}

OperatorSpec SolverConfig::stepping_op() const {
  OperatorSpec s = op;
  s.delta = delta;
  return s;
}

double cfl_dt_bound(const Grid& g, std::span<const double> slice, const SolverConfig& cfg,
                    double t_slice) {
  cfg.validate();
  const OperatorSpec spec = cfg.stepping_op();
  StencilWorkspace ws(g);
  const long S = g.spatial_size();
  const int n = g.dim();
  const double inv2dx = 0.5 / g.dx;
  double max_factor = std::pow(spec.delta, spec.params.p - 2.0);
  for (long j = 0; j < S; ++j) {
    g.unflatten(j, ws.idx);
    if (!is_interior(g, ws.idx)) continue;
    double s = spec.delta * spec.delta;
    for (int a = 0; a < n; ++a) {
      const double d = (slice[j + ws.stride[a]] - slice[j - ws.stride[a]]) * inv2dx;
      s += d * d;
    }
    max_factor = std::max(max_factor, std::pow(std::sqrt(s), spec.params.p - 2.0));
  }
  CoeffView coeff(cfg.coefficient, g, t_slice);
  const double cmax = cfg.coefficient ? coeff.max_abs : 1.0;
  const double denom = 2.0 * n * spec.params.Lambda * max_factor * cmax;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return cfg.cfl_safety * g.dx * g.dx / denom;
}

namespace {

std::vector<double> step_impl(const Grid& g, std::span<const double> u, const SolverConfig& cfg,
                              double t_slice, double dt, StepReport* report, bool check_cfl) {
  cfg.validate();
  if (!(dt > 0.0)) throw ValidationError("step: requires dt > 0");
  if (check_cfl) {
    const double bound = cfl_dt_bound(g, u, cfg, t_slice);
    if (dt > bound * (1.0 + 1e-9))
      throw CflError(
          "step: dt=" + format_double(dt) + " exceeds the admissible dt=" + format_double(bound),
          bound);
  }
  const OperatorSpec spec = cfg.stepping_op();
  CoeffView coeff(cfg.coefficient, g, t_slice);
  StencilWorkspace ws(g);
  std::vector<double> out(u.begin(), u.end());
  const long S = g.spatial_size();
  double max_grad = 0.0, max_rhs = 0.0;
  std::vector<double> xb(g.dim());
  for (long j = 0; j < S; ++j) {
    g.unflatten(j, ws.idx);
    if (!is_interior(g, ws.idx)) {
      if (cfg.boundary.kind == Boundary::Kind::dirichlet_from_field) {
        g.node_coords(j, xb);
        out[j] = cfg.boundary.values(xb, t_slice + dt);
      }
      continue;
    }
    stencil_eval(g, u, j, ws);
    max_grad = std::max(max_grad, grad_norm_delta(ws.grad, 0.0));
    const double r = coeff.at(j) * rhs_kernel(spec, ws);
    max_rhs = std::max(max_rhs, std::abs(r));
    out[j] = u[j] + dt * r;
    if (!std::isfinite(out[j]))
      throw NumericError("step: non-finite update at t=" + format_double(t_slice));
  }
  if (report) {
    report->t = t_slice + dt;
    report->effective_dt = dt;
    report->max_abs_gradient = max_grad;
    report->residual_norm = max_rhs;
    report->min_value = *std::min_element(out.begin(), out.end());
    report->max_value = *std::max_element(out.begin(), out.end());
  }
  return out;
}

}  // namespace

std::vector<double> step(const Grid& g, std::span<const double> u_slice, const SolverConfig& cfg,
                         double t_slice, double dt, StepReport* report) {
  return step_impl(g, u_slice, cfg, t_slice, dt, report, true);
}

ScalarField evolve(const Grid& out_grid, std::span<const double> initial, const SolverConfig& cfg,
                   std::vector<StepReport>* reports) {
  cfg.validate();
  const long S = out_grid.spatial_size();
  if (static_cast<long>(initial.size()) != S)
    throw ValidationError("evolve: initial slice size does not match the grid");
  ScalarField u(out_grid);
  std::copy(initial.begin(), initial.end(), u.slice(0).begin());

  const double dt_out = out_grid.dt;
  long m = 1;
  {
    const double bound = cfl_dt_bound(out_grid, u.slice(0), cfg, out_grid.t_start);
    if (std::isfinite(bound) && bound > 0.0)
      m = std::max<long>(1, static_cast<long>(std::ceil(dt_out / bound * (1.0 + 1e-12))));
  }

  std::vector<double> work;
  for (int k = 0; k + 1 < out_grid.nt; ++k) {
    const double t0 = out_grid.time(k);
    bool done = false;
    while (!done) {
      if (m > (1L << 30))
        throw NumericError("evolve: CFL bound collapsed, required substeps exceed 2^30");
      const double dt_int = dt_out / static_cast<double>(m);
      work.assign(u.slice(k).begin(), u.slice(k).end());
      done = true;
      StepReport rep;
      for (long i = 0; i < m; ++i) {
        const double t = t0 + static_cast<double>(i) * dt_int;
        const double bound = cfl_dt_bound(out_grid, work, cfg, t);
        if (dt_int > bound * (1.0 + 1e-9)) {
          // restart this interval from the checkpoint with a finer substep
          m *= 2;
          done = false;
          break;
        }
        work = step_impl(out_grid, work, cfg, t, dt_int, &rep, false);
      }
      if (done) {
        std::copy(work.begin(), work.end(), u.slice(k + 1).begin());
        if (reports) {
          rep.step = k + 1;
          rep.t = out_grid.time(k + 1);
          rep.substeps = static_cast<int>(m);
          reports->push_back(rep);
        }
      }
    }
  }
  return u;
}

// --------------------------------------------------------------------------
// inf-convolution by the separable lower-envelope (distance transform)

namespace {

// one quadratic lower-envelope pass along a line with spacing h:
// out[i] = min_j f[j] + (h(i-j))^2 / (2 eps)
void envelope_line(std::span<const double> f, std::span<double> out, double h, double eps,
                   std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double w = h * h / (2.0 * eps);
  v.resize(n);
  z.resize(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + w * q * q) - (f[p] + w * p * p)) / (2.0 * w * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = static_cast<double>(q - v[k]);
    out[q] = f[v[k]] + w * d * d;
  }
}

}  // namespace

ScalarField inf_convolution(const ScalarField& u, double eps) {
  if (!(eps > 0.0)) throw ValidationError("inf_convolution: requires eps > 0");
  ScalarField out = u;
  const Grid& g = u.grid;
  const long S = g.spatial_size();
  const int n = g.dim();
  const auto stride = g.spatial_strides();

  std::vector<double> line, lout;
  std::vector<int> venv;
  std::vector<double> zenv;

  // spatial axes, slice by slice
  for (int a = 0; a < n; ++a) {
    const long inner = stride[a];
    const long outer = S / (inner * g.nx[a]);
    const int len = g.nx[a];
    line.resize(len);
    lout.resize(len);
    for (int k = 0; k < g.nt; ++k) {
      double* base = out.values.data() + static_cast<size_t>(k) * S;
      for (long o = 0; o < outer; ++o)
        for (long i = 0; i < inner; ++i) {
          double* p = base + o * inner * len + i;
          for (int q = 0; q < len; ++q) line[q] = p[q * inner];
          envelope_line(line, lout, g.dx, eps, venv, zenv);
          for (int q = 0; q < len; ++q) p[q * inner] = lout[q];
        }
    }
  }
  // time axis
  if (g.nt > 1) {
    line.resize(g.nt);
    lout.resize(g.nt);
    for (long j = 0; j < S; ++j) {
      for (int k = 0; k < g.nt; ++k) line[k] = out.at(j, k);
      envelope_line(std::span<const double>(line.data(), static_cast<size_t>(g.nt)), lout, g.dt,
                    eps, venv, zenv);
      for (int k = 0; k < g.nt; ++k) out.at(j, k) = lout[k];
    }
  }
  return out;
}

SupersolutionReport check_supersolution(const ScalarField& u, const OperatorSpec& spec, double tol,
                                        const std::optional<ScalarField>& coefficient) {
  spec.validate();
  const Grid& g = u.grid;
  if (g.nt < 3) throw ValidationError("check_supersolution: needs at least 3 time slices");
  StencilWorkspace ws(g);
  SupersolutionReport rep;
  rep.worst_residual = std::numeric_limits<double>::infinity();
  const long S = g.spatial_size();
  for (int k = 1; k < g.nt; ++k) {
    CoeffView coeff(coefficient, g, g.time(k));
    const auto uk = u.slice(k);
    const auto um = u.slice(k - 1);
    for (long j = 0; j < S; ++j) {
      g.unflatten(j, ws.idx);
      if (!is_interior(g, ws.idx)) continue;
      stencil_eval(g, uk, j, ws);
      const double resid = (uk[j] - um[j]) / g.dt - coeff.at(j) * rhs_kernel(spec, ws);
      ++rep.checked;
      if (resid < rep.worst_residual) {
        rep.worst_residual = resid;
        rep.worst_x.resize(g.dim());
        g.node_coords(j, rep.worst_x);
        rep.worst_t = g.time(k);
      }
      if (resid < -tol) ++rep.violations;
    }
  }
  if (rep.checked == 0) rep.worst_residual = 0.0;
  return rep;
}

}  // namespace degparab
