#include "degparab/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "degparab/solutions.hpp"

namespace degparab {

namespace {

std::string box_string(const Grid& g, const Cylinder& c, double p) {
  std::ostringstream os;
  os << "ball radius " << format_double(c.rho) << " around (";
  for (size_t a = 0; a < c.x0.size(); ++a) os << (a ? "," : "") << format_double(c.x0[a]);
  os << ") x time (" << format_double(c.t_lo(p)) << ", " << format_double(c.t_hi(p))
     << "]; grid covers [";
  for (int a = 0; a < g.dim(); ++a)
    os << (a ? "," : "") << format_double(g.x_min[a]) << ".."
       << format_double(g.coord(a, g.nx[a] - 1));
  os << "] x [" << format_double(g.t_start) << ", " << format_double(g.t_end()) << "]";
  return os.str();
}

void require_cylinder_in_domain(const Grid& g, const Cylinder& c, const EllipticityParams& params,
                                const char* who) {
  const double tol = 1e-9 * g.dx;
  for (int a = 0; a < g.dim(); ++a) {
    if (g.x_min[a] > c.x0[a] - c.rho + tol ||
        g.coord(a, g.nx[a] - 1) < c.x0[a] + c.rho - tol)
      throw ValidationError(std::string(who) + ": field domain does not contain the required " +
                            box_string(g, c, params.p));
  }
  const double ttol = 1e-9 * g.dt;
  if (g.t_start > c.t_lo(params.p) + ttol || g.t_end() < c.t_hi(params.p) - ttol)
    throw ValidationError(std::string(who) + ": field domain does not contain the required " +
                          box_string(g, c, params.p));
}

struct CylinderStats {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  long nodes = 0;
};

CylinderStats cylinder_stats(const ScalarField& u, const Cylinder& c,
                             const EllipticityParams& params) {
  CylinderStats st;
  const Grid& g = u.grid;
  std::vector<double> x(g.dim());
  const long S = g.spatial_size();
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    for (long j = 0; j < S; ++j) {
      g.node_coords(j, x);
      if (!cylinder_contains(c, x, t, params)) continue;
      ++st.nodes;
      st.min = std::min(st.min, u.at(j, k));
      st.max = std::max(st.max, u.at(j, k));
    }
  }
  return st;
}

void require_nonneg(const CylinderStats& st, const char* who) {
  if (st.nodes == 0) throw ValidationError(std::string(who) + ": cylinder contains no grid nodes");
  if (st.min < -1e-12)
    throw ValidationError(std::string(who) + ": field is negative on the hypothesis cylinder");
}

Cylinder make_cyl(std::span<const double> x0, double t0, double rho, double theta,
                  Cylinder::Orientation o) {
  Cylinder c;
  c.x0.assign(x0.begin(), x0.end());
  c.t0 = t0;
  c.rho = rho;
  c.theta = theta;
  c.orientation = o;
  return c;
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// membership in B_1 x (-2, -1]
bool in_decay_region(std::span<const double> x, double t) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2 < 1.0 && t > -2.0 && t <= -1.0;
}

}  // namespace

WeakHarnackResult weak_harnack_ratio(const ScalarField& u, std::span<const double> x0, double t0,
                                     double rho, const HarnackConfig& cfg,
                                     const EllipticityParams& params) {
  cfg.validate();
  params.require_degenerate("weak_harnack_ratio");
  if (!(rho > 0.0)) throw ValidationError("weak_harnack_ratio: requires rho > 0");
  const double u0 = u.value_at_point(x0, t0);
  if (!(u0 > 0.0)) throw ValidationError("weak_harnack_ratio: requires u(x0,t0) > 0");
  const double theta = theta_from_value(cfg.c_weak, u0, params);

  const Cylinder hyp = make_cyl(x0, t0, 3.0 * rho, theta, Cylinder::Orientation::past);
  require_cylinder_in_domain(u.grid, hyp, params, "weak_harnack_ratio");
  require_nonneg(cylinder_stats(u, hyp, params), "weak_harnack_ratio");

  const double rp = std::pow(rho, params.p);
  const Cylinder q = make_cyl(x0, t0 - theta * rp, rho, theta, Cylinder::Orientation::past);

  // average (u/u0)^eps so that constants come out exactly 1
  const Grid& g = u.grid;
  std::vector<double> x(g.dim());
  double sum = 0.0;
  long nodes = 0;
  const long S = g.spatial_size();
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    for (long j = 0; j < S; ++j) {
      g.node_coords(j, x);
      if (!cylinder_contains(q, x, t, params)) continue;
      sum += std::pow(u.at(j, k) / u0, cfg.eps_weak);
      ++nodes;
    }
  }
  if (nodes == 0) throw ValidationError("weak_harnack_ratio: averaging cylinder has no nodes");

  WeakHarnackResult out;
  out.theta = theta;
  out.nodes = nodes;
  out.rhs = u0;
  out.ratio = std::pow(sum / static_cast<double>(nodes), 1.0 / cfg.eps_weak);
  out.lhs = out.ratio * u0;
  return out;
}

HarnackRatios harnack_ratios(const ScalarField& u, std::span<const double> x0, double t0,
                             double rho, const HarnackConfig& cfg,
                             const EllipticityParams& params) {
  cfg.validate();
  params.require_degenerate("harnack_ratios");
  if (!(rho > 0.0)) throw ValidationError("harnack_ratios: requires rho > 0");
  const double u0 = u.value_at_point(x0, t0);
  if (!(u0 > 0.0)) throw ValidationError("harnack_ratios: requires u(x0,t0) > 0");

  HarnackRatios out;
  out.theta1 = theta_from_value(cfg.c1_h, u0, params);
  out.theta2 = theta_from_value(cfg.c2_h, u0, params);
  const double rp = std::pow(rho, params.p);

  // backward
  {
    const Cylinder hyp = make_cyl(x0, t0, 4.0 * rho, out.theta1, Cylinder::Orientation::past);
    require_cylinder_in_domain(u.grid, hyp, params, "harnack_ratios[backward]");
    require_nonneg(cylinder_stats(u, hyp, params), "harnack_ratios[backward]");
    const Cylinder qm =
        make_cyl(x0, t0 - out.theta1 * rp, rho, out.theta1, Cylinder::Orientation::past);
    const CylinderStats st = cylinder_stats(u, qm, params);
    if (st.nodes == 0) throw ValidationError("harnack_ratios: past query cylinder has no nodes");
    out.sup_value = st.max;
    out.sup_ratio = st.max / u0;
  }
  // forward
  {
    const Cylinder hyp = make_cyl(x0, t0 + 2.0 * out.theta2 * rp, 4.0 * rho, out.theta2,
                                  Cylinder::Orientation::past);
    require_cylinder_in_domain(u.grid, hyp, params, "harnack_ratios[forward]");
    require_nonneg(cylinder_stats(u, hyp, params), "harnack_ratios[forward]");
    const Cylinder qp =
        make_cyl(x0, t0 + out.theta2 * rp, rho, out.theta2, Cylinder::Orientation::future);
    const CylinderStats st = cylinder_stats(u, qp, params);
    if (st.nodes == 0) throw ValidationError("harnack_ratios: future query cylinder has no nodes");
    out.inf_value = st.min;
    out.inf_ratio = st.min > 0.0 ? u0 / st.min : std::numeric_limits<double>::infinity();
  }
  return out;
}

PropagationResult propagation_check(const ScalarField& u, std::span<const double> x0, double t0,
                                    int k, const HarnackConfig& cfg,
                                    const EllipticityParams& params) {
  cfg.validate();
  params.require_degenerate("propagation_check");
  if (k < 1) throw ValidationError("propagation_check: requires k >= 1");
  double r2 = 0.0;
  for (double v : x0) r2 += v * v;
  if (!(std::sqrt(r2) < 4.0 / 3.0))
    throw ValidationError("propagation_check: x0 must lie in B_{4/3}");
  const double t_hi = -1.0 + std::pow(32.0, -static_cast<double>(k) * params.p);
  if (!(t0 > -3.0 && t0 <= t_hi + 1e-12))
    throw ValidationError("propagation_check: t0 must lie in (-3, -1 + 32^(-k p)]");
  if (u.min_value() < -1e-12) throw ValidationError("propagation_check: requires u >= 0");

  const Grid& g = u.grid;
  const int kt = g.nearest_time_index(t0);
  if (std::abs(g.time(kt) - t0) > 0.5 * g.dt + 1e-12)
    throw ValidationError("propagation_check: t0 is outside the field's time range");

  const double radius = std::pow(32.0, -static_cast<double>(k));
  PropagationResult out;
  out.threshold = std::pow(cfg.L0, k) * cfg.m0;
  double best = std::numeric_limits<double>::infinity();
  long best_j = -1;
  std::vector<double> x(g.dim());
  const long S = g.spatial_size();
  for (long j = 0; j < S; ++j) {
    g.node_coords(j, x);
    double d2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = x[a] - x0[a];
      d2 += d * d;
    }
    if (d2 >= radius * radius) continue;
    if (u.at(j, kt) < best) {
      best = u.at(j, kt);
      best_j = j;
    }
  }
  if (best_j < 0)
    throw ValidationError("propagation_check: ball radius " + format_double(radius) +
                          " holds no grid nodes; refine dx below it");
  out.value = best;
  out.xbar.resize(g.dim());
  g.node_coords(best_j, out.xbar);
  out.found = best <= out.threshold * (1.0 + 1e-12);
  return out;
}

PropagationConstants find_propagation_constants(std::span<const ScalarField> family, double m0,
                                                const PropagationScan& scan,
                                                const EllipticityParams& params) {
  params.require_degenerate("find_propagation_constants");
  if (family.empty()) throw ValidationError("find_propagation_constants: empty family");
  if (!(m0 > 0.0 && m0 < 1.0))
    throw ValidationError("find_propagation_constants: requires m0 in (0,1)");

  PropagationConstants out;
  out.m0 = m0;
  const double radius = 1.0 / 32.0;

  for (size_t mi = 0; mi < family.size(); ++mi) {
    const ScalarField& u = family[mi];
    std::vector<double> origin(u.grid.dim(), 0.0);
    const double u00 = u.value_at_point(origin, 0.0);
    if (u00 > m0 * (1.0 + 1e-12))
      throw ValidationError("find_propagation_constants: family member " + std::to_string(mi) +
                            " has u(0,0) = " + format_double(u00) + " > m0");
    if (u.min_value() < -1e-12)
      throw ValidationError("find_propagation_constants: family member must be nonnegative");

    const Grid& g = u.grid;
    std::vector<double> x0(g.dim()), x(g.dim());
    for (int it = 0; it < scan.nt0; ++it) {
      const double t0 = scan.nt0 > 1 ? -3.0 + (2.5 * (it + 1)) / scan.nt0 : -1.0;
      const int kt = g.nearest_time_index(t0);
      if (std::abs(g.time(kt) - t0) > 0.5 * g.dt + 1e-12) continue;
      long queries = 1;
      for (int a = 0; a < g.dim(); ++a) queries *= scan.nx0;
      for (long qi = 0; qi < queries; ++qi) {
        long rem = qi;
        for (int a = g.dim() - 1; a >= 0; --a) {
          const int jj = static_cast<int>(rem % scan.nx0);
          rem /= scan.nx0;
          x0[a] = scan.nx0 > 1 ? -4.0 / 3.0 + (8.0 / 3.0) * jj / (scan.nx0 - 1) : 0.0;
        }
        double rr = 0.0;
        for (int a = 0; a < g.dim(); ++a) rr += x0[a] * x0[a];
        if (!(std::sqrt(rr) < 4.0 / 3.0)) continue;

        double best = std::numeric_limits<double>::infinity();
        const long S = g.spatial_size();
        for (long j = 0; j < S; ++j) {
          g.node_coords(j, x);
          double d2 = 0.0;
          for (int a = 0; a < g.dim(); ++a) {
            const double d = x[a] - x0[a];
            d2 += d * d;
          }
          if (d2 < radius * radius) best = std::min(best, u.at(j, kt));
        }
        if (!std::isfinite(best))
          throw ValidationError("find_propagation_constants: query ball holds no grid nodes");
        const double need = best / m0;
        if (need > out.required) {
          out.required = need;
          out.worst_member = static_cast<int>(mi);
          out.worst_x0.assign(x0.begin(), x0.end());
          out.worst_t0 = g.time(kt);
        }
      }
    }
  }

  // snap the requirement up to the geometric grid
  for (int i = 0; i < scan.nL0; ++i) {
    const double L0 = scan.L0_lo * std::pow(scan.L0_hi / scan.L0_lo,
                                            static_cast<double>(i) / (scan.nL0 - 1));
    if (L0 >= out.required) {
      out.found = true;
      out.L0 = L0;
      return out;
    }
  }
  out.found = false;
  out.L0 = scan.L0_hi;
  return out;
}

DecayTable level_set_decay(const ScalarField& u, double m0, double L, int k_max,
                           const EllipticityParams& params) {
  params.validate();
  if (!(m0 > 0.0) || !(L > 1.0))
    throw ValidationError("level_set_decay: requires m0 > 0 and L > 1");
  if (k_max < 1) throw ValidationError("level_set_decay: requires k_max >= 1");
  if (u.min_value() < -1e-12) throw ValidationError("level_set_decay: requires u >= 0");

  const Grid& g = u.grid;
  DecayTable out;
  std::vector<double> x(g.dim());
  const long S = g.spatial_size();
  for (int k = 1; k <= k_max; ++k) {
    const double thr = std::pow(L, k) * m0;
    long count = 0;
    for (int kt = 0; kt < g.nt; ++kt) {
      const double t = g.time(kt);
      for (long j = 0; j < S; ++j) {
        if (u.at(j, kt) <= thr) continue;
        g.node_coords(j, x);
        if (in_decay_region(x, t)) ++count;
      }
    }
    out.rows.push_back({k, thr, static_cast<double>(count) * g.cell_volume()});
  }

  // least-squares log-linear fit through the positive measures
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : out.rows)
    if (r.measure > 0.0) pts.emplace_back(static_cast<double>(r.k), std::log(r.measure));
  if (pts.size() < 2) {
    out.degenerate = true;
    out.eta = 0.0;
    out.C = pts.empty() ? 0.0 : std::exp(pts[0].second);
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [xk, yk] : pts) {
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
  }
  const double npts = static_cast<double>(pts.size());
  const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / npts;
  out.eta = std::exp(slope);
  out.C = std::exp(intercept);
  for (auto [xk, yk] : pts) out.fit_residuals.push_back(yk - (intercept + slope * xk));
  return out;
}

DensityResult density_check(const ScalarField& u, double m0, double L1,
                            const EllipticityParams& params) {
  params.validate();
  if (!(m0 > 0.0) || !(L1 > 0.0)) throw ValidationError("density_check: requires m0, L1 > 0");
  if (u.min_value() < -1e-12) throw ValidationError("density_check: requires u >= 0");
  std::vector<double> origin(u.grid.dim(), 0.0);
  const double u00 = u.value_at_point(origin, 0.0);
  if (u00 > m0 * (1.0 + 1e-12))
    throw ValidationError("density_check: requires u(0,0) <= m0, got " + format_double(u00));

  const Grid& g = u.grid;
  const double thr = L1 * m0;
  long count = 0;
  std::vector<double> x(g.dim());
  const long S = g.spatial_size();
  for (int kt = 0; kt < g.nt; ++kt) {
    const double t = g.time(kt);
    for (long j = 0; j < S; ++j) {
      if (u.at(j, kt) < thr) continue;
      g.node_coords(j, x);
      if (in_decay_region(x, t)) ++count;
    }
  }
  DensityResult out;
  out.measure = static_cast<double>(count) * g.cell_volume();
  out.bound = unit_ball_volume(params.n) / std::pow(4.0, params.n + 1);
  out.pass = out.measure <= out.bound;
  return out;
}

BarrierScanResult find_barrier_params(const EllipticityParams& params, const BarrierScan& scan) {
  params.require_degenerate("find_barrier_params");
  const double alpha_hi = 1.0 / (2.0 * params.p);
  if (!(scan.q_lo > 1.0 && scan.q_hi >= scan.q_lo && scan.nq >= 1))
    throw ValidationError("find_barrier_params: bad q range");
  if (!(scan.alpha_lo > 0.0 && scan.alpha_lo <= alpha_hi && scan.nalpha >= 1))
    throw ValidationError("find_barrier_params: bad alpha range");

  BarrierScanResult out;
  out.witness_residual = std::numeric_limits<double>::infinity();

  for (int iq = 0; iq < scan.nq; ++iq) {
    const double q =
        scan.nq > 1 ? scan.q_lo * std::pow(scan.q_hi / scan.q_lo,
                                           static_cast<double>(iq) / (scan.nq - 1))
                    : scan.q_lo;
    for (int ia = scan.nalpha - 1; ia >= 0; --ia) {  // largest alpha first
      const double alpha =
          scan.nalpha > 1 ? scan.alpha_lo * std::pow(alpha_hi / scan.alpha_lo,
                                                     static_cast<double>(ia) / (scan.nalpha - 1))
                          : scan.alpha_lo;
      const BarrierSpec spec(q, alpha, params);
      // profile arguments: uniform over [0,1) plus a geometric tail hugging
      // the support edge, where sign failures of the radial operator hide
      std::vector<double> s_samples;
      s_samples.reserve(scan.ns + 22);
      for (int is = 0; is < scan.ns; ++is)
        s_samples.push_back(static_cast<double>(is) / scan.ns);
      for (int jt = 1; jt <= 22; ++jt)
        s_samples.push_back(1.0 - std::ldexp(1.0 / scan.ns, -jt));
      bool feasible = true;
      double worst = -std::numeric_limits<double>::infinity();
      double worst_r = 0.0, worst_t = 0.0;
      for (int it = 0; it < scan.nt && feasible; ++it) {
        const double t =
            scan.nt > 1 ? 0.25 * std::pow(16.0, static_cast<double>(it) / (scan.nt - 1)) : 1.0;
        const double rmax = 1.5 * std::pow(t, alpha);
        for (double s : s_samples) {
          const double r = s * rmax;
          const BarrierResidual br = barrier_residual_radial(spec, r, t, params);
          ++out.samples_checked;
          if (br.residual > worst) {
            worst = br.residual;
            worst_r = r;
            worst_t = t;
          }
          if (!(br.residual < 0.0) || !(br.residual <= -scan.margin * br.scale)) {
            feasible = false;
            break;
          }
        }
      }
      if (feasible) {
        out.found = true;
        out.q = q;
        out.alpha = alpha;
        out.worst_residual = worst;
        const double sign = params.lambda * (q + 1.0) - params.Lambda * (params.n - 1);
        out.eigen_sign_ok = sign > 0.0;
        out.proof_margin_ok = sign >= params.lambda * q;
        return out;
      }
      if (worst < out.witness_residual) {
        out.witness_residual = worst;
        out.witness_q = q;
        out.witness_alpha = alpha;
        out.witness_r = worst_r;
        out.witness_t = worst_t;
      }
    }
  }
  return out;
}

std::vector<WaitingTimeRow> waiting_time_scan(std::span<const double> C0_values, double C, int k,
                                              const EllipticityParams& params) {
  params.require_degenerate("waiting_time_scan");
  if (!(C > 1.0)) throw ValidationError("waiting_time_scan: requires C > 1");
  const double rho = 0.125;
  const double rp = std::pow(rho, params.p);

  std::vector<WaitingTimeRow> table;
  for (double C0 : C0_values) {
    BlowupExample ex(C0, k, params);
    const double origin = 0.0;
    const double u00 = ex.value(std::span<const double>(&origin, 1), 0.0);  // = 1
    // sup over the past cylinder sits at x = 0 and the earliest time
    auto sup_of = [&](double theta1) {
      return ex.value(std::span<const double>(&origin, 1), -2.0 * theta1 * rp);
    };
    const double target = C * u00;

    WaitingTimeRow row;
    row.C0 = C0;
    row.bound = std::pow(8.0, params.p) / C0;
    double lo = row.bound * 1e-8;
    double hi = row.bound * 4.0;
    if (sup_of(lo) > target) {
      row.bracket_ok = false;
      row.theta1 = 0.0;
      table.push_back(row);
      continue;
    }
    if (sup_of(hi) <= target) {
      row.bracket_ok = false;
      row.theta1 = hi;
      table.push_back(row);
      continue;
    }
    for (int it = 0; it < 80; ++it) {
      const double mid = std::sqrt(lo * hi);
      (sup_of(mid) <= target ? lo : hi) = mid;
    }
    row.theta1 = lo;
    table.push_back(row);
  }
  return table;
}

}  // namespace degparab
