#include "degparab/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degparab/regions.hpp"
#include "degparab/threading.hpp"

namespace degparab {

void ParameterSet::validate() const {
  if (y.size() != s.size() || y.empty()) throw ValidationError("ParameterSet: empty or ragged");
  if (!(cell_volume > 0.0)) throw ValidationError("ParameterSet: requires cell_volume > 0");
  for (size_t i = 0; i + 1 < y.size(); ++i)
    for (size_t j = i + 1; j < y.size(); ++j)
      if (y[i] == y[j] && s[i] == s[j]) throw ValidationError("ParameterSet: duplicate sample");
}

ParameterSet ParameterSet::box(std::span<const double> y_center, std::span<const double> y_half,
                               int ny_per_axis, double s_lo, double s_hi, int ns) {
  if (ny_per_axis < 1 || ns < 1) throw ValidationError("ParameterSet::box: needs >= 1 sample per axis");
  if (!(s_lo <= s_hi)) throw ValidationError("ParameterSet::box: bad s range");
  const int n = static_cast<int>(y_center.size());
  ParameterSet E;
  double vol = (ns > 1) ? (s_hi - s_lo) : 1.0;
  long total_y = 1;
  for (int a = 0; a < n; ++a) {
    vol *= (ny_per_axis > 1) ? 2.0 * y_half[a] : 1.0;
    total_y *= ny_per_axis;
  }
  for (long iy = 0; iy < total_y; ++iy) {
    std::vector<double> yy(n);
    long rem = iy;
    for (int a = n - 1; a >= 0; --a) {
      const int j = static_cast<int>(rem % ny_per_axis);
      rem /= ny_per_axis;
      yy[a] = (ny_per_axis > 1)
                  ? y_center[a] - y_half[a] + 2.0 * y_half[a] * j / (ny_per_axis - 1)
                  : y_center[a];
    }
    for (int js = 0; js < ns; ++js) {
      const double ss = (ns > 1) ? s_lo + (s_hi - s_lo) * js / (ns - 1) : s_lo;
      E.y.push_back(yy);
      E.s.push_back(ss);
    }
  }
  E.cell_volume = vol / static_cast<double>(E.size());
  return E;
}

namespace {

// one-sided/central gradient of a slice at a node; returns true if every
// axis had both neighbors (interior)
bool slice_gradient(const Grid& g, std::span<const double> slice, long j,
                    std::span<const long> stride, std::span<const int> idx,
                    std::span<double> grad) {
  bool interior = true;
  for (int a = 0; a < g.dim(); ++a) {
    const bool lo = idx[a] > 0, hi = idx[a] < g.nx[a] - 1;
    if (lo && hi)
      grad[a] = (slice[j + stride[a]] - slice[j - stride[a]]) / (2.0 * g.dx);
    else if (hi)
      grad[a] = (slice[j + stride[a]] - slice[j]) / g.dx, interior = false;
    else if (lo)
      grad[a] = (slice[j] - slice[j - stride[a]]) / g.dx, interior = false;
    else
      grad[a] = 0.0, interior = false;
  }
  return interior;
}

}  // namespace

ContactRecord find_contact(const ScalarField& u, const ContactFnSpec& phi) {
  const Grid& g = u.grid;
  if (g.dim() != phi.params.n) throw ValidationError("find_contact: dimension mismatch");
  const long S = g.spatial_size();
  if (S == 0 || g.nt == 0) throw ValidationError("find_contact: empty field");

  ContactRecord rec;
  rec.y = phi.y;
  rec.s = phi.s;
  rec.gap = std::numeric_limits<double>::infinity();

  const auto stride = g.spatial_strides();
  std::vector<double> x(g.dim()), w(S), w_prev(S, 0.0), grad(g.dim());
  std::vector<int> idx(g.dim());

  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    double dmin = std::numeric_limits<double>::infinity();
    long jmin = 0;
    for (long j = 0; j < S; ++j) {
      g.node_coords(j, x);
      w[j] = u.at(j, k) - phi.value(x, t);
      if (w[j] < dmin) {  // strict: first occurrence = lexicographic tie-break
        dmin = w[j];
        jmin = j;
      }
    }
    if (dmin < rec.gap) rec.gap = dmin;

    // resolution-aware contact band from the local slope of u - phi
    g.unflatten(jmin, idx);
    slice_gradient(g, w, jmin, stride, idx, grad);
    double lip = 0.0;
    for (double v : grad) lip = std::max(lip, std::abs(v));
    const double tol = 2.0 * lip * g.dx + 1e-12 * (1.0 + std::abs(u.at(jmin, k)));
    if (dmin <= tol) {
      rec.touched = true;
      rec.x_flat = jmin;
      rec.t_index = k;
      rec.x.resize(g.dim());
      g.node_coords(jmin, rec.x);
      rec.t = t;
      rec.gap = dmin;
      rec.value_at_contact = u.at(jmin, k);
      // the quantization band also carries the per-slice drop of u - phi:
      // the first slice past the crossing can overshoot by that much
      const double time_drop = (k > 0) ? std::max(0.0, w_prev[jmin] - dmin) : 0.0;
      rec.tolerance = tol + time_drop;
      rec.gradient_at_contact.resize(g.dim());
      rec.on_boundary =
          !slice_gradient(g, u.slice(k), jmin, stride, idx, rec.gradient_at_contact);
      return rec;
    }
    std::swap(w, w_prev);
  }
  return rec;  // untouched; gap holds the closest approach
}

ContactMapResidual contact_map_check(const ContactRecord& rec, const ScalarField& u, double a,
                                     const EllipticityParams& params) {
  if (!rec.touched) throw ValidationError("contact_map_check: record did not touch");
  params.validate();
  const Grid& g = u.grid;
  const int n = g.dim();
  const auto stride = g.spatial_strides();
  std::vector<int> idx(n);
  std::vector<double> grad(n);
  g.unflatten(rec.x_flat, idx);
  const bool interior = slice_gradient(g, u.slice(rec.t_index), rec.x_flat, stride, idx, grad);

  double gn = 0.0;
  for (double v : grad) gn += v * v;
  gn = std::sqrt(gn);
  const double p = params.p;
  const double fac = (gn > 0.0) ? std::pow(gn, p - 2.0) : 0.0;

  ContactMapResidual out;
  out.reliable = interior;
  double y_err2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ypred = rec.x[i] + fac * grad[i] / a;
    const double d = ypred - rec.y[i];
    y_err2 += d * d;
  }
  out.y_error = std::sqrt(y_err2);
  const double spred = rec.t - u.at(rec.x_flat, rec.t_index) / a -
                       (p - 1.0) / p * std::pow(gn, p) / (a * a);
  out.s_error = std::abs(spred - rec.s);
  return out;
}

ContactSetMeasure contact_set_measure(const ScalarField& u, const ParameterSet& E, double a,
                                      const EllipticityParams& params, int dilation,
                                      int threads) {
  E.validate();
  params.validate();
  if (dilation < 0) throw ValidationError("contact_set_measure: requires dilation >= 0");
  const Grid& g = u.grid;

  ContactSetMeasure out;
  out.records.resize(E.size());
  parallel_for(static_cast<long>(E.size()), threads, [&](long i) {
    ContactFnSpec phi(E.y[i], E.s[i], a, params);
    out.records[i] = find_contact(u, phi);
  });

  // union of dilated contact cells
  const long S = g.spatial_size();
  std::vector<char> mark(static_cast<size_t>(S) * g.nt, 0);
  std::vector<int> idx(g.dim()), lo(g.dim()), hi(g.dim()), cur(g.dim());
  for (const auto& rec : out.records) {
    if (!rec.touched) {
      ++out.untouched;
      continue;
    }
    ++out.touched;
    g.unflatten(rec.x_flat, idx);
    for (int a2 = 0; a2 < g.dim(); ++a2) {
      lo[a2] = std::max(0, idx[a2] - dilation);
      hi[a2] = std::min(g.nx[a2] - 1, idx[a2] + dilation);
      cur[a2] = lo[a2];
    }
    const int klo = std::max(0, rec.t_index - dilation);
    const int khi = std::min(g.nt - 1, rec.t_index + dilation);
    while (true) {
      long f = 0;
      for (int a2 = 0; a2 < g.dim(); ++a2) f = f * g.nx[a2] + cur[a2];
      for (int k = klo; k <= khi; ++k) mark[static_cast<size_t>(k) * S + f] = 1;
      int ax = g.dim() - 1;
      while (ax >= 0) {
        if (++cur[ax] <= hi[ax]) break;
        cur[ax] = lo[ax];
        --ax;
      }
      if (ax < 0) break;
    }
  }
  long count = 0;
  for (char c : mark) count += c;
  out.gamma_measure = static_cast<double>(count) * g.cell_volume();
  out.e_measure = static_cast<double>(out.touched + out.untouched) * E.cell_volume;
  out.ratio = out.e_measure > 0.0 ? out.gamma_measure / out.e_measure : 0.0;
  return out;
}

double basic_measure_estimate(const ScalarField& u, const EllipticityParams& params) {
  params.validate();
  if (u.min_value() < -1e-12)
    throw ValidationError("basic_measure_estimate: requires u >= 0");
  std::vector<double> origin(u.grid.dim(), 0.0);
  const double u00 = u.value_at_point(origin, 0.0);
  if (u00 > 1.0 + 1e-12)
    throw ValidationError("basic_measure_estimate: requires u(0,0) <= 1, got " +
                          format_double(u00));
  Cylinder q1;
  q1.x0.assign(u.grid.dim(), 0.0);
  q1.t0 = 0.0;
  q1.rho = 1.0;
  q1.theta = 1.0;
  q1.orientation = Cylinder::Orientation::past;

  long count = 0;
  std::vector<double> x(u.grid.dim());
  const long S = u.grid.spatial_size();
  for (int k = 0; k < u.grid.nt; ++k) {
    const double t = u.grid.time(k);
    for (long j = 0; j < S; ++j) {
      if (u.at(j, k) >= 4.0) continue;
      u.grid.node_coords(j, x);
      if (cylinder_contains(q1, x, t, params)) ++count;
    }
  }
  return static_cast<double>(count) * u.grid.cell_volume();
}

QuantifiedMeasure quantified_measure_estimate(const ScalarField& u, std::span<const double> x0,
                                              double rho, double m0, double L0,
                                              const EllipticityParams& params, double c1) {
  params.validate();
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("quantified_measure_estimate: requires rho in (0,1]");
  if (!(m0 > 0.0) || !(L0 > 1.0))
    throw ValidationError("quantified_measure_estimate: requires m0 > 0 and L0 > 1");
  if (u.min_value() < -1e-12)
    throw ValidationError("quantified_measure_estimate: requires u >= 0");

  const Grid& g = u.grid;
  const int n = g.dim();
  const int k0 = g.time_index_exact(0.0, 1e-6);

  // inf over B_rho(x0) ∩ B_1 at t = 0
  double inf0 = std::numeric_limits<double>::infinity();
  std::vector<double> x(n);
  const long S = g.spatial_size();
  for (long j = 0; j < S; ++j) {
    g.node_coords(j, x);
    double d0 = 0.0, dc = 0.0;
    for (int a = 0; a < n; ++a) {
      d0 += x[a] * x[a];
      const double d = x[a] - x0[a];
      dc += d * d;
    }
    if (d0 < 1.0 && dc < rho * rho) inf0 = std::min(inf0, u.at(j, k0));
  }
  if (!(inf0 <= m0 + 1e-12))
    throw ValidationError("quantified_measure_estimate: inf over B_rho(x0) ∩ B_1 at t=0 is " +
                          format_double(inf0) + " > m0 = " + format_double(m0));

  const double rp = std::pow(rho, params.p);
  ParaboloidSet bset;
  bset.x0.assign(x0.begin(), x0.end());
  bset.t0 = -rp;
  bset.theta = 1.0;
  bset.r = rp;
  const double threshold = 4.0 * L0 * m0;

  long count = 0;
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    for (long j = 0; j < S; ++j) {
      if (u.at(j, k) >= threshold) continue;
      g.node_coords(j, x);
      double d0 = 0.0;
      for (int a = 0; a < n; ++a) d0 += x[a] * x[a];
      if (d0 >= 1.0) continue;
      if (paraboloid_contains(bset, x, t, params)) ++count;
    }
  }
  QuantifiedMeasure out;
  out.measure = static_cast<double>(count) * g.cell_volume();
  out.bound = c1 * std::pow(rho, params.n + params.p);
  return out;
}

}  // namespace degparab
