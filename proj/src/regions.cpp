#include "degparab/regions.hpp"

#include <cmath>

namespace degparab {

namespace {
double dist2(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - y[a];
    s += d * d;
  }
  return s;
}
}  // namespace

double Cylinder::time_height(double p) const { return theta * std::pow(rho, p); }

double Cylinder::t_lo(double p) const {
  switch (orientation) {
    case Orientation::past: return t0 - time_height(p);
    case Orientation::future: return t0;
    case Orientation::full: return t0 - time_height(p);
  }
  return t0;
}

double Cylinder::t_hi(double p) const {
  switch (orientation) {
    case Orientation::past: return t0;
    case Orientation::future: return t0 + time_height(p);
    case Orientation::full: return t0 + time_height(p);
  }
  return t0;
}

bool cylinder_contains(const Cylinder& c, std::span<const double> x, double t,
                       const EllipticityParams& params) {
  c.validate();
  if (dist2(x, c.x0) >= c.rho * c.rho) return false;
  const double h = c.time_height(params.p);
  switch (c.orientation) {
    case Cylinder::Orientation::past: return t > c.t0 - h && t <= c.t0;
    case Cylinder::Orientation::future: return t >= c.t0 && t < c.t0 + h;
    case Cylinder::Orientation::full: return t > c.t0 - h && t < c.t0 + h;
  }
  return false;
}

bool paraboloid_contains(const ParaboloidSet& b, std::span<const double> x, double t,
                         const EllipticityParams& params) {
  b.validate();
  const double dt = t - b.t0;
  if (dt > b.r) return false;
  const double d = std::sqrt(dist2(x, b.x0));
  return b.theta * std::pow(d, params.p) <= dt;
}

double region_measure(const RegionPredicate& inside, const Grid& g) {
  long count = 0;
  std::vector<double> x(g.dim());
  const long S = g.spatial_size();
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    for (long j = 0; j < S; ++j) {
      g.node_coords(j, x);
      if (inside(x, t)) ++count;
    }
  }
  return static_cast<double>(count) * g.cell_volume();
}

double region_measure(const Cylinder& c, const Grid& g, const EllipticityParams& params) {
  return region_measure(
      [&](std::span<const double> x, double t) { return cylinder_contains(c, x, t, params); }, g);
}

double region_measure(const ParaboloidSet& b, const Grid& g, const EllipticityParams& params) {
  return region_measure(
      [&](std::span<const double> x, double t) { return paraboloid_contains(b, x, t, params); },
      g);
}

double theta_from_value(double c, double u0, const EllipticityParams& params) {
  params.validate();
  if (!(c > 0.0)) throw ValidationError("theta_from_value: requires c > 0");
  if (!(u0 > 0.0))
    throw ValidationError("theta_from_value: intrinsic geometry undefined at u0 <= 0");
  return std::pow(c / u0, params.p - 2.0);
}

ScalarField intrinsic_rescale(const ScalarField& u, double r, double M,
                              const EllipticityParams& params) {
  params.validate();
  if (!(r > 0.0) || !(M > 0.0)) throw ValidationError("intrinsic_rescale: requires r, M > 0");
  // time factor: t_new = t_old * M^(p-2) / r^p maps node k to node k
  const double tf = std::pow(M, params.p - 2.0) / std::pow(r, params.p);
  std::vector<double> x_min(u.grid.x_min);
  for (double& v : x_min) v /= r;
  ScalarField v(Grid::raw(std::move(x_min), u.grid.nx, u.grid.dx / r, u.grid.t_start * tf,
                          u.grid.dt * tf, u.grid.nt));
  for (size_t i = 0; i < u.values.size(); ++i) v.values[i] = u.values[i] / M;
  return v;
}

ScalarField intrinsic_rescale_onto(const ScalarField& u, double r, double M,
                                   const EllipticityParams& params, const Grid& target,
                                   bool interpolate, double tol) {
  params.validate();
  if (!(r > 0.0) || !(M > 0.0)) throw ValidationError("intrinsic_rescale_onto: requires r, M > 0");
  if (target.dim() != u.grid.dim())
    throw ValidationError("intrinsic_rescale_onto: dimension mismatch");
  const double tb = std::pow(r, params.p) * std::pow(M, 2.0 - params.p);
  const Grid& sg = u.grid;
  const int n = sg.dim();
  ScalarField v(target);
  std::vector<double> x(n), q(n);
  std::vector<int> j0(n);
  const long S = target.spatial_size();
  for (int k = 0; k < target.nt; ++k) {
    const double ts = (target.time(k) * tb - sg.t_start) / sg.dt;  // source slice coordinate
    const int k0 = static_cast<int>(std::floor(ts));
    if (ts < -tol || ts > sg.nt - 1 + tol)
      throw ValidationError("intrinsic_rescale_onto: target time outside source domain");
    if (!interpolate && std::abs(ts - std::round(ts)) > tol)
      throw ValidationError(
          "intrinsic_rescale_onto: scale factors do not map time nodes to nodes "
          "(enable interpolation explicitly)");
    for (long j = 0; j < S; ++j) {
      target.node_coords(j, x);
      bool on_node = true;
      for (int a = 0; a < n; ++a) {
        q[a] = (x[a] * r - sg.x_min[a]) / sg.dx;
        if (q[a] < -tol || q[a] > sg.nx[a] - 1 + tol)
          throw ValidationError("intrinsic_rescale_onto: target node outside source domain");
        if (std::abs(q[a] - std::round(q[a])) > tol) on_node = false;
      }
      if (!interpolate) {
        if (!on_node)
          throw ValidationError(
              "intrinsic_rescale_onto: scale factors do not map spatial nodes to nodes "
              "(enable interpolation explicitly)");
        long f = 0;
        for (int a = 0; a < n; ++a)
          f = f * sg.nx[a] + static_cast<int>(std::round(q[a]));
        v.at(j, k) = u.at(f, static_cast<int>(std::round(ts))) / M;
        continue;
      }
      // multilinear in space, linear in time
      double acc = 0.0;
      const int kk0 = std::clamp(k0, 0, sg.nt - 1);
      const int kk1 = std::clamp(k0 + 1, 0, sg.nt - 1);
      const double wt1 = std::clamp(ts - kk0, 0.0, 1.0);
      for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        long f = 0;
        for (int a = 0; a < n; ++a) {
          const int base = std::clamp(static_cast<int>(std::floor(q[a])), 0, sg.nx[a] - 2);
          const double frac = std::clamp(q[a] - base, 0.0, 1.0);
          const int bit = (corner >> a) & 1;
          w *= bit ? frac : 1.0 - frac;
          f = f * sg.nx[a] + base + bit;
        }
        acc += w * ((1.0 - wt1) * u.at(f, kk0) + wt1 * u.at(f, kk1));
      }
      v.at(j, k) = acc / M;
    }
  }
  return v;
}

}  // namespace degparab
