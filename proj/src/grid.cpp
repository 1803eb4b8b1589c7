#include "degparab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace degparab {

namespace {
int count_nodes(double length, double step) {
  // robust floor(length/step)+1 for lengths that are near-exact multiples
  const double q = length / step;
  const double r = std::round(q);
  const int m = (std::abs(q - r) < 1e-9 * std::max(1.0, std::abs(q))) ? static_cast<int>(r)
                                                                      : static_cast<int>(std::floor(q));
  return m + 1;
}
}  // namespace

Grid Grid::make(std::span<const double> origin, std::span<const double> extent, double dx,
                double t_start, double t_end, double dt) {
  if (origin.size() != extent.size() || origin.empty())
    throw ValidationError("Grid: origin/extent dimension mismatch or empty");
  if (!(dx > 0.0) || !(dt > 0.0)) throw ValidationError("Grid: requires dx > 0 and dt > 0");
  if (!(t_start < t_end)) throw ValidationError("Grid: requires t_start < t_end");
  Grid g;
  g.dx = dx;
  g.dt = dt;
  g.t_start = t_start;
  g.nt = count_nodes(t_end - t_start, dt);
  for (size_t a = 0; a < origin.size(); ++a) {
    if (!(extent[a] > 0.0)) throw ValidationError("Grid: requires positive extent");
    g.x_min.push_back(origin[a] - extent[a]);
    g.nx.push_back(count_nodes(2.0 * extent[a], dx));
  }
  g.validate();
  return g;
}

Grid Grid::raw(std::vector<double> x_min, std::vector<int> nx, double dx, double t_start,
               double dt, int nt) {
  Grid g;
  g.x_min = std::move(x_min);
  g.nx = std::move(nx);
  g.dx = dx;
  g.t_start = t_start;
  g.dt = dt;
  g.nt = nt;
  g.validate();
  return g;
}

void Grid::validate() const {
  if (x_min.size() != nx.size() || nx.empty()) throw ValidationError("Grid: inconsistent axes");
  if (!(dx > 0.0) || !(dt > 0.0)) throw ValidationError("Grid: requires dx > 0 and dt > 0");
  if (nt < 1) throw ValidationError("Grid: requires at least one time slice");
  for (int m : nx)
    if (m < 3) throw ValidationError("Grid: stencils need >= 3 nodes per spatial axis");
}

long Grid::spatial_size() const {
  long s = 1;
  for (int m : nx) s *= m;
  return s;
}

double Grid::cell_volume() const {
  double v = dt;
  for (size_t a = 0; a < nx.size(); ++a) v *= dx;
  return v;
}

std::vector<long> Grid::spatial_strides() const {
  const int n = dim();
  std::vector<long> s(n, 1);
  for (int a = n - 2; a >= 0; --a) s[a] = s[a + 1] * nx[a + 1];
  return s;
}

long Grid::flatten(std::span<const int> idx) const {
  long f = 0;
  for (int a = 0; a < dim(); ++a) f = f * nx[a] + idx[a];
  return f;
}

void Grid::unflatten(long flat, std::span<int> idx) const {
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % nx[a]);
    flat /= nx[a];
  }
}

void Grid::node_coords(long flat, std::span<double> x) const {
  for (int a = dim() - 1; a >= 0; --a) {
    x[a] = coord(a, static_cast<int>(flat % nx[a]));
    flat /= nx[a];
  }
}

int Grid::nearest_time_index(double t) const {
  const int k = static_cast<int>(std::round((t - t_start) / dt));
  return std::clamp(k, 0, nt - 1);
}

int Grid::time_index_exact(double t, double tol) const {
  const double q = (t - t_start) / dt;
  const int k = static_cast<int>(std::round(q));
  if (k < 0 || k >= nt || std::abs(q - k) > tol)
    throw ValidationError("Grid: time " + format_double(t) + " is not a grid slice");
  return k;
}

bool Grid::same_layout(const Grid& o) const { return nx == o.nx && nt == o.nt; }

ScalarField::ScalarField(Grid g) : grid(std::move(g)) {
  S_ = grid.spatial_size();
  values.assign(static_cast<size_t>(S_) * grid.nt, 0.0);
}

ScalarField ScalarField::sample(const Grid& g,
                                const std::function<double(std::span<const double>, double)>& f) {
  ScalarField u(g);
  std::vector<double> x(g.dim());
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    for (long j = 0; j < u.S_; ++j) {
      g.node_coords(j, x);
      u.at(j, k) = f(x, t);
    }
  }
  return u;
}

double ScalarField::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double ScalarField::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double ScalarField::value_at_point(std::span<const double> x, double t, double tol) const {
  const int k = grid.time_index_exact(t, tol);
  long flat = 0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double q = (x[a] - grid.x_min[a]) / grid.dx;
    const int j = static_cast<int>(std::round(q));
    if (j < 0 || j >= grid.nx[a] || std::abs(q - j) > tol)
      throw ValidationError("ScalarField: point is not a grid node (axis " + std::to_string(a) +
                            ", coordinate " + format_double(x[a]) + ")");
    flat = flat * grid.nx[a] + j;
  }
  return at(flat, k);
}

void ScalarField::require_finite(const char* who) const {
  for (double v : values)
    if (!std::isfinite(v)) throw NumericError(std::string(who) + ": field contains non-finite values");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ScalarField::write_binary(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  const uint64_t n = grid.nx.size();
  os.write(reinterpret_cast<const char*>(&n), 8);
  for (int m : grid.nx) {
    const uint64_t v = static_cast<uint64_t>(m);
    os.write(reinterpret_cast<const char*>(&v), 8);
  }
  const uint64_t nt = static_cast<uint64_t>(grid.nt);
  os.write(reinterpret_cast<const char*>(&nt), 8);
  for (double v : grid.x_min) os.write(reinterpret_cast<const char*>(&v), 8);
  os.write(reinterpret_cast<const char*>(&grid.dx), 8);
  os.write(reinterpret_cast<const char*>(&grid.t_start), 8);
  os.write(reinterpret_cast<const char*>(&grid.dt), 8);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * 8));
  if (!os) throw ValidationError("write failed: " + path);
}

ScalarField ScalarField::read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open: " + path);
  uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), 8);
  if (!is || n == 0 || n > 16) throw ValidationError("bad field header in " + path);
  std::vector<int> nx(n);
  for (auto& m : nx) {
    uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    m = static_cast<int>(v);
  }
  uint64_t nt = 0;
  is.read(reinterpret_cast<char*>(&nt), 8);
  std::vector<double> x_min(n);
  for (auto& v : x_min) is.read(reinterpret_cast<char*>(&v), 8);
  double dx = 0, t_start = 0, dt = 0;
  is.read(reinterpret_cast<char*>(&dx), 8);
  is.read(reinterpret_cast<char*>(&t_start), 8);
  is.read(reinterpret_cast<char*>(&dt), 8);
  if (!is) throw ValidationError("truncated field header in " + path);
  ScalarField u(Grid::raw(std::move(x_min), std::move(nx), dx, t_start, dt, static_cast<int>(nt)));
  is.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * 8));
  if (!is) throw ValidationError("truncated field payload in " + path);
  return u;
}

void ScalarField::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  const int n = grid.dim();
  for (int a = 0; a < n; ++a) os << "x" << (a + 1) << ",";
  os << "t,value\n";
  std::vector<double> x(n);
  for (int k = 0; k < grid.nt; ++k) {
    const double t = grid.time(k);
    for (long j = 0; j < S_; ++j) {
      grid.node_coords(j, x);
      for (int a = 0; a < n; ++a) os << format_double(x[a]) << ",";
      os << format_double(t) << "," << format_double(at(j, k)) << "\n";
    }
  }
  if (!os) throw ValidationError("write failed: " + path);
}

}  // namespace degparab
