#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "degparab/errors.hpp"

namespace degparab {

// Uniform tensor-product space-time grid. Spatial axes share one step dx,
// time advances with step dt. Node coordinates are x_min[a] + j*dx and
// t_start + k*dt; counts are fixed at construction.
struct Grid {
  std::vector<double> x_min;  // lowest node coordinate per axis
  std::vector<int> nx;        // nodes per axis, >= 3
  double dx = 0.0;
  double t_start = 0.0;
  double dt = 0.0;
  int nt = 0;

  // Build from center/half-width geometry; the last node per axis is the
  // largest one with origin - extent + j*dx <= origin + extent (+eps).
  static Grid make(std::span<const double> origin, std::span<const double> extent, double dx,
                   double t_start, double t_end, double dt);
  // Raw constructor for derived grids (rescales, single slices).
  static Grid raw(std::vector<double> x_min, std::vector<int> nx, double dx, double t_start,
                  double dt, int nt);

  int dim() const { return static_cast<int>(nx.size()); }
  long spatial_size() const;
  long size() const { return spatial_size() * nt; }
  double t_end() const { return t_start + (nt - 1) * dt; }
  double coord(int axis, int j) const { return x_min[axis] + j * dx; }
  double time(int k) const { return t_start + k * dt; }
  double cell_volume() const;

  // strides for the row-major spatial flattening (last axis fastest)
  std::vector<long> spatial_strides() const;
  long flatten(std::span<const int> idx) const;
  void unflatten(long flat, std::span<int> idx) const;
  void node_coords(long flat, std::span<double> x) const;

  // index of the nearest slice / node; *exact variants require the query
  // to sit on the grid up to `tol` in units of the step
  int nearest_time_index(double t) const;
  int time_index_exact(double t, double tol = 1e-9) const;
  bool same_layout(const Grid& o) const;

  void validate() const;
};

// A function sampled on a Grid. Values are stored slice-major: index
// k*spatial_size + flat(spatial index).
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(Grid g);

  static ScalarField sample(const Grid& g,
                            const std::function<double(std::span<const double>, double)>& f);

  double& at(long flat_spatial, int k) { return values[static_cast<size_t>(k) * S_ + flat_spatial]; }
  double at(long flat_spatial, int k) const {
    return values[static_cast<size_t>(k) * S_ + flat_spatial];
  }
  std::span<double> slice(int k) { return {values.data() + static_cast<size_t>(k) * S_, static_cast<size_t>(S_)}; }
  std::span<const double> slice(int k) const {
    return {values.data() + static_cast<size_t>(k) * S_, static_cast<size_t>(S_)};
  }

  double min_value() const;
  double max_value() const;
  // value at a space-time point that must coincide with a node (tol in
  // units of the grid steps)
  double value_at_point(std::span<const double> x, double t, double tol = 1e-6) const;

  void require_finite(const char* who) const;

  // flat binary layout: u64 n, u64 nx[n], u64 nt, f64 x_min[n], f64 dx,
  // f64 t_start, f64 dt, then row-major f64 payload (time slowest).
  void write_binary(const std::string& path) const;
  static ScalarField read_binary(const std::string& path);
  // columns: x1..xn,t,value
  void write_csv(const std::string& path) const;

private:
  long S_ = 0;  // cached spatial size
public:
  long spatial_size() const { return S_; }
};

// printf-style %.17g formatting used for all deterministic text output
std::string format_double(double v);

}  // namespace degparab
