#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace degparab {

// Small dense symmetric matrix, stored as the packed upper triangle.
// Dimensions stay tiny (spatial Hessians), so everything is O(n^2)/O(n^3)
// without blocking.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * (n + 1) / 2, 0.0) {}

  static SymMatrix identity(int n);
  static SymMatrix diag(std::span<const double> d);
  // v (x) v
  static SymMatrix outer(std::span<const double> v);

  int dim() const { return n_; }

  double operator()(int i, int j) const { return a_[pack(i, j)]; }
  void set(int i, int j, double v) { a_[pack(i, j)] = v; }
  void add(int i, int j, double v) { a_[pack(i, j)] += v; }

  double trace() const;
  // x . (A x)
  double quad(std::span<const double> x) const;
  // (A x) into y
  void apply(std::span<const double> x, std::span<double> y) const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator*=(double c);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

  // A * B * A for symmetric A, B (result is symmetric).
  SymMatrix sandwich(const SymMatrix& b) const;

  // Real spectrum, sorted ascending. Closed form for n <= 2, cyclic Jacobi
  // (tol 1e-13, max 100 sweeps) for n >= 3. Throws NumericError if the
  // sweep limit is hit.
  std::vector<double> eigenvalues() const;

  double max_abs() const;
  std::string to_string() const;

private:
  size_t pack(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<size_t>(i) * (2 * n_ - i - 1) / 2 + j;
  }

  int n_ = 0;
  std::vector<double> a_;
};

}  // namespace degparab
