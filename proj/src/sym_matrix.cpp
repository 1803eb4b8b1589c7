#include "degparab/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degparab/errors.hpp"

namespace degparab {

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diag(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n_; ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v) {
  SymMatrix m(static_cast<int>(v.size()));
  for (int i = 0; i < m.n_; ++i)
    for (int j = i; j < m.n_; ++j) m.set(i, j, v[i] * v[j]);
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::quad(std::span<const double> x) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    s += (*this)(i, i) * x[i] * x[i];
    for (int j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * x[i] * x[j];
  }
  return s;
}

void SymMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double c) {
  for (double& v : a_) v *= c;
  return *this;
}

SymMatrix SymMatrix::sandwich(const SymMatrix& b) const {
  const int n = n_;
  // full products; n is tiny
  std::vector<double> ab(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += (*this)(i, k) * b(k, j);
      ab[static_cast<size_t>(i) * n + j] = s;
    }
  SymMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += ab[static_cast<size_t>(i) * n + k] * (*this)(k, j);
      r.set(i, j, s);
    }
  return r;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

std::string SymMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    if (i) os << "; ";
    for (int j = 0; j < n_; ++j) {
      if (j) os << " ";
      os << (*this)(i, j);
    }
  }
  os << "]";
  return os.str();
}

std::vector<double> SymMatrix::eigenvalues() const {
  std::vector<double> ev;
  if (n_ == 0) return ev;
  if (n_ == 1) return {(*this)(0, 0)};
  if (n_ == 2) {
    const double a = (*this)(0, 0), b = (*this)(0, 1), c = (*this)(1, 1);
    const double mean = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    return {mean - r, mean + r};
  }

  // cyclic Jacobi on a full working copy
  const int n = n_;
  std::vector<double> m(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<size_t>(i) * n + j] = (*this)(i, j);
  auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * n + j]; };

  const double scale = std::max(max_abs(), 1e-300);
  const double tol = 1e-13 * scale;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
    if (off <= tol) {
      ev.resize(n);
      for (int i = 0; i < n; ++i) ev[i] = at(i, i);
      std::sort(ev.begin(), ev.end());
      return ev;
    }
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= tol * 1e-3) continue;
        const double app = at(p, p), aqq = at(q, q);
        const double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
        const double c = std::cos(phi), s = std::sin(phi);
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  throw NumericError("SymMatrix::eigenvalues: Jacobi did not converge in 100 sweeps for " +
                     to_string());
}

}  // namespace degparab
