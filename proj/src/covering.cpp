#include "degparab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace degparab {

void CylinderFamily::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("CylinderFamily: requires theta in (0,1)");
  if (!(p > 1.0)) throw ValidationError("CylinderFamily: requires p > 1");
  if (items.empty()) throw ValidationError("CylinderFamily: empty family");
  const size_t n = items[0].x.size();
  for (const auto& it : items) {
    if (it.x.size() != n) throw ValidationError("CylinderFamily: mixed dimensions");
    if (!(it.rho > 0.0 && it.rho <= 1.0))
      throw ValidationError("CylinderFamily: requires rho in (0,1]");
  }
}

namespace {
double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// dyadic class index: rho in (2^-k-1, 2^-k]
int dyadic_class(double rho) {
  int k = static_cast<int>(std::floor(-std::log2(rho)));
  while (rho > std::ldexp(1.0, -k)) --k;
  while (rho <= std::ldexp(1.0, -k - 1)) ++k;
  return k;
}
}  // namespace

bool CylinderFamily::intersect(size_t i, size_t j) const {
  const Item& a = items[i];
  const Item& b = items[j];
  if (dist(a.x, b.x) > a.rho + b.rho) return false;
  const double ahi = a.t + theta * std::pow(a.rho, p);
  const double bhi = b.t + theta * std::pow(b.rho, p);
  return a.t <= bhi && b.t <= ahi;
}

bool CylinderFamily::contained_in_5dilate(size_t i, size_t l) const {
  const Item& a = items[i];
  const Item& c = items[l];
  const double R = 5.0 * c.rho;
  if (dist(a.x, c.x) + a.rho > R + 1e-12) return false;
  const double H = theta * std::pow(R, p);
  const double ahi = a.t + theta * std::pow(a.rho, p);
  return a.t >= c.t - H - 1e-12 && ahi <= c.t + H + 1e-12;
}

std::vector<size_t> vitali_subcover(const CylinderFamily& family) {
  family.validate();
  const size_t n = family.items.size();

  // order: dyadic class ascending, then rho descending, then input index
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<int> cls(n);
  for (size_t i = 0; i < n; ++i) cls[i] = dyadic_class(family.items[i].rho);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (cls[a] != cls[b]) return cls[a] < cls[b];
    if (family.items[a].rho != family.items[b].rho)
      return family.items[a].rho > family.items[b].rho;
    return a < b;
  });

  std::vector<size_t> selected;
  for (size_t cand : order) {
    bool free = true;
    for (size_t s : selected)
      if (family.intersect(cand, s)) {
        free = false;
        break;
      }
    if (free) selected.push_back(cand);
  }
  return selected;
}

CoverReport verify_cover(const CylinderFamily& family, std::span<const size_t> selected) {
  family.validate();
  CoverReport rep;
  for (size_t s : selected)
    if (s >= family.items.size()) throw ValidationError("verify_cover: selected index out of range");

  for (size_t i = 0; i < selected.size() && rep.disjoint; ++i)
    for (size_t j = i + 1; j < selected.size(); ++j)
      if (family.intersect(selected[i], selected[j])) {
        rep.disjoint = false;
        rep.overlap_i = static_cast<long>(selected[i]);
        rep.overlap_j = static_cast<long>(selected[j]);
        break;
      }

  for (size_t i = 0; i < family.items.size(); ++i) {
    bool hit = false;
    for (size_t l : selected)
      if (family.contained_in_5dilate(i, l)) {
        hit = true;
        break;
      }
    if (!hit) {
      rep.covered = false;
      rep.uncovered = static_cast<long>(i);
      break;
    }
  }

  // |Q_rho(theta)| = omega_n rho^n * 2 theta rho^p; the 5-dilates scale it
  // by exactly 5^(n+p)
  const int nd = family.dim();
  const double omega =
      std::pow(std::numbers::pi, 0.5 * nd) / std::tgamma(0.5 * nd + 1.0);
  for (size_t l : selected) {
    const double rho = family.items[l].rho;
    const double vol = omega * std::pow(rho, nd) * 2.0 * family.theta * std::pow(rho, family.p);
    rep.selected_volume += vol;
    rep.dilated_volume += std::pow(5.0, nd + family.p) * vol;
  }

  rep.pass = rep.disjoint && rep.covered;
  if (!rep.pass) {
    rep.message = !rep.disjoint
                      ? "selected cylinders " + std::to_string(rep.overlap_i) + " and " +
                            std::to_string(rep.overlap_j) + " intersect"
                      : "family member " + std::to_string(rep.uncovered) +
                            " is not inside any selected 5-dilate";
  }
  return rep;
}

}  // namespace degparab
