#pragma once

#include <span>
#include <string>
#include <vector>

#include "degparab/errors.hpp"

namespace degparab {

// Family of closed forward cylinders (x_i, t_i) + closed Q_rho^+(theta):
// ball of radius rho_i around x_i times [t_i, t_i + theta rho_i^p]. theta
// and the exponent p are shared across the family; rho_i in (0, 1].
struct CylinderFamily {
  struct Item {
    std::vector<double> x;
    double t = 0.0;
    double rho = 1.0;
  };
  std::vector<Item> items;
  double theta = 0.5;
  double p = 3.0;

  int dim() const { return items.empty() ? 0 : static_cast<int>(items[0].x.size()); }
  void validate() const;

  bool intersect(size_t i, size_t j) const;
  // family member i contained in the 5-dilate (full closed cylinder with
  // radius 5 rho_l, time [t_l - theta (5 rho_l)^p, t_l + theta (5 rho_l)^p])
  bool contained_in_5dilate(size_t i, size_t l) const;
};

// Greedy maximal disjoint selection through the dyadic radius classes
// rho in (2^-k-1, 2^-k], k increasing; within a class candidates are
// scanned in descending rho (input order breaking ties) and kept when
// disjoint from everything selected so far. Returns selected indices.
std::vector<size_t> vitali_subcover(const CylinderFamily& family);

struct CoverReport {
  bool disjoint = true;
  bool covered = true;
  bool pass = true;
  // witnesses on failure
  long overlap_i = -1, overlap_j = -1;
  long uncovered = -1;
  // exact arithmetic bookkeeping: sum |5Q| = 5^(n+p) sum |Q|
  double selected_volume = 0.0;
  double dilated_volume = 0.0;
  std::string message;
};

CoverReport verify_cover(const CylinderFamily& family, std::span<const size_t> selected);

}  // namespace degparab
