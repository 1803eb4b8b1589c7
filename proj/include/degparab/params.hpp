#pragma once

#include <cmath>
#include <string>

#include "degparab/errors.hpp"

namespace degparab {

// Ellipticity constants, gradient exponent and spatial dimension. Every
// operator and every intrinsic scaling is parametrized by this quadruple.
struct EllipticityParams {
  double lambda = 1.0;
  double Lambda = 1.0;
  double p = 3.0;
  int n = 1;

  // Base invariants: 0 < lambda <= Lambda, p > 1, n >= 1. The contact
  // machinery works for all p > 1; time stepping and the closed-form
  // solutions need the degenerate range p > 2, checked separately.
  void validate() const {
    if (!(lambda > 0.0) || !(Lambda >= lambda))
      throw ValidationError("EllipticityParams: requires 0 < lambda <= Lambda, got lambda=" +
                            std::to_string(lambda) + " Lambda=" + std::to_string(Lambda));
    if (!(p > 1.0))
      throw ValidationError("EllipticityParams: requires p > 1, got p=" + std::to_string(p));
    if (n < 1) throw ValidationError("EllipticityParams: requires n >= 1");
    if (!std::isfinite(lambda) || !std::isfinite(Lambda) || !std::isfinite(p))
      throw ValidationError("EllipticityParams: non-finite entry");
  }

  void require_degenerate(const char* who) const {
    validate();
    if (!(p > 2.0))
      throw ValidationError(std::string(who) + ": requires p > 2, got p=" + std::to_string(p));
  }
};

}  // namespace degparab
