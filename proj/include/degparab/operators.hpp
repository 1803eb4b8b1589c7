#pragma once

#include <span>

#include "degparab/params.hpp"
#include "degparab/sym_matrix.hpp"

namespace degparab {

// Minimal/maximal uniformly elliptic operators over matrices with spectrum
// in [lambda, Lambda].
double pucci_minus(const SymMatrix& m, const EllipticityParams& params);
double pucci_plus(const SymMatrix& m, const EllipticityParams& params);

// Choice of second-order part for the degenerate right-hand side
// |grad|^(p-2) * K(grad, hess):
//   pucci_minus / pucci_plus : extremal operators,
//   model(q)                 : Tr((I + (q-2) d (x) d) M), d = normalized gradient.
struct OperatorSpec {
  enum class Kind { pucci_minus, pucci_plus, model };

  Kind kind = Kind::pucci_minus;
  EllipticityParams params;
  double q = 2.0;        // model exponent, requires q > 1
  double delta = 1e-8;   // gradient regularization |xi|_delta = sqrt(|xi|^2 + delta^2)

  void validate() const {
    params.validate();
    if (kind == Kind::model && !(q > 1.0)) throw ValidationError("OperatorSpec: model requires q > 1");
    if (!(delta >= 0.0)) throw ValidationError("OperatorSpec: requires delta >= 0");
  }
};

// |xi|_delta^(p-2) * K(xi, M). With p > 2 the factor vanishes at critical
// points, so the convention at xi = 0, delta = 0 is to return 0; the
// normalized direction is never formed there. With p < 2 the factor is
// singular and evaluation at xi = 0, delta = 0 is a domain error.
double degenerate_rhs(std::span<const double> xi, const SymMatrix& m, const OperatorSpec& spec);

// B(xi) = I + (p-2) d (x) d with d = xi/|xi|; eigenvalues {1 x (n-1), p-1}.
SymMatrix field_B(std::span<const double> xi, const EllipticityParams& params);

// sqrt(B) = I + q d (x) d with q = -1 + sqrt(p-1), the root > -1 of
// q^2 + 2q = p - 2.
SymMatrix sqrt_B(std::span<const double> xi, const EllipticityParams& params);

}  // namespace degparab
