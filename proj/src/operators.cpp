#include "degparab/operators.hpp"

#include <cmath>
#include <vector>

namespace degparab {

double pucci_minus(const SymMatrix& m, const EllipticityParams& params) {
  params.validate();
  double s = 0.0;
  for (double e : m.eigenvalues()) s += (e > 0.0 ? params.lambda : params.Lambda) * e;
  return s;
}

double pucci_plus(const SymMatrix& m, const EllipticityParams& params) {
  params.validate();
  double s = 0.0;
  for (double e : m.eigenvalues()) s += (e > 0.0 ? params.Lambda : params.lambda) * e;
  return s;
}

double degenerate_rhs(std::span<const double> xi, const SymMatrix& m, const OperatorSpec& spec) {
  spec.validate();
  const double p = spec.params.p;
  double n2 = spec.delta * spec.delta;
  for (double v : xi) n2 += v * v;
  const double norm = std::sqrt(n2);

  if (norm == 0.0) {
    if (p > 2.0) return 0.0;
    if (p == 2.0) {
      switch (spec.kind) {
        case OperatorSpec::Kind::pucci_minus: return pucci_minus(m, spec.params);
        case OperatorSpec::Kind::pucci_plus: return pucci_plus(m, spec.params);
        case OperatorSpec::Kind::model: return m.trace();
      }
    }
    throw ValidationError("degenerate_rhs: |grad|^(p-2) singular at a critical point for p < 2");
  }

  const double factor = std::pow(norm, p - 2.0);
  double k = 0.0;
  switch (spec.kind) {
    case OperatorSpec::Kind::pucci_minus: k = pucci_minus(m, spec.params); break;
    case OperatorSpec::Kind::pucci_plus: k = pucci_plus(m, spec.params); break;
    case OperatorSpec::Kind::model: {
      // Tr((I + (q-2) d (x) d) M) = Tr(M) + (q-2) d.(M d)
      std::vector<double> d(xi.begin(), xi.end());
      for (double& v : d) v /= norm;
      k = m.trace() + (spec.q - 2.0) * m.quad(d);
      break;
    }
  }
  return factor * k;
}

namespace {
SymMatrix rank_one_shift(std::span<const double> xi, double coef, const char* who) {
  double n2 = 0.0;
  for (double v : xi) n2 += v * v;
  if (n2 == 0.0) throw ValidationError(std::string(who) + ": undefined at xi = 0");
  const double norm = std::sqrt(n2);
  std::vector<double> d(xi.begin(), xi.end());
  for (double& v : d) v /= norm;
  SymMatrix b = SymMatrix::outer(d);
  b *= coef;
  b += SymMatrix::identity(static_cast<int>(xi.size()));
  return b;
}
}  // namespace

SymMatrix field_B(std::span<const double> xi, const EllipticityParams& params) {
  params.validate();
  return rank_one_shift(xi, params.p - 2.0, "field_B");
}

SymMatrix sqrt_B(std::span<const double> xi, const EllipticityParams& params) {
  params.validate();
  return rank_one_shift(xi, -1.0 + std::sqrt(params.p - 1.0), "sqrt_B");
}

}  // namespace degparab
