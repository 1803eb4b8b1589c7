#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "degparab/operators.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace degparab;
namespace dt = degparab::testing;

namespace {
const EllipticityParams P12{1.0, 2.0, 3.0, 2};
}

TEST_CASE("pucci operators on reference matrices") {
  CHECK(pucci_minus(SymMatrix::identity(2), P12) == doctest::Approx(2.0));
  const double d[] = {2.0, -3.0};
  CHECK(pucci_minus(SymMatrix::diag(d), P12) == doctest::Approx(-4.0));
  CHECK(pucci_plus(SymMatrix::diag(d), P12) == doctest::Approx(1.0));
  CHECK(pucci_minus(SymMatrix(3), P12) == doctest::Approx(0.0));
  SymMatrix negI = SymMatrix::identity(2);
  negI *= -1.0;
  CHECK(pucci_plus(negI, P12) == doctest::Approx(-2.0));
}

TEST_CASE("pucci duality, homogeneity, superadditivity") {
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 5;
    const EllipticityParams prm{dt::uniform(0.25, 1.0), dt::uniform(1.0, 4.0), 3.0, n};
    SymMatrix m = dt::random_symmetric(n, 2.0);
    SymMatrix neg = m;
    neg *= -1.0;
    CHECK(std::abs(pucci_plus(m, prm) + pucci_minus(neg, prm)) <= 1e-12 * (1.0 + m.max_abs()));

    const double c = dt::uniform(0.1, 5.0);
    SymMatrix cm = m;
    cm *= c;
    CHECK(std::abs(pucci_minus(cm, prm) - c * pucci_minus(m, prm)) <=
          1e-12 * (1.0 + c * m.max_abs()));
    CHECK(std::abs(pucci_plus(cm, prm) - c * pucci_plus(m, prm)) <=
          1e-12 * (1.0 + c * m.max_abs()));

    SymMatrix nmat = dt::random_symmetric(n, 2.0);
    CHECK(pucci_minus(m + nmat, prm) >=
          pucci_minus(m, prm) + pucci_minus(nmat, prm) - 1e-11);
  }
}

TEST_CASE("extremality sandwich against matrices with pinned spectrum") {
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const EllipticityParams prm{0.5, 3.0, 3.0, n};
    SymMatrix m = dt::random_symmetric(n, 2.0);
    const double lo = pucci_minus(m, prm);
    const double hi = pucci_plus(m, prm);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> spec(n);
      for (double& e : spec) e = dt::uniform(prm.lambda, prm.Lambda);
      SymMatrix a = dt::random_with_spectrum(spec);
      // Tr(A M)
      double tr = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr += a(i, j) * m(j, i);
      CHECK(tr >= lo - 1e-10);
      CHECK(tr <= hi + 1e-10);
    }
  }
}

TEST_CASE("degenerate right-hand side conventions") {
  OperatorSpec spec;
  spec.kind = OperatorSpec::Kind::model;
  spec.params = EllipticityParams{1.0, 2.0, 3.0, 2};
  spec.q = 2.0;
  spec.delta = 0.0;

  const double zero[] = {0.0, 0.0};
  CHECK(degenerate_rhs(zero, SymMatrix::identity(2), spec) == 0.0);

  const double e1[] = {1.0, 0.0};
  CHECK(degenerate_rhs(e1, SymMatrix::identity(2), spec) == doctest::Approx(2.0));

  spec.q = 3.0;
  CHECK(degenerate_rhs(e1, SymMatrix::outer(e1), spec) == doctest::Approx(2.0));

  // singular factor for p < 2 at a critical point
  OperatorSpec sing = spec;
  sing.params.p = 1.5;
  CHECK_THROWS_AS(degenerate_rhs(zero, SymMatrix::identity(2), sing), ValidationError);

  // pucci kinds scale by |grad|^(p-2)
  OperatorSpec pm;
  pm.kind = OperatorSpec::Kind::pucci_minus;
  pm.params = EllipticityParams{1.0, 2.0, 3.0, 2};
  pm.delta = 0.0;
  const double g2[] = {2.0, 0.0};
  CHECK(degenerate_rhs(g2, SymMatrix::identity(2), pm) == doctest::Approx(2.0 * 2.0));
}

TEST_CASE("model operator bracketed by pucci with the induced constants") {
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const double q = dt::uniform(1.2, 5.0);
    const EllipticityParams env{std::min(1.0, q - 1.0), std::max(1.0, q - 1.0), 3.0, n};
    OperatorSpec model;
    model.kind = OperatorSpec::Kind::model;
    model.params = env;
    model.q = q;
    model.delta = 0.0;
    SymMatrix m = dt::random_symmetric(n, 2.0);
    auto xi = dt::random_direction(n);
    const double val = degenerate_rhs(xi, m, model);
    // |xi| = 1, so the factor is 1 and K must lie between the extremes
    CHECK(val >= pucci_minus(m, env) - 1e-11);
    CHECK(val <= pucci_plus(m, env) + 1e-11);
  }
}

TEST_CASE("field B and its square root") {
  const EllipticityParams prm{1.0, 2.0, 3.0, 2};
  const double e1[] = {1.0, 0.0};
  SymMatrix b = field_B(e1, prm);
  CHECK(b(0, 0) == doctest::Approx(2.0));
  CHECK(b(0, 1) == doctest::Approx(0.0));
  CHECK(b(1, 1) == doctest::Approx(1.0));

  const EllipticityParams p2{1.0, 2.0, 2.0, 2};
  SymMatrix id = field_B(e1, p2);
  CHECK(id(0, 0) == doctest::Approx(1.0));
  CHECK(id(1, 1) == doctest::Approx(1.0));
  SymMatrix rid = sqrt_B(e1, p2);
  CHECK(rid(0, 0) == doctest::Approx(1.0));

  SymMatrix r = sqrt_B(e1, prm);
  CHECK(r(0, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(r(1, 1) == doctest::Approx(1.0));

  const double zero[] = {0.0, 0.0};
  CHECK_THROWS_AS(field_B(zero, prm), ValidationError);
  CHECK_THROWS_AS(sqrt_B(zero, prm), ValidationError);
}

TEST_CASE("sqrt_B squares to B and conjugates the rank-one projector") {
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    const EllipticityParams prm{1.0, 2.0, dt::uniform(2.0 + 1e-6, 6.0), n};
    auto xi = dt::random_vector(n, 3.0);
    double nn = 0.0;
    for (double v : xi) nn += v * v;
    if (nn < 1e-8) xi[0] = 1.0;

    SymMatrix b = field_B(xi, prm);
    SymMatrix r = sqrt_B(xi, prm);
    SymMatrix rr = r.sandwich(SymMatrix::identity(n));  // r * I * r = r^2
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) CHECK(std::abs(rr(i, j) - b(i, j)) <= 1e-12);

    // det(B) = p - 1 via the eigenvalue product
    double det = 1.0;
    for (double e : b.eigenvalues()) det *= e;
    CHECK(det == doctest::Approx(prm.p - 1.0).epsilon(1e-10));

    // conjugation: sqrt_B (d (x) d) sqrt_B = (p-1) d (x) d
    double norm = std::sqrt(nn < 1e-8 ? 1.0 : nn);
    std::vector<double> d(xi);
    for (double& v : d) v /= norm;
    SymMatrix proj = SymMatrix::outer(d);
    SymMatrix conj = r.sandwich(proj);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        CHECK(std::abs(conj(i, j) - (prm.p - 1.0) * proj(i, j)) <= 1e-12);
  }
}

TEST_CASE("eigenvalues sorted, jacobi path agrees with known spectrum") {
  std::vector<double> spec = {-3.0, -1.0, 0.5, 2.0, 7.0};
  SymMatrix m = dt::random_with_spectrum(spec);
  auto ev = m.eigenvalues();
  REQUIRE(ev.size() == 5);
  for (size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(spec[i]).epsilon(1e-10));
}
