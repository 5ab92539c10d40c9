#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "levyflow/algebra.hpp"
#include "levyflow/errors.hpp"

using namespace levyflow;
using testutil::diff;
using testutil::taylor_exp;

TEST_CASE("pauli algebra") {
  const Complex i(0.0, 1.0);
  CHECK(diff(pauli(1) * pauli(2), i * pauli(3)) == 0.0);
  CHECK(diff(pauli(2) * pauli(3), i * pauli(1)) == 0.0);
  CHECK(diff(pauli(3) * pauli(3), identity_matrix(2)) == 0.0);
  CHECK_THROWS_AS(pauli(0), DomainError);
}

TEST_CASE("commutator of su(2) basis") {
  // [i s1, i s2] = -2 i s3
  const LieElem c = commutator(su2(1, 0, 0), su2(0, 1, 0));
  CHECK(diff(c.matrix(), su2(0, 0, -2).matrix()) < 1e-15);
  CHECK_THROWS_AS(commutator(su2(1, 0, 0), LieElem(3)), DomainError);
}

TEST_CASE("fiber metric is twice the euclidean product on su(2)") {
  CHECK(fiber_metric(su2(1, 0, 0).matrix(), su2(1, 0, 0).matrix()) == doctest::Approx(2.0));
  CHECK(fiber_metric(su2(1, 2, 3).matrix(), su2(-1, 0.5, 2).matrix()) ==
        doctest::Approx(2.0 * (-1 + 1 + 6)));
  CHECK(fiber_metric(su2(0, 1, 0).matrix(), su2(0, 0, 1).matrix()) == doctest::Approx(0.0));
}

TEST_CASE("expm closed form for su(2)") {
  // exp(theta i n.s) = cos theta + i sin theta n.s
  const double theta = 1.3;
  const double n[3] = {0.48, 0.6, 0.64};
  const LieElem x = su2(theta * n[0], theta * n[1], theta * n[2]);
  const Matrix expected = std::cos(theta) * identity_matrix(2) +
                          std::sin(theta) * su2(n[0], n[1], n[2]).matrix();
  CHECK(diff(expm(x).matrix(), expected) < 1e-14);
  CHECK(diff(expm(LieElem(2)).matrix(), identity_matrix(2)) == 0.0);
}

TEST_CASE("expm agrees with a Taylor oracle in rank 3 and 4") {
  for (int n : {3, 4}) {
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) m(r, c) = Complex(0.3 * r - 0.2 * c, 0.1 * (r + 2 * c) - 0.4);
    }
    const LieElem x = project_lie(2.0 * m);
    const Matrix u = expm(x).matrix();
    CHECK(diff(u, taylor_exp(x.matrix())) < 1e-12);
    CHECK(unitarity_residual(u) < 1e-13);
    CHECK(std::abs(u.determinant() - Complex(1.0)) < 1e-12);
  }
}

TEST_CASE("exp_matrix of a general matrix") {
  Matrix m(2, 2);
  m << Complex(0.3, 0.1), Complex(-0.5, 0.0), Complex(0.2, 0.7), Complex(-0.1, 0.4);
  CHECK(diff(exp_matrix(m), taylor_exp(m)) < 1e-13);
  Matrix m3 = Matrix::Zero(3, 3);
  m3(0, 1) = 2.0;
  m3(1, 2) = 1.5;
  m3(2, 0) = Complex(0.0, -1.0);
  CHECK(diff(exp_matrix(m3), taylor_exp(m3)) < 1e-12);
}

TEST_CASE("project_lie and LieElem invariants") {
  Matrix m(2, 2);
  m << Complex(1, 2), Complex(3, -1), Complex(0.5, 0.5), Complex(-2, 4);
  const LieElem x = project_lie(m);
  CHECK(diff(x.matrix(), -x.matrix().adjoint()) < 1e-15);
  CHECK(std::abs(x.matrix().trace()) < 1e-15);
  // idempotent
  CHECK(diff(project_lie(x.matrix()).matrix(), x.matrix()) < 1e-15);
  CHECK_THROWS_AS(LieElem::from_matrix(m), DomainError);
  CHECK_NOTHROW(LieElem::from_matrix(x.matrix()));
  CHECK(diff((x + x - 2.0 * x).matrix(), zero_matrix(2)) < 1e-15);
}

TEST_CASE("GroupElem checks and inverse") {
  const GroupElem g = expm(su2(0.2, -0.7, 0.4));
  CHECK(diff((g * g.inverse()).matrix(), identity_matrix(2)) < 1e-15);
  Matrix bad = identity_matrix(2);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(GroupElem::from_matrix(bad), DomainError);
  CHECK_THROWS_AS(GroupElem::from_matrix(Complex(0, 1) * identity_matrix(2)), DomainError);
}

TEST_CASE("project_special_unitary removes small drift") {
  const Matrix u = expm(su2(0.4, 0.1, -0.3)).matrix();
  Matrix drift = u;
  drift(0, 1) += 1e-6;
  drift(1, 1) *= 1.0 + 1e-6;
  const Matrix p = project_special_unitary(drift);
  CHECK(unitarity_residual(p) < 1e-14);
  CHECK(std::abs(p.determinant() - Complex(1.0)) < 1e-14);
  CHECK(diff(p, u) < 1e-5);
}

TEST_CASE("diagonal generator embeds i sigma_3") {
  const LieElem d = diagonal_generator(3, 0.5);
  CHECK(d.matrix()(0, 0) == Complex(0, 0.5));
  CHECK(d.matrix()(1, 1) == Complex(0, -0.5));
  CHECK(d.matrix()(2, 2) == Complex(0, 0));
}
