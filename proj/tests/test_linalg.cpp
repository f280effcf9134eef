#include "doctest.h"

#include <cmath>

#include "missingmass/linalg.hpp"
#include "missingmass/rng.hpp"
#include "oracle.hpp"

using namespace missingmass;

namespace {

void check_basis_invariants(const mat& u) {
  // columns sum to zero
  for (std::size_t j = 0; j < u.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.rows; ++i) s += u(i, j);
    CHECK(std::abs(s) <= 1e-12);
  }
  // orthonormal columns
  const mat g = transpose(u) * u;
  const mat id = mat::identity(u.cols);
  CHECK(max_abs(g - id) <= 1e-12);
}

}  // namespace

TEST_CASE("nullspace basis invariants and closed form") {
  SUBCASE("M=2 is the unique direction up to sign") {
    const mat u = nullspace_basis(2);
    const double r = 1.0 / std::sqrt(2.0);
    const bool plus = std::abs(u(0, 0) - r) < 1e-15 && std::abs(u(1, 0) + r) < 1e-15;
    const bool minus = std::abs(u(0, 0) + r) < 1e-15 && std::abs(u(1, 0) - r) < 1e-15;
    CHECK((plus || minus));
  }
  for (std::size_t m : {3, 5, 9, 40}) {
    const mat u = nullspace_basis(m);
    check_basis_invariants(u);
  }
  SUBCASE("constant vectors are annihilated") {
    const mat u = nullspace_basis(5);
    vec c(5, 7.3);
    vec p(4, 0.0);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 5; ++i) p[j] += u(i, j) * c[i];
    CHECK(norm2(p) <= 1e-12);
  }
  CHECK_THROWS_WITH_AS(nullspace_basis(1), doctest::Contains("no free directions"),
                       std::invalid_argument);
}

TEST_CASE("alternative test basis is valid and distinct") {
  for (std::size_t m : {3, 4, 6}) {
    const mat u2 = oracle::alt_nullspace_basis(m);
    check_basis_invariants(u2);
    CHECK(max_abs(u2 - nullspace_basis(m)) > 1e-3);
  }
}

TEST_CASE("projected inverse quadratic") {
  const mat u3 = nullspace_basis(3);
  SUBCASE("identity becomes the centering projector") {
    const mat p = projected_inverse_quadratic(mat::identity(3), u3);
    mat expect(3, 3, -1.0 / 3.0);
    for (std::size_t i = 0; i < 3; ++i) expect(i, i) += 1.0;
    CHECK(max_abs(p - expect) <= 1e-12);
    // idempotent
    CHECK(max_abs(p * p - p) <= 1e-10);
  }
  SUBCASE("scaling") {
    const mat p1 = projected_inverse_quadratic(mat::identity(3), u3);
    const mat p2 = projected_inverse_quadratic(2.0 * mat::identity(3), u3);
    CHECK(max_abs(p2 - 0.5 * p1) <= 1e-12);
  }
  SUBCASE("zero projected form raises the regularity error") {
    const mat zero(2, 2);
    CHECK_THROWS_AS(projected_inverse_quadratic(zero, nullspace_basis(2)),
                    singular_projection_error);
  }
  SUBCASE("condition estimate is carried by the error") {
    mat b = mat::identity(2);
    b(1, 1) = 1e-14;
    try {
      inverse_sym(b, 1e12);
      FAIL("expected singular_projection_error");
    } catch (const singular_projection_error& e) {
      CHECK(e.condition > 1e12);
    }
  }
}

TEST_CASE("basis-choice invariance of the projected inverse") {
  rng r(2024);
  for (std::size_t m : {3, 4, 6, 8}) {
    const mat u1 = nullspace_basis(m);
    const mat u2 = oracle::alt_nullspace_basis(m);
    for (int rep = 0; rep < 5; ++rep) {
      mat a(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) a(i, j) = a(j, i) = r.uniform01() - 0.5;
      for (std::size_t i = 0; i < m; ++i) a(i, i) += static_cast<double>(m);
      const mat p1 = projected_inverse_quadratic(a, u1);
      const mat p2 = projected_inverse_quadratic(a, u2);
      CHECK(max_abs(p1 - p2) <= 1e-10);
      CHECK(max_abs(p1 - transpose(p1)) <= 1e-10);
    }
  }
}

TEST_CASE("symmetric eigendecomposition reconstructs") {
  rng r(7);
  mat a(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i; j < 5; ++j) a(i, j) = a(j, i) = r.uniform01();
  const sym_eig e = eig_sym(a);
  mat rec(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 5; ++k)
        acc += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      rec(i, j) = acc;
    }
  CHECK(max_abs(rec - a) <= 1e-12);
}
