#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace histlab;
using fx::diag2;

TEST_CASE("make_state_pure promotes a normalized vector") {
  const State s = make_state_pure(fx::ket({1.0, 0.0}));
  CHECK(s.is_pure());
  CHECK(max_abs(Matrix(s.rho() - diag2(1, 0))) == 0.0);

  const double r = 1.0 / std::sqrt(2.0);
  const State plus = make_state_pure(fx::ket({r, r}));
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs(Matrix(plus.rho() - half)) < 1e-15);
}

TEST_CASE("make_state_pure rejects zero and unnormalized vectors") {
  try {
    make_state_pure(fx::ket({0.0, 0.0}));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.mentions("zero vector"));
  }
  try {
    make_state_pure(fx::ket({1.0, 1.0}));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.mentions("not normalized"));
    CHECK(e.violations().front().residual == doctest::Approx(std::sqrt(2.0) - 1.0));
  }
}

TEST_CASE("make_state_mixed validates each invariant separately") {
  CHECK_NOTHROW(make_state_mixed(identity(2) / 2.0));

  try {
    make_state_mixed(identity(2));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.mentions("trace ≠ 1"));
    CHECK_FALSE(e.mentions("PSD"));
  }

  Matrix m(2, 2);
  m << 0.7, 0.5, 0.5, 0.3;
  const auto [lo, hi] = oracle::eigenvalues_2x2(oracle::from_eigen(m));
  REQUIRE(lo < 0.0);
  try {
    make_state_mixed(m);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.violations().size() == 1);
    CHECK(e.mentions("not PSD"));
    CHECK(e.violations().front().residual == doctest::Approx(-lo).epsilon(1e-12));
  }
  // (1 − √1.16) / 2, frozen from the characteristic polynomial.
  CHECK(lo == doctest::Approx(-0.03851648071345037).epsilon(1e-12));

  Matrix skew(2, 2);
  skew << 0.5, 0.1, 0.3, 0.5;
  try {
    make_state_mixed(skew);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.mentions("not Hermitian"));
  }
}

TEST_CASE("validate_projector_family") {
  SUBCASE("z basis") { CHECK(validate_projector_family({diag2(1, 0), diag2(0, 1)}).size() == 2); }
  SUBCASE("identity alone") { CHECK(validate_projector_family({identity(3)}).size() == 1); }
  SUBCASE("duplicate projector breaks completeness and orthogonality") {
    try {
      validate_projector_family({diag2(1, 0), diag2(1, 0)});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.mentions("completeness violated"));
      CHECK(e.mentions("orthogonality violated"));
      CHECK_FALSE(e.mentions("idempotence"));
    }
  }
  SUBCASE("non-idempotent") {
    try {
      validate_projector_family({diag2(0.5, 0), diag2(0.5, 1)});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.mentions("idempotence violated"));
    }
  }
  SUBCASE("mismatched dimensions") { CHECK_THROWS_AS(validate_projector_family({diag2(1, 0), identity(3)}), ValidationError); }
}

TEST_CASE("family_from_basis groups basis vectors") {
  const Matrix basis = haar_random_unitary(HilbertDim(3), 11).matrix();
  const auto fam = family_from_basis(basis, {{0}, {1, 2}});
  CHECK(fam.size() == 2);
  CHECK(fam[1].trace().real() == doctest::Approx(2.0));
}

TEST_CASE("heisenberg_projector") {
  const auto id = Unitary::identity(2);
  CHECK(max_abs(Matrix(heisenberg_projector(diag2(1, 0), id) - diag2(1, 0))) == 0.0);

  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const auto h = Unitary::from_matrix(fx::hadamard());
  CHECK(max_abs(Matrix(heisenberg_projector(diag2(1, 0), h) - half)) < 1e-15);

  const auto u = haar_random_unitary(HilbertDim(2), 3);
  CHECK(max_abs(Matrix(heisenberg_projector(identity(2), u) - identity(2))) < 1e-14);
  CHECK_THROWS_AS(heisenberg_projector(identity(3), u), ValidationError);

  // Stays a projector for random inputs.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto fam = family_from_basis(haar_random_unitary(HilbertDim(3), rng).matrix(), {{0, 2}, {1}});
    const Matrix p = heisenberg_projector(fam[0], haar_random_unitary(HilbertDim(3), rng));
    CHECK(max_abs(Matrix(p * p - p)) < 1e-13);
    CHECK(max_abs(Matrix(p - p.adjoint())) < 1e-13);
  }
}

TEST_CASE("tensor follows the row-major composite index") {
  CHECK(max_abs(Matrix(tensor(identity(2), identity(2)) - identity(4))) == 0.0);

  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = 1.0;
  CHECK(max_abs(Matrix(tensor(diag2(1, 0), diag2(0, 1)) - expected)) == 0.0);

  const Matrix xx = tensor(fx::pauli_x(), fx::pauli_x());
  Matrix anti = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) anti(i, 3 - i) = 1.0;
  CHECK(max_abs(Matrix(xx - anti)) == 0.0);
}

TEST_CASE("tensor is associative and multiplicative in trace") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Matrix a = fx::random_matrix(2, rng), b = fx::random_matrix(3, rng), c = fx::random_matrix(2, rng);
    CHECK(max_abs(Matrix(tensor(tensor(a, b), c) - tensor(a, tensor(b, c)))) < 1e-14);
    CHECK(std::abs(tensor(a, b).trace() - a.trace() * b.trace()) < 1e-13);
  }
}

TEST_CASE("haar_random_unitary") {
  SUBCASE("d = 1 is a phase") {
    const auto u = haar_random_unitary(HilbertDim(1), 99);
    CHECK(std::abs(u.matrix()(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("deterministic in the seed") {
    const auto a = haar_random_unitary(HilbertDim(4), 7);
    const auto b = haar_random_unitary(HilbertDim(4), 7);
    CHECK((a.matrix().array() == b.matrix().array()).all());
  }
  SUBCASE("unitary to 1e-12 by an independent multiply") {
    const auto u = oracle::from_eigen(haar_random_unitary(HilbertDim(3), 1).matrix());
    CHECK(oracle::max_abs(oracle::sub(oracle::mul(oracle::adjoint(u), u), oracle::eye(3))) <= 1e-12);
  }
  SUBCASE("first Haar moment: E|u00|² = 1/2 at d = 2") {
    Rng rng(2024);
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = std::norm(haar_random_unitary(HilbertDim(2), rng).matrix()(0, 0));
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 0.5) <= 3.0 * se);
  }
}

TEST_CASE("random states satisfy the State invariants") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const State m = random_mixed_state(HilbertDim(3), rng);
    CHECK(std::abs(m.rho().trace() - Complex(1.0)) < 1e-12);
    CHECK_FALSE(m.is_pure());
    CHECK(random_pure_state(HilbertDim(3), rng).is_pure());
  }
}

TEST_CASE("Unitary::from_hamiltonian exponentiates exactly") {
  const Matrix h = fx::pauli_x();
  const double t = 0.3;
  const auto u = Unitary::from_hamiltonian(h, t);
  CHECK(max_abs(Matrix(u.matrix() - fx::rotation_x(t))) < 1e-14);
  CHECK_THROWS_AS(Unitary::from_matrix(diag2(1, 2)), ValidationError);
}

TEST_CASE("Schedule rejects malformed inputs") {
  auto fam = fx::z_family();
  CHECK_THROWS_AS(Schedule({0.0, 1.0}, {Unitary::identity(2)}, {fam, fam}), ValidationError);
  CHECK_THROWS_AS(Schedule({1.0, 1.0}, {Unitary::identity(2), Unitary::identity(2)}, {fam, fam}), ValidationError);
  CHECK_THROWS_AS(Schedule({}, {}, {}), ValidationError);
  CHECK_THROWS_AS(HilbertDim(0), ValidationError);
}
