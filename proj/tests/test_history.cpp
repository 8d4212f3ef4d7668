#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace histlab;
using fx::diag2;

TEST_CASE("chain_class_operator") {
  SUBCASE("single slot") {
    const auto s = fx::qubit_schedule({identity(2)});
    CHECK(max_abs(Matrix(chain_class_operator(*s, {0}).matrix - diag2(1, 0))) == 0.0);
    CHECK(chain_class_operator(*s, {1}).homogeneous());
  }
  SUBCASE("idempotent repeat") {
    const auto s = fx::qubit_schedule({identity(2), identity(2)});
    CHECK(max_abs(Matrix(chain_class_operator(*s, {0, 0}).matrix - diag2(1, 0))) == 0.0);
  }
  SUBCASE("latest projector on the left") {
    Matrix expected(2, 2);
    expected << 0.5, 0.0, 0.5, 0.0;  // |+⟩⟨+| · |0⟩⟨0|
    CHECK(max_abs(Matrix(chain_class_operator(*fx::hadamard_schedule(), {0, 0}).matrix - expected)) < 1e-15);
  }
  SUBCASE("bad outcome index") {
    CHECK_THROWS_AS(chain_class_operator(*fx::hadamard_schedule(), {0, 2}), ValidationError);
    CHECK_THROWS_AS(chain_class_operator(*fx::hadamard_schedule(), {0}), ValidationError);
  }
}

TEST_CASE("fine_grained_set") {
  SUBCASE("one slot") {
    const auto h = fine_grained_set(fx::qubit_schedule({identity(2)}));
    CHECK(h.size() == 2);
    CHECK(h.is_fine_grained());
  }
  SUBCASE("identity evolutions give zero chains, kept") {
    const auto h = fine_grained_set(fx::qubit_schedule({identity(2), identity(2)}));
    REQUIRE(h.size() == 4);
    CHECK(h[1].label.name == "(0,1)");
    CHECK(max_abs(h[1].matrix) == 0.0);
    CHECK(max_abs(h[2].matrix) == 0.0);
    CHECK(h.sum_residual() == 0.0);
  }
  SUBCASE("Hadamard between slots: sum rules by independent products") {
    const auto h = fine_grained_set(fx::hadamard_schedule());
    const Scenario s = make_scenario("h", h, fx::ket0());
    const auto raw = oracle::raw_of(s);
    oracle::Dense sum(2), gram(2);
    for (const auto& chains : raw.histories) {
      const auto c = oracle::class_operator(raw, chains);
      CHECK(oracle::max_abs(c) > 0.1);
      sum = oracle::add(sum, c);
      gram = oracle::add(gram, oracle::mul(oracle::adjoint(c), c));
    }
    CHECK(oracle::max_abs(oracle::sub(sum, oracle::eye(2))) <= 1e-12);
    CHECK(oracle::max_abs(oracle::sub(gram, oracle::eye(2))) <= 1e-12);
    CHECK(h.sum_residual() <= 1e-12);
    CHECK(h.gram_residual() <= 1e-12);
  }
  SUBCASE("sum rules hold for random three-slot qutrit schedules") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SampleConfig cfg;
      cfg.dim = 3;
      cfg.slots = 3;
      cfg.family_sizes = {1, 2};
      cfg.seed = seed;
      const auto s = sample_scenario(cfg, 0);
      CHECK(s.histories.size() == 8);
      CHECK(s.histories.sum_residual() <= 1e-12);
      CHECK(s.histories.gram_residual() <= 1e-12);
    }
  }
}

TEST_CASE("coarse_grain") {
  const auto h = fine_grained_set(fx::hadamard_schedule());
  SUBCASE("singletons reproduce the set") {
    const auto g = coarse_grain(h, {{0}, {1}, {2}, {3}});
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(g[i].label == h[i].label);
      CHECK(max_abs(Matrix(g[i].matrix - h[i].matrix)) == 0.0);
    }
  }
  SUBCASE("everything in one group is the identity") {
    const auto g = coarse_grain(h, {{0, 1, 2, 3}});
    REQUIRE(g.size() == 1);
    CHECK(max_abs(Matrix(g[0].matrix - identity(2))) < 1e-15);
    CHECK_FALSE(g[0].homogeneous());
  }
  SUBCASE("appendix pairing gives C = P2P1 + P̄2P̄1") {
    const auto g = coarse_grain(h, {{0, 3}, {1, 2}});
    const Matrix p1 = diag2(1, 0), q1 = diag2(0, 1);
    const Matrix p2 = fx::hadamard() * p1 * fx::hadamard(), q2 = identity(2) - p2;
    CHECK(max_abs(Matrix(g[0].matrix - (p2 * p1 + q2 * q1))) < 1e-15);
    CHECK(max_abs(Matrix(g[1].matrix - (p2 * q1 + q2 * p1))) < 1e-15);
    CHECK(g[0].label.name == "(0,0)+(1,1)");
    CHECK(g.sum_residual() < 1e-15);
  }
  SUBCASE("invalid partitions") {
    CHECK_THROWS_AS(coarse_grain(h, {{0, 1}, {2}}), ValidationError);
    CHECK_THROWS_AS(coarse_grain(h, {{0, 1}, {1, 2, 3}}), ValidationError);
    CHECK_THROWS_AS(coarse_grain(h, {{0, 1, 2, 3, 4}}), ValidationError);
  }
}

TEST_CASE("negation") {
  const auto h = fine_grained_set(fx::qubit_schedule({identity(2)}));
  CHECK(max_abs(Matrix(negation(h[0], h).matrix - diag2(0, 1))) == 0.0);

  const auto whole = coarse_grain(h, {{0, 1}});
  CHECK(max_abs(negation(whole, 0).matrix) == 0.0);

  const auto app = coarse_grain(fine_grained_set(fx::hadamard_schedule()), {{0, 3}, {1, 2}});
  const auto cbar = negation(app[0], app);
  CHECK(max_abs(Matrix(cbar.matrix - app[1].matrix)) < 1e-15);
  CHECK(cbar.label == app[1].label);

  // c + negation(c) = 1 for every member of a random coarse graining.
  SampleConfig cfg;
  cfg.coarse_graining = CoarseGraining::random_partition;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto s = sample_scenario(cfg, t);
    for (std::size_t a = 0; a < s.histories.size(); ++a)
      CHECK(max_abs(Matrix(negation(s.histories, a).matrix + s.histories[a].matrix - identity(2))) < 1e-15);
  }
  CHECK_THROWS_AS(negation(h, 5), ValidationError);
  CHECK_THROWS_AS(negation(app[0], h), ValidationError);
}

TEST_CASE("history_set_from_labels") {
  const auto s = fx::hadamard_schedule();
  const auto h = history_set_from_labels(s, {HistoryLabel::of_sum({{0, 0}, {1, 1}}), HistoryLabel::of_sum({{1, 0}, {0, 1}})});
  CHECK(h.size() == 2);
  CHECK_THROWS_AS(history_set_from_labels(s, {HistoryLabel::of_chain({0, 0}), HistoryLabel::of_chain({1, 1})}),
                  ValidationError);
  CHECK_THROWS_AS(history_set_from_labels(s, {HistoryLabel::of_sum({{0, 0}, {1, 1}}),
                                              HistoryLabel::of_sum({{0, 0}, {0, 1}, {1, 0}})}),
                  ValidationError);
  CHECK_THROWS_AS(HistoryLabel::of_sum({{0, 0}, {0, 0}}), ValidationError);
}

TEST_CASE("phase_perturb") {
  const auto h = fine_grained_set(fx::hadamard_schedule());

  SUBCASE("zero phases and identity U are the identity map") {
    const auto p = phase_perturb(h, PhasePerturbation::at_slot(1, {0.0, 0.0}, Unitary::identity(2)));
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(max_abs(Matrix(p[i].matrix - h[i].matrix)) == 0.0);
  }
  SUBCASE("π on outcome 0 flips its sign and breaks exhaustiveness") {
    const auto one = fine_grained_set(fx::qubit_schedule({identity(2)}));
    const auto p = phase_perturb(one, PhasePerturbation::at_slot(0, {std::numbers::pi, 0.0}, Unitary::identity(2)));
    CHECK(max_abs(Matrix(p[0].matrix + diag2(1, 0))) < 1e-15);
    CHECK(max_abs(Matrix(p[1].matrix - diag2(0, 1))) == 0.0);
    CHECK(p.sum_residual() == doctest::Approx(2.0));
  }
  SUBCASE("π/2 at the first slot rotates D phases, keeps |D|") {
    const State rho = fx::complex_state();
    const std::vector<double> lambda = {std::numbers::pi / 2, 0.0};
    const auto pert = PhasePerturbation::at_slot(0, lambda, Unitary::identity(2));
    const auto after = decoherence_functional(phase_perturb(h, pert), rho);
    const auto before = oracle::evaluate(oracle::raw_of(make_scenario("h", h, rho)));
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        const double la = lambda[static_cast<std::size_t>(h[a].label.chains[0][0])];
        const double lb = lambda[static_cast<std::size_t>(h[b].label.chains[0][0])];
        const Complex got = after.d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        CHECK(std::abs(got - std::polar(1.0, la - lb) * before.d[a][b]) < 1e-12);
        CHECK(std::abs(std::abs(got) - std::abs(before.d[a][b])) < 1e-12);
      }
  }
  SUBCASE("sums mixing slot outcomes are rejected") {
    const auto app = coarse_grain(h, {{0, 3}, {1, 2}});
    try {
      phase_perturb(app, PhasePerturbation::at_slot(0, {0.1, 0.2}, Unitary::identity(2)));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.mentions("phase-ambiguous inhomogeneous history"));
    }
    // A sum sharing its slot-1 outcome is accepted.
    const auto shared = coarse_grain(h, {{0, 1}, {2, 3}});
    CHECK_NOTHROW(phase_perturb(shared, PhasePerturbation::at_slot(0, {0.1, 0.2}, Unitary::identity(2))));
  }
  SUBCASE("per-history phases") {
    const auto app = coarse_grain(h, {{0, 3}, {1, 2}});
    const auto p = phase_perturb(app, PhasePerturbation::per_history({0.3, 0.0}, Unitary::identity(2)));
    CHECK(max_abs(Matrix(p[0].matrix - std::polar(1.0, 0.3) * app[0].matrix)) < 1e-15);
    CHECK_THROWS_AS(phase_perturb(app, PhasePerturbation::per_history({0.3}, Unitary::identity(2))), ValidationError);
  }
  SUBCASE("bad slot or phase count") {
    CHECK_THROWS_AS(phase_perturb(h, PhasePerturbation::at_slot(2, {0.0, 0.0}, Unitary::identity(2))), ValidationError);
    CHECK_THROWS_AS(phase_perturb(h, PhasePerturbation::at_slot(0, {0.0}, Unitary::identity(2))), ValidationError);
  }
}
