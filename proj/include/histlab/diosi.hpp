#pragma once

// Composite systems of independent subsystems, and the forward Diósi,
// reverse Diósi and phase-robustness tests.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "histlab/conditions.hpp"

namespace histlab {

struct Scenario {
  std::string name;
  HistorySet histories;
  State state;

  const Schedule& schedule() const { return histories.schedule(); }
  int dim() const { return state.dim(); }
};

/// Checks dimensions agree across histories and state.
Scenario make_scenario(std::string name, HistorySet histories, State state);

/// Product state, product class operators C^A_α ⊗ C^B_β at composite index
/// α·N_B + β. Throws InvariantError if D^AB ≠ D^A ⊠ D^B within tol.
Scenario compose(const Scenario& a, const Scenario& b, double tol = kConstructionTol);

/// max |D^AB(α,β;α',β') − D^A(α,α') D^B(β,β')|.
double factorization_residual(const DecoherenceFunctional& a, const DecoherenceFunctional& b,
                              const DecoherenceFunctional& ab);

enum class TestKind { forward_diosi, reverse_diosi, robustness };
std::string_view to_string(TestKind t);

struct Witness {
  /// Composite entries are (α, β, α', β') or (α, β); subsystem entries are
  /// prefixed with the subsystem number (0 = A, 1 = B).
  std::vector<std::size_t> indices;
  std::vector<std::pair<std::string, Complex>> values;
  std::string note;
};

struct TestVerdict {
  TestKind test = TestKind::forward_diosi;
  Condition condition = Condition::decoherence;
  bool passed = false;
  double residual = 0.0;
  std::optional<Witness> witness;

  // Reverse test on partial decoherence only.
  std::optional<bool> homogeneous_subsystems;
  std::optional<double> normalized_identity_residual;
  std::optional<std::pair<double, double>> probability_sums;
  // Near-identical variant only.
  std::optional<double> near_identical_residual;
  std::optional<double> forced_normalization_residual;
};

TestVerdict forward_diosi_check(Condition condition, const Scenario& a, const Scenario& b,
                                double tol = kClassificationTol);

struct ReverseOptions {
  /// Also check |Σp^A − Σp^B| ≤ tol and the forced conclusion Σp = 1.
  bool near_identical = false;
};

TestVerdict reverse_diosi_check(Condition condition, const Scenario& a, const Scenario& b,
                                double tol = kClassificationTol, ReverseOptions options = {});

struct RobustnessReport {
  std::vector<TestVerdict> verdicts;
  /// max |D_after − e^{i(λ_{α_k} − λ_{α'_k})} D_before|.
  double law_residual = 0.0;
  ConditionReport before;
  ConditionReport after;
};

/// One verdict per condition that held before the perturbation. Throws
/// InvariantError if the transformation law fails by more than
/// kConstructionTol.
RobustnessReport robustness_check(const Scenario& s, const PhasePerturbation& pert, double tol = kClassificationTol);

}  // namespace histlab
