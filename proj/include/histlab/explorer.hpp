#pragma once

// Seeded random scenarios, Venn-region witness search, super-probability
// search and the canonical two-time consistent-but-not-decoherent example.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "histlab/diosi.hpp"

namespace histlab {

enum class StateKind { pure_random, mixed_random, supplied };
enum class CoarseGraining { none, random_partition, appendix_pairing };

std::string_view to_string(StateKind k);
std::string_view to_string(CoarseGraining c);
StateKind state_kind_from_string(std::string_view s);
CoarseGraining coarse_graining_from_string(std::string_view s);

struct SampleConfig {
  int dim = 2;
  int slots = 2;
  /// Draw the slot count uniformly from 1..slots on every trial.
  bool vary_slots = false;
  /// Ranks of the blocks of one projector family (reused at every slot).
  /// Empty means rank-1 blocks.
  std::vector<int> family_sizes;
  StateKind state_kind = StateKind::pure_random;
  std::optional<State> state;
  CoarseGraining coarse_graining = CoarseGraining::none;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double tolerance = kClassificationTol;

  /// Throws ValidationError.
  void validate() const;
  std::vector<int> block_sizes() const;
};

/// Independent generator for one trial; a pure function of (seed, trial).
Rng trial_rng(std::uint64_t seed, std::size_t trial);

/// Uniform over set partitions of {0..n-1} with at least one non-singleton
/// block (for n ≥ 2). Blocks are listed by smallest element.
std::vector<std::vector<std::size_t>> random_set_partition(std::size_t n, Rng& rng);

Scenario sample_scenario(const SampleConfig& cfg, std::size_t trial);

struct RegionEntry {
  std::size_t count = 0;
  std::optional<std::size_t> first_trial;
  std::optional<Scenario> witness;
  double min_margin = std::numeric_limits<double>::infinity();
};

struct RegionCatalog {
  /// Indexed like kVennRegions.
  std::array<RegionEntry, kVennRegions.size()> regions;
  std::size_t trials = 0;

  const RegionEntry& region(std::string_view name) const;
};

RegionCatalog venn_search(const SampleConfig& cfg);

struct SuperprobResult {
  std::size_t trials_run = 0;
  std::optional<Scenario> witness;
  std::optional<std::size_t> trial;
  std::size_t history = 0;
  double probability = 0.0;

  bool found() const { return witness.has_value(); }
};

/// First trial with an inhomogeneous history of p > 1 + tol. Throws
/// PreconditionError when coarse_graining is none.
SuperprobResult superprob_search(const SampleConfig& cfg);

struct LinearPositivityWitness {
  Scenario scenario;
  std::size_t trial = 0;
  std::size_t history = 0;
  Complex q;
};

/// First trial that is linearly positive yet has a history with
/// Re(q²) < −margin, so that composing the scenario with itself violates
/// linear positivity.
std::optional<LinearPositivityWitness> linear_positivity_search(const SampleConfig& cfg, double margin);

struct AppendixScenario {
  Scenario scenario;
  /// ‖C̄†C + C†C̄‖∞.
  double certificate_residual = 0.0;
};

/// Histories {C, C̄} with C = P₂P₁ + P̄₂P̄₁, P₁ = p and P₂ = u12† p u12.
AppendixScenario appendix_scenario(const Matrix& p, const Unitary& u12, const State& s);

/// Haar basis with a uniformly drawn rank in 1..d−1 for P, Haar u12, and a
/// pure or mixed random state.
AppendixScenario random_appendix_scenario(HilbertDim d, Rng& rng, StateKind kind = StateKind::pure_random);

/// Qubit, two slots, histories {K, 1 − K} with K = |a⟩⟨a|0⟩⟨0| and a pure
/// state chosen so that q(K) = 1/2 and p(K) = weight, hence Σp = 2·weight.
/// Requires weight in [1/4, (3+√5)/8].
Scenario inhomogeneous_kernel_scenario(double weight);

/// Subsystems with weights w and 1/(4w): neither is partially decoherent
/// (unless w = 1/2) yet their composite is.
std::pair<Scenario, Scenario> inhomogeneous_pd_pair(double weight);

struct PhaseSweepPoint {
  double phase = 0.0;
  bool consistent = false;
  double consistency_residual = 0.0;
};

/// Per-history phase (phase, 0, 0, ...) on a grid of `steps` points over
/// [0, 2π), identity U. Reports consistency after each perturbation.
std::vector<PhaseSweepPoint> phase_sweep(const Scenario& s, std::size_t steps, double tol = kClassificationTol);

}  // namespace histlab
