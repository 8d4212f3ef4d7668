#pragma once

// Decoherence functional, quasi-probabilities and classification against
// decoherence, partial decoherence, consistency and linear positivity.

#include <array>
#include <string>
#include <string_view>

#include "histlab/history.hpp"

namespace histlab {

enum class Condition { decoherence, partial_decoherence, consistency, linear_positivity };

inline constexpr std::array<Condition, 4> kAllConditions = {Condition::decoherence, Condition::partial_decoherence,
                                                            Condition::consistency, Condition::linear_positivity};

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

/// Cells of the D/PD/C/LP lattice, most restrictive first.
inline constexpr std::array<std::string_view, 6> kVennRegions = {"D", "PD∩C∖D", "PD∖C", "C∖PD", "LP∖(PD∪C)", "none"};

struct DecoherenceFunctional {
  /// D(α, α') = Tr(C_α ρ C_α'†).
  Matrix d;
  /// p(α) = D(α, α).
  Eigen::VectorXd p;
  /// q(α) = Tr(C_α ρ).
  Vector q;

  std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
  /// Σ_{α'≠α} D(α, α').
  Complex offdiagonal_row_sum(std::size_t alpha) const;

  double hermiticity_residual() const;
  double normalization_residual() const;
  double decomposition_residual() const;
  double quasi_sum_residual() const;
};

/// Validates Hermiticity and p ≥ −tol always; normalization, Σq = 1 and
/// q = p + row sums only when the set is exhaustive within tol. Throws
/// InvariantError on failure.
DecoherenceFunctional decoherence_functional(const HistorySet& h, const State& s, double tol = kConstructionTol);

Vector quasi_probabilities(const HistorySet& h, const State& s);

/// Tr(C_α ρ (1 − C_α)†) = D(α, ᾱ).
Complex interference_with_negation(const HistorySet& h, const State& s, std::size_t alpha);

struct ConditionReport {
  bool decoherent = false;
  bool partially_decoherent = false;
  bool consistent = false;
  bool linearly_positive = false;

  /// max_{α≠α'} |D|, max_α |row sum|, max_{α≠α'} |Re D|, max(0, −min row Re sum).
  std::array<double, 4> residuals{};
  /// N(N−1), 2N, N(N−1)/2, N.
  std::array<std::size_t, 4> counts{};
  double min_real_row_sum = 0.0;
  double tolerance = kClassificationTol;
  std::string venn_region;

  bool holds(Condition c) const;
  double residual(Condition c) const { return residuals[static_cast<std::size_t>(c)]; }
  std::size_t count(Condition c) const { return counts[static_cast<std::size_t>(c)]; }
  /// Smallest distance of any decision statistic from its threshold.
  double margin() const;
};

ConditionReport classify(const DecoherenceFunctional& df, double tol = kClassificationTol);

std::string_view venn_region(bool decoherent, bool partially_decoherent, bool consistent, bool linearly_positive);

}  // namespace histlab
