#pragma once

#include <optional>
#include <vector>

#include "histlab/conditions.hpp"

namespace histlab {

/// Rank-1 record projectors R_γ onto C_γ|ψ⟩ for a decoherent set and a pure
/// state, plus the remainder completing them to the identity.
struct RecordSet {
  std::vector<Matrix> projectors;
  Matrix remainder;
  /// History index -> record index; empty for histories with p ≤ tol.
  std::vector<std::optional<std::size_t>> mapping;

  /// max_{γ,α,α'} |Tr(R_γ C_α ρ C_α'†) − δ_γα δ_γα' p(α)|.
  double record_equation_residual = 0.0;
  /// max_α |p(α) − Tr(R_α ρ)|.
  double probability_residual = 0.0;
  /// |Σ_γ Tr(R_γ ρ) + Tr(R_rest ρ) − 1|.
  double completeness_residual = 0.0;
};

/// Throws ValidationError for a mixed state or a non-decoherent set; the
/// latter reports the largest off-diagonal |D|.
RecordSet construct_records(const HistorySet& h, const State& s, double tol = kClassificationTol);

/// Tr(R C_α ρ C_α'†) for every triple, indexed [γ][α][α'].
std::vector<Matrix> record_table(const RecordSet& r, const HistorySet& h, const State& s);

}  // namespace histlab
