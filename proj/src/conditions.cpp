#include "histlab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace histlab {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::decoherence: return "decoherence";
    case Condition::partial_decoherence: return "partial_decoherence";
    case Condition::consistency: return "consistency";
    case Condition::linear_positivity: return "linear_positivity";
  }
  return "?";
}

Condition condition_from_string(std::string_view s) {
  for (auto c : kAllConditions)
    if (to_string(c) == s) return c;
  throw ValidationError("unknown condition '" + std::string(s) + "'", 0.0);
}

Complex DecoherenceFunctional::offdiagonal_row_sum(std::size_t alpha) const {
  const auto a = static_cast<Eigen::Index>(alpha);
  return d.row(a).sum() - d(a, a);
}

double DecoherenceFunctional::hermiticity_residual() const { return max_abs(Matrix(d - d.adjoint())); }

double DecoherenceFunctional::normalization_residual() const { return std::abs(d.sum() - Complex(1.0)); }

double DecoherenceFunctional::decomposition_residual() const {
  double r = 0.0;
  for (std::size_t a = 0; a < size(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    r = std::max(r, std::abs(q(i) - p(i) - offdiagonal_row_sum(a)));
  }
  return r;
}

double DecoherenceFunctional::quasi_sum_residual() const { return std::abs(q.sum() - Complex(1.0)); }

Vector quasi_probabilities(const HistorySet& h, const State& s) {
  if (h.dim() != s.dim()) throw ValidationError("dimension mismatch between histories and state", 0.0);
  Vector q(static_cast<Eigen::Index>(h.size()));
  for (std::size_t a = 0; a < h.size(); ++a) q(static_cast<Eigen::Index>(a)) = (h[a].matrix * s.rho()).trace();
  return q;
}

DecoherenceFunctional decoherence_functional(const HistorySet& h, const State& s, double tol) {
  if (h.dim() != s.dim()) throw ValidationError("dimension mismatch between histories and state", 0.0);
  const auto n = static_cast<Eigen::Index>(h.size());
  std::vector<Matrix> c_rho;
  c_rho.reserve(h.size());
  for (const auto& c : h.members()) c_rho.push_back(c.matrix * s.rho());

  DecoherenceFunctional df;
  df.d.resize(n, n);
  // Tr(A B†) = Σ_ij A_ij conj(B_ij).
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      df.d(a, b) = (c_rho[a].array() * h[b].matrix.conjugate().array()).sum();
  df.p = df.d.diagonal().real();
  df.q = quasi_probabilities(h, s);

  const double herm = df.hermiticity_residual();
  if (herm > tol) throw InvariantError("decoherence functional not Hermitian", herm);
  if (df.p.size() > 0 && df.p.minCoeff() < -tol) throw InvariantError("negative probability", -df.p.minCoeff());
  if (h.sum_residual() <= tol) {
    if (df.normalization_residual() > tol) throw InvariantError("ΣΣD ≠ 1", df.normalization_residual());
    if (df.quasi_sum_residual() > tol) throw InvariantError("Σq ≠ 1", df.quasi_sum_residual());
    if (df.decomposition_residual() > tol) throw InvariantError("q ≠ p + D(α, ᾱ)", df.decomposition_residual());
  }
  return df;
}

Complex interference_with_negation(const HistorySet& h, const State& s, std::size_t alpha) {
  if (alpha >= h.size()) throw ValidationError("history index out of range", static_cast<double>(alpha));
  if (h.dim() != s.dim()) throw ValidationError("dimension mismatch between histories and state", 0.0);
  const Matrix& c = h[alpha].matrix;
  const Matrix rest = identity(h.dim()) - c;
  return (c * s.rho() * rest.adjoint()).trace();
}

bool ConditionReport::holds(Condition c) const {
  switch (c) {
    case Condition::decoherence: return decoherent;
    case Condition::partial_decoherence: return partially_decoherent;
    case Condition::consistency: return consistent;
    case Condition::linear_positivity: return linearly_positive;
  }
  return false;
}

double ConditionReport::margin() const {
  double m = std::abs(min_real_row_sum + tolerance);
  for (auto c : {Condition::decoherence, Condition::partial_decoherence, Condition::consistency})
    m = std::min(m, std::abs(residual(c) - tolerance));
  return m;
}

std::string_view venn_region(bool decoherent, bool partially_decoherent, bool consistent, bool linearly_positive) {
  if (decoherent) return kVennRegions[0];
  if (partially_decoherent && consistent) return kVennRegions[1];
  if (partially_decoherent) return kVennRegions[2];
  if (consistent) return kVennRegions[3];
  if (linearly_positive) return kVennRegions[4];
  return kVennRegions[5];
}

ConditionReport classify(const DecoherenceFunctional& df, double tol) {
  const std::size_t n = df.size();
  double off = 0.0, off_re = 0.0, row = 0.0;
  double min_row = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const Complex v = df.d(i, static_cast<Eigen::Index>(b));
      off = std::max(off, std::abs(v));
      off_re = std::max(off_re, std::abs(v.real()));
    }
    row = std::max(row, std::abs(df.offdiagonal_row_sum(a)));
    min_row = std::min(min_row, df.d.row(i).real().sum());
  }

  ConditionReport r;
  r.tolerance = tol;
  r.min_real_row_sum = min_row;
  r.residuals = {off, row, off_re, std::max(0.0, -min_row)};
  r.counts = {n * (n - 1), 2 * n, n * (n - 1) / 2, n};

  r.decoherent = off <= tol;
  r.partially_decoherent = row <= tol;
  r.consistent = off_re <= tol;
  r.linearly_positive = min_row >= -tol;
  // Close the flags under D ⇒ PD, C and PD, C ⇒ LP.
  r.partially_decoherent = r.partially_decoherent || r.decoherent;
  r.consistent = r.consistent || r.decoherent;
  r.linearly_positive = r.linearly_positive || r.partially_decoherent || r.consistent;
  r.venn_region = venn_region(r.decoherent, r.partially_decoherent, r.consistent, r.linearly_positive);
  return r;
}

}  // namespace histlab
