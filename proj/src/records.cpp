#include "histlab/records.hpp"

#include <cmath>

namespace histlab {

RecordSet construct_records(const HistorySet& h, const State& s, double tol) {
  if (!s.is_pure()) throw ValidationError("records require a pure state", 0.0);
  const auto df = decoherence_functional(h, s);
  const auto report = classify(df, tol);
  if (!report.decoherent)
    throw ValidationError("history set is not decoherent", report.residual(Condition::decoherence));

  const Vector& psi = *s.vector();
  const int d = s.dim();
  RecordSet r;
  r.mapping.assign(h.size(), std::nullopt);
  std::vector<Vector> basis;
  for (std::size_t a = 0; a < h.size(); ++a) {
    Vector v = h[a].matrix * psi;
    if (v.squaredNorm() <= tol) continue;
    // Sequential projection removes the residual overlap left by
    // approximate decoherence.
    for (const auto& e : basis) v -= e * e.dot(v);
    const double n = v.norm();
    if (n == 0.0) continue;
    basis.push_back(v / n);
    r.mapping[a] = r.projectors.size();
    r.projectors.push_back(basis.back() * basis.back().adjoint());
  }
  r.remainder = identity(d);
  for (const auto& p : r.projectors) r.remainder -= p;

  const auto table = record_table(r, h, s);
  for (std::size_t a = 0; a < h.size(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    for (std::size_t b = 0; b < h.size(); ++b) {
      const auto j = static_cast<Eigen::Index>(b);
      for (std::size_t g = 0; g < r.projectors.size(); ++g) {
        const bool on = r.mapping[a] == g && a == b;
        const Complex expected = on ? Complex(df.p(i)) : Complex(0.0);
        r.record_equation_residual = std::max(r.record_equation_residual, std::abs(table[g](i, j) - expected));
      }
    }
    const double tr = r.mapping[a] ? (r.projectors[*r.mapping[a]] * s.rho()).trace().real() : 0.0;
    r.probability_residual = std::max(r.probability_residual, std::abs(df.p(i) - tr));
  }
  Complex total = (r.remainder * s.rho()).trace();
  for (const auto& p : r.projectors) total += (p * s.rho()).trace();
  r.completeness_residual = std::abs(total - Complex(1.0));
  return r;
}

std::vector<Matrix> record_table(const RecordSet& r, const HistorySet& h, const State& s) {
  const auto n = static_cast<Eigen::Index>(h.size());
  std::vector<Matrix> out;
  for (const auto& rec : r.projectors) {
    Matrix t(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const Matrix m = rec * h[a].matrix * s.rho();
      for (Eigen::Index b = 0; b < n; ++b) t(a, b) = (m.array() * h[b].matrix.conjugate().array()).sum();
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace histlab
