#include "histlab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace histlab {

namespace {

std::string describe(const std::vector<Violation>& vs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) os << "; ";
    os << vs[i].what << " (residual " << vs[i].residual << ")";
  }
  return os.str();
}

double hermiticity_residual(const Matrix& m) { return max_abs(Matrix(m - m.adjoint())); }

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

ValidationError::ValidationError(std::string what, double residual)
    : ValidationError(std::vector<Violation>{{std::move(what), residual}}) {}

bool ValidationError::mentions(std::string_view what) const {
  return std::any_of(violations_.begin(), violations_.end(),
                     [&](const Violation& v) { return v.what.find(what) != std::string::npos; });
}

InvariantError::InvariantError(const std::string& what, double residual)
    : std::logic_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

HilbertDim::HilbertDim(int d) : d_(d) {
  if (d < 1) throw ValidationError("dimension must be >= 1", static_cast<double>(d));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Matrix identity(int d) { return Matrix::Identity(d, d); }

State make_state_pure(const Vector& v, double tol) {
  const double norm = v.norm();
  if (norm == 0.0) throw ValidationError("zero vector", 0.0);
  if (std::abs(norm - 1.0) > tol) throw ValidationError("vector not normalized", std::abs(norm - 1.0));
  return State(v * v.adjoint(), v);
}

State make_state_mixed(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("density matrix not square", 0.0);
  std::vector<Violation> vs;
  const double herm = hermiticity_residual(m);
  if (herm > tol) vs.push_back({"not Hermitian", herm});
  const double tr = std::abs(m.trace() - Complex(1.0));
  if (tr > tol) vs.push_back({"trace ≠ 1", tr});
  const Matrix h = (m + m.adjoint()) / 2.0;
  const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (min_eig < -tol) vs.push_back({"not PSD", -min_eig});
  if (!vs.empty()) throw ValidationError(std::move(vs));
  return State(m, std::nullopt);
}

Unitary Unitary::from_matrix(Matrix u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ValidationError("unitary not square", 0.0);
  const double r = max_abs(Matrix(u.adjoint() * u - histlab::identity(static_cast<int>(u.rows()))));
  if (r > tol) throw ValidationError("not unitary", r);
  return Unitary(std::move(u));
}

Unitary Unitary::identity(int d) { return Unitary(histlab::identity(HilbertDim(d))); }

Unitary Unitary::from_hamiltonian(const Matrix& hamiltonian, double t, double tol) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw ValidationError("hamiltonian not square", 0.0);
  const double herm = hermiticity_residual(hamiltonian);
  if (herm > tol) throw ValidationError("hamiltonian not Hermitian", herm);
  Eigen::SelfAdjointEigenSolver<Matrix> es((hamiltonian + hamiltonian.adjoint()) / 2.0);
  const Vector phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  return Unitary(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

ProjectorFamily validate_projector_family(std::vector<Matrix> mats, std::vector<std::string> labels, double tol) {
  if (mats.empty()) throw ValidationError("empty projector family", 0.0);
  const auto d = mats.front().rows();
  for (const auto& m : mats) {
    if (m.rows() != d || m.cols() != d) throw ValidationError("projectors not square of equal dimension", 0.0);
  }
  if (labels.empty()) {
    for (std::size_t a = 0; a < mats.size(); ++a) labels.push_back(std::to_string(a));
  }
  if (labels.size() != mats.size()) throw ValidationError("label count does not match projector count", 0.0);

  double herm = 0.0, idem = 0.0, orth = 0.0;
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t a = 0; a < mats.size(); ++a) {
    herm = std::max(herm, hermiticity_residual(mats[a]));
    idem = std::max(idem, max_abs(Matrix(mats[a] * mats[a] - mats[a])));
    sum += mats[a];
    for (std::size_t b = a + 1; b < mats.size(); ++b) orth = std::max(orth, max_abs(Matrix(mats[a] * mats[b])));
  }
  const double complete = max_abs(Matrix(sum - identity(static_cast<int>(d))));

  std::vector<Violation> vs;
  if (herm > tol) vs.push_back({"hermiticity violated", herm});
  if (idem > tol) vs.push_back({"idempotence violated", idem});
  if (complete > tol) vs.push_back({"completeness violated", complete});
  if (orth > tol) vs.push_back({"orthogonality violated", orth});
  if (!vs.empty()) throw ValidationError(std::move(vs));
  return ProjectorFamily(std::move(mats), std::move(labels));
}

ProjectorFamily family_from_basis(const Matrix& basis, const std::vector<std::vector<int>>& groups, double tol) {
  const auto d = basis.rows();
  if (basis.cols() != d) throw ValidationError("basis not square", 0.0);
  const double orthonormal = max_abs(Matrix(basis.adjoint() * basis - identity(static_cast<int>(d))));
  if (orthonormal > tol) throw ValidationError("basis not orthonormal", orthonormal);
  std::vector<Matrix> mats;
  for (const auto& g : groups) {
    Matrix p = Matrix::Zero(d, d);
    for (int i : g) {
      if (i < 0 || i >= d) throw ValidationError("basis index out of range", static_cast<double>(i));
      p += basis.col(i) * basis.col(i).adjoint();
    }
    mats.push_back(std::move(p));
  }
  return validate_projector_family(std::move(mats), {}, tol);
}

Matrix heisenberg_projector(const Matrix& p, const Unitary& u) {
  if (p.rows() != u.dim() || p.cols() != u.dim()) throw ValidationError("dimension mismatch", 0.0);
  return u.matrix().adjoint() * p * u.matrix();
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Schedule::Schedule(std::vector<double> times, std::vector<Unitary> evolutions, std::vector<ProjectorFamily> families)
    : times_(std::move(times)), evolutions_(std::move(evolutions)), families_(std::move(families)) {
  if (times_.empty()) throw ValidationError("schedule needs at least one slot", 0.0);
  if (times_.size() != evolutions_.size() || times_.size() != families_.size())
    throw ValidationError("schedule lists have unequal length", 0.0);
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k - 1] < times_[k])) throw ValidationError("times not strictly increasing", times_[k - 1] - times_[k]);
  }
  const int d = families_.front().dim();
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (families_[k].dim() != d || evolutions_[k].dim() != d) throw ValidationError("dimension mismatch", 0.0);
    std::vector<Matrix> slot;
    for (const auto& p : families_[k].members()) slot.push_back(heisenberg_projector(p, evolutions_[k]));
    heisenberg_.push_back(std::move(slot));
  }
}

namespace {

Matrix gaussian_matrix(int d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(d, d);
  // Column-major fill order is part of the determinism contract.
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const double re = n(rng);
      const double im = n(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

}  // namespace

Unitary haar_random_unitary(HilbertDim d, Rng& rng) {
  const Matrix g = gaussian_matrix(d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so that R has a positive diagonal; this makes the
  // factorization unique and the distribution of Q Haar.
  Vector phase(d.value());
  for (int i = 0; i < d; ++i) {
    const double a = std::abs(r(i, i));
    phase(i) = a > 0.0 ? r(i, i) / a : Complex(1.0);
  }
  return Unitary::from_matrix(q * phase.asDiagonal(), 1e-9);
}

Unitary haar_random_unitary(HilbertDim d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_random_unitary(d, rng);
}

State random_pure_state(HilbertDim d, Rng& rng) {
  const Vector v = haar_random_unitary(d, rng).matrix().col(0);
  return make_state_pure(v / v.norm());
}

State random_mixed_state(HilbertDim d, Rng& rng) {
  const Matrix g = gaussian_matrix(d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return make_state_mixed(rho);
}

}  // namespace histlab
