#pragma once

// Finite-dimensional Hilbert-space primitives: states, unitaries, projector
// families, schedules, tensor products and seeded Haar sampling.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace histlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

/// Default absolute tolerance for constructing validated objects.
inline constexpr double kConstructionTol = 1e-10;
/// Default absolute tolerance for classifying decoherence functionals.
inline constexpr double kClassificationTol = 1e-8;

struct Violation {
  std::string what;
  double residual = 0.0;
};

/// Input failed validation. Carries one entry per violated condition.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  ValidationError(std::string what, double residual);

  const std::vector<Violation>& violations() const { return violations_; }
  bool mentions(std::string_view what) const;

 private:
  std::vector<Violation> violations_;
};

/// An identity that holds algebraically was violated numerically.
class InvariantError : public std::logic_error {
 public:
  InvariantError(const std::string& what, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A test was asked to run on inputs that do not meet its precondition.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HilbertDim {
 public:
  explicit HilbertDim(int d);
  int value() const { return d_; }
  operator int() const { return d_; }

 private:
  int d_;
};

/// Max-norm (largest entry modulus).
double max_abs(const Matrix& m);
double max_abs(const Vector& v);
Matrix identity(int d);

class State {
 public:
  const Matrix& rho() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  bool is_pure() const { return vector_.has_value(); }
  /// The state vector when constructed from one.
  const std::optional<Vector>& vector() const { return vector_; }

 private:
  State(Matrix rho, std::optional<Vector> v) : rho_(std::move(rho)), vector_(std::move(v)) {}
  friend State make_state_pure(const Vector& v, double tol);
  friend State make_state_mixed(const Matrix& m, double tol);

  Matrix rho_;
  std::optional<Vector> vector_;
};

State make_state_pure(const Vector& v, double tol = kConstructionTol);
State make_state_mixed(const Matrix& m, double tol = kConstructionTol);

class Unitary {
 public:
  /// Validates u†u = 1 within tol.
  static Unitary from_matrix(Matrix u, double tol = kConstructionTol);
  static Unitary identity(int d);
  /// exp(-i H t) via the eigendecomposition of the Hermitian H.
  static Unitary from_hamiltonian(const Matrix& hamiltonian, double t, double tol = kConstructionTol);

  const Matrix& matrix() const { return u_; }
  int dim() const { return static_cast<int>(u_.rows()); }

 private:
  explicit Unitary(Matrix u) : u_(std::move(u)) {}
  Matrix u_;
};

class ProjectorFamily {
 public:
  const std::vector<Matrix>& members() const { return members_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return members_.size(); }
  int dim() const { return static_cast<int>(members_.front().rows()); }
  const Matrix& operator[](std::size_t a) const { return members_[a]; }

 private:
  ProjectorFamily(std::vector<Matrix> m, std::vector<std::string> l)
      : members_(std::move(m)), labels_(std::move(l)) {}
  friend ProjectorFamily validate_projector_family(std::vector<Matrix>, std::vector<std::string>, double);

  std::vector<Matrix> members_;
  std::vector<std::string> labels_;
};

/// Checks Hermiticity, idempotence, completeness and mutual orthogonality.
/// Labels default to "0", "1", ...
ProjectorFamily validate_projector_family(std::vector<Matrix> mats, std::vector<std::string> labels = {},
                                          double tol = kConstructionTol);

/// Projectors onto groups of columns of an orthonormal basis.
ProjectorFamily family_from_basis(const Matrix& basis, const std::vector<std::vector<int>>& groups,
                                  double tol = kConstructionTol);

/// P(t) = U† P U.
Matrix heisenberg_projector(const Matrix& p, const Unitary& u);

/// Kronecker product; composite index (i, j) -> i * dim(b) + j.
Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);

class Schedule {
 public:
  Schedule(std::vector<double> times, std::vector<Unitary> evolutions, std::vector<ProjectorFamily> families);

  std::size_t slots() const { return times_.size(); }
  int dim() const { return families_.front().dim(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Unitary>& evolutions() const { return evolutions_; }
  const std::vector<ProjectorFamily>& families() const { return families_; }
  /// Heisenberg-picture projector for outcome a at slot k.
  const Matrix& projector(std::size_t slot, std::size_t outcome) const { return heisenberg_[slot][outcome]; }

 private:
  std::vector<double> times_;
  std::vector<Unitary> evolutions_;
  std::vector<ProjectorFamily> families_;
  std::vector<std::vector<Matrix>> heisenberg_;
};

Unitary haar_random_unitary(HilbertDim d, std::uint64_t seed);
Unitary haar_random_unitary(HilbertDim d, Rng& rng);
/// Uniformly distributed pure state (first column of a Haar unitary).
State random_pure_state(HilbertDim d, Rng& rng);
/// Hilbert-Schmidt measure: G G† / Tr(G G†) for complex Gaussian G.
State random_mixed_state(HilbertDim d, Rng& rng);

}  // namespace histlab
