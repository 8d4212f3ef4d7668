#pragma once

// Small hand-built operators and scenarios shared by the unit tests.

#include <cmath>
#include <memory>

#include "histlab/explorer.hpp"

namespace fx {

using namespace histlab;

inline Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

inline Matrix hadamard() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

inline Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

inline Vector ket(std::initializer_list<Complex> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

inline Matrix random_matrix(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline ProjectorFamily z_family() { return validate_projector_family({diag2(1, 0), diag2(0, 1)}); }

/// Qubit, z-basis alternatives at every slot, given per-slot evolutions.
inline std::shared_ptr<const Schedule> qubit_schedule(std::vector<Matrix> evolutions) {
  std::vector<double> times;
  std::vector<Unitary> us;
  std::vector<ProjectorFamily> fams;
  for (std::size_t k = 0; k < evolutions.size(); ++k) {
    times.push_back(static_cast<double>(k));
    us.push_back(Unitary::from_matrix(evolutions[k]));
    fams.push_back(z_family());
  }
  return std::make_shared<const Schedule>(times, std::move(us), std::move(fams));
}

/// Two slots, U(t1) = 1, U(t2) = H.
inline std::shared_ptr<const Schedule> hadamard_schedule() { return qubit_schedule({identity(2), hadamard()}); }

inline State ket0() { return make_state_pure(ket({1.0, 0.0})); }

/// A state with complex amplitudes, giving nonzero Im D in the examples.
inline State complex_state() { return make_state_pure(ket({std::cos(0.4), Complex(0.0, std::sin(0.4))})); }

inline Matrix rotation_x(double theta) {
  Matrix u(2, 2);
  u << std::cos(theta), Complex(0, -std::sin(theta)), Complex(0, -std::sin(theta)), std::cos(theta);
  return u;
}

inline Scenario single_slot(const State& s, const Matrix& u = identity(2)) {
  return make_scenario("single", fine_grained_set(qubit_schedule({u})), s);
}

/// The appendix pair with P = |0⟩⟨0|, u12 = exp(−i 0.6 X), ψ = (cos 0.4, sin 0.4).
inline AppendixScenario appendix_default() {
  return appendix_scenario(diag2(1, 0), Unitary::from_matrix(rotation_x(0.6)),
                           make_state_pure(ket({std::cos(0.4), std::sin(0.4)})));
}

}  // namespace fx
