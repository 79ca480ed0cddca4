#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "catline/errors.hpp"

namespace catline {

using complexd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Composite space: qubits (big-endian, qubit 0 leftmost) with the field
// register last. fock_dim == 1 means the state carries no field register,
// which is what bare qubit factors handed to tensor_compose look like.
struct SpaceLayout {
  int n_qubits = 0;
  int fock_dim = 1;

  SpaceLayout() = default;
  SpaceLayout(int nq, int fd);

  long dim() const { return (1L << n_qubits) * fock_dim; }
  bool operator==(const SpaceLayout& o) const {
    return n_qubits == o.n_qubits && fock_dim == o.fock_dim;
  }
  bool operator!=(const SpaceLayout& o) const { return !(*this == o); }

  // Flat index of (qubit bit pattern, fock level).
  long index(unsigned long bits, int n) const { return long(bits) * fock_dim + n; }
};

struct StateVector {
  SpaceLayout layout;
  VectorXcd amps;

  StateVector() = default;
  StateVector(SpaceLayout l, VectorXcd a);

  double norm() const { return amps.norm(); }
};

struct DenseOperator {
  SpaceLayout layout;
  MatrixXcd m;
  bool hermitian = false;

  DenseOperator() = default;
  DenseOperator(SpaceLayout l, MatrixXcd mat);

  // Verifies against max|M - M^dagger| before setting the flag.
  void mark_hermitian(double tol = 1e-12);
};

struct LadderOperators {
  DenseOperator a;
  DenseOperator a_dagger;
  DenseOperator number;
};

enum class Parity { even, odd };

struct CatState {
  complexd alpha;
  Parity parity;
  double norm_constant;  // sqrt(2 (1 +/- exp(-2|alpha|^2)))
};

struct Measurement {
  double probability = 0.0;
  std::optional<StateVector> collapsed;
  bool impossible = false;
};

LadderOperators ladder_operators(int fock_dim);

// Truncated coherent state, renormalized. Demands |alpha|^2 <= fock_dim / 4
// and a discarded tail below 1e-10, else truncation_inadequate.
StateVector coherent_state(complexd alpha, int fock_dim);

CatState cat_info(complexd alpha, Parity parity);
StateVector cat_state(complexd alpha, Parity parity, int fock_dim);

// Qubit-only basis state |b0 b1 ...>, layout {n, 1}.
StateVector qubit_basis(const std::vector<int>& bits);

// Kronecker product in part order. Only the last part may carry a field
// register (fock_dim > 1), so the field stays rightmost.
StateVector tensor_compose(const std::vector<StateVector>& parts);

// Projective measurement of one qubit in the computational basis. The
// collapsed state keeps the full layout with the qubit projected.
Measurement measure_qubit(const StateVector& state, int qubit_index, int outcome);

// |<a|b>|^2 for pure states on identical layouts.
double fidelity(const StateVector& a, const StateVector& b);

// Unit norm plus a fixed gauge: first amplitude above threshold made
// real-positive, so equal states compare bitwise-stably.
StateVector normalize(const StateVector& state);

complexd coherent_overlap(complexd beta, complexd gamma);

// Dense Kronecker product, row-major factor order (A acts on the left
// register). Shared by the Hamiltonian builders and the tests.
MatrixXcd kronecker(const MatrixXcd& a, const MatrixXcd& b);

}  // namespace catline
