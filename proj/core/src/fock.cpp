#include "catline/fock.hpp"

#include <cmath>

namespace catline {

SpaceLayout::SpaceLayout(int nq, int fd) : n_qubits(nq), fock_dim(fd) {
  if (nq < 0 || fd < 1)
    throw Error(ErrorCode::invalid_dimension,
                "layout needs n_qubits >= 0 and fock_dim >= 1");
  if (nq > 24) throw Error(ErrorCode::invalid_dimension, "too many qubits");
}

StateVector::StateVector(SpaceLayout l, VectorXcd a) : layout(l), amps(std::move(a)) {
  if (amps.size() != layout.dim())
    throw Error(ErrorCode::layout_mismatch, "amplitude count does not match layout");
}

DenseOperator::DenseOperator(SpaceLayout l, MatrixXcd mat) : layout(l), m(std::move(mat)) {
  if (m.rows() != layout.dim() || m.cols() != layout.dim())
    throw Error(ErrorCode::layout_mismatch, "matrix shape does not match layout");
}

void DenseOperator::mark_hermitian(double tol) {
  double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw Error(ErrorCode::invalid_argument, "operator fails the hermiticity check");
  hermitian = true;
}

LadderOperators ladder_operators(int fock_dim) {
  if (fock_dim < 2)
    throw Error(ErrorCode::invalid_dimension, "ladder operators need fock_dim >= 2");
  SpaceLayout l(0, fock_dim);
  MatrixXcd a = MatrixXcd::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  MatrixXcd num = MatrixXcd::Zero(fock_dim, fock_dim);
  for (int n = 0; n < fock_dim; ++n) num(n, n) = double(n);
  LadderOperators ops{DenseOperator(l, a), DenseOperator(l, a.adjoint()), DenseOperator(l, num)};
  ops.number.mark_hermitian();
  return ops;
}

StateVector coherent_state(complexd alpha, int fock_dim) {
  if (fock_dim < 2)
    throw Error(ErrorCode::invalid_dimension, "coherent state needs fock_dim >= 2");
  double nbar = std::norm(alpha);
  if (nbar > double(fock_dim) / 4.0)
    throw Error(ErrorCode::truncation_inadequate,
                "|alpha|^2 exceeds fock_dim/4, raise the truncation");
  VectorXcd c(fock_dim);
  c(0) = std::exp(-nbar / 2.0);
  for (int n = 1; n < fock_dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  double kept = c.squaredNorm();
  if (1.0 - kept >= 1e-10)
    throw Error(ErrorCode::truncation_inadequate, "coherent tail above 1e-10");
  c /= std::sqrt(kept);
  return StateVector(SpaceLayout(0, fock_dim), std::move(c));
}

CatState cat_info(complexd alpha, Parity parity) {
  double w = std::exp(-2.0 * std::norm(alpha));
  double sq = (parity == Parity::even) ? 2.0 * (1.0 + w) : 2.0 * (1.0 - w);
  if (sq <= 0.0 || (parity == Parity::odd && std::abs(alpha) == 0.0))
    throw Error(ErrorCode::degenerate_state, "odd cat degenerates at alpha = 0");
  return CatState{alpha, parity, std::sqrt(sq)};
}

StateVector cat_state(complexd alpha, Parity parity, int fock_dim) {
  CatState info = cat_info(alpha, parity);  // validates degeneracy first
  StateVector plus = coherent_state(alpha, fock_dim);
  StateVector minus = coherent_state(-alpha, fock_dim);
  // Odd convention: (|-alpha> - |alpha>) / N_minus.
  VectorXcd c = (parity == Parity::even) ? (plus.amps + minus.amps).eval()
                                         : (minus.amps - plus.amps).eval();
  double n = c.norm();
  if (n < 1e-14) throw Error(ErrorCode::degenerate_state, "cat state vanished");
  c /= n;
  (void)info;
  return StateVector(SpaceLayout(0, fock_dim), std::move(c));
}

StateVector qubit_basis(const std::vector<int>& bits) {
  int nq = int(bits.size());
  SpaceLayout l(nq, 1);
  unsigned long idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw Error(ErrorCode::invalid_argument, "bit must be 0 or 1");
    idx = idx * 2 + unsigned(b);
  }
  VectorXcd v = VectorXcd::Zero(l.dim());
  v(long(idx)) = 1.0;
  return StateVector(l, std::move(v));
}

StateVector tensor_compose(const std::vector<StateVector>& parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "nothing to compose");
  int nq = 0;
  int fd = 1;
  for (size_t i = 0; i < parts.size(); ++i) {
    nq += parts[i].layout.n_qubits;
    if (parts[i].layout.fock_dim > 1) {
      if (i + 1 != parts.size())
        throw Error(ErrorCode::invalid_argument, "field factor must come last");
      fd = parts[i].layout.fock_dim;
    }
  }
  VectorXcd acc = parts[0].amps;
  for (size_t i = 1; i < parts.size(); ++i) {
    const VectorXcd& b = parts[i].amps;
    VectorXcd next(acc.size() * b.size());
    for (long j = 0; j < acc.size(); ++j)
      next.segment(j * b.size(), b.size()) = acc(j) * b;
    acc = std::move(next);
  }
  return StateVector(SpaceLayout(nq, fd), std::move(acc));
}

Measurement measure_qubit(const StateVector& state, int qubit_index, int outcome) {
  const SpaceLayout& l = state.layout;
  if (qubit_index < 0 || qubit_index >= l.n_qubits)
    throw Error(ErrorCode::invalid_argument, "qubit index out of range");
  if (outcome != 0 && outcome != 1)
    throw Error(ErrorCode::invalid_argument, "outcome must be 0 or 1");

  // Qubit 0 is the most significant block of the index.
  long stride = l.dim() >> (qubit_index + 1);
  Measurement res;
  VectorXcd proj = VectorXcd::Zero(l.dim());
  double p = 0.0;
  for (long i = 0; i < l.dim(); ++i) {
    int bit = int((i / stride) & 1);
    if (bit == outcome) {
      p += std::norm(state.amps(i));
      proj(i) = state.amps(i);
    }
  }
  res.probability = p;
  if (p < 1e-18) {
    res.impossible = true;
    return res;
  }
  proj /= std::sqrt(p);
  res.collapsed = StateVector(l, std::move(proj));
  return res;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.layout != b.layout)
    throw Error(ErrorCode::layout_mismatch, "fidelity needs identical layouts");
  return std::norm(a.amps.dot(b.amps));
}

StateVector normalize(const StateVector& state) {
  double n = state.amps.norm();
  if (n < 1e-300) throw Error(ErrorCode::invalid_argument, "cannot normalize zero vector");
  VectorXcd v = state.amps / n;
  for (long i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    if (a > 1e-12) {
      v *= std::conj(v(i)) / a;
      break;
    }
  }
  return StateVector(state.layout, std::move(v));
}

complexd coherent_overlap(complexd beta, complexd gamma) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(gamma) + std::conj(beta) * gamma);
}

MatrixXcd kronecker(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace catline
