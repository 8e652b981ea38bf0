#pragma once

// Operator and state algebra on small truncated bosonic/qutrit tensor-product
// spaces.  Everything is dense: the largest space used in practice is
// 3*3*3*3 = 81 dimensional, so sparse machinery would be pure overhead
// (collapse operators are kept sparse separately by the integrator for speed,
// but that is an implementation detail of the evolution loop).

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sqec/util.hpp"

namespace sqec {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Ordered list of mode dimensions plus labels; fixes the basis-ordering
// convention for the whole toolkit.  The first label is the slowest-varying
// (leftmost) Kronecker factor, the last label the fastest-varying.
struct TensorSpace {
  std::vector<int> mode_dims;
  std::vector<std::string> mode_labels;

  int dim() const {
    int d = 1;
    for (int m : mode_dims) d *= m;
    return d;
  }

  int mode_index(const std::string& label) const {
    for (std::size_t i = 0; i < mode_labels.size(); ++i)
      if (mode_labels[i] == label) return static_cast<int>(i);
    throw std::invalid_argument("TensorSpace: unknown mode label '" + label + "'");
  }

  int flatten(const std::vector<int>& occ) const {
    if (occ.size() != mode_dims.size())
      throw std::invalid_argument("TensorSpace::flatten: wrong index count");
    int idx = 0;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] < 0 || occ[i] >= mode_dims[i])
        throw std::out_of_range("TensorSpace::flatten: occupation out of range");
      idx = idx * mode_dims[i] + occ[i];
    }
    return idx;
  }

  std::vector<int> unflatten(int idx) const {
    if (idx < 0 || idx >= dim())
      throw std::out_of_range("TensorSpace::unflatten: index out of range");
    std::vector<int> occ(mode_dims.size());
    for (int i = static_cast<int>(mode_dims.size()) - 1; i >= 0; --i) {
      occ[i] = idx % mode_dims[i];
      idx /= mode_dims[i];
    }
    return occ;
  }

  // Basis vector |occ> in the product space.
  ComplexVector basis_state(const std::vector<int>& occ) const {
    ComplexVector v = ComplexVector::Zero(dim());
    v(flatten(occ)) = 1.0;
    return v;
  }
};

inline ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

// Truncated bosonic annihilation operator: (n, n+1) entry sqrt(n+1).
inline ComplexMatrix annihilation(int dim) {
  if (dim < 2) throw std::invalid_argument("annihilation: dimension must be >= 2");
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
  return a;
}

// Projector onto the n-photon level of a single mode.
inline ComplexMatrix number_projector(int dim, int n) {
  if (dim < 1) throw std::invalid_argument("number_projector: dimension must be >= 1");
  if (n < 0 || n >= dim)
    throw std::out_of_range("number_projector: occupation out of range");
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(n, n) = 1.0;
  return p;
}

// Pseudo-spin operators on the {|0>, |2>} doublet of a three-level mode.
// xtilde is unit-normalized (|0><2| + |2><0|, eigenvalues +-1 on the doublet)
// so that (|0>+-|2>)/sqrt(2) are exact +-1 eigenstates and the one-photon
// error states sit a definite gap above the code space.
inline ComplexMatrix xtilde() {
  ComplexMatrix x = ComplexMatrix::Zero(3, 3);
  x(0, 2) = 1.0;
  x(2, 0) = 1.0;
  return x;
}

// ztilde = P2 - P0 = diag(-1, 0, +1); anticommutes with xtilde on the doublet
// and annihilates the |1> level.
inline ComplexMatrix ztilde() {
  ComplexMatrix z = ComplexMatrix::Zero(3, 3);
  z(0, 0) = -1.0;
  z(2, 2) = 1.0;
  return z;
}

// Kronecker-embeds a single-mode operator into the full product space with
// identities on every other mode.
inline ComplexMatrix embed(const ComplexMatrix& op, const std::string& mode,
                           const TensorSpace& space) {
  int target = space.mode_index(mode);
  if (op.rows() != space.mode_dims[target] || op.cols() != space.mode_dims[target])
    throw std::invalid_argument("embed: operator dimension does not match mode '" +
                                mode + "'");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < space.mode_dims.size(); ++i) {
    if (static_cast<int>(i) == target)
      out = kron(out, op);
    else
      out = kron(out, ComplexMatrix::Identity(space.mode_dims[i], space.mode_dims[i]));
  }
  return out;
}

inline cdouble expectation(const ComplexMatrix& rho, const ComplexMatrix& op) {
  if (rho.rows() != rho.cols() || op.rows() != op.cols() || rho.rows() != op.rows())
    throw std::invalid_argument("expectation: dimension mismatch");
  cdouble tr = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) tr += (rho.row(i) * op.col(i))(0, 0);
  return tr;
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline ComplexMatrix projector(const ComplexVector& psi) {
  return psi * psi.adjoint();
}

}  // namespace sqec
