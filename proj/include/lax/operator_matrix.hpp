#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "lax/common.hpp"

namespace lax {

// Dense complex operator with an optional hermiticity assertion.
struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  bool hermitian = false;

  OperatorMatrix() = default;
  explicit OperatorMatrix(Eigen::MatrixXcd m, bool herm = false)
      : entries(std::move(m)), hermitian(herm) {
    if (entries.rows() != entries.cols())
      throw invalid_argument_error("OperatorMatrix: matrix must be square");
    if (hermitian && !hermiticity_ok())
      throw numeric_error("OperatorMatrix: hermitian flag set but matrix is not Hermitian");
  }

  int dim() const { return static_cast<int>(entries.rows()); }

  bool hermiticity_ok(double rel_tol = 1e-12) const {
    const double scale = entries.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    return dev < rel_tol * scale;
  }
};

// Symmetrizes and flags; use when the construction is Hermitian up to rounding.
inline OperatorMatrix make_hermitian(const Eigen::MatrixXcd& m) {
  return OperatorMatrix(0.5 * (m + m.adjoint()), true);
}

inline Eigen::MatrixXcd commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw invalid_argument_error("commutator: dimension mismatch");
  return a.entries * b.entries - b.entries * a.entries;
}

inline double frobenius(const Eigen::MatrixXcd& m) { return m.norm(); }

inline bool is_real(const Eigen::MatrixXcd& m, double tol = 0.0) {
  return m.imag().cwiseAbs().maxCoeff() <= tol;
}

struct EigenSystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns
};

// Hermitian eigen decomposition. Real-valued inputs take the cheaper real
// symmetric path.
inline EigenSystem sym_eig(const OperatorMatrix& op, bool with_vectors = true) {
  if (!op.hermitian && !op.hermiticity_ok(1e-10))
    throw invalid_argument_error("sym_eig: operator is not Hermitian");
  const auto opts = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  EigenSystem out;
  if (is_real(op.entries)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.entries.real(), opts);
    if (es.info() != Eigen::Success) throw numeric_error("sym_eig: real solver failed");
    out.values = es.eigenvalues();
    if (with_vectors) out.vectors = es.eigenvectors().cast<std::complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.entries, opts);
    if (es.info() != Eigen::Success) throw numeric_error("sym_eig: complex solver failed");
    out.values = es.eigenvalues();
    if (with_vectors) out.vectors = es.eigenvectors();
  }
  return out;
}

inline Eigen::VectorXd sym_eigenvalues(const OperatorMatrix& op) {
  return sym_eig(op, /*with_vectors=*/false).values;
}

// Relative residual of the invariant equation i*Hdot = [Hcd, Had], Frobenius
// norms over the full matrices. Suitable for finite sector matrices; grid
// operators should use the band-projected variant from spectral.hpp.
inline double invariant_residual(const Eigen::MatrixXcd& h_dot, const OperatorMatrix& h_cd,
                                 const OperatorMatrix& h_ad) {
  if (h_dot.rows() != h_ad.dim() || h_cd.dim() != h_ad.dim())
    throw invalid_argument_error("invariant_residual: dimension mismatch");
  const std::complex<double> im(0.0, 1.0);
  const Eigen::MatrixXcd r = im * h_dot - commutator(h_cd, h_ad);
  return frobenius(r) / frobenius(h_ad.entries);
}

// Centered-difference form taking H_ad at t-eps and t+eps.
inline double invariant_residual(const OperatorMatrix& h_ad_plus, const OperatorMatrix& h_ad_minus,
                                 double eps, const OperatorMatrix& h_cd,
                                 const OperatorMatrix& h_ad) {
  if (h_ad_plus.dim() != h_ad.dim() || h_ad_minus.dim() != h_ad.dim())
    throw invalid_argument_error("invariant_residual: dimension mismatch");
  const Eigen::MatrixXcd h_dot = (h_ad_plus.entries - h_ad_minus.entries) / (2.0 * eps);
  return invariant_residual(h_dot, h_cd, h_ad);
}

}  // namespace lax
