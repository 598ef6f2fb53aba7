#pragma once

// Pointwise (single-fiber) linear algebra shared by all other modules:
// traces, traceless parts, matrix exponential/logarithm, and the symmetry
// character of a tangent matrix relative to a bilinear structure.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "bilin/errors.hpp"

namespace bilin {

/// A per-point n x n real matrix. Bilinear structures, tangent matrices and
/// endomorphisms H = b^{-1}h all live here; the frame is fixed per point.
using FiberMatrix = Eigen::MatrixXd;

/// Default tolerance for symmetry classification, relative to ||h||.
inline constexpr double kSymTol = 1e-10;

/// Default determinant threshold, relative to ||b||^n.
inline constexpr double kDetTol = 1e-12;

enum class SymmetryCharacter { Symmetric, Skew, Neither };

inline bool is_invertible(const FiberMatrix& b, double tau_det = kDetTol) {
    const double scale = std::pow(b.norm(), b.rows());
    return std::abs(b.determinant()) > tau_det * scale;
}

inline void require_invertible(const FiberMatrix& b, const char* who) {
    if (!is_invertible(b))
        throw DomainError(std::string(who) + ": singular bilinear structure");
}

/// H0 = H - (tr H / n) Id.
inline FiberMatrix traceless_part(const FiberMatrix& H) {
    const auto n = H.rows();
    return H - (H.trace() / static_cast<double>(n)) *
                   FiberMatrix::Identity(n, n);
}

/// Matrix exponential (total function; scaling-and-squaring Pade kernel).
inline FiberMatrix matrix_exp(const FiberMatrix& A) {
    return A.exp();
}

/// Principal matrix logarithm. Refuses eigenvalues on the closed negative
/// real axis instead of picking a branch, so that |Im log(lambda)| < pi.
inline FiberMatrix matrix_log(const FiberMatrix& A) {
    Eigen::EigenSolver<FiberMatrix> es(A, /*computeEigenvectors=*/false);
    const double scale = std::max(A.norm(), 1e-300);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const std::complex<double> lam = es.eigenvalues()[i];
        if (std::abs(lam) <= 1e-14 * scale)
            throw DomainError("matrix_log: singular matrix");
        if (lam.real() <= 0.0 && std::abs(lam.imag()) <= 1e-14 * scale)
            throw EigenvalueOnCut(
                "matrix_log: eigenvalue on the closed negative real axis");
    }
    return A.log();
}

/// Classifies h relative to the invertible structure b. Matrix transpose is
/// the transposed structure for maps T_xM -> T_x^*M; H = b^{-1}h is
/// b-self-adjoint exactly when h is symmetric.
inline SymmetryCharacter symmetry_character(const FiberMatrix& b,
                                            const FiberMatrix& h,
                                            double tol = kSymTol) {
    require_invertible(b, "symmetry_character");
    const double scale = h.norm();
    if ((h.transpose() - h).norm() <= tol * scale)
        return SymmetryCharacter::Symmetric;
    if ((h.transpose() + h).norm() <= tol * scale)
        return SymmetryCharacter::Skew;
    return SymmetryCharacter::Neither;
}

}  // namespace bilin
