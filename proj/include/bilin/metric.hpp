#pragma once

// The pointwise form gamma^alpha, the integrated metric G^alpha, the
// transform between G^alpha and G = G^{1/n}, and signature counts of
// gamma^alpha on matrix subspaces.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "bilin/errors.hpp"
#include "bilin/fields.hpp"
#include "bilin/fiber.hpp"

namespace bilin {

struct MetricParams {
    double alpha = 1.0;
    int n = 1;

    MetricParams(double a, int dim) : alpha(a), n(dim) {
        if (alpha == 0.0 || !std::isfinite(alpha))
            throw DomainError("MetricParams: alpha must be nonzero");
        if (n < 1) throw DomainError("MetricParams: n must be positive");
    }
};

namespace detail {
inline void check_dim(const FiberMatrix& m, const MetricParams& p,
                      const char* who) {
    if (m.rows() != p.n || m.cols() != p.n)
        throw ShapeError(std::string(who) + ": matrix dimension != params.n");
}
}  // namespace detail

/// gamma^alpha_b(h,k) = tr(H0 K0) + alpha tr(H) tr(K), H = b^{-1}h, K = b^{-1}k.
inline double gamma_alpha(const FiberMatrix& b, const FiberMatrix& h,
                          const FiberMatrix& k, const MetricParams& p) {
    detail::check_dim(b, p, "gamma_alpha");
    detail::check_dim(h, p, "gamma_alpha");
    detail::check_dim(k, p, "gamma_alpha");
    require_invertible(b, "gamma_alpha");
    const auto lu = b.partialPivLu();
    const FiberMatrix H = lu.solve(h);
    const FiberMatrix K = lu.solve(k);
    const FiberMatrix H0 = traceless_part(H);
    const FiberMatrix K0 = traceless_part(K);
    return (H0 * K0).trace() + p.alpha * H.trace() * K.trace();
}

/// G^alpha_b(h,k) = sum_x gamma^alpha(b_x,h_x,k_x) vol(b)_x.
inline double metric_G_alpha(const BilinearField& b, const TangentField& h,
                             const TangentField& k, const MetricParams& p) {
    require_same_mesh(b.mesh, h.mesh, "metric_G_alpha");
    require_same_mesh(b.mesh, k.mesh, "metric_G_alpha");
    if (b.n != p.n || h.n != p.n || k.n != p.n)
        throw ShapeError("metric_G_alpha: dimension != params.n");
    const std::vector<double> vol = vol_density(b);
    double sum = 0.0;
    for (int x = 0; x < b.point_count(); ++x)
        sum += gamma_alpha(b.mats[x], h.mats[x], k.mats[x], p) * vol[x];
    return sum;
}

enum class TransformDirection { ToG, FromG };

/// The transform relating G^alpha to G = G^{1/n}:
///   ToG:   h + ((alpha n - 1)/n)       tr(b^{-1}h) b
///   FromG: h - ((alpha n - 1)/(alpha n^2)) tr(b^{-1}h) b
/// so that G^alpha_b(h,k) = G_b(ToG(h), k) for all k, and FromG inverts ToG.
inline TangentField g_alpha_transform(const TangentField& h,
                                      const BilinearField& b,
                                      const MetricParams& p,
                                      TransformDirection dir) {
    require_same_mesh(b.mesh, h.mesh, "g_alpha_transform");
    if (b.n != p.n || h.n != p.n)
        throw ShapeError("g_alpha_transform: dimension != params.n");
    const double n = p.n;
    const double coef = dir == TransformDirection::ToG
                            ? (p.alpha * n - 1.0) / n
                            : -(p.alpha * n - 1.0) / (p.alpha * n * n);
    std::vector<FiberMatrix> out(h.mats.size());
    for (size_t x = 0; x < h.mats.size(); ++x) {
        const double trH = b.mats[x].partialPivLu().solve(h.mats[x]).trace();
        out[x] = h.mats[x] + coef * trH * b.mats[x];
    }
    return TangentField(h.mesh, std::move(out));
}

// --- signature counting -----------------------------------------------

struct SignatureSpace {
    enum class Kind { FullMatrices, SymmetricWithSignature, SkewForms };
    Kind kind;
    int q = 0;  // only for SymmetricWithSignature

    static SignatureSpace full() { return {Kind::FullMatrices, 0}; }
    static SignatureSpace symmetric(int q) {
        return {Kind::SymmetricWithSignature, q};
    }
    static SignatureSpace skew() { return {Kind::SkewForms, 0}; }
};

namespace detail {

inline std::vector<FiberMatrix> signature_basis(SignatureSpace space, int n) {
    std::vector<FiberMatrix> basis;
    auto e = [n](int i, int j) {
        FiberMatrix m = FiberMatrix::Zero(n, n);
        m(i, j) = 1.0;
        return m;
    };
    switch (space.kind) {
        case SignatureSpace::Kind::FullMatrices:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) basis.push_back(e(i, j));
            break;
        case SignatureSpace::Kind::SymmetricWithSignature:
            for (int i = 0; i < n; ++i) basis.push_back(e(i, i));
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    basis.push_back(e(i, j) + e(j, i));
            break;
        case SignatureSpace::Kind::SkewForms:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    basis.push_back(e(i, j) - e(j, i));
            break;
    }
    return basis;
}

inline FiberMatrix signature_reference(SignatureSpace space, int n) {
    switch (space.kind) {
        case SignatureSpace::Kind::FullMatrices:
            return FiberMatrix::Identity(n, n);
        case SignatureSpace::Kind::SymmetricWithSignature: {
            FiberMatrix b = FiberMatrix::Identity(n, n);
            for (int i = 0; i < space.q; ++i) b(i, i) = -1.0;
            return b;
        }
        case SignatureSpace::Kind::SkewForms: {
            // standard Darboux form
            const int m = n / 2;
            FiberMatrix J = FiberMatrix::Zero(n, n);
            for (int i = 0; i < m; ++i) {
                J(i, m + i) = 1.0;
                J(m + i, i) = -1.0;
            }
            return J;
        }
    }
    throw DomainError("signature_reference: unreachable");
}

}  // namespace detail

/// Gram matrix of gamma^alpha on a basis of the chosen matrix subspace at
/// its canonical reference structure.
inline Eigen::MatrixXd signature_gram(SignatureSpace space, int n,
                                      double alpha) {
    if (alpha == 0.0) throw DomainError("signature_gram: alpha = 0");
    if (n < 1) throw DomainError("signature_gram: n < 1");
    if (space.kind == SignatureSpace::Kind::SkewForms && n % 2 != 0)
        throw DomainError("signature_gram: skew forms need even n");
    if (space.kind == SignatureSpace::Kind::SymmetricWithSignature &&
        (space.q < 0 || space.q > n))
        throw DomainError("signature_gram: q out of range");

    const MetricParams p(alpha, n);
    const FiberMatrix b = detail::signature_reference(space, n);
    const auto basis = detail::signature_basis(space, n);
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXd gram(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            gram(i, j) = gamma_alpha(b, basis[i], basis[j], p);
            gram(j, i) = gram(i, j);
        }
    return gram;
}

/// Number of negative eigenvalues of the Gram matrix of gamma^alpha on the
/// chosen subspace (the "signature" in the sense used throughout).
inline int signature_count(SignatureSpace space, int n, double alpha) {
    const Eigen::MatrixXd gram = signature_gram(space, n, alpha);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                      Eigen::EigenvaluesOnly);
    int count = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < -1e-10) ++count;
    return count;
}

}  // namespace bilin
