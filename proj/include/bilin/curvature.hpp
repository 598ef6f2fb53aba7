#pragma once

// Closed-form curvature of (B, G^alpha) and an independent finite-difference
// oracle assembled from the Christoffel symbol.
//
// Convention: R(h,k)l = dGamma(h)(k,l) - dGamma(k)(h,l)
//                       - Gamma(h, Gamma(k,l)) + Gamma(k, Gamma(h,l)),
// the local-coordinate form matching the Christoffel sign used here.
//
// Closed form (H = b^{-1}h etc.):
//   b^{-1} R(h,k)l = 1/4 [[H,K],L]
//                  + 1/(16 a)   (tr(KL) H - tr(HL) K)
//                  + 1/(16 a n) (tr H tr L K - tr K tr L H)
//                  + 1/(16 a n) (tr(HL) tr K - tr(KL) tr H) Id.
// The two trace-group coefficients are both exactly 1/(16 a n); at a = 1/n
// this reduces to the familiar n/16, 1/16, 1/16 of the metrics manifold.

#include <vector>

#include "bilin/errors.hpp"
#include "bilin/fields.hpp"
#include "bilin/geodesics.hpp"
#include "bilin/metric.hpp"

namespace bilin {

inline FiberMatrix curvature_point(const FiberMatrix& b, const FiberMatrix& h,
                                   const FiberMatrix& k, const FiberMatrix& l,
                                   const MetricParams& p) {
    const double n = p.n;
    const auto lu = b.partialPivLu();
    const FiberMatrix H = lu.solve(h);
    const FiberMatrix K = lu.solve(k);
    const FiberMatrix L = lu.solve(l);
    const FiberMatrix id = FiberMatrix::Identity(p.n, p.n);

    const FiberMatrix HK = H * K - K * H;
    const double trHL = (H * L).trace();
    const double trKL = (K * L).trace();
    const double trH = H.trace();
    const double trK = K.trace();
    const double trL = L.trace();
    const double c = 1.0 / (16.0 * p.alpha * n);

    const FiberMatrix R = 0.25 * (HK * L - L * HK)
        + 1.0 / (16.0 * p.alpha) * (trKL * H - trHL * K)
        + c * (trH * trL * K - trK * trL * H)
        + c * (trHL * trK - trKL * trH) * id;
    return b * R;
}

inline TangentField curvature_closed_form(const BilinearField& b,
                                          const TangentField& h,
                                          const TangentField& k,
                                          const TangentField& l,
                                          const MetricParams& p) {
    require_same_mesh(b.mesh, h.mesh, "curvature_closed_form");
    require_same_mesh(b.mesh, k.mesh, "curvature_closed_form");
    require_same_mesh(b.mesh, l.mesh, "curvature_closed_form");
    if (b.n != p.n || h.n != p.n || k.n != p.n || l.n != p.n)
        throw ShapeError("curvature_closed_form: dimension != params.n");
    std::vector<FiberMatrix> out(b.mats.size());
    for (size_t x = 0; x < b.mats.size(); ++x) {
        require_invertible(b.mats[x], "curvature_closed_form");
        out[x] = curvature_point(b.mats[x], h.mats[x], k.mats[x], l.mats[x], p);
    }
    return TangentField(h.mesh, std::move(out));
}

/// dGamma(h)(k,l) by central differences of the base point along h, then
/// the local curvature formula. eps must keep b +- eps h and b +- eps k
/// invertible.
inline TangentField curvature_fd_oracle(const BilinearField& b,
                                        const TangentField& h,
                                        const TangentField& k,
                                        const TangentField& l,
                                        const MetricParams& p,
                                        double eps = 1e-4) {
    require_same_mesh(b.mesh, h.mesh, "curvature_fd_oracle");
    require_same_mesh(b.mesh, k.mesh, "curvature_fd_oracle");
    require_same_mesh(b.mesh, l.mesh, "curvature_fd_oracle");
    if (b.n != p.n || h.n != p.n || k.n != p.n || l.n != p.n)
        throw ShapeError("curvature_fd_oracle: dimension != params.n");
    if (!(eps > 0.0)) throw DomainError("curvature_fd_oracle: eps <= 0");

    auto dGamma = [&](const FiberMatrix& bx, const FiberMatrix& dir,
                      const FiberMatrix& kx, const FiberMatrix& lx) {
        const FiberMatrix bp = bx + eps * dir;
        const FiberMatrix bm = bx - eps * dir;
        if (!is_invertible(bp) || !is_invertible(bm))
            throw DomainError("curvature_fd_oracle: perturbed structure singular");
        return ((christoffel_point(bp, kx, lx, p) -
                 christoffel_point(bm, kx, lx, p)) /
                (2.0 * eps)).eval();
    };

    std::vector<FiberMatrix> out(b.mats.size());
    for (size_t x = 0; x < b.mats.size(); ++x) {
        const FiberMatrix& bx = b.mats[x];
        require_invertible(bx, "curvature_fd_oracle");
        const FiberMatrix& hx = h.mats[x];
        const FiberMatrix& kx = k.mats[x];
        const FiberMatrix& lx = l.mats[x];
        out[x] = dGamma(bx, hx, kx, lx) - dGamma(bx, kx, hx, lx)
               - christoffel_point(bx, hx, christoffel_point(bx, kx, lx, p), p)
               + christoffel_point(bx, kx, christoffel_point(bx, hx, lx, p), p);
    }
    return TangentField(h.mesh, std::move(out));
}

}  // namespace bilin
