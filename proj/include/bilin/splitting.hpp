#pragma once

// Splitting of the manifold of Riemannian metrics induced by a fixed
// distribution V: almost-product structures with vertical V, the
// diffeomorphism Phi/Psi between metrics and (normal metric, fiber metric,
// almost product structure) triples, the orthogonal D1/D2 decomposition of
// tangents, the flat metric on the P_V slices, slice geodesics, and the
// Riemannian-submersion identity. Everything here runs at alpha = 1/n (the
// usual metric G); hat_metric accepts other alpha but flags it.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>
#include <vector>

#include "bilin/errors.hpp"
#include "bilin/fields.hpp"
#include "bilin/fiber.hpp"
#include "bilin/geodesics.hpp"
#include "bilin/metric.hpp"

namespace bilin {

/// Per-point frames realizing a constant-rank distribution V together with
/// the quotient onto the normal bundle N = TM/V: an n x k inclusion i with
/// column span V and an (n-k) x n projection p with p i = 0 (constructed,
/// not measured).
struct DistributionFrame {
    int k = 0;
    std::vector<Eigen::MatrixXd> inclusion;   // n x k, full rank
    std::vector<Eigen::MatrixXd> projection;  // (n-k) x n, full rank

    /// i = first k coordinate directions, p = last n-k coordinates.
    static DistributionFrame canonical(const Mesh& mesh, int n, int k) {
        if (k < 1 || k >= n)
            throw DomainError("DistributionFrame: need 0 < k < n");
        Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(n, k);
        inc.topRows(k) = Eigen::MatrixXd::Identity(k, k);
        Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(n - k, n);
        proj.rightCols(n - k) = Eigen::MatrixXd::Identity(n - k, n - k);
        DistributionFrame f;
        f.k = k;
        f.inclusion.assign(mesh.point_count(), inc);
        f.projection.assign(mesh.point_count(), proj);
        return f;
    }

    /// Builds (i, p) from per-point invertible n x n frames F: i is the
    /// first k columns of F and p the last n-k rows of F^{-1}, so that
    /// p i = 0 holds by construction.
    static DistributionFrame from_frames(
        const std::vector<Eigen::MatrixXd>& frames, int k) {
        if (frames.empty()) throw ShapeError("DistributionFrame: no frames");
        const int n = static_cast<int>(frames.front().rows());
        if (k < 1 || k >= n)
            throw DomainError("DistributionFrame: need 0 < k < n");
        DistributionFrame f;
        f.k = k;
        for (const auto& F : frames) {
            if (F.rows() != n || F.cols() != n)
                throw ShapeError("DistributionFrame: frames not n x n");
            if (!is_invertible(F))
                throw DomainError("DistributionFrame: frame singular");
            const Eigen::MatrixXd Finv = F.inverse();
            f.inclusion.push_back(F.leftCols(k));
            f.projection.push_back(Finv.bottomRows(n - k));
        }
        return f;
    }

    int point_count() const { return static_cast<int>(inclusion.size()); }
    int n() const { return static_cast<int>(inclusion.front().rows()); }
};

/// Field of (1,1)-tensors P with P^2 = Id whose +1 eigenbundle is V.
struct AlmostProductField {
    std::vector<Eigen::MatrixXd> mats;

    int point_count() const { return static_cast<int>(mats.size()); }
};

inline void validate_almost_product(const AlmostProductField& P,
                                    const DistributionFrame& V) {
    if (P.point_count() != V.point_count())
        throw InvalidP("almost product field: point count mismatch");
    const int n = V.n();
    for (int x = 0; x < P.point_count(); ++x) {
        const Eigen::MatrixXd& Px = P.mats[x];
        if (Px.rows() != n || Px.cols() != n)
            throw InvalidP("almost product field: wrong dimension");
        const double scale = 1.0 + Px.squaredNorm();
        if ((Px * Px - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-12 * scale)
            throw InvalidP("almost product field: P^2 != Id");
        if (((Px - Eigen::MatrixXd::Identity(n, n)) * V.inclusion[x]).norm() >
            1e-12 * scale)
            throw InvalidP("almost product field: V not in ker(P - Id)");
        // P^2 = Id makes P diagonalizable with eigenvalues +-1, so it is
        // enough to check that the +1 eigenspace is not larger than V.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            Px - Eigen::MatrixXd::Identity(n, n));
        if (svd.singularValues()(n - V.k - 1) < 1e-8)
            throw InvalidP("almost product field: rank(P - Id) < n - k");
    }
}

/// Vertical and horizontal projectors v = (P + Id)/2, h = (Id - P)/2.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> projectors(
    const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    const double scale = 1.0 + P.squaredNorm();
    if ((P * P - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-12 * scale)
        throw InvalidP("projectors: P^2 != Id");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    return {0.5 * (P + id), 0.5 * (id - P)};
}

/// (normal metric g1, fiber metric g2, almost product structure P): the
/// image of a Riemannian metric field under the product diffeomorphism.
struct SplitTriple {
    std::vector<Eigen::MatrixXd> g1;  // (n-k) x (n-k), SPD per point
    std::vector<Eigen::MatrixXd> g2;  // k x k, SPD per point
    AlmostProductField P;
};

namespace detail {

inline bool is_spd(const Eigen::MatrixXd& m, double tol = 1e-10) {
    if ((m - m.transpose()).norm() > tol * std::max(1.0, m.norm()))
        return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

inline void require_riemannian(const BilinearField& g, const char* who) {
    for (const auto& gx : g.mats)
        if (!is_spd(gx))
            throw NotRiemannian(std::string(who) +
                                ": field not symmetric positive definite");
}

inline void validate_triple(const SplitTriple& t, const DistributionFrame& V) {
    if (t.g1.size() != t.g2.size() ||
        static_cast<int>(t.g1.size()) != V.point_count())
        throw InvalidTriple("split triple: point count mismatch");
    for (size_t x = 0; x < t.g1.size(); ++x) {
        if (!is_spd(t.g1[x]) || !is_spd(t.g2[x]))
            throw InvalidTriple("split triple: factor metric not SPD");
    }
    validate_almost_product(t.P, V);
}

/// Right inverse p^+ = p^T (p p^T)^{-1} of the projection.
inline Eigen::MatrixXd proj_right_inverse(const Eigen::MatrixXd& proj) {
    return proj.transpose() *
           (proj * proj.transpose()).partialPivLu().inverse();
}

/// Left inverse of the inclusion, (i^T i)^{-1} i^T.
inline Eigen::MatrixXd incl_left_inverse(const Eigen::MatrixXd& inc) {
    return (inc.transpose() * inc).partialPivLu().inverse() * inc.transpose();
}

}  // namespace detail

/// Phi: a Riemannian metric g maps to (g1, g2, P) with g2 = i^T g i,
/// P = 2 i g2^{-1} i^T g - Id, and g1 the metric pulled back through the
/// horizontal lift C_g (C_g p = Id - i g2^{-1} i^T g).
inline SplitTriple phi_split(const BilinearField& g,
                             const DistributionFrame& V) {
    if (g.point_count() != V.point_count())
        throw MeshMismatch("phi_split: frame/point count mismatch");
    if (g.n != V.n()) throw ShapeError("phi_split: dimension mismatch");
    detail::require_riemannian(g, "phi_split");
    const int n = g.n;
    SplitTriple t;
    for (int x = 0; x < g.point_count(); ++x) {
        const Eigen::MatrixXd& gx = g.mats[x];
        const Eigen::MatrixXd& inc = V.inclusion[x];
        const Eigen::MatrixXd g2 = inc.transpose() * gx * inc;
        const Eigen::MatrixXd g2inv = g2.partialPivLu().inverse();
        const Eigen::MatrixXd P =
            2.0 * inc * g2inv * inc.transpose() * gx -
            Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd hP =
            0.5 * (Eigen::MatrixXd::Identity(n, n) - P);
        const Eigen::MatrixXd C =
            hP * detail::proj_right_inverse(V.projection[x]);
        t.g1.push_back(C.transpose() * gx * C);
        t.g2.push_back(g2);
        t.P.mats.push_back(P);
    }
    return t;
}

/// Psi: assembles the metric p^T g1 p + (i~ v^P)^T g2 (i~ v^P), where i~ is
/// the left inverse of the inclusion. Inverse of phi_split.
inline BilinearField psi_assemble(const SplitTriple& t,
                                  const DistributionFrame& V,
                                  const Mesh& mesh) {
    detail::validate_triple(t, V);
    if (mesh.point_count() != V.point_count())
        throw MeshMismatch("psi_assemble: mesh/frame mismatch");
    std::vector<FiberMatrix> out;
    for (int x = 0; x < V.point_count(); ++x) {
        const auto [vP, hP] = projectors(t.P.mats[x]);
        const Eigen::MatrixXd iv =
            detail::incl_left_inverse(V.inclusion[x]) * vP;
        out.push_back(V.projection[x].transpose() * t.g1[x] *
                          V.projection[x] +
                      iv.transpose() * t.g2[x] * iv);
    }
    return BilinearField(mesh, std::move(out));
}

/// Splits a symmetric tangent h at g into its D1 (block-diagonal) and D2
/// (off-block) parts with respect to P = Phi_3(g): h_i = g H_i with
/// H1 = v H v + h H h and H2 = v H h + h H v.
inline std::pair<TangentField, TangentField> decompose_tangent(
    const BilinearField& g, const TangentField& h,
    const DistributionFrame& V) {
    require_same_mesh(g.mesh, h.mesh, "decompose_tangent");
    detail::require_riemannian(g, "decompose_tangent");
    for (const auto& hx : h.mats)
        if ((hx - hx.transpose()).norm() > kSymTol * std::max(1.0, hx.norm()))
            throw NotSymmetric("decompose_tangent: h not symmetric");
    const SplitTriple t = phi_split(g, V);
    std::vector<FiberMatrix> d1(g.mats.size()), d2(g.mats.size());
    for (size_t x = 0; x < g.mats.size(); ++x) {
        const auto [vP, hP] = projectors(t.P.mats[x]);
        const FiberMatrix H = g.mats[x].partialPivLu().solve(h.mats[x]);
        d1[x] = g.mats[x] * (vP * H * vP + hP * H * hP);
        d2[x] = g.mats[x] * (vP * H * hP + hP * H * vP);
    }
    return {TangentField(h.mesh, std::move(d1)),
            TangentField(h.mesh, std::move(d2))};
}

namespace detail {

inline void require_tangent_to_PV(const Eigen::MatrixXd& xi,
                                  const Eigen::MatrixXd& inc,
                                  const char* who) {
    const double scale = std::max(1.0, xi.norm());
    if ((xi * inc).norm() > 1e-12 * scale)
        throw NotTangentToPV(std::string(who) + ": V not in ker(xi)");
    const Eigen::MatrixXd proj_onto_V = inc * incl_left_inverse(inc);
    if ((xi - proj_onto_V * xi).norm() > 1e-12 * scale)
        throw NotTangentToPV(std::string(who) + ": im(xi) not in V");
}

/// Pushes a P_V tangent xi to a metric tangent at g = Psi(g1,g2,P):
/// 2h = (v^P)^* G2 xi + xi^* G2 v^P with G2 = i~^T g2 i~.
inline Eigen::MatrixXd pv_tangent_to_metric(const Eigen::MatrixXd& xi,
                                            const Eigen::MatrixXd& vP,
                                            const Eigen::MatrixXd& G2) {
    return 0.5 * (vP.transpose() * G2 * xi + xi.transpose() * G2 * vP);
}

}  // namespace detail

struct HatMetricResult {
    double value = 0.0;
    bool nonstandard_alpha = false;  // set when alpha != 1/n was requested
};

/// The pulled-back metric on the P_V slice through (g1, g2): value of
/// G at g = Psi(g1,g2,P) on the pushed-forward tangents. Independent of P.
inline HatMetricResult hat_metric(const SplitTriple& t,
                                  const std::vector<Eigen::MatrixXd>& xi,
                                  const std::vector<Eigen::MatrixXd>& eta,
                                  const DistributionFrame& V, const Mesh& mesh,
                                  const MetricParams& p) {
    detail::validate_triple(t, V);
    if (static_cast<int>(xi.size()) != V.point_count() ||
        static_cast<int>(eta.size()) != V.point_count())
        throw MeshMismatch("hat_metric: tangent point count mismatch");
    const BilinearField g = psi_assemble(t, V, mesh);
    std::vector<FiberMatrix> hm(xi.size()), km(xi.size());
    for (int x = 0; x < V.point_count(); ++x) {
        detail::require_tangent_to_PV(xi[x], V.inclusion[x], "hat_metric");
        detail::require_tangent_to_PV(eta[x], V.inclusion[x], "hat_metric");
        const auto [vP, hP] = projectors(t.P.mats[x]);
        const Eigen::MatrixXd itil =
            detail::incl_left_inverse(V.inclusion[x]);
        const Eigen::MatrixXd G2 = itil.transpose() * t.g2[x] * itil;
        hm[x] = detail::pv_tangent_to_metric(xi[x], vP, G2);
        km[x] = detail::pv_tangent_to_metric(eta[x], vP, G2);
    }
    HatMetricResult out;
    out.nonstandard_alpha = std::abs(p.alpha - 1.0 / p.n) > 1e-15;
    out.value = metric_G_alpha(g, TangentField(mesh, std::move(hm)),
                               TangentField(mesh, std::move(km)), p);
    return out;
}

/// The metric on M(N) x M(V) slices: sum_x (tr(g1^{-1}h1 g1^{-1}k1) +
/// tr(g2^{-1}h2 g2^{-1}k2)) vol(g)_x with g = Psi(g1,g2,P). Independent of
/// the P used in assembly.
inline double check_metric(const SplitTriple& t,
                           const std::vector<Eigen::MatrixXd>& h1,
                           const std::vector<Eigen::MatrixXd>& h2,
                           const std::vector<Eigen::MatrixXd>& k1,
                           const std::vector<Eigen::MatrixXd>& k2,
                           const DistributionFrame& V, const Mesh& mesh) {
    detail::validate_triple(t, V);
    const size_t pts = t.g1.size();
    if (h1.size() != pts || h2.size() != pts || k1.size() != pts ||
        k2.size() != pts)
        throw MeshMismatch("check_metric: tangent point count mismatch");
    for (size_t x = 0; x < pts; ++x) {
        for (const auto* m : {&h1[x], &k1[x]})
            if ((m->transpose() - *m).norm() >
                kSymTol * std::max(1.0, m->norm()))
                throw NotSymmetric("check_metric: normal tangent not symmetric");
        for (const auto* m : {&h2[x], &k2[x]})
            if ((m->transpose() - *m).norm() >
                kSymTol * std::max(1.0, m->norm()))
                throw NotSymmetric("check_metric: fiber tangent not symmetric");
    }
    const BilinearField g = psi_assemble(t, V, mesh);
    const std::vector<double> vol = vol_density(g);
    double sum = 0.0;
    for (size_t x = 0; x < pts; ++x) {
        const auto lu1 = t.g1[x].partialPivLu();
        const auto lu2 = t.g2[x].partialPivLu();
        sum += ((lu1.solve(h1[x]) * lu1.solve(k1[x])).trace() +
                (lu2.solve(h2[x]) * lu2.solve(k2[x])).trace()) *
               vol[x];
    }
    return sum;
}

/// Geodesic inside the P_V slice through g in direction h in D2(g):
/// g(t) = g (Id + t H + t^2 H^2 h^P); equals Psi(g1, g2, P + 2t v g^{-1}h h)
/// and stays Riemannian for all t.
inline BilinearField slice_geodesic(const BilinearField& g,
                                    const TangentField& h,
                                    const DistributionFrame& V, double t) {
    require_same_mesh(g.mesh, h.mesh, "slice_geodesic");
    detail::require_riemannian(g, "slice_geodesic");
    const SplitTriple triple = phi_split(g, V);
    std::vector<FiberMatrix> out(g.mats.size());
    for (size_t x = 0; x < g.mats.size(); ++x) {
        const auto [vP, hP] = projectors(triple.P.mats[x]);
        const FiberMatrix H = g.mats[x].partialPivLu().solve(h.mats[x]);
        const FiberMatrix H1 = vP * H * vP + hP * H * hP;
        if (H1.norm() > 1e-10 * std::max(1e-300, H.norm()))
            throw NotInD2("slice_geodesic: h has a D1 component");
        out[x] = g.mats[x] *
                 (FiberMatrix::Identity(g.n, g.n) + t * H + t * t * H * H * hP);
    }
    return BilinearField(g.mesh, std::move(out));
}

/// Residual of the Riemannian-submersion identity: G_g(h,k) against the sum
/// of the two pullback terms (the slice metric on M(N) x M(V) through the
/// horizontal parts, the flat slice metric through the vertical parts),
/// |difference| / (1 + |G_g(h,k)|). Meaningful at alpha = 1/n only.
inline double submersion_check(const BilinearField& g, const TangentField& h,
                               const TangentField& k,
                               const DistributionFrame& V,
                               const MetricParams& p) {
    if (std::abs(p.alpha - 1.0 / p.n) > 1e-12)
        throw DomainError("submersion_check: requires alpha = 1/n");
    require_same_mesh(g.mesh, h.mesh, "submersion_check");
    require_same_mesh(g.mesh, k.mesh, "submersion_check");
    detail::require_riemannian(g, "submersion_check");
    const SplitTriple t = phi_split(g, V);
    const double lhs = metric_G_alpha(g, h, k, p);

    std::vector<Eigen::MatrixXd> h1(g.mats.size()), h2(g.mats.size()),
        k1(g.mats.size()), k2(g.mats.size()), xi(g.mats.size()),
        eta(g.mats.size());
    for (size_t x = 0; x < g.mats.size(); ++x) {
        const auto [vP, hP] = projectors(t.P.mats[x]);
        const Eigen::MatrixXd C =
            hP * detail::proj_right_inverse(V.projection[x]);
        const auto lu = g.mats[x].partialPivLu();
        // tangent map of (Pi1, Pi2) o Phi
        h1[x] = C.transpose() * h.mats[x] * C;
        h2[x] = V.inclusion[x].transpose() * h.mats[x] * V.inclusion[x];
        k1[x] = C.transpose() * k.mats[x] * C;
        k2[x] = V.inclusion[x].transpose() * k.mats[x] * V.inclusion[x];
        // tangent map of Pi3 o Phi
        xi[x] = 2.0 * vP * lu.solve(h.mats[x]) * hP;
        eta[x] = 2.0 * vP * lu.solve(k.mats[x]) * hP;
    }
    const double check_term =
        check_metric(t, h1, h2, k1, k2, V, g.mesh);
    const double hat_term = hat_metric(t, xi, eta, V, g.mesh, p).value;
    return std::abs(lhs - (check_term + hat_term)) / (1.0 + std::abs(lhs));
}

}  // namespace bilin
