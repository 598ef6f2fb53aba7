#pragma once

// Geodesics of (B, G^alpha): Christoffel symbol, closed-form solution with
// its exact maximal existence time, exponential/logarithm maps, a fixed-step
// RK4 oracle, and the discrete energy functional.
//
// The closed-form geodesic from b0 in direction h is
//     b(t) = b0 exp(a(t) Id + b(t) H0),   H = b0^{-1} h,
// and everything about its lifetime is controlled by the scalar polynomial
//     p(t) = 1 + (t/2) tr H + (t^2/16) (tr(H)^2 + tr(H0^2)/alpha)
// whose first positive root (minimized over mesh points) is the maximal
// existence time m_h. a(t) = (2/n) log p(t) identically.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "bilin/errors.hpp"
#include "bilin/fields.hpp"
#include "bilin/fiber.hpp"
#include "bilin/metric.hpp"

namespace bilin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative threshold below which tr(H0^2) is treated as exactly zero
/// (the three b(t) branches agree in this limit; switching early avoids
/// catastrophic cancellation between the arctan/artanh forms).
inline constexpr double kTracelessTol = 1e-13;

// --- Christoffel symbol -------------------------------------------------

/// Pointwise Gamma^alpha_b(h,k); the geodesic equation is b_tt = Gamma(b_t,b_t).
inline FiberMatrix christoffel_point(const FiberMatrix& b,
                                     const FiberMatrix& h,
                                     const FiberMatrix& k,
                                     const MetricParams& p) {
    const double n = p.n;
    const auto lu = b.partialPivLu();
    const FiberMatrix H = lu.solve(h);
    const FiberMatrix K = lu.solve(k);
    const double trH = H.trace();
    const double trK = K.trace();
    return 0.5 * h * lu.solve(k) + 0.5 * k * lu.solve(h)
         - 0.25 * trH * k - 0.25 * trK * h
         + (H * K).trace() / (4.0 * p.alpha * n) * b
         + (p.alpha * n - 1.0) / (4.0 * p.alpha * n * n) * trH * trK * b;
}

inline TangentField christoffel(const BilinearField& b, const TangentField& h,
                                const TangentField& k, const MetricParams& p) {
    require_same_mesh(b.mesh, h.mesh, "christoffel");
    require_same_mesh(b.mesh, k.mesh, "christoffel");
    if (b.n != p.n || h.n != p.n || k.n != p.n)
        throw ShapeError("christoffel: dimension != params.n");
    std::vector<FiberMatrix> out(b.mats.size());
    for (size_t x = 0; x < b.mats.size(); ++x) {
        require_invertible(b.mats[x], "christoffel");
        out[x] = christoffel_point(b.mats[x], h.mats[x], k.mats[x], p);
    }
    return TangentField(h.mesh, std::move(out));
}

// --- blow-up polynomial and existence time -------------------------------

namespace detail {

struct ScalarData {
    double trH;
    double trH0sq;       // tr(H0^2), any sign for non-symmetric H
    double norm_sq;      // ||H||_F^2
    bool traceless_zero; // |tr(H0^2)| below the cancellation threshold
};

inline ScalarData scalar_data(const FiberMatrix& H) {
    ScalarData d;
    d.trH = H.trace();
    const FiberMatrix H0 = traceless_part(H);
    d.trH0sq = (H0 * H0).trace();
    d.norm_sq = H.squaredNorm();
    d.traceless_zero = std::abs(d.trH0sq) <= kTracelessTol * d.norm_sq;
    return d;
}

/// Coefficients (1, B, C) of p(t) = 1 + B t + C t^2.
inline std::array<double, 3> p_coeffs(const ScalarData& d, double alpha) {
    const double t0sq = d.traceless_zero ? 0.0 : d.trH0sq;
    return {1.0, d.trH / 2.0, (d.trH * d.trH + t0sq / alpha) / 16.0};
}

/// Smallest positive root of 1 + B t + C t^2, or +inf.
inline double first_positive_root(double B, double C) {
    if (C == 0.0) return B < 0.0 ? -1.0 / B : kInf;
    const double disc = B * B - 4.0 * C;
    if (disc < 0.0) return kInf;
    const double sq = std::sqrt(disc);
    const double q = B != 0.0 ? -(B + std::copysign(sq, B)) / 2.0 : -sq / 2.0;
    double best = kInf;
    const double r1 = q / C;
    if (r1 > 0.0) best = r1;
    if (q != 0.0) {
        const double r2 = 1.0 / q;
        if (r2 > 0.0 && r2 < best) best = r2;
    }
    return best;
}

inline double first_positive_root(const ScalarData& d, double alpha) {
    const auto c = p_coeffs(d, alpha);
    return first_positive_root(c[1], c[2]);
}

}  // namespace detail

/// p(t) for the endomorphism H = b0^{-1}h at a single point.
inline double blowup_poly(const FiberMatrix& H, const MetricParams& p,
                          double t) {
    const auto d = detail::scalar_data(H);
    const auto c = detail::p_coeffs(d, p.alpha);
    return c[0] + c[1] * t + c[2] * t * t;
}

/// First positive root of p(t) for a single endomorphism, or +inf.
inline double first_root_time(const FiberMatrix& H, const MetricParams& p) {
    return detail::first_positive_root(detail::scalar_data(H), p.alpha);
}

// --- closed-form coefficients a(t), b(t) ---------------------------------

enum class GeodesicCase { Arctan, Artanh, Rational };

struct GeodesicCoefficients {
    double a = 0.0;       // log-conformal coefficient, a(t) = (2/n) log p(t)
    double b_coef = 0.0;  // traceless coefficient, solves b' = 1/p, b(0)=0
    int branch = 0;       // 0 before the arctan crossing t = -4/trH, 1 after
    GeodesicCase kind = GeodesicCase::Rational;
};

/// Evaluates a(t), b(t) of the closed-form geodesic for one endomorphism H.
/// Valid for t in [0, first_root_time(H)); throws OutOfDomain beyond.
inline GeodesicCoefficients geodesic_coeffs(const FiberMatrix& H,
                                            const MetricParams& p, double t) {
    detail::check_dim(H, p, "geodesic_coeffs");
    const auto d = detail::scalar_data(H);
    const auto c = detail::p_coeffs(d, p.alpha);
    if (t < 0.0 || t >= detail::first_positive_root(c[1], c[2]))
        throw OutOfDomain("geodesic_coeffs: t outside [0, m_h)");

    const double pt = c[0] + c[1] * t + c[2] * t * t;
    GeodesicCoefficients out;
    out.a = 2.0 / p.n * std::log(pt);

    const double denom = 4.0 + t * d.trH;
    if (d.traceless_zero) {
        out.kind = GeodesicCase::Rational;
        out.b_coef = 4.0 * t / denom;
    } else if (d.trH0sq / p.alpha > 0.0) {
        out.kind = GeodesicCase::Arctan;
        const double s = std::sqrt(d.trH0sq / p.alpha);
        // For tr H < 0 the argument's denominator crosses zero at
        // t = -4/trH; the continuous branch takes arctan in [0, pi/2),
        // pi/2 at the crossing, then (pi/2, pi).
        double theta;
        if (denom > 0.0) {
            theta = std::atan(t * s / denom);
        } else if (denom == 0.0) {
            theta = M_PI / 2.0;
            out.branch = 1;
        } else {
            theta = std::atan(t * s / denom) + M_PI;
            out.branch = 1;
        }
        out.b_coef = 4.0 * theta / s;
    } else {
        out.kind = GeodesicCase::Artanh;
        const double s = std::sqrt(-d.trH0sq / p.alpha);
        out.b_coef = 4.0 / s * std::atanh(t * s / denom);
    }
    return out;
}

// --- existence-time report ------------------------------------------------

/// Membership flags for the blow-up classification of Thm-style sets,
/// the per-point polynomial, and the stated closed-form blow-up times
/// (reported for reconciliation; the p-root is authoritative).
struct PointDomain {
    bool in_Z = false, in_G = false, in_E = false, in_L = false;
    double first_root = kInf;
    std::array<double, 3> p_coeffs{1.0, 0.0, 0.0};
    double stated_time = kInf;   // set-infimum expression, when in a set
    bool stated_matches = true;  // false where the printed expression
                                 // disagrees with the p-root
};

struct GeodesicDomain {
    double m_h = kInf;
    std::vector<PointDomain> per_point;
};

inline GeodesicDomain domain_time(const BilinearField& b0,
                                  const TangentField& h,
                                  const MetricParams& p) {
    require_same_mesh(b0.mesh, h.mesh, "domain_time");
    if (b0.n != p.n || h.n != p.n)
        throw ShapeError("domain_time: dimension != params.n");
    GeodesicDomain dom;
    dom.per_point.resize(b0.mats.size());
    for (size_t x = 0; x < b0.mats.size(); ++x) {
        require_invertible(b0.mats[x], "domain_time");
        const FiberMatrix H = b0.mats[x].partialPivLu().solve(h.mats[x]);
        const auto d = detail::scalar_data(H);
        PointDomain& pt = dom.per_point[x];
        pt.p_coeffs = detail::p_coeffs(d, p.alpha);
        pt.first_root = detail::first_positive_root(pt.p_coeffs[1],
                                                    pt.p_coeffs[2]);

        const double trsq = d.trH * d.trH;
        const double q = d.traceless_zero ? 0.0 : d.trH0sq / p.alpha;
        const double scale = std::max({trsq, std::abs(q), 1e-300});
        // Redundant second characterization via gamma^alpha:
        //   gamma(h,h)/alpha = trsq + q vanishes on E, is negative on L.
        const bool gamma_zero = std::abs(trsq + q) <= 1e-12 * scale;
        if (d.traceless_zero && d.trH < 0.0) {
            pt.in_Z = true;
            pt.stated_time = -4.0 / d.trH;
        } else if (gamma_zero && d.trH < 0.0) {
            pt.in_E = true;
            pt.stated_time = -2.0 / d.trH;
        } else if (q < 0.0 && q > -trsq && d.trH < 0.0) {
            pt.in_G = true;
        } else if (q < -trsq) {
            pt.in_L = true;
        }
        if (pt.in_G || pt.in_L) {
            // printed set-infimum expression; can go negative for alpha < 0
            const double num = -p.alpha * d.trH -
                               std::sqrt(-p.alpha * d.trH0sq);
            pt.stated_time = 4.0 * num /
                             (d.trH0sq + p.alpha * trsq);
        }
        if (pt.in_Z || pt.in_G || pt.in_E || pt.in_L) {
            pt.stated_matches =
                pt.stated_time > 0.0 &&
                std::abs(pt.stated_time - pt.first_root) <=
                    1e-9 * std::max(1.0, pt.first_root);
        }
        dom.m_h = std::min(dom.m_h, pt.first_root);
    }
    return dom;
}

// --- exponential map -------------------------------------------------------

/// Closed-form geodesic point: b(t) = b0 exp(a(t) Id + b(t) H0), per point.
inline BilinearField geodesic_exp(const BilinearField& b0,
                                  const TangentField& h,
                                  const MetricParams& p, double t) {
    require_same_mesh(b0.mesh, h.mesh, "geodesic_exp");
    if (b0.n != p.n || h.n != p.n)
        throw ShapeError("geodesic_exp: dimension != params.n");
    if (t < 0.0) throw OutOfDomain("geodesic_exp: t < 0");
    std::vector<FiberMatrix> out(b0.mats.size());
    const FiberMatrix id = FiberMatrix::Identity(p.n, p.n);
    for (size_t x = 0; x < b0.mats.size(); ++x) {
        require_invertible(b0.mats[x], "geodesic_exp");
        const FiberMatrix H = b0.mats[x].partialPivLu().solve(h.mats[x]);
        const auto coeffs = geodesic_coeffs(H, p, t);  // throws OutOfDomain
        out[x] = b0.mats[x] *
                 matrix_exp(coeffs.a * id + coeffs.b_coef * traceless_part(H));
    }
    return BilinearField(b0.mesh, std::move(out));
}

/// Analytic velocity of the closed-form geodesic:
/// b_t(t) = b(t) (a'(t) Id + b'(t) H0) with a' = (2/n) p'/p and b' = 1/p.
inline TangentField geodesic_velocity(const BilinearField& b0,
                                      const TangentField& h,
                                      const MetricParams& p, double t) {
    const BilinearField bt = geodesic_exp(b0, h, p, t);
    std::vector<FiberMatrix> out(b0.mats.size());
    for (size_t x = 0; x < b0.mats.size(); ++x) {
        const FiberMatrix H = b0.mats[x].partialPivLu().solve(h.mats[x]);
        const auto d = detail::scalar_data(H);
        const auto c = detail::p_coeffs(d, p.alpha);
        const double pt = c[0] + c[1] * t + c[2] * t * t;
        const double dp = c[1] + 2.0 * c[2] * t;
        const double da = 2.0 / p.n * dp / pt;
        const double db = 1.0 / pt;
        out[x] = bt.mats[x] *
                 (da * FiberMatrix::Identity(p.n, p.n) +
                  db * traceless_part(H));
    }
    return TangentField(b0.mesh, std::move(out));
}

// --- logarithm map ---------------------------------------------------------

namespace detail {

/// Fiberwise inverse of H -> a(1) Id + b(1) H0. The input is the principal
/// log L of b0^{-1}b1; cos/sin continue to cosh/sinh when tr(L0^2)/alpha < 0.
inline FiberMatrix psi_inverse(const FiberMatrix& L, const MetricParams& p) {
    const int n = p.n;
    const FiberMatrix id = FiberMatrix::Identity(n, n);
    const FiberMatrix L0 = traceless_part(L);
    const double trL0sq = (L0 * L0).trace();
    const double eT = std::exp(L.trace() / 4.0);
    if (std::abs(trL0sq) <= kTracelessTol * L.squaredNorm())
        return 4.0 / n * (eT - 1.0) * id + eT * L0;
    const double dsc = trL0sq / p.alpha;
    if (dsc > 0.0) {
        const double s = std::sqrt(dsc);
        if (s / 4.0 >= M_PI)
            throw NotInImage(
                "log_map: traceless log part outside the arctan range");
        return 4.0 / n * (eT * std::cos(s / 4.0) - 1.0) * id +
               4.0 / s * eT * std::sin(s / 4.0) * L0;
    }
    const double s = std::sqrt(-dsc);
    return 4.0 / n * (eT * std::cosh(s / 4.0) - 1.0) * id +
           4.0 / s * eT * std::sinh(s / 4.0) * L0;
}

}  // namespace detail

/// h with geodesic_exp(b0, h, 1) = b1, when b1 is in the image.
inline TangentField log_map(const BilinearField& b0, const BilinearField& b1,
                            const MetricParams& p) {
    require_same_mesh(b0.mesh, b1.mesh, "log_map");
    if (b0.n != p.n || b1.n != p.n)
        throw ShapeError("log_map: dimension != params.n");
    std::vector<FiberMatrix> out(b0.mats.size());
    for (size_t x = 0; x < b0.mats.size(); ++x) {
        require_invertible(b0.mats[x], "log_map");
        const FiberMatrix M = b0.mats[x].partialPivLu().solve(b1.mats[x]);
        const FiberMatrix L = matrix_log(M);
        out[x] = b0.mats[x] * detail::psi_inverse(L, p);
    }
    TangentField h(b0.mesh, std::move(out));
    // The recovered direction must keep t = 1 strictly inside the domain.
    if (domain_time(b0, h, p).m_h <= 1.0)
        throw NotInImage("log_map: target not reachable at time 1");
    return h;
}

// --- numerical oracle -------------------------------------------------------

/// Fixed-step classical RK4 for the first-order system (b, B) with
/// b_t = b B and the scalar-coefficient B_t equation. Independent oracle
/// for geodesic_exp; global error O(steps^-4).
inline BilinearField integrate_geodesic_numeric(const BilinearField& b0,
                                                const TangentField& h,
                                                const MetricParams& p,
                                                double T, int steps) {
    require_same_mesh(b0.mesh, h.mesh, "integrate_geodesic_numeric");
    if (b0.n != p.n || h.n != p.n)
        throw ShapeError("integrate_geodesic_numeric: dimension != params.n");
    if (steps < 1)
        throw DomainError("integrate_geodesic_numeric: steps < 1");
    if (T < 0.0 || T >= domain_time(b0, h, p).m_h)
        throw OutOfDomain("integrate_geodesic_numeric: T outside [0, m_h)");

    const double n = p.n;
    const double c_tr2 = 1.0 / (4.0 * p.alpha * n);
    const double c_trtr = (p.alpha * n - 1.0) / (4.0 * p.alpha * n * n);
    const FiberMatrix id = FiberMatrix::Identity(p.n, p.n);
    const double dt = T / steps;

    auto rhs_B = [&](const FiberMatrix& B) -> FiberMatrix {
        const double trB = B.trace();
        return c_tr2 * (B * B).trace() * id - 0.5 * trB * B +
               c_trtr * trB * trB * id;
    };

    std::vector<FiberMatrix> out(b0.mats.size());
    for (size_t x = 0; x < b0.mats.size(); ++x) {
        FiberMatrix b = b0.mats[x];
        FiberMatrix B = b0.mats[x].partialPivLu().solve(h.mats[x]);
        for (int step = 0; step < steps; ++step) {
            const FiberMatrix kb1 = b * B;
            const FiberMatrix kB1 = rhs_B(B);
            const FiberMatrix kb2 = (b + 0.5 * dt * kb1) * (B + 0.5 * dt * kB1);
            const FiberMatrix kB2 = rhs_B(B + 0.5 * dt * kB1);
            const FiberMatrix kb3 = (b + 0.5 * dt * kb2) * (B + 0.5 * dt * kB2);
            const FiberMatrix kB3 = rhs_B(B + 0.5 * dt * kB2);
            const FiberMatrix kb4 = (b + dt * kb3) * (B + dt * kB3);
            const FiberMatrix kB4 = rhs_B(B + dt * kB3);
            b += dt / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
            B += dt / 6.0 * (kB1 + 2.0 * kB2 + 2.0 * kB3 + kB4);
            if (B.norm() > 1e12)
                throw BlowupDetected(
                    "integrate_geodesic_numeric: ||B|| exceeded 1e12");
        }
        out[x] = std::move(b);
    }
    return BilinearField(b0.mesh, std::move(out));
}

// --- discrete energy ---------------------------------------------------------

/// Trapezoidal approximation of (1/2) \int G^alpha_b(b_t, b_t) dt on a
/// uniform grid with spacing dt; velocities by central differences inside
/// and second-order one-sided differences at the ends.
inline double discrete_energy(const std::vector<BilinearField>& curve,
                              double dt, const MetricParams& p) {
    if (curve.size() < 3)
        throw DomainError("discrete_energy: need at least 3 samples");
    if (!(dt > 0.0)) throw DomainError("discrete_energy: dt must be positive");
    const Mesh& mesh = curve.front().mesh;
    for (const auto& b : curve)
        require_same_mesh(mesh, b.mesh, "discrete_energy");

    const size_t N = curve.size();
    auto velocity = [&](size_t i) -> TangentField {
        std::vector<FiberMatrix> v(curve[i].mats.size());
        for (size_t x = 0; x < v.size(); ++x) {
            if (i == 0)
                v[x] = (-3.0 * curve[0].mats[x] + 4.0 * curve[1].mats[x] -
                        curve[2].mats[x]) /
                       (2.0 * dt);
            else if (i == N - 1)
                v[x] = (3.0 * curve[N - 1].mats[x] -
                        4.0 * curve[N - 2].mats[x] + curve[N - 3].mats[x]) /
                       (2.0 * dt);
            else
                v[x] = (curve[i + 1].mats[x] - curve[i - 1].mats[x]) /
                       (2.0 * dt);
        }
        return TangentField(mesh, std::move(v));
    };

    double sum = 0.0;
    for (size_t i = 0; i < N; ++i) {
        const TangentField v = velocity(i);
        const double integrand = metric_G_alpha(curve[i], v, v, p);
        sum += (i == 0 || i == N - 1) ? 0.5 * integrand : integrand;
    }
    return 0.5 * sum * dt;
}

}  // namespace bilin
