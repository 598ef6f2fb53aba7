#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bilin/geodesics.hpp"
#include "bilin/random.hpp"

#include "oracles.hpp"

using namespace bilin;

namespace {

FiberMatrix mat2(double a, double b, double c, double d) {
    FiberMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

FiberMatrix diag2(double a, double b) { return mat2(a, 0, 0, b); }

const Mesh kOnePoint({1.0});

BilinearField field_of(const FiberMatrix& m) {
    return BilinearField(kOnePoint, {m});
}
TangentField tangent_of(const FiberMatrix& m) {
    return TangentField(kOnePoint, {m});
}

double rel_dev(const BilinearField& a, const BilinearField& b) {
    double worst = 0.0;
    for (size_t x = 0; x < a.mats.size(); ++x)
        worst = std::max(worst, (a.mats[x] - b.mats[x]).norm() /
                                    std::max(1.0, a.mats[x].norm()));
    return worst;
}

}  // namespace

TEST_CASE("christoffel on fixed inputs") {
    for (int n : {2, 3}) {
        const FiberMatrix id = FiberMatrix::Identity(n, n);
        const Mesh mesh({1.0});
        const BilinearField b(mesh, {id});
        const TangentField h(mesh, {id});
        for (double alpha : {0.3, 1.0, -2.0}) {
            const TangentField g = christoffel(b, h, h, MetricParams(alpha, n));
            REQUIRE((g.mats[0] - (1.0 - n / 4.0) * id).norm() < 1e-14);
        }
    }

    const FiberMatrix off = mat2(0, 1, 1, 0);
    const TangentField g = christoffel(field_of(FiberMatrix::Identity(2, 2)),
                                       tangent_of(off), tangent_of(off),
                                       MetricParams(0.25, 2));
    REQUIRE((g.mats[0] - 2.0 * FiberMatrix::Identity(2, 2)).norm() < 1e-14);

    const TangentField zero = TangentField::zero(kOnePoint, 2);
    const TangentField gz = christoffel(field_of(FiberMatrix::Identity(2, 2)),
                                        zero, tangent_of(off),
                                        MetricParams(1.0, 2));
    REQUIRE(gz.mats[0].norm() == 0.0);
}

TEST_CASE("christoffel is symmetric in its arguments") {
    InstanceRng rng(401);
    for (int n = 1; n <= 3; ++n) {
        const Mesh mesh = rng.mesh(2);
        const MetricParams p(n % 2 ? 0.9 : -0.7, n);
        const BilinearField b = rng.bilinear_field(mesh, n);
        const TangentField h = rng.tangent_field(mesh, n);
        const TangentField k = rng.tangent_field(mesh, n);
        const TangentField hk = christoffel(b, h, k, p);
        const TangentField kh = christoffel(b, k, h, p);
        for (size_t x = 0; x < hk.mats.size(); ++x)
            REQUIRE((hk.mats[x] - kh.mats[x]).norm() <= 1e-13);
    }
}

TEST_CASE("geodesic_coeffs worked values") {
    // rational case
    const auto c1 = geodesic_coeffs(FiberMatrix::Identity(2, 2),
                                    MetricParams(1.7, 2), 1.0);
    REQUIRE(c1.kind == GeodesicCase::Rational);
    REQUIRE(c1.a == Catch::Approx(std::log(2.25)).epsilon(1e-12));
    REQUIRE(c1.b_coef == Catch::Approx(2.0 / 3.0).epsilon(1e-12));

    // initial conditions
    const auto c0 =
        geodesic_coeffs(diag2(0.4, -1.1), MetricParams(1.0, 2), 0.0);
    REQUIRE(c0.a == 0.0);
    REQUIRE(c0.b_coef == 0.0);

    // arctan branch crossing exactly at t = -4/tr(H) = 2
    const FiberMatrix H = diag2(-3.0, 1.0);
    const MetricParams p(1.0, 2);
    const auto c2 = geodesic_coeffs(H, p, 2.0);
    REQUIRE(c2.kind == GeodesicCase::Arctan);
    REQUIRE(c2.branch == 1);
    REQUIRE(c2.b_coef ==
            Catch::Approx(4.0 / std::sqrt(8.0) * M_PI / 2.0).epsilon(1e-12));
    REQUIRE(std::abs(blowup_poly(H, p, 2.0) - 2.0) < 1e-14);

    // quadrature oracle across the branch crossing: b(t) solves b' = 1/p
    for (double t : {0.5, 1.9, 2.0, 2.1, 3.5}) {
        const double want = oracles::simpson(
            [&](double s) { return 1.0 / (1.0 - s + 0.75 * s * s); }, 0.0, t);
        REQUIRE(geodesic_coeffs(H, p, t).b_coef ==
                Catch::Approx(want).margin(1e-9));
    }

    // a(t) equals the two-squares form of the closed-form solution
    InstanceRng rng(402);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 1 + rep % 3;
        const MetricParams pr(rep % 2 ? 0.8 : -1.3, n);
        FiberMatrix Hr = rng.matrix(n);
        Hr /= std::max(1.0, Hr.norm());
        const double m = first_root_time(Hr, pr);
        const double t = 0.7 * std::min(m, 2.0);
        const double trH = Hr.trace();
        const FiberMatrix H0 = traceless_part(Hr);
        const double two_sq = std::pow(1.0 + t / 4.0 * trH, 2) +
                              t * t / (16.0 * pr.alpha) * (H0 * H0).trace();
        const auto c = geodesic_coeffs(Hr, pr, t);
        REQUIRE(c.a == Catch::Approx(2.0 / n * std::log(two_sq)).margin(1e-12));
        // quadrature cross-check of the traceless coefficient
        const double pB = trH / 2.0;
        const double pC = (trH * trH + (H0 * H0).trace() / pr.alpha) / 16.0;
        const double want = oracles::simpson(
            [&](double s) { return 1.0 / (1.0 + pB * s + pC * s * s); }, 0.0,
            t);
        REQUIRE(c.b_coef == Catch::Approx(want).margin(1e-9));
    }
}

TEST_CASE("geodesic_coeffs domain enforcement") {
    const FiberMatrix H = -FiberMatrix::Identity(2, 2);  // m_h = 2
    const MetricParams p(1.0, 2);
    REQUIRE_NOTHROW(geodesic_coeffs(H, p, 1.999999));
    REQUIRE_THROWS_AS(geodesic_coeffs(H, p, 2.0), OutOfDomain);
    REQUIRE_THROWS_AS(geodesic_coeffs(H, p, 2.5), OutOfDomain);
    REQUIRE_THROWS_AS(geodesic_coeffs(H, p, -0.1), OutOfDomain);
}

TEST_CASE("domain_time worked examples") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);

    SECTION("conformal shrink: Z class, m_h = 2") {
        const auto dom = domain_time(field_of(id), tangent_of((-id).eval()),
                                     MetricParams(1.0, 2));
        REQUIRE(dom.m_h == Catch::Approx(2.0).epsilon(1e-14));
        REQUIRE(dom.per_point[0].in_Z);
        REQUIRE_FALSE(dom.per_point[0].in_G);
        REQUIRE(dom.per_point[0].stated_matches);
        REQUIRE(dom.per_point[0].p_coeffs[1] == Catch::Approx(-1.0));
        REQUIRE(dom.per_point[0].p_coeffs[2] == Catch::Approx(0.25));
    }
    SECTION("conformal growth: no blow-up") {
        const auto dom =
            domain_time(field_of(id), tangent_of(id), MetricParams(1.0, 2));
        REQUIRE(std::isinf(dom.m_h));
        const auto& pt = dom.per_point[0];
        REQUIRE_FALSE((pt.in_Z || pt.in_G || pt.in_E || pt.in_L));
    }
    SECTION("lightlike-exceeding direction: L class, m_h = 2 sqrt 2") {
        const auto dom = domain_time(field_of(id), tangent_of(diag2(1, -1)),
                                     MetricParams(-1.0, 2));
        REQUIRE(dom.m_h == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
        REQUIRE(dom.per_point[0].in_L);
        // the printed set-infimum expression is negative here; reported,
        // never used for the domain
        REQUIRE(dom.per_point[0].stated_time < 0.0);
        REQUIRE_FALSE(dom.per_point[0].stated_matches);
    }
    SECTION("G class: both roots positive, the smaller one wins") {
        const FiberMatrix H = diag2(-1.5, -0.5);
        const auto dom = domain_time(field_of(id), tangent_of(H),
                                     MetricParams(-1.0, 2));
        REQUIRE(dom.per_point[0].in_G);
        // p(t) = 1 - t + 0.21875 t^2, roots 1.4776.. and 3.0938..
        const double first = (1.0 - std::sqrt(0.125)) / (2.0 * 0.21875);
        REQUIRE(dom.m_h == Catch::Approx(first).epsilon(1e-12));
    }
    SECTION("E class: lightlike with negative trace, m_h = -2/trH") {
        const double a = -1.0 + std::sqrt(2.0), b = -1.0 - std::sqrt(2.0);
        const auto dom = domain_time(field_of(id), tangent_of(diag2(a, b)),
                                     MetricParams(-1.0, 2));
        REQUIRE(dom.per_point[0].in_E);
        REQUIRE(dom.m_h == Catch::Approx(1.0).epsilon(1e-12));
        REQUIRE(dom.per_point[0].stated_matches);
    }
    SECTION("minimum over points") {
        const Mesh mesh({1.0, 1.0});
        const BilinearField b0(mesh, {id, id});
        const TangentField h(mesh, {id, (-id).eval()});
        const auto dom = domain_time(b0, h, MetricParams(1.0, 2));
        REQUIRE(dom.m_h == Catch::Approx(2.0));
        REQUIRE(std::isinf(dom.per_point[0].first_root));
    }
}

TEST_CASE("geodesic_exp fixed values") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    const BilinearField b0 = field_of(id);

    const BilinearField bt =
        geodesic_exp(b0, tangent_of(id), MetricParams(0.37, 2), 1.0);
    REQUIRE((bt.mats[0] - 2.25 * id).norm() < 1e-13);

    // h = 0 stays put for all t
    for (double t : {0.0, 1.0, 7.0}) {
        const BilinearField c = geodesic_exp(
            b0, TangentField::zero(kOnePoint, 2), MetricParams(1.0, 2), t);
        REQUIRE((c.mats[0] - id).norm() == 0.0);
    }

    // traceless symmetric direction, alpha = 1
    const FiberMatrix H0 = diag2(1, -1);
    const MetricParams p(1.0, 2);
    const double a = std::log(1.125);
    const double bb = 4.0 / std::sqrt(2.0) * std::atan(std::sqrt(2.0) / 4.0);
    const BilinearField expct = field_of(matrix_exp(a * id + bb * H0));
    const BilinearField got = geodesic_exp(b0, tangent_of(H0), p, 1.0);
    REQUIRE(rel_dev(expct, got) < 1e-13);

    // at t = 0 the start point comes back
    const BilinearField at0 = geodesic_exp(b0, tangent_of(H0), p, 0.0);
    REQUIRE((at0.mats[0] - id).norm() == 0.0);
}

TEST_CASE("geodesic_exp strictness at the blow-up time") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    const MetricParams p(1.0, 2);
    const BilinearField b0 = field_of(id);
    const TangentField h = tangent_of((-id).eval());  // m_h = 2 exactly
    REQUIRE_NOTHROW(geodesic_exp(b0, h, p, 1.9999999));
    REQUIRE_THROWS_AS(geodesic_exp(b0, h, p, 2.0), OutOfDomain);
    REQUIRE_THROWS_AS(geodesic_exp(b0, h, p, 2.0000001), OutOfDomain);
    REQUIRE_THROWS_AS(integrate_geodesic_numeric(b0, h, p, 2.0, 100),
                      OutOfDomain);
}

TEST_CASE("closed form vs RK4 oracle") {
    // fixed worked value first
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    const BilinearField z = integrate_geodesic_numeric(
        field_of(id), tangent_of(id), MetricParams(1.0, 2), 1.0, 1000);
    REQUIRE((z.mats[0] - 2.25 * id).norm() < 1e-9);

    InstanceRng rng(403);
    for (int n = 1; n <= 3; ++n) {
        for (double alpha : {-1.0, 1.0 / n, 1.0}) {
            const MetricParams p(alpha, n);
            const Mesh mesh = rng.mesh(2);
            const BilinearField b0 = rng.bilinear_field(mesh, n);
            const TangentField h =
                scale_direction(b0, rng.tangent_field(mesh, n), 1.0);
            const double m = domain_time(b0, h, p).m_h;
            const double t = std::isfinite(m) ? 0.9 * m : 2.0;
            const BilinearField closed = geodesic_exp(b0, h, p, t);
            const BilinearField rk =
                integrate_geodesic_numeric(b0, h, p, t, 4096);
            REQUIRE(rel_dev(closed, rk) <= 1e-6);
        }
    }
}

TEST_CASE("RK4 convergence order") {
    InstanceRng rng(404);
    const Mesh mesh({1.0});
    const MetricParams p(1.0, 2);
    const BilinearField b0 = rng.bilinear_field(mesh, 2);
    const TangentField h = scale_direction(b0, rng.tangent_field(mesh, 2), 1.5);
    const double m = domain_time(b0, h, p).m_h;
    const double t = std::isfinite(m) ? 0.85 * m : 2.5;
    const BilinearField exact = geodesic_exp(b0, h, p, t);
    const double e1 =
        rel_dev(exact, integrate_geodesic_numeric(b0, h, p, t, 64));
    const double e2 =
        rel_dev(exact, integrate_geodesic_numeric(b0, h, p, t, 128));
    REQUIRE(e1 / e2 > 10.0);
    REQUIRE(e1 / e2 < 26.0);
}

TEST_CASE("integrator argument validation") {
    const FiberMatrix id = FiberMatrix::Identity(1, 1);
    const MetricParams p(1.0, 1);
    BilinearField b0(kOnePoint, {id});
    TangentField h(kOnePoint, {(-4.0 * id).eval()});  // m_h = 1
    REQUIRE(domain_time(b0, h, p).m_h == Catch::Approx(1.0));
    REQUIRE_THROWS_AS(integrate_geodesic_numeric(b0, h, p, 0.5, 0),
                      DomainError);
    REQUIRE_THROWS_AS(integrate_geodesic_numeric(b0, h, p, 1.0, 64),
                      OutOfDomain);
    // h = 0 is a fixed point
    const BilinearField still = integrate_geodesic_numeric(
        b0, TangentField::zero(kOnePoint, 1), p, 3.0, 8);
    REQUIRE((still.mats[0] - id).norm() == 0.0);
}

TEST_CASE("geodesic equation residual and christoffel consistency") {
    InstanceRng rng(405);
    for (int n = 2; n <= 3; ++n) {
        const MetricParams p(n == 2 ? 1.0 : -0.8, n);
        const Mesh mesh({1.0});
        const BilinearField b0 = rng.bilinear_field(mesh, n);
        const TangentField h =
            scale_direction(b0, rng.tangent_field(mesh, n), 1.0);
        const double m = domain_time(b0, h, p).m_h;
        const double t0 = 0.4 * std::min(m, 2.0);
        const double eps = 1e-4;

        // second derivative by central differences
        const auto at = [&](double t) { return geodesic_exp(b0, h, p, t); };
        const BilinearField bm = at(t0 - eps), bc = at(t0), bp = at(t0 + eps);
        const FiberMatrix btt =
            (bp.mats[0] - 2.0 * bc.mats[0] + bm.mats[0]) / (eps * eps);
        const TangentField vel = geodesic_velocity(b0, h, p, t0);
        const FiberMatrix gamma =
            christoffel_point(bc.mats[0], vel.mats[0], vel.mats[0], p);
        REQUIRE((btt - gamma).norm() <= 1e-5 * std::max(1.0, gamma.norm()));

        // velocity itself against finite differences
        const FiberMatrix fd_vel = (bp.mats[0] - bm.mats[0]) / (2.0 * eps);
        REQUIRE((vel.mats[0] - fd_vel).norm() <=
                1e-6 * std::max(1.0, fd_vel.norm()));

        // Gamma(h,h) = second derivative at 0: one-sided 4-point stencil
        const BilinearField b1 = at(eps), b2 = at(2 * eps), b3 = at(3 * eps);
        const FiberMatrix btt0 = (2.0 * b0.mats[0] - 5.0 * b1.mats[0] +
                                  4.0 * b2.mats[0] - b3.mats[0]) /
                                 (eps * eps);
        const FiberMatrix gamma0 =
            christoffel_point(b0.mats[0], h.mats[0], h.mats[0], p);
        REQUIRE((btt0 - gamma0).norm() <= 1e-5 * std::max(1.0, gamma0.norm()));
    }
}

TEST_CASE("blow-up consistency for all four set classes") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    struct Case {
        FiberMatrix H;
        double alpha;
        double frac;  // distance to m_h; close enough to see the collapse,
                      // far enough that the state is still representable
    };
    const double ea = -1.0 + std::sqrt(2.0), eb = -1.0 - std::sqrt(2.0);
    const std::vector<Case> cases = {
        {(-id).eval(), 1.0, 1e-6},        // Z
        {diag2(-1.5, -0.5), -1.0, 1e-2},  // G
        {diag2(ea, eb), -1.0, 1e-4},      // E
        {diag2(1, -1), -1.0, 1e-3},       // L
    };
    for (const auto& c : cases) {
        const MetricParams p(c.alpha, 2);
        const BilinearField b0 = field_of(id);
        const TangentField h = tangent_of(c.H);
        const double m = domain_time(b0, h, p).m_h;
        REQUIRE(std::isfinite(m));
        const double t = m * (1.0 - c.frac);
        // p has a simple (or double) root at m_h, so it vanishes at least
        // linearly in the remaining distance
        REQUIRE(blowup_poly(c.H, p, t) < 50.0 * c.frac);
        REQUIRE(blowup_poly(c.H, p, t) <
                0.1 * blowup_poly(c.H, p, 0.5 * m));
        const BilinearField bt = geodesic_exp(b0, h, p, t);
        const double det = std::abs(bt.mats[0].determinant());
        const double norm = bt.mats[0].norm();
        REQUIRE((det < 1e-3 || det > 1e6 || norm > 1e2));
    }
}

TEST_CASE("exp/log round trips") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    const BilinearField b0 = field_of(id);

    // log of the base point is zero
    const TangentField z = log_map(b0, b0, MetricParams(1.0, 2));
    REQUIRE(z.mats[0].norm() <= 1e-12);

    // inverts the conformal example
    const TangentField back =
        log_map(b0, field_of((2.25 * id).eval()), MetricParams(0.8, 2));
    REQUIRE((back.mats[0] - id).norm() <= 1e-12);

    // inverts the traceless example
    const MetricParams p1(1.0, 2);
    const BilinearField b1 = geodesic_exp(b0, tangent_of(diag2(1, -1)), p1, 1.0);
    const TangentField h1 = log_map(b0, b1, p1);
    REQUIRE((h1.mats[0] - diag2(1, -1)).norm() <= 1e-8);

    InstanceRng rng(406);
    for (int n = 1; n <= 3; ++n) {
        for (double alpha : {-1.0, 1.0 / n, 1.0}) {
            const MetricParams p(alpha, n);
            const Mesh mesh = rng.mesh(2);
            const BilinearField base = rng.bilinear_field(mesh, n);
            const TangentField h =
                scale_direction(base, rng.tangent_field(mesh, n), 0.5);
            const BilinearField target = geodesic_exp(base, h, p, 1.0);
            const TangentField rec = log_map(base, target, p);
            for (size_t x = 0; x < rec.mats.size(); ++x)
                REQUIRE((rec.mats[x] - h.mats[x]).norm() <=
                        1e-8 * std::max(1.0, h.mats[x].norm()));
        }
    }

    // past the arctan branch crossing
    const FiberMatrix Hc = diag2(-5.0, 1.0);
    const MetricParams pc(1.0, 2);
    const TangentField hc = tangent_of((1.2 * Hc).eval());
    const BilinearField bc = geodesic_exp(b0, hc, pc, 1.0);
    const TangentField rc = log_map(b0, bc, pc);
    REQUIRE((rc.mats[0] - 1.2 * Hc).norm() <= 1e-8 * Hc.norm());

    // nilpotent traceless part (tr H0^2 = 0 with H0 != 0)
    const FiberMatrix Hn = mat2(0, 1, 0, 0);
    const BilinearField bn = geodesic_exp(b0, tangent_of(Hn), pc, 1.0);
    const TangentField rn = log_map(b0, bn, pc);
    REQUIRE((rn.mats[0] - Hn).norm() <= 1e-10);
}

TEST_CASE("log_map error cases") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    const BilinearField b0 = field_of(id);
    const MetricParams p(1.0, 2);

    // eigenvalue on the negative real axis
    REQUIRE_THROWS_AS(log_map(b0, field_of(diag2(-1.0, -2.0)), p),
                      EigenvalueOnCut);

    // too-far traceless target: outside the arctan image
    REQUIRE_THROWS_AS(
        log_map(b0, field_of(diag2(std::exp(9.0), std::exp(-9.0))), p),
        NotInImage);
}

TEST_CASE("discrete energy") {
    const FiberMatrix id = FiberMatrix::Identity(2, 2);
    const MetricParams p(1.0, 2);

    // constant curve
    std::vector<BilinearField> constant(5, field_of(id));
    REQUIRE(discrete_energy(constant, 0.25, p) == Catch::Approx(0.0));

    REQUIRE_THROWS_AS(discrete_energy({field_of(id), field_of(id)}, 0.5, p),
                      DomainError);

    // geodesics have constant speed: E = (T/2) G_{b0}(h,h); also stable
    // under refinement
    InstanceRng rng(407);
    const Mesh mesh({1.0});
    const BilinearField b0 = rng.bilinear_field(mesh, 2);
    const TangentField h = scale_direction(b0, rng.tangent_field(mesh, 2), 0.8);
    const double m = domain_time(b0, h, p).m_h;
    const double T = 0.5 * std::min(m, 2.0);
    auto sample = [&](int N) {
        std::vector<BilinearField> curve;
        for (int i = 0; i <= N; ++i)
            curve.push_back(geodesic_exp(b0, h, p, T * i / N));
        return curve;
    };
    const double e100 = discrete_energy(sample(100), T / 100, p);
    const double e200 = discrete_energy(sample(200), T / 200, p);
    REQUIRE(std::abs(e100 - e200) <= 1e-4 * std::abs(e200));
    const double speed = metric_G_alpha(b0, h, h, p);
    REQUIRE(e200 == Catch::Approx(0.5 * T * speed).epsilon(1e-4));

    // a non-affine reparameterization with the same endpoints costs more
    const int N = 200;
    std::vector<BilinearField> repar;
    for (int i = 0; i <= N; ++i) {
        const double u = static_cast<double>(i) / N;
        const double phi = u + 0.2 * u * (1.0 - u);
        repar.push_back(geodesic_exp(b0, h, p, T * phi));
    }
    const double er = discrete_energy(repar, T / N, p);
    REQUIRE(er > e200 * 1.001);
}

TEST_CASE("first variation: geodesics are energy-critical") {
    InstanceRng rng(408);
    const MetricParams p(1.0, 2);
    const Mesh mesh({1.0});
    const BilinearField b0 = rng.bilinear_field(mesh, 2);
    const TangentField h = scale_direction(b0, rng.tangent_field(mesh, 2), 0.6);
    const double T = 1.0;
    const int N = 200;

    std::vector<BilinearField> curve;
    for (int i = 0; i <= N; ++i)
        curve.push_back(geodesic_exp(b0, h, p, T * i / N));
    const double E = discrete_energy(curve, T / N, p);

    for (int rep = 0; rep < 3; ++rep) {
        const FiberMatrix w = rng.matrix(2);
        auto perturbed = [&](double s) {
            std::vector<BilinearField> c;
            for (int i = 0; i <= N; ++i) {
                const double bump = std::sin(M_PI * i / N);
                c.push_back(
                    BilinearField(mesh, {curve[i].mats[0] + s * bump * w}));
            }
            return discrete_energy(c, T / N, p);
        };
        const double eps = 1e-5;
        const double deriv = (perturbed(eps) - perturbed(-eps)) / (2 * eps);
        REQUIRE(std::abs(deriv) <= 1e-4 * (1.0 + std::abs(E)));
    }
}
