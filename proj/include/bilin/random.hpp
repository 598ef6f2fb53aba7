#pragma once

// Seeded random instances for verification suites and tests. All entries
// are uniform in [-1,1]; structures are conditioned as b = Id + 0.3 S with
// S symmetric, which keeps them invertible at desk scale. The raw-bits
// uniform mapping makes streams identical across platforms, so a seed fully
// determines every generated instance.

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <random>
#include <vector>

#include "bilin/fields.hpp"
#include "bilin/fiber.hpp"

namespace bilin {

class InstanceRng {
public:
    explicit InstanceRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [-1, 1], derived from the top 53 bits.
    double uniform() {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return 2.0 * u - 1.0;
    }

    FiberMatrix matrix(int n) {
        FiberMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = uniform();
        return m;
    }

    FiberMatrix symmetric(int n) {
        const FiberMatrix m = matrix(n);
        return 0.5 * (m + m.transpose());
    }

    FiberMatrix skew(int n) {
        const FiberMatrix m = matrix(n);
        return 0.5 * (m - m.transpose());
    }

    /// Invertible structure b = Id + 0.3 S; redraws on the rare
    /// near-singular sample.
    FiberMatrix bilinear_matrix(int n) {
        for (;;) {
            const FiberMatrix b =
                FiberMatrix::Identity(n, n) + 0.3 * symmetric(n);
            if (is_invertible(b, 1e-6)) return b;
        }
    }

    /// Symmetric positive definite g = Id + 0.3 S (redrawn until safely
    /// positive).
    FiberMatrix spd_matrix(int n) {
        for (;;) {
            const FiberMatrix g =
                FiberMatrix::Identity(n, n) + 0.3 * symmetric(n);
            Eigen::SelfAdjointEigenSolver<FiberMatrix> es(
                g, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() > 0.05) return g;
        }
    }

    Mesh mesh(int points) {
        std::vector<double> w(points);
        for (double& wi : w) wi = 1.0 + 0.5 * (uniform() + 1.0);  // in [1,2]
        return Mesh(std::move(w));
    }

    BilinearField bilinear_field(const Mesh& m, int n) {
        std::vector<FiberMatrix> mats(m.point_count());
        for (auto& mx : mats) mx = bilinear_matrix(n);
        return BilinearField(m, std::move(mats));
    }

    BilinearField riemannian_field(const Mesh& m, int n) {
        std::vector<FiberMatrix> mats(m.point_count());
        for (auto& mx : mats) mx = spd_matrix(n);
        return BilinearField(m, std::move(mats));
    }

    TangentField tangent_field(const Mesh& m, int n) {
        std::vector<FiberMatrix> mats(m.point_count());
        for (auto& mx : mats) mx = matrix(n);
        return TangentField(m, std::move(mats));
    }

    TangentField symmetric_tangent_field(const Mesh& m, int n) {
        std::vector<FiberMatrix> mats(m.point_count());
        for (auto& mx : mats) mx = symmetric(n);
        return TangentField(m, std::move(mats));
    }

private:
    std::mt19937_64 gen_;
};

/// Direction field scaled so that max_x ||b_x^{-1} h_x||_F <= bound.
inline TangentField scale_direction(const BilinearField& b, TangentField h,
                                    double bound) {
    double worst = 0.0;
    for (size_t x = 0; x < h.mats.size(); ++x) {
        const FiberMatrix H = b.mats[x].partialPivLu().solve(h.mats[x]);
        worst = std::max(worst, H.norm());
    }
    if (worst > bound) {
        const double s = bound / worst;
        for (auto& m : h.mats) m *= s;
    }
    return h;
}

}  // namespace bilin
