#pragma once

// Data model for the discretized base manifold and for fields of bilinear
// structures / tangent vectors over it. The base manifold is a finite
// weighted point cloud: the weights absorb the coordinate volume, so every
// integral over M becomes a weighted sum. All formulas downstream are
// zeroth order in the base point, which is why no mesh connectivity exists.

#include <string>
#include <utility>
#include <vector>

#include "bilin/errors.hpp"
#include "bilin/fiber.hpp"

namespace bilin {

struct Mesh {
    std::vector<double> weights;       // one positive quadrature weight per point
    std::vector<std::string> labels;   // optional; empty or one per point

    Mesh() = default;
    explicit Mesh(std::vector<double> w, std::vector<std::string> l = {})
        : weights(std::move(w)), labels(std::move(l)) {
        if (weights.empty())
            throw ValidationError("Mesh: no points");
        for (double wi : weights)
            if (!(wi > 0.0) || !std::isfinite(wi))
                throw ValidationError("Mesh: weights must be positive finite");
        if (!labels.empty() && labels.size() != weights.size())
            throw ShapeError("Mesh: label count does not match point count");
    }

    int point_count() const { return static_cast<int>(weights.size()); }
};

inline bool same_mesh(const Mesh& a, const Mesh& b) {
    return a.weights == b.weights;
}

inline void require_same_mesh(const Mesh& a, const Mesh& b, const char* who) {
    if (!same_mesh(a, b))
        throw MeshMismatch(std::string(who) + ": fields on different meshes");
}

namespace detail {
inline int check_matrices(const Mesh& mesh,
                          const std::vector<FiberMatrix>& mats,
                          const char* who) {
    if (mats.size() != static_cast<size_t>(mesh.point_count()))
        throw ShapeError(std::string(who) + ": matrix count != point count");
    const int n = static_cast<int>(mats.front().rows());
    if (n < 1) throw ShapeError(std::string(who) + ": empty matrix");
    for (const auto& m : mats) {
        if (m.rows() != n || m.cols() != n)
            throw ShapeError(std::string(who) + ": inconsistent dimensions");
        if (!m.allFinite())
            throw ValidationError(std::string(who) + ": non-finite entries");
    }
    return n;
}
}  // namespace detail

/// A non-degenerate bilinear structure: one invertible n x n matrix per
/// mesh point. Immutable after construction.
struct BilinearField {
    Mesh mesh;
    std::vector<FiberMatrix> mats;
    int n = 0;

    BilinearField() = default;
    BilinearField(Mesh m, std::vector<FiberMatrix> ms)
        : mesh(std::move(m)), mats(std::move(ms)) {
        n = detail::check_matrices(mesh, mats, "BilinearField");
        for (const auto& bx : mats)
            if (!is_invertible(bx))
                throw ValidationError("BilinearField: singular matrix");
    }

    int point_count() const { return mesh.point_count(); }
};

/// A tangent vector to the space of structures: one n x n matrix per point.
/// Compact support is automatic on a finite mesh.
struct TangentField {
    Mesh mesh;
    std::vector<FiberMatrix> mats;
    int n = 0;

    TangentField() = default;
    TangentField(Mesh m, std::vector<FiberMatrix> ms)
        : mesh(std::move(m)), mats(std::move(ms)) {
        n = detail::check_matrices(mesh, mats, "TangentField");
    }

    static TangentField zero(const Mesh& m, int n) {
        std::vector<FiberMatrix> z(m.point_count(), FiberMatrix::Zero(n, n));
        return TangentField(m, std::move(z));
    }

    int point_count() const { return mesh.point_count(); }
};

/// Per point: sqrt|det b_x| times the quadrature weight at x.
inline std::vector<double> vol_density(const BilinearField& b) {
    std::vector<double> vol(b.mats.size());
    for (size_t x = 0; x < b.mats.size(); ++x) {
        const double det = b.mats[x].determinant();
        if (!is_invertible(b.mats[x]))
            throw DomainError("vol_density: singular structure");
        vol[x] = std::sqrt(std::abs(det)) * b.mesh.weights[x];
    }
    return vol;
}

}  // namespace bilin
