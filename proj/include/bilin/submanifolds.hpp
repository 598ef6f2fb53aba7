#pragma once

// Geodesic closedness of the pseudo-metric and non-degenerate-2-form
// submanifolds, signature tracking along geodesics, and the 2-form volume
// identities at n in {2,4}.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bilin/errors.hpp"
#include "bilin/fields.hpp"
#include "bilin/fiber.hpp"
#include "bilin/geodesics.hpp"

namespace bilin {

/// Number of negative eigenvalues of a symmetric invertible b.
inline int signature_of_pseudometric(const FiberMatrix& b,
                                     double tol = kSymTol) {
    if ((b.transpose() - b).norm() > tol * b.norm())
        throw NotSymmetric("signature_of_pseudometric: matrix not symmetric");
    const FiberMatrix sym = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<FiberMatrix> es(sym, Eigen::EigenvaluesOnly);
    const double scale = std::max(sym.norm(), 1e-300);
    int count = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (std::abs(lam) <= 1e-12 * scale)
            throw DomainError("signature_of_pseudometric: singular matrix");
        if (lam < 0.0) ++count;
    }
    return count;
}

enum class SubmanifoldKind { Symmetric, Skew };

/// Verdict is true iff the symmetry defect stays within tau_closed at every
/// sampled time and the signature trace is constant. signature_trace holds
/// one integer per time: the per-point signature when all mesh points agree,
/// -1 otherwise (Symmetric kind only; empty for Skew).
struct ClosureReport {
    std::vector<double> times;
    double max_symmetry_defect = 0.0;
    std::vector<int> signature_trace;
    bool verdict = false;
};

inline ClosureReport geodesic_closure_report(const BilinearField& b0,
                                             const TangentField& h,
                                             const MetricParams& p,
                                             SubmanifoldKind kind,
                                             const std::vector<double>& times,
                                             double tau_closed = 1e-10) {
    const double sigma = kind == SubmanifoldKind::Symmetric ? 1.0 : -1.0;
    const auto want = kind == SubmanifoldKind::Symmetric
                          ? SymmetryCharacter::Symmetric
                          : SymmetryCharacter::Skew;
    for (int x = 0; x < b0.point_count(); ++x) {
        if (symmetry_character(b0.mats[x], b0.mats[x]) != want)
            throw KindMismatch("geodesic_closure_report: b0 has wrong kind");
        if (symmetry_character(b0.mats[x], h.mats[x]) != want)
            throw KindMismatch("geodesic_closure_report: h has wrong kind");
    }
    const double m_h = domain_time(b0, h, p).m_h;
    for (double t : times)
        if (t < 0.0 || t >= m_h)
            throw OutOfDomain("geodesic_closure_report: time outside [0, m_h)");

    ClosureReport rep;
    rep.times = times;
    for (double t : times) {
        const BilinearField bt = geodesic_exp(b0, h, p, t);
        int common_sig = -2;
        for (int x = 0; x < bt.point_count(); ++x) {
            const FiberMatrix& m = bt.mats[x];
            const double defect =
                (m - sigma * m.transpose()).norm() / m.norm();
            rep.max_symmetry_defect =
                std::max(rep.max_symmetry_defect, defect);
            if (kind == SubmanifoldKind::Symmetric) {
                const int sig =
                    signature_of_pseudometric(0.5 * (m + m.transpose()));
                if (common_sig == -2)
                    common_sig = sig;
                else if (common_sig != sig)
                    common_sig = -1;
            }
        }
        if (kind == SubmanifoldKind::Symmetric)
            rep.signature_trace.push_back(common_sig);
    }
    const bool constant_sig =
        rep.signature_trace.empty() ||
        (rep.signature_trace.front() >= 0 &&
         std::all_of(rep.signature_trace.begin(), rep.signature_trace.end(),
                     [&](int s) { return s == rep.signature_trace.front(); }));
    rep.verdict = rep.max_symmetry_defect <= tau_closed && constant_sig;
    return rep;
}

// --- 2-form volume identities ------------------------------------------

/// Both sides of vol(omega) = (1/m!) |omega^m| and of
/// m phi ^ omega^{m-1} = (1/2) tr(omega^{-1} phi) omega^m, as top-degree
/// coefficients computed by explicit antisymmetrized expansion.
struct TwoFormIdentities {
    double vol_lhs = 0.0;    // (1/m!) |top coefficient of omega^m|
    double vol_rhs = 0.0;    // sqrt|det omega|
    double wedge_lhs = 0.0;  // m * top(phi ^ omega^{m-1})
    double wedge_rhs = 0.0;  // (1/2) tr(omega^{-1} phi) * top(omega^m)
};

namespace detail {

/// Top coefficient (value on (e_1,...,e_n)) of the wedge of m 2-forms:
/// (1/2^m) sum_{perm} sgn * prod_k w_k(perm(2k-1), perm(2k)).
inline double wedge_top(const std::vector<const FiberMatrix*>& forms) {
    const int m = static_cast<int>(forms.size());
    const int n = 2 * m;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    double total = 0.0;
    // enumerate permutations with parity tracked by inversion count
    std::sort(idx.begin(), idx.end());
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (idx[i] > idx[j]) ++inv;
        double term = (inv % 2 == 0) ? 1.0 : -1.0;
        for (int k = 0; k < m; ++k)
            term *= (*forms[k])(idx[2 * k], idx[2 * k + 1]);
        total += term;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return total / std::pow(2.0, m);
}

}  // namespace detail

inline TwoFormIdentities two_form_volume_identities(const FiberMatrix& omega,
                                                    const FiberMatrix& phi) {
    const int n = static_cast<int>(omega.rows());
    if (n != 2 && n != 4)
        throw UnsupportedDimension(
            "two_form_volume_identities: only n in {2,4}");
    if (phi.rows() != n || phi.cols() != n)
        throw ShapeError("two_form_volume_identities: dimension mismatch");
    const double tol = kSymTol;
    if ((omega.transpose() + omega).norm() > tol * omega.norm())
        throw NotSkew("two_form_volume_identities: omega not skew");
    if (phi.norm() > 0.0 &&
        (phi.transpose() + phi).norm() > tol * phi.norm())
        throw NotSkew("two_form_volume_identities: phi not skew");
    require_invertible(omega, "two_form_volume_identities");

    const int m = n / 2;
    std::vector<const FiberMatrix*> om(m, &omega);
    const double top_om = detail::wedge_top(om);

    std::vector<const FiberMatrix*> mixed(m);
    mixed[0] = &phi;
    for (int k = 1; k < m; ++k) mixed[k] = &omega;
    const double top_mixed = detail::wedge_top(mixed);

    double mfact = 1.0;
    for (int k = 2; k <= m; ++k) mfact *= k;

    TwoFormIdentities out;
    out.vol_lhs = std::abs(top_om) / mfact;
    out.vol_rhs = std::sqrt(std::abs(omega.determinant()));
    out.wedge_lhs = m * top_mixed;
    out.wedge_rhs =
        0.5 * omega.partialPivLu().solve(phi).trace() * top_om;
    return out;
}

}  // namespace bilin
