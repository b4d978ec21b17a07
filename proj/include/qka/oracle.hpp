#pragma once

// Brute-force validators. They avoid the code paths they check: symmetric
// 3x3 spectra come from plain Jacobi rotations, PSD-ness from
// principal minors, and Omega from dense projectors and dense structure
// matrices instead of the cached blocks of Subspace.

#include "qka/catalog.hpp"
#include "qka/error.hpp"
#include "qka/quaternion.hpp"
#include "qka/subspace.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

namespace qka::oracle {

struct GridSpec {
    int resolution{50};
    double tolerance{1e-10};
    std::uint64_t seed{1};
};

/// Eigenvalues of a symmetric 3x3 matrix, descending, by cyclic Jacobi
/// rotations. Slower than a closed form but keeps full accuracy at repeated
/// roots, where the trigonometric formula loses about half the digits.
inline std::array<double, 3> sym3_eigenvalues(const Eigen::Matrix3d& m) {
    double a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * (m(i, j) + m(j, i));
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        const double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if (off <= 1e-34 * diag || off == 0.0) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int r = 0; r < 3; ++r) {
                    const double arp = a[r][p], arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (int r = 0; r < 3; ++r) {
                    const double apr = a[p][r], aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
    }
    std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

struct PsdResult {
    bool psd{false};
    int rank{0};
};

/// PSD decision by eigenvalues, cross-checked against principal minors.
inline PsdResult psd_oracle(const Eigen::Matrix3d& m, double threshold = 1e-10) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidArgument("matrix is not symmetric");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const auto ev = sym3_eigenvalues(m);
    const bool by_eig = ev[2] >= -threshold * scale;

    bool by_minor = true;
    for (int i = 0; i < 3; ++i) by_minor = by_minor && m(i, i) >= -threshold * scale;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            by_minor = by_minor && m(i, i) * m(j, j) - m(i, j) * m(i, j) >= -threshold * scale * scale;
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    by_minor = by_minor && det >= -threshold * scale * scale * scale;

    if (by_eig != by_minor) throw NumericalFailure("eigenvalue and minor criteria disagree");
    PsdResult r;
    r.psd = by_eig;
    if (r.psd)
        for (double e : ev) r.rank += e > threshold * scale ? 1 : 0;
    return r;
}

/// |det G - closed form| with x_i = cos(phi_i).
inline double det_formula_check(const AngleTriple& a, int eps) {
    const GramMatrix g = gram_matrix(a, eps);
    const double det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) -
                       g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0)) +
                       g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
    const double x1 = a.cos(0), x2 = a.cos(1), x3 = a.cos(2), e = eps;
    const double num = (e + x1 - x2 - x3) * (-e + x1 + x2 - x3) * (-e + x1 - x2 + x3) * (e + x1 + x2 + x3);
    const double den = (1 - x1 * x1) * (1 - x2 * x2) * (1 - x3 * x3);
    return std::abs(det - num / den);
}

/// Omega(v) from the dense projector and dense structure matrices.
inline Eigen::Matrix3d omega_dense(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
    const int n = static_cast<int>(basis.rows() / 4);
    const Eigen::MatrixXd proj = basis * basis.transpose();
    Eigen::MatrixXd p(basis.rows(), 3);
    for (int b = 0; b < 3; ++b) {
        Eigen::Vector3d u = Eigen::Vector3d::Zero();
        u(b) = 1.0;
        p.col(b) = proj * (structure_matrix(u, n) * v);
    }
    return p.transpose() * p;
}

/// Sorted cos^2 spectrum of Omega at a random unit vector of span(basis).
inline std::array<double, 3> sampled_spectrum(const Eigen::MatrixXd& basis, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd x(basis.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
    return sym3_eigenvalues(omega_dense(basis, basis * x.normalized()));
}

/// Max deviation of the sorted cos^2 values between V and T.V over random T.
inline double invariance_oracle(const Subspace& V, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto ref = sampled_spectrum(V.basis(), rng);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const GroupElement g = random_group_element(V.n(), seed * 7919 + static_cast<std::uint64_t>(t));
        const Eigen::MatrixXd moved = g.real_matrix() * V.basis();
        const auto s = sampled_spectrum(moved, rng);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(s[i] - ref[i]));
    }
    return worst;
}

/// Dimension constraints on the triple from the rank of the distribution
/// v -> span{P1 v, P2 v, P3 v} on the unit sphere of V.
inline bool steenrod_oracle(const Subspace& V, int samples = 20, std::uint64_t seed = 5) {
    std::mt19937_64 rng(seed);
    const auto first = sampled_spectrum(V.basis(), rng);
    auto right = [](double c2) { return c2 <= 1e-8; };
    const double l1 = first[0], l2 = first[1], l3 = first[2];  // cos^2, descending
    const int k = V.k();
    const int expected = (right(l1) ? 0 : 1) + (right(l2) ? 0 : 1) + (right(l3) ? 0 : 1);

    if (k >= 5 && k % 2 == 1 && expected != 0) return false;
    if (k % 4 == 2 && !(right(l2) && right(l3))) return false;
    if (k == 3 && !(right(l3) && std::abs(l1 - l2) <= 1e-8)) return false;
    if (k == 1 && expected != 0) return false;

    for (int s = 0; s < samples; ++s) {
        const auto ev = sampled_spectrum(V.basis(), rng);
        int rank = 0;
        for (double e : ev) rank += right(e) ? 0 : 1;
        if (rank != expected) return false;
    }
    return true;
}

/// Constraint check for a claimed (k, triple) pair without a subspace.
inline bool steenrod_admits(int k, const AngleTriple& t) {
    auto right = [&](int i) { return t.is_right(i); };
    if (k >= 5 && k % 2 == 1) return right(0) && right(1) && right(2);
    if (k == 1) return right(0) && right(1) && right(2);
    if (k % 4 == 2) return right(1) && right(2);
    if (k == 3) return right(2) && std::abs(t.cos2(0) - t.cos2(1)) <= 1e-8;
    return true;
}

}  // namespace qka::oracle
