#pragma once

// Real subspaces of H^n, the projections P_J = pi_V o J, the Kahler angle
// map Omega and its spectra.
//
// A Subspace caches M_b = B^T J_b B (b = 0,1,2, standard triple) where B is
// the orthonormal basis. For v = B x in V:
//   P_b v = B M_b x,   Omega(v)_ab = (M_a x) . (M_b x).
// In a canonical basis with rotation R, Omega' = R^T Omega R.

#include "qka/error.hpp"
#include "qka/quaternion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace qka {

namespace tol {
inline constexpr double orthonormal = 1e-10;
inline constexpr double spread = 1e-8;
inline constexpr double rank = 1e-8;
inline constexpr double membership = 1e-9;
inline constexpr double unit = 1e-12;
/// cos^2 at or below this is read as a right angle on measured data
inline constexpr double right_angle_cos2 = 1e-8;
/// |cos| at or below this is a right angle on input parameters
inline constexpr double right_angle_cos = 1e-12;
}  // namespace tol

/// Sorted triple 0 <= phi1 <= phi2 <= phi3 <= pi/2, stored by cosines
/// (descending). Cosines are the primary representation: every region
/// predicate is linear in them and arccos loses precision near 0.
class AngleTriple {
public:
    AngleTriple() : cos_{0.0, 0.0, 0.0} {}

    static AngleTriple from_cos(double c1, double c2, double c3) {
        std::array<double, 3> c{c1, c2, c3};
        for (double& x : c) {
            if (!(x >= -tol::right_angle_cos && x <= 1.0 + 1e-12))
                throw InvalidArgument("cosines must lie in [0, 1]");
            x = std::clamp(x, 0.0, 1.0);
            if (x <= tol::right_angle_cos) x = 0.0;
        }
        if (c[0] + 1e-12 < c[1] || c[1] + 1e-12 < c[2])
            throw InvalidArgument("angles must be sorted: phi1 <= phi2 <= phi3");
        return AngleTriple(c);
    }

    static AngleTriple from_angles(double p1, double p2, double p3) {
        constexpr double half_pi = std::numbers::pi / 2.0;
        for (double p : {p1, p2, p3})
            if (!(p >= -1e-12 && p <= half_pi + 1e-12)) throw InvalidArgument("angles must lie in [0, pi/2]");
        if (p1 > p2 + 1e-12 || p2 > p3 + 1e-12) throw InvalidArgument("angles must be sorted: phi1 <= phi2 <= phi3");
        return from_cos(std::cos(std::max(p1, 0.0)), std::cos(std::max(p2, 0.0)), std::cos(std::max(p3, 0.0)));
    }

    /// From measured squared cosines in any order (eigenvalues of Omega).
    static AngleTriple from_cos2(std::array<double, 3> l) {
        std::sort(l.begin(), l.end(), std::greater<>());
        std::array<double, 3> c{};
        for (int i = 0; i < 3; ++i) c[i] = std::sqrt(std::clamp(l[i], 0.0, 1.0));
        return AngleTriple(c);
    }

    static AngleTriple uniform(double phi) { return from_angles(phi, phi, phi); }

    double cos(int i) const { return cos_.at(i); }
    double cos2(int i) const { return cos_.at(i) * cos_.at(i); }
    double phi(int i) const { return std::acos(cos_.at(i)); }
    std::array<double, 3> cosines() const { return cos_; }
    std::array<double, 3> angles() const { return {phi(0), phi(1), phi(2)}; }

    bool is_right(int i, double cos2_tol = tol::right_angle_cos2) const { return cos2(i) <= cos2_tol; }
    int non_right_count(double cos2_tol = tol::right_angle_cos2) const {
        int r = 0;
        for (int i = 0; i < 3; ++i) r += is_right(i, cos2_tol) ? 0 : 1;
        return r;
    }

    double max_cos2_deviation(const AngleTriple& o) const {
        double d = 0.0;
        for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(cos2(i) - o.cos2(i)));
        return d;
    }

    /// Measured triple with near-right angles set to pi/2 and near-zero
    /// angles set to 0.
    AngleTriple snapped() const {
        std::array<double, 3> c = cos_;
        for (double& x : c) {
            if (x * x <= tol::right_angle_cos2) x = 0.0;
            if (x * x >= 1.0 - 1e-12) x = 1.0;
        }
        return AngleTriple(c);
    }

private:
    explicit AngleTriple(std::array<double, 3> c) : cos_(c) {}
    std::array<double, 3> cos_;
};

using OmegaMatrix = Eigen::Matrix3d;

struct ConstancyReport {
    AngleTriple triple;
    double max_spread{0.0};
    int samples{0};
    bool constant{false};
};

class Subspace {
public:
    /// basis: 4n x k with orthonormal columns (checked to 1e-10).
    Subspace(int n, Eigen::MatrixXd basis) : n_(n), basis_(std::move(basis)) {
        if (n < 1) throw DimensionError("ambient dimension must be positive");
        if (basis_.rows() != 4 * n) throw DimensionError("basis must have 4n rows");
        if (basis_.cols() < 1 || basis_.cols() > 4 * n) throw DimensionError("subspace dimension must lie in 1..4n");
        const Eigen::MatrixXd g = basis_.transpose() * basis_;
        const double defect = (g - Eigen::MatrixXd::Identity(k(), k())).cwiseAbs().maxCoeff();
        if (defect > tol::orthonormal) throw InvalidArgument("basis columns are not orthonormal");
        for (int b = 0; b < 3; ++b) {
            Eigen::Vector3d e = Eigen::Vector3d::Zero();
            e(b) = 1.0;
            const Eigen::MatrixXd jb = detail::right_mult_columns(detail::structure_quaternion(e), basis_);
            m_[b] = basis_.transpose() * jb;
        }
    }

    /// Orthonormalize a 4n x m spanning matrix (thin QR). Throws when the
    /// columns are numerically dependent.
    static Subspace from_matrix(const Eigen::MatrixXd& span) {
        if (span.cols() < 1 || span.rows() % 4 != 0 || span.rows() == 0)
            throw DimensionError("spanning matrix must be 4n x m with m >= 1");
        const int n = static_cast<int>(span.rows() / 4);
        if (span.cols() > span.rows()) throw InvalidArgument("more vectors than the real dimension: rank deficient");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= 1e-10 * std::max(1.0, s(0)))
            throw InvalidArgument("spanning vectors are numerically dependent");
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(span.rows(), span.cols());
        // one reorthogonalization pass
        Eigen::HouseholderQR<Eigen::MatrixXd> qr2(q);
        q = qr2.householderQ() * Eigen::MatrixXd::Identity(span.rows(), span.cols());
        Subspace out(n, q);
        const double resid = (span - out.basis_ * (out.basis_.transpose() * span)).norm();
        if (resid > 1e-10 * std::max(1.0, span.norm())) throw NumericalFailure("orthonormalized basis does not span the input");
        return out;
    }

    static Subspace from_spanning(const std::vector<HVector>& vectors) {
        if (vectors.empty()) throw InvalidArgument("need at least one spanning vector");
        const int n = vectors.front().n();
        Eigen::MatrixXd span(4 * n, static_cast<Eigen::Index>(vectors.size()));
        for (std::size_t c = 0; c < vectors.size(); ++c) {
            if (vectors[c].n() != n) throw DimensionError("spanning vectors live in different H^n");
            span.col(static_cast<Eigen::Index>(c)) = vectors[c].coords();
        }
        return from_matrix(span);
    }

    int n() const { return n_; }
    int k() const { return static_cast<int>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const { return basis_; }
    Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

    /// B^T J_b B for the standard triple (b = 0,1,2).
    const Eigen::MatrixXd& m_block(int b) const { return m_.at(b); }

    /// B^T J_i B for the i-th element of an arbitrary canonical basis.
    Eigen::MatrixXd m_block(const CanonicalBasis& basis, int i) const {
        const Eigen::Vector3d a = basis.axis(i);
        return a(0) * m_[0] + a(1) * m_[1] + a(2) * m_[2];
    }

    bool contains(const HVector& v, double rel = tol::membership) const {
        if (v.n() != n_) return false;
        const Eigen::VectorXd r = v.coords() - basis_ * (basis_.transpose() * v.coords());
        return r.norm() <= rel * v.norm();
    }

    Eigen::VectorXd coordinates(const HVector& v) const {
        if (v.n() != n_) throw DimensionError("vector and subspace live in different H^n");
        return basis_.transpose() * v.coords();
    }

    HVector vector(const Eigen::VectorXd& x) const { return HVector(Eigen::VectorXd(basis_ * x)); }

    /// Uniform unit vector of V in basis coordinates.
    Eigen::VectorXd sample_coordinates(std::mt19937_64& rng) const {
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::VectorXd x(k());
        double nrm = 0.0;
        while (nrm < 1e-8) {
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
            nrm = x.norm();
        }
        return x / nrm;
    }

    /// Omega in the standard triple for coordinates x (|x| = 1).
    OmegaMatrix omega_coords(const Eigen::VectorXd& x) const {
        Eigen::MatrixXd y(k(), 3);
        for (int b = 0; b < 3; ++b) y.col(b) = m_[b] * x;
        return y.transpose() * y;
    }

private:
    int n_;
    Eigen::MatrixXd basis_;
    std::array<Eigen::MatrixXd, 3> m_;
};

namespace detail {

/// Eigenvalues of a symmetric 3x3 matrix, descending, with eigenvectors.
inline std::pair<Eigen::Vector3d, Eigen::Matrix3d> sym3_eigen(const Eigen::Matrix3d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    Eigen::Vector3d vals = es.eigenvalues().reverse();
    Eigen::Matrix3d vecs = es.eigenvectors().rowwise().reverse();
    return {vals, vecs};
}

inline std::array<double, 3> descending(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }

inline void require_unit_member(const Subspace& V, const HVector& v) {
    if (v.n() != V.n()) throw DimensionError("vector and subspace live in different H^n");
    if (std::abs(v.norm() - 1.0) > tol::unit) throw InvalidArgument("vector must have unit norm");
    if (!V.contains(v)) throw InvalidArgument("vector does not lie in the subspace");
}

inline Eigen::Matrix3d proper(Eigen::Matrix3d r) {
    if (r.determinant() < 0.0) r.col(2) = -r.col(2);
    return r;
}

}  // namespace detail

/// pi_V o J_i as a dense 4n x 4n matrix.
inline Eigen::MatrixXd p_operator(const Subspace& V, const CanonicalBasis& basis, int i) {
    if (i < 0 || i > 2) throw InvalidArgument("canonical basis index must be 0, 1 or 2");
    const Eigen::MatrixXd j = structure_matrix(basis.axis(i), V.n());
    return V.basis() * (V.basis().transpose() * j);
}

inline Eigen::MatrixXd p_operator(const Subspace& V, int i) { return p_operator(V, CanonicalBasis::standard(), i); }

/// Restriction of P_J to V in the basis of V (k x k, skew).
inline Eigen::MatrixXd p_restricted(const Subspace& V, const CanonicalBasis& basis, int i) {
    return V.m_block(basis, i);
}

inline OmegaMatrix omega(const Subspace& V, const HVector& v, const CanonicalBasis& basis = CanonicalBasis::standard()) {
    detail::require_unit_member(V, v);
    const OmegaMatrix w = V.omega_coords(V.coordinates(v));
    return basis.rotation().transpose() * w * basis.rotation();
}

/// Triple of v and a canonical basis diagonalizing Omega(v). With repeated
/// eigenvalues any diagonalizing basis is returned.
inline std::pair<AngleTriple, CanonicalBasis> vector_qka(const Subspace& V, const HVector& v) {
    const OmegaMatrix w = omega(V, v);
    auto [vals, vecs] = detail::sym3_eigen(w);
    return {AngleTriple::from_cos2(detail::descending(vals)), CanonicalBasis(detail::proper(vecs))};
}

inline ConstancyReport constancy_check(const Subspace& V, int samples = 500, std::uint64_t seed = 1,
                                       double tolerance = tol::spread) {
    if (samples < 2) throw InvalidArgument("constancy_check needs at least two samples");
    std::mt19937_64 rng(seed);
    ConstancyReport rep;
    rep.samples = samples;
    Eigen::Vector3d first;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = V.sample_coordinates(rng);
        const Eigen::Vector3d vals = detail::sym3_eigen(V.omega_coords(x)).first;
        if (s == 0) {
            first = vals;
            rep.triple = AngleTriple::from_cos2(detail::descending(vals));
        } else {
            rep.max_spread = std::max(rep.max_spread, (vals - first).cwiseAbs().maxCoeff());
        }
    }
    rep.constant = rep.max_spread <= tolerance;
    return rep;
}

struct JointBasis {
    CanonicalBasis basis;
    double residual{0.0};
};

namespace detail {

inline double off_mass(const std::vector<Eigen::Matrix3d>& mats) {
    double s = 0.0;
    for (const auto& a : mats)
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                if (p != q) s += a(p, q) * a(p, q);
    return s;
}

/// Jacobi joint diagonalization of symmetric 3x3 matrices. Returns the
/// accumulated rotation; mats are overwritten with R^T A R.
inline Eigen::Matrix3d joint_diagonalize(std::vector<Eigen::Matrix3d>& mats, int max_sweeps = 200) {
    Eigen::Matrix3d acc = Eigen::Matrix3d::Identity();
    double mass = off_mass(mats);
    for (int sweep = 0; sweep < max_sweeps && mass > 0.0; ++sweep) {
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                // new a_pq = w . h with w = (cos 2t, sin 2t), h = (a_pq, (a_pp - a_qq)/2)
                Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
                for (const auto& a : mats) {
                    const Eigen::Vector2d h(a(p, q), 0.5 * (a(p, p) - a(q, q)));
                    s += h * h.transpose();
                }
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
                Eigen::Vector2d w = es.eigenvectors().col(0);
                if (w(0) < 0.0) w = -w;  // prefer the smallest rotation
                const double t = 0.5 * std::atan2(w(1), w(0));
                const double c = std::cos(t), sn = std::sin(t);
                Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
                g(p, p) = c;
                g(q, p) = -sn;
                g(p, q) = sn;
                g(q, q) = c;
                for (auto& a : mats) a = g.transpose() * a * g;
                acc = acc * g;
            }
        const double next = off_mass(mats);
        const bool stalled = mass - next < 1e-14;
        mass = next;
        if (stalled) break;
    }
    return acc;
}

}  // namespace detail

/// Common canonical basis approximately diagonalizing Omega over sampled
/// unit vectors. residual = sqrt(mean off-diagonal squared mass).
inline JointBasis joint_canonical_basis(const Subspace& V, int samples = 64, std::uint64_t seed = 7) {
    if (samples < 1) throw InvalidArgument("joint_canonical_basis needs at least one sample");
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Matrix3d> mats;
    mats.reserve(samples);
    for (int s = 0; s < samples; ++s) mats.push_back(V.omega_coords(V.sample_coordinates(rng)));
    Eigen::Matrix3d r = detail::joint_diagonalize(mats);

    Eigen::Vector3d diag = Eigen::Vector3d::Zero();
    for (const auto& a : mats) diag += a.diagonal();
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return diag(a) > diag(b); });
    Eigen::Matrix3d sorted;
    for (int c = 0; c < 3; ++c) sorted.col(c) = r.col(order[c]);

    const double residual = std::sqrt(detail::off_mass(mats) / samples);
    return {CanonicalBasis(detail::proper(sorted)), residual};
}

namespace detail {

/// P_i / cos(phi_i) on V (k x k), checked to be orthogonal with square -Id.
inline Eigen::MatrixXd pbar_from_cos(const Subspace& V, const CanonicalBasis& basis, int i, double c) {
    if (i < 0 || i > 2) throw InvalidArgument("canonical basis index must be 0, 1 or 2");
    if (c * c <= tol::right_angle_cos2) throw InvalidArgument("pbar undefined for a right angle");
    const Eigen::MatrixXd p = V.m_block(basis, i) / c;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(V.k(), V.k());
    const double orth = (p.transpose() * p - id).cwiseAbs().maxCoeff();
    const double sq = (p * p + id).cwiseAbs().maxCoeff();
    if (orth > 1e-9 || sq > 1e-9)
        throw InvalidArgument("subspace is not invariant under the normalized projection");
    return p;
}

}  // namespace detail

inline Eigen::MatrixXd pbar_operator(const Subspace& V, const CanonicalBasis& basis, int i, double phi) {
    if (std::abs(std::cos(phi)) <= tol::right_angle_cos) throw InvalidArgument("pbar undefined for phi = pi/2");
    return detail::pbar_from_cos(V, basis, i, std::cos(phi));
}

/// Common rank of [P1 v, P2 v, P3 v] over sampled unit v. Singular values
/// are the square roots of the eigenvalues of Omega; a direction counts
/// when its squared singular value exceeds the rank tolerance.
inline int distribution_rank(const Subspace& V, int samples = 50, std::uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    int common = -1;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = V.sample_coordinates(rng);
        Eigen::MatrixXd y(V.k(), 3);
        for (int b = 0; b < 3; ++b) y.col(b) = V.m_block(b) * x;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(y);
        int r = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            r += svd.singularValues()(i) * svd.singularValues()(i) > tol::rank ? 1 : 0;
        if (common < 0) common = r;
        else if (r != common) throw NumericalFailure("distribution rank varies: angle is not constant");
    }
    return common;
}

inline bool is_h_orthogonal(const Subspace& V, const Subspace& W, double tolerance = 1e-10) {
    if (V.n() != W.n()) throw DimensionError("subspaces live in different H^n");
    double worst = (V.basis().transpose() * W.basis()).cwiseAbs().maxCoeff();
    for (const auto& q : {Quaternion::i(), Quaternion::j(), Quaternion::k()}) {
        const Eigen::MatrixXd jw = detail::right_mult_columns(q, W.basis());
        worst = std::max(worst, (V.basis().transpose() * jw).cwiseAbs().maxCoeff());
    }
    return worst <= tolerance;
}

/// T . V
inline Subspace transform(const GroupElement& t, const Subspace& V) {
    if (t.n() != V.n()) throw DimensionError("group element and subspace live in different H^n");
    Eigen::MatrixXd b = t.real_matrix() * V.basis();
    // isometry; re-orthonormalize only against round-off
    return Subspace::from_matrix(b);
}

}  // namespace qka
