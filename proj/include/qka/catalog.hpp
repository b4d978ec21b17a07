#pragma once

// Constructors for constant-angle subspaces: the classical families, the
// 3- and 4-dimensional families built from a Gram matrix, and H-orthogonal
// sums of 4-dimensional blocks sharing one canonical basis.
//
// All constructions put e0 on the first quaternionic axis of a block and the
// auxiliary vectors f_j on the following real axes, so the blocks are exact
// up to round-off and deterministic.

#include "qka/error.hpp"
#include "qka/quaternion.hpp"
#include "qka/subspace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qka {

enum class Family {
    totally_real,
    totally_complex,
    quaternionic,
    im_h_line,
    cka_plane_sum,
    complexified_cka,
    v3,
    v4,
    sum_type,
};

inline std::string_view family_name(Family f) {
    switch (f) {
        case Family::totally_real: return "totally_real";
        case Family::totally_complex: return "totally_complex";
        case Family::quaternionic: return "quaternionic";
        case Family::im_h_line: return "im_h_line";
        case Family::cka_plane_sum: return "cka_plane_sum";
        case Family::complexified_cka: return "complexified_cka";
        case Family::v3: return "v3";
        case Family::v4: return "v4";
        case Family::sum_type: return "sum_type";
    }
    return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
    for (Family f : {Family::totally_real, Family::totally_complex, Family::quaternionic, Family::im_h_line,
                     Family::cka_plane_sum, Family::complexified_cka, Family::v3, Family::v4, Family::sum_type})
        if (family_name(f) == s) return f;
    return std::nullopt;
}

/// Parameters of one construction. `angles` is always the full declared
/// triple; `k` is read only by the classical families.
struct FamilySpec {
    Family family{Family::totally_real};
    AngleTriple angles{};
    int sign{+1};
    int k{0};
    int lplus{0};
    int lminus{0};
    int n{0};
};

using GramMatrix = Eigen::Matrix3d;

struct Admissibility {
    bool exists{false};
    int gram_rank{0};  // 0 when the triple does not exist
};

namespace detail {

inline void require_sign(int eps) {
    if (eps != 1 && eps != -1) throw InvalidArgument("sign must be +1 or -1");
}

inline double sine_of(double c) { return std::sqrt(std::max(0.0, 1.0 - c * c)); }

inline bool near(double a, double b, double t = tol::right_angle_cos) { return std::abs(a - b) <= t; }

/// c1 + c2 - eps*c3
inline double boundary_sum(const AngleTriple& a, int eps) { return a.cos(0) + a.cos(1) - eps * a.cos(2); }

}  // namespace detail

inline GramMatrix gram_matrix(const AngleTriple& a, int eps) {
    detail::require_sign(eps);
    std::array<double, 3> c = a.cosines(), s{};
    for (int i = 0; i < 3; ++i) s[i] = detail::sine_of(c[i]);
    if (s[0] <= 1e-12) throw InvalidArgument("Gram matrix is singular for phi1 = 0");
    GramMatrix g = GramMatrix::Identity();
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, m = (i + 2) % 3;
        g(i, j) = g(j, i) = (eps * c[m] - c[i] * c[j]) / (s[i] * s[j]);
    }
    return g;
}

inline Admissibility admissible(const AngleTriple& a, int eps) {
    detail::require_sign(eps);
    if (detail::sine_of(a.cos(0)) <= 1e-12) throw InvalidArgument("admissibility is undefined for phi1 = 0");
    const double t = detail::boundary_sum(a, eps);
    if (t > 1.0 + 1e-12) return {false, 0};
    return {true, std::abs(t - 1.0) <= 1e-12 ? 2 : 3};
}

/// Pivoted outer-product Cholesky of a PSD matrix. Returns L (rows in the
/// original order, one column per accepted pivot) with G = L L^T; pivots
/// below `clamp` end the factorization.
inline Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& g, double clamp = 1e-12) {
    const Eigen::Index m = g.rows();
    Eigen::MatrixXd a = g;
    std::vector<Eigen::VectorXd> cols;
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    for (Eigen::Index step = 0; step < m; ++step) {
        Eigen::Index p = -1;
        for (Eigen::Index i = 0; i < m; ++i)
            if (!used[static_cast<std::size_t>(i)] && (p < 0 || a(i, i) > a(p, p))) p = i;
        if (p < 0 || a(p, p) <= clamp) break;
        Eigen::VectorXd col = a.col(p) / std::sqrt(a(p, p));
        for (Eigen::Index i = 0; i < m; ++i)
            if (used[static_cast<std::size_t>(i)]) col(i) = 0.0;
        a -= col * col.transpose();
        used[static_cast<std::size_t>(p)] = true;
        cols.push_back(col);
    }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) l.col(static_cast<Eigen::Index>(c)) = cols[c];
    for (Eigen::Index i = 0; i < m; ++i)
        if (a(i, i) < -1e-9) throw Inadmissible("Gram matrix is not positive semi-definite");
    return l;
}

namespace detail {

inline HVector real_axis(int n, int slot) { return HVector::axis(n, slot); }

inline HVector j(int b, const HVector& v) {
    static const std::array<Quaternion, 3> q{Quaternion::i(), Quaternion::j(), Quaternion{0.0, 0.0, 0.0, -1.0}};
    return v * q.at(b);
}

/// Exact orthonormal family: keep the vectors as given (no re-orthogonalization,
/// so coordinates stay meaningful).
inline Subspace exact_subspace(int n, const std::vector<HVector>& vs) {
    Eigen::MatrixXd b(4 * n, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c) b.col(static_cast<Eigen::Index>(c)) = vs[c].coords();
    return Subspace(n, b);
}

/// Place a subspace of H^m into H^n starting at quaternionic axis `offset`.
inline Eigen::MatrixXd embed(const Subspace& v, int n, int offset) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4 * n, v.k());
    b.middleRows(4 * offset, 4 * v.n()) = v.basis();
    return b;
}

inline double check_open_angle(double phi, const char* what) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!(phi > 1e-12 && phi < half_pi - 1e-12)) throw Inadmissible(std::string(what) + " needs phi in (0, pi/2)");
    return phi;
}

}  // namespace detail

inline Subspace construct_totally_real(int k, int n) {
    if (k < 1 || k > n) throw Inadmissible("totally real subspace needs 1 <= k <= n");
    std::vector<HVector> vs;
    for (int r = 0; r < k; ++r) vs.push_back(detail::real_axis(n, r));
    return detail::exact_subspace(n, vs);
}

inline Subspace construct_totally_complex(int k, int n) {
    if (k < 2 || k % 2 != 0 || k > 2 * n) throw Inadmissible("totally complex subspace needs k = 2l <= 2n");
    std::vector<HVector> vs;
    for (int r = 0; r < k / 2; ++r) {
        const HVector e = detail::real_axis(n, r);
        vs.push_back(e);
        vs.push_back(detail::j(0, e));
    }
    return detail::exact_subspace(n, vs);
}

inline Subspace construct_quaternionic(int k, int n) {
    if (k < 4 || k % 4 != 0 || k > 4 * n) throw Inadmissible("quaternionic subspace needs k = 4l <= 4n");
    std::vector<HVector> vs;
    for (int r = 0; r < k / 4; ++r) {
        const HVector e = detail::real_axis(n, r);
        vs.push_back(e);
        for (int b = 0; b < 3; ++b) vs.push_back(detail::j(b, e));
    }
    return detail::exact_subspace(n, vs);
}

inline Subspace construct_im_h_line(int n) {
    if (n < 1) throw Inadmissible("needs n >= 1");
    const HVector e = detail::real_axis(n, 0);
    return detail::exact_subspace(n, {detail::j(0, e), detail::j(1, e), detail::j(2, e)});
}

/// Sum of planes of constant Kahler angle phi w.r.t. J1: triple (phi, pi/2, pi/2).
inline Subspace construct_cka_plane_sum(double phi, int k, int n) {
    detail::check_open_angle(phi, "constant Kahler angle family");
    if (k < 2 || k % 2 != 0 || k / 2 > n / 2) throw Inadmissible("plane sum needs k = 2l <= 2*floor(n/2)");
    const double c = std::cos(phi), s = std::sin(phi);
    std::vector<HVector> vs;
    for (int r = 0; r < k / 2; ++r) {
        const HVector ea = detail::real_axis(n, 2 * r), eb = detail::real_axis(n, 2 * r + 1);
        vs.push_back(ea);
        vs.push_back(c * detail::j(0, ea) + s * detail::j(0, eb));
    }
    return detail::exact_subspace(n, vs);
}

/// J1 W + W for W a plane sum of angle phi w.r.t. J2: triple (0, phi, phi).
inline Subspace construct_complexified_cka(double phi, int k, int n) {
    detail::check_open_angle(phi, "complexified family");
    if (k < 4 || k % 4 != 0 || k / 4 > n / 2) throw Inadmissible("complexified family needs k = 4l <= 4*floor(n/2)");
    const double c = std::cos(phi), s = std::sin(phi);
    std::vector<HVector> vs;
    for (int r = 0; r < k / 4; ++r) {
        const HVector ea = detail::real_axis(n, 2 * r), eb = detail::real_axis(n, 2 * r + 1);
        const HVector w = c * detail::j(1, ea) + s * detail::j(1, eb);
        vs.push_back(ea);
        vs.push_back(w);
        vs.push_back(detail::j(0, ea));
        vs.push_back(detail::j(0, w));
    }
    return detail::exact_subspace(n, vs);
}

inline int v3_min_dim(double phi, int eps) {
    detail::require_sign(eps);
    const double c = std::cos(phi);
    if (eps == 1 && detail::near(c, 1.0)) return 1;
    if (eps == -1 && detail::near(c, 0.5)) return 2;
    return 3;
}

/// Basis {e0, cos J1 e0 + sin J1 e1, cos J2 e0 + sin J2 e2} with
/// <e1, e2> = cos / (cos + eps). Triple (phi, phi, pi/2).
inline Subspace construct_v3(double phi, int eps, int n) {
    detail::require_sign(eps);
    constexpr double pi = std::numbers::pi;
    // radians typed with 7 decimals land within 1e-7 of pi/3 or pi/2
    constexpr double snap = 1e-7;
    if (eps == 1 && !(phi >= -snap && phi <= pi / 2 + snap)) throw Inadmissible("branch +1 needs phi in [0, pi/2]");
    if (eps == -1 && !(phi >= pi / 3 - snap && phi <= pi / 2 + snap))
        throw Inadmissible("branch -1 needs phi in [pi/3, pi/2]");
    for (double edge : {0.0, pi / 3, pi / 2})
        if (std::abs(phi - edge) <= snap) phi = edge;
    phi = std::clamp(phi, 0.0, pi / 2);
    const int need = v3_min_dim(phi, eps);
    if (n < need) throw Inadmissible("needs n >= " + std::to_string(need));

    double cs = std::cos(phi);
    if (std::abs(cs) <= tol::right_angle_cos) cs = 0.0;
    const double sn = std::sin(phi);
    const HVector e0 = detail::real_axis(n, 0);
    if (need == 1) return detail::exact_subspace(n, {e0, detail::j(0, e0), detail::j(1, e0)});

    const double g = cs / (cs + eps);
    const HVector e1 = detail::real_axis(n, 1);
    HVector e2 = -1.0 * e1;
    if (std::abs(g + 1.0) > 1e-12) e2 = g * e1 + std::sqrt(std::max(0.0, 1.0 - g * g)) * detail::real_axis(n, 2);
    return detail::exact_subspace(
        n, {e0, cs * detail::j(0, e0) + sn * detail::j(0, e1), cs * detail::j(1, e0) + sn * detail::j(1, e2)});
}

inline int v4_min_dim(const AngleTriple& a, int eps) {
    if (detail::sine_of(a.cos(0)) <= 1e-12) {
        if (a.cos(1) >= 1.0 - 1e-12) return 1;  // quaternionic line
        return 2;
    }
    const Admissibility ad = admissible(a, eps);
    if (!ad.exists) throw Inadmissible("angle triple is not admissible for this sign");
    return 1 + ad.gram_rank;
}

namespace detail {

/// The dimension-4 Gram construction without the rule that sign -1 needs
/// phi3 != pi/2.
inline Subspace construct_v4_raw(const AngleTriple& a, int eps, int n) {
    require_sign(eps);
    if (sine_of(a.cos(0)) <= 1e-12) throw InvalidArgument("phi1 = 0 has no Gram construction");
    const Admissibility ad = admissible(a, eps);
    if (!ad.exists) {
        throw Inadmissible("inadmissible: cos1 + cos2 " + std::string(eps > 0 ? "-" : "+") +
                           " cos3 = " + std::to_string(boundary_sum(a, eps)) + " > 1");
    }
    if (n < 1 + ad.gram_rank) throw Inadmissible("needs n >= " + std::to_string(1 + ad.gram_rank));
    const Eigen::MatrixXd l = psd_cholesky(gram_matrix(a, eps));
    if (l.cols() > ad.gram_rank) throw NumericalFailure("Gram rank disagrees with the admissibility test");

    const HVector e0 = real_axis(n, 0);
    std::vector<HVector> vs{e0};
    for (int i = 0; i < 3; ++i) {
        HVector ei(n);
        for (Eigen::Index jx = 0; jx < l.cols(); ++jx) ei = ei + l(i, jx) * real_axis(n, 1 + static_cast<int>(jx));
        const double c = a.cos(i);
        vs.push_back(c * j(i, e0) + sine_of(c) * j(i, ei));
    }
    return exact_subspace(n, vs);
}

}  // namespace detail

/// Dimension-4 subspace with triple `a` and sign relation P1P2 = eps P3.
/// phi1 = 0 is routed to the classical (0, phi, phi) families.
inline Subspace construct_v4(const AngleTriple& a, int eps, int n) {
    detail::require_sign(eps);
    if (detail::sine_of(a.cos(0)) <= 1e-12) {
        if (eps == -1) throw Inadmissible("phi1 = 0 admits only sign +1");
        if (!detail::near(a.cos(1), a.cos(2), 1e-10)) throw Inadmissible("phi1 = 0 forces phi2 = phi3");
        if (a.cos(1) >= 1.0 - 1e-12) return construct_quaternionic(4, n);
        if (a.cos(1) <= tol::right_angle_cos) return construct_totally_complex(4, n);
        return construct_complexified_cka(a.phi(1), 4, n);
    }
    if (eps == -1 && a.cos(2) <= tol::right_angle_cos)
        throw Inadmissible("sign -1 needs phi3 != pi/2 (such triples carry sign +1)");
    return detail::construct_v4_raw(a, eps, n);
}

inline int sum_min_dim(const AngleTriple& a, int lplus, int lminus) {
    int need = 0;
    if (lplus > 0) need += lplus * v4_min_dim(a, 1);
    if (lminus > 0) need += lminus * v4_min_dim(a, -1);
    return need;
}

/// H-orthogonal sum of lplus blocks of sign +1 and lminus of sign -1, all
/// sharing the standard canonical basis.
inline Subspace construct_sum(const AngleTriple& a, int lplus, int lminus, int n) {
    if (lplus < 0 || lminus < 0 || lplus + lminus < 1) throw Inadmissible("need lplus + lminus >= 1");
    if (lminus > 0 && a.cos(2) <= tol::right_angle_cos) throw Inadmissible("sign -1 blocks need phi3 != pi/2");
    const int need = sum_min_dim(a, lplus, lminus);
    if (n < need) throw Inadmissible("needs n >= " + std::to_string(need));

    Eigen::MatrixXd b(4 * n, 4 * (lplus + lminus));
    int offset = 0, col = 0;
    for (int r = 0; r < lplus + lminus; ++r) {
        const int eps = r < lplus ? 1 : -1;
        const int m = v4_min_dim(a, eps);
        const Subspace block = construct_v4(a, eps, m);
        b.middleCols(col, 4) = detail::embed(block, n, offset);
        offset += m;
        col += 4;
    }
    return Subspace(n, b);
}

/// Declared triple of a classical family with parameter phi.
inline AngleTriple classical_triple(Family f, double phi = 0.0) {
    constexpr double h = std::numbers::pi / 2.0;
    switch (f) {
        case Family::totally_real: return AngleTriple::from_angles(h, h, h);
        case Family::totally_complex: return AngleTriple::from_angles(0.0, h, h);
        case Family::quaternionic: return AngleTriple::from_angles(0.0, 0.0, 0.0);
        case Family::im_h_line: return AngleTriple::from_angles(0.0, 0.0, h);
        case Family::cka_plane_sum: return AngleTriple::from_angles(phi, h, h);
        case Family::complexified_cka: return AngleTriple::from_angles(0.0, phi, phi);
        default: throw InvalidArgument("not a classical family");
    }
}

inline int classical_min_dim(Family f, int k) {
    switch (f) {
        case Family::totally_real: return k;
        case Family::totally_complex: return (k + 1) / 2;
        case Family::quaternionic: return (k + 3) / 4;
        case Family::im_h_line: return 1;
        case Family::cka_plane_sum: return 2 * ((k + 1) / 2);
        case Family::complexified_cka: return 2 * ((k + 3) / 4);
        default: throw InvalidArgument("not a classical family");
    }
}

inline Subspace construct_classical(const FamilySpec& s) {
    switch (s.family) {
        case Family::totally_real: return construct_totally_real(s.k, s.n);
        case Family::totally_complex: return construct_totally_complex(s.k, s.n);
        case Family::quaternionic: return construct_quaternionic(s.k, s.n);
        case Family::im_h_line:
            if (s.k != 0 && s.k != 3) throw Inadmissible("im_h_line has dimension 3");
            return construct_im_h_line(s.n);
        case Family::cka_plane_sum:
            if (!s.angles.is_right(1, tol::right_angle_cos) || !s.angles.is_right(2, tol::right_angle_cos))
                throw Inadmissible("plane sum triple must be (phi, pi/2, pi/2)");
            return construct_cka_plane_sum(s.angles.phi(0), s.k, s.n);
        case Family::complexified_cka:
            if (s.angles.cos(0) < 1.0 - 1e-12 || !detail::near(s.angles.cos(1), s.angles.cos(2), 1e-12))
                throw Inadmissible("complexified triple must be (0, phi, phi)");
            return construct_complexified_cka(s.angles.phi(1), s.k, s.n);
        default: throw InvalidArgument("not a classical family");
    }
}

/// Dimension of the subspace a spec produces.
inline int spec_dimension(const FamilySpec& s) {
    switch (s.family) {
        case Family::im_h_line:
        case Family::v3: return 3;
        case Family::v4: return 4;
        case Family::sum_type: return 4 * (s.lplus + s.lminus);
        default: return s.k;
    }
}

/// Triple the construction is expected to have.
inline AngleTriple declared_triple(const FamilySpec& s) {
    switch (s.family) {
        case Family::cka_plane_sum: return classical_triple(s.family, s.angles.phi(0));
        case Family::complexified_cka: return classical_triple(s.family, s.angles.phi(1));
        case Family::v3: return AngleTriple::from_cos(s.angles.cos(0), s.angles.cos(0), 0.0);
        case Family::v4:
        case Family::sum_type: return s.angles;
        default: return classical_triple(s.family);
    }
}

namespace detail {

inline double v3_phi(const FamilySpec& s) {
    if (!near(s.angles.cos(0), s.angles.cos(1), 1e-12) || !s.angles.is_right(2, tol::right_angle_cos))
        throw Inadmissible("v3 triple must be (phi, phi, pi/2)");
    return s.angles.phi(0);
}

}  // namespace detail

inline int min_quaternionic_dim(const FamilySpec& s) {
    switch (s.family) {
        case Family::v3: return v3_min_dim(detail::v3_phi(s), s.sign);
        case Family::v4: return v4_min_dim(s.angles, s.sign);
        case Family::sum_type: return sum_min_dim(s.angles, s.lplus, s.lminus);
        default: return classical_min_dim(s.family, s.family == Family::im_h_line ? 3 : s.k);
    }
}

inline Subspace construct(const FamilySpec& s) {
    switch (s.family) {
        case Family::v3: return construct_v3(detail::v3_phi(s), s.sign, s.n);
        case Family::v4: return construct_v4(s.angles, s.sign, s.n);
        case Family::sum_type: return construct_sum(s.angles, s.lplus, s.lminus, s.n);
        default: return construct_classical(s);
    }
}

}  // namespace qka
