#pragma once

// Quaternions, vectors of H^n, the quaternionic structure and the
// Sp(1)Sp(n) action.
//
// H^n is a right quaternionic vector space. A vector is stored as 4n reals,
// slot r holding (w, x, y, z) of the r-th quaternionic coordinate. The real
// inner product is the dot product of those 4n numbers.
//
// The standard canonical basis of the quaternionic structure is
//   J1 = R_i,  J2 = R_j,  J3 = -R_k     (R_q v = v q).
// Right multiplications compose in reverse order, so with this sign
// J1 J2 = J3, J2 J3 = J1, J3 J1 = J2 hold literally.

#include "qka/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qka {

struct Quaternion {
    double w{0.0};
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    Quaternion normalized() const {
        const double s = norm();
        return {w / s, x / s, y / s, z / s};
    }
    bool is_unit(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }

    friend constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) {
        return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
                p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
                p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
                p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
    }
    friend constexpr Quaternion operator+(const Quaternion& p, const Quaternion& q) {
        return {p.w + q.w, p.x + q.x, p.y + q.y, p.z + q.z};
    }
    friend constexpr Quaternion operator-(const Quaternion& p, const Quaternion& q) {
        return {p.w - q.w, p.x - q.x, p.y - q.y, p.z - q.z};
    }
    friend constexpr Quaternion operator*(double s, const Quaternion& q) {
        return {s * q.w, s * q.x, s * q.y, s * q.z};
    }
    friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;

    /// Unit quaternion exp(u * angle / 2) for a unit imaginary axis u (x, y, z).
    static Quaternion rotation(const Eigen::Vector3d& axis, double angle) {
        const Eigen::Vector3d u = axis.normalized();
        const double s = std::sin(angle / 2.0);
        return {std::cos(angle / 2.0), s * u.x(), s * u.y(), s * u.z()};
    }
};

namespace detail {

/// 4x4 real matrix of right multiplication v -> v q on one quaternionic slot.
inline Eigen::Matrix4d right_mult_block(const Quaternion& q) {
    Eigen::Matrix4d m;
    // columns: images of 1, i, j, k
    const std::array<Quaternion, 4> units{Quaternion::one(), Quaternion::i(), Quaternion::j(),
                                          Quaternion::k()};
    for (int c = 0; c < 4; ++c) {
        const Quaternion r = units[c] * q;
        m.col(c) << r.w, r.x, r.y, r.z;
    }
    return m;
}

/// Imaginary quaternion of the structure J_u = u1 J1 + u2 J2 + u3 J3 written
/// in the standard basis, i.e. J_u = R_{sigma(u)}.
inline Quaternion structure_quaternion(const Eigen::Vector3d& u) {
    return {0.0, u(0), u(1), -u(2)};
}

inline Eigen::Vector3d structure_coordinates(const Quaternion& q) { return {q.x, q.y, -q.z}; }

/// Apply v -> v q slot-wise to every column of a 4n x m matrix.
inline Eigen::MatrixXd right_mult_columns(const Quaternion& q, const Eigen::MatrixXd& m) {
    if (m.rows() % 4 != 0) throw DimensionError("row count is not a multiple of 4");
    const Eigen::Matrix4d block = right_mult_block(q);
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); r += 4) out.middleRows(r, 4) = block * m.middleRows(r, 4);
    return out;
}

}  // namespace detail

/// A vector of H^n stored as 4n real coordinates.
class HVector {
public:
    HVector() = default;
    explicit HVector(int n) : coords_(Eigen::VectorXd::Zero(4 * checked(n))) {}
    explicit HVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
        if (coords_.size() == 0 || coords_.size() % 4 != 0)
            throw DimensionError("HVector needs 4n coordinates with n >= 1");
    }

    /// Unit real vector on the given quaternionic axis, times the quaternion q.
    static HVector axis(int n, int slot, const Quaternion& q = Quaternion::one()) {
        HVector v(n);
        v.set(slot, q);
        return v;
    }

    int n() const { return static_cast<int>(coords_.size() / 4); }
    const Eigen::VectorXd& coords() const { return coords_; }

    Quaternion operator[](int slot) const {
        const auto s = coords_.segment<4>(4 * slot);
        return {s(0), s(1), s(2), s(3)};
    }
    void set(int slot, const Quaternion& q) { coords_.segment<4>(4 * slot) << q.w, q.x, q.y, q.z; }

    double dot(const HVector& other) const {
        require_same_n(other);
        return coords_.dot(other.coords_);
    }
    double norm() const { return coords_.norm(); }

    /// Right scalar multiplication v q.
    HVector operator*(const Quaternion& q) const {
        return HVector(Eigen::VectorXd(detail::right_mult_columns(q, coords_)));
    }
    HVector operator+(const HVector& o) const {
        require_same_n(o);
        return HVector(Eigen::VectorXd(coords_ + o.coords_));
    }
    HVector operator-(const HVector& o) const {
        require_same_n(o);
        return HVector(Eigen::VectorXd(coords_ - o.coords_));
    }
    friend HVector operator*(double s, const HVector& v) { return HVector(Eigen::VectorXd(s * v.coords_)); }

private:
    static int checked(int n) {
        if (n < 1) throw DimensionError("quaternionic dimension must be positive");
        return n;
    }
    void require_same_n(const HVector& o) const {
        if (o.n() != n()) throw DimensionError("HVector dimension mismatch");
    }

    Eigen::VectorXd coords_;
};

/// Ordered triple (J1, J2, J3) of the quaternionic structure, encoded as the
/// rotation whose i-th column holds the coordinates of J_i in the standard
/// triple.
class CanonicalBasis {
public:
    CanonicalBasis() : rotation_(Eigen::Matrix3d::Identity()) {}
    explicit CanonicalBasis(const Eigen::Matrix3d& rotation, double tol = 1e-10) : rotation_(rotation) {
        const double orth = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        if (orth > tol || std::abs(rotation.determinant() - 1.0) > tol)
            throw InvalidArgument("canonical basis rotation must lie in SO(3)");
    }

    static CanonicalBasis standard() { return {}; }

    const Eigen::Matrix3d& rotation() const { return rotation_; }

    /// Coordinates of J_i (i in 0..2) in the standard triple.
    Eigen::Vector3d axis(int i) const { return rotation_.col(i); }

    /// The imaginary unit quaternion u with J_i = R_u.
    Quaternion quaternion(int i) const { return detail::structure_quaternion(axis(i)); }

private:
    Eigen::Matrix3d rotation_;
};

/// J v for J = right multiplication by the unit imaginary quaternion u.
inline HVector right_mult(const Quaternion& u, const HVector& v) {
    if (std::abs(u.w) > 1e-12 || !u.is_unit()) throw InvalidArgument("right_mult expects a unit imaginary quaternion");
    return v * u;
}

/// J_i v for the i-th element (0-based) of a canonical basis.
inline HVector right_mult(const CanonicalBasis& basis, int i, const HVector& v) {
    if (i < 0 || i > 2) throw InvalidArgument("canonical basis index must be 0, 1 or 2");
    return v * basis.quaternion(i);
}

/// J_u v for u in the 2-sphere of structure coordinates (standard triple).
inline HVector apply_structure(const Eigen::Vector3d& u, const HVector& v) {
    return v * detail::structure_quaternion(u);
}

/// Dense 4n x 4n real matrix of J_u.
inline Eigen::MatrixXd structure_matrix(const Eigen::Vector3d& u, int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    const Eigen::Matrix4d block = detail::right_mult_block(detail::structure_quaternion(u));
    for (int r = 0; r < n; ++r) m.block<4, 4>(4 * r, 4 * r) = block;
    return m;
}

/// n x n quaternionic matrix acting on the left of column vectors.
class QuatMatrix {
public:
    QuatMatrix() = default;
    explicit QuatMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {
        if (n < 1) throw DimensionError("quaternionic matrix size must be positive");
    }

    static QuatMatrix identity(int n) {
        QuatMatrix m(n);
        for (int r = 0; r < n; ++r) m(r, r) = Quaternion::one();
        return m;
    }

    int n() const { return n_; }
    Quaternion& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * n_ + c]; }
    const Quaternion& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * n_ + c]; }

    QuatMatrix adjoint() const {
        QuatMatrix a(n_);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) a(c, r) = (*this)(r, c).conj();
        return a;
    }

    friend QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
        if (a.n_ != b.n_) throw DimensionError("quaternionic matrix size mismatch");
        QuatMatrix m(a.n_);
        for (int r = 0; r < a.n_; ++r)
            for (int c = 0; c < a.n_; ++c) {
                Quaternion s;
                for (int t = 0; t < a.n_; ++t) s = s + a(r, t) * b(t, c);
                m(r, c) = s;
            }
        return m;
    }

    HVector apply(const HVector& v) const {
        if (v.n() != n_) throw DimensionError("matrix and vector sizes differ");
        HVector out(n_);
        for (int r = 0; r < n_; ++r) {
            Quaternion s;
            for (int c = 0; c < n_; ++c) s = s + (*this)(r, c) * v[c];
            out.set(r, s);
        }
        return out;
    }

    /// max |A*A - Id| over real components.
    double unitarity_defect() const {
        const QuatMatrix g = adjoint() * (*this);
        double worst = 0.0;
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) {
                const Quaternion d = g(r, c) - (r == c ? Quaternion::one() : Quaternion{});
                worst = std::max({worst, std::abs(d.w), std::abs(d.x), std::abs(d.y), std::abs(d.z)});
            }
        return worst;
    }

    friend bool operator==(const QuatMatrix&, const QuatMatrix&) = default;

private:
    int n_{0};
    std::vector<Quaternion> data_;
};

/// Element (q, A) of Sp(1)Sp(n) acting by v -> A v conj(q).
class GroupElement {
public:
    GroupElement(const Quaternion& q, QuatMatrix a) : q_(q), a_(std::move(a)) {
        if (!q_.is_unit(1e-12)) throw InvalidArgument("group element needs a unit quaternion");
        if (a_.unitarity_defect() > 1e-10) throw InvalidArgument("group element needs a quaternionic unitary matrix");
    }

    static GroupElement identity(int n) { return {Quaternion::one(), QuatMatrix::identity(n)}; }

    const Quaternion& q() const { return q_; }
    const QuatMatrix& matrix() const { return a_; }
    int n() const { return a_.n(); }

    HVector apply(const HVector& v) const {
        const HVector av = a_.apply(v);
        return av * q_.conj();
    }

    /// Dense 4n x 4n real matrix of the action.
    Eigen::MatrixXd real_matrix() const {
        const int n = a_.n();
        Eigen::MatrixXd m(4 * n, 4 * n);
        for (int c = 0; c < 4 * n; ++c) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(4 * n);
            e(c) = 1.0;
            m.col(c) = apply(HVector(e)).coords();
        }
        return m;
    }

    friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
        return {(a.q_ * b.q_).normalized(), a.a_ * b.a_};
    }

private:
    Quaternion q_;
    QuatMatrix a_;
};

inline HVector apply_group(const GroupElement& t, const HVector& v) {
    if (t.n() != v.n()) throw DimensionError("group element and vector live in different H^n");
    return t.apply(v);
}

/// Rotation R of the structure coordinates with T J_u T^-1 = J_{R u}.
/// Only the Sp(1) factor contributes.
inline Eigen::Matrix3d induced_rotation(const GroupElement& t) {
    const Quaternion& q = t.q();
    // standard rotation v -> q v conj(q) on Im H
    Eigen::Matrix3d rot;
    const std::array<Quaternion, 3> units{Quaternion::i(), Quaternion::j(), Quaternion::k()};
    for (int c = 0; c < 3; ++c) {
        const Quaternion r = q * units[c] * q.conj();
        rot.col(c) << r.x, r.y, r.z;
    }
    // structure coordinates differ from Im H coordinates by the sign of the k component
    const Eigen::Matrix3d flip = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
    return flip * rot * flip;
}

namespace detail {

/// Quaternionic inner product <a, b>_H = sum conj(a_r) b_r (right-linear in b).
inline Quaternion h_inner(const std::vector<Quaternion>& a, const std::vector<Quaternion>& b) {
    Quaternion s;
    for (std::size_t r = 0; r < a.size(); ++r) s = s + a[r].conj() * b[r];
    return s;
}

inline Quaternion normal_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    const double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
    return {w, x, y, z};
}

}  // namespace detail

/// Quaternionic unitary matrix from Gram-Schmidt on independent standard
/// normal quaternion entries. Deterministic for a fixed seed.
inline QuatMatrix random_unitary(int n, std::uint64_t seed) {
    if (n < 1) throw DimensionError("random_unitary needs n >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Quaternion>> cols(n, std::vector<Quaternion>(n));
    for (auto& col : cols)
        for (auto& e : col) e = detail::normal_quaternion(rng);

    for (int c = 0; c < n; ++c) {
        // two passes keep the columns orthogonal to working precision
        for (int pass = 0; pass < 2; ++pass)
            for (int p = 0; p < c; ++p) {
                const Quaternion h = detail::h_inner(cols[p], cols[c]);
                for (int r = 0; r < n; ++r) cols[c][r] = cols[c][r] - cols[p][r] * h;
            }
        double norm2 = 0.0;
        for (const auto& e : cols[c]) norm2 += e.norm2();
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& e : cols[c]) e = inv * e;
    }

    QuatMatrix a(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = cols[c][r];
    return a;
}

inline Quaternion random_unit_quaternion(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return detail::normal_quaternion(rng).normalized();
}

inline GroupElement random_group_element(int n, std::uint64_t seed) {
    // decorrelate the two factors
    return {random_unit_quaternion(seed ^ 0x9e3779b97f4a7c15ULL), random_unitary(n, seed)};
}

}  // namespace qka
