#pragma once

// Block factorization, (l+, l-) type, protohomogeneity and equivalence of
// constant-angle subspaces.

#include "qka/catalog.hpp"
#include "qka/error.hpp"
#include "qka/subspace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qka {

struct TypeSignature {
    int l_plus{0};
    int l_minus{0};
    friend bool operator==(const TypeSignature&, const TypeSignature&) = default;
    bool pure() const { return l_plus == 0 || l_minus == 0; }
};

enum class Answer { yes, no, unknown };

inline std::string_view answer_name(Answer a) {
    switch (a) {
        case Answer::yes: return "yes";
        case Answer::no: return "no";
        case Answer::unknown: return "unknown";
    }
    return "?";
}

struct Verdict {
    Answer value{Answer::unknown};
    std::string reason;
    double residual{0.0};  // joint-diagonalization residual when relevant
};

struct ClassifyOptions {
    int samples{500};
    int joint_samples{64};
    std::uint64_t seed{1};
};

namespace detail {

/// Measured data shared by the classification routines.
struct Analysis {
    ConstancyReport report;
    AngleTriple triple;  // snapped
    std::optional<JointBasis> joint;
};

inline Analysis analyze(const Subspace& V, const ClassifyOptions& o, bool want_joint) {
    Analysis a;
    a.report = constancy_check(V, o.samples, o.seed);
    a.triple = a.report.triple.snapped();
    if (want_joint) a.joint = joint_canonical_basis(V, o.joint_samples, o.seed + 17);
    return a;
}

inline void require_constant(const Analysis& a) {
    if (!a.report.constant)
        throw InvalidArgument("quaternionic Kahler angle is not constant (spread " +
                              std::to_string(a.report.max_spread) + ")");
}

inline void require_joint(const Analysis& a) {
    if (!a.joint || a.joint->residual >= 1e-8)
        throw NumericalFailure("no common canonical basis (residual " +
                               std::to_string(a.joint ? a.joint->residual : -1.0) + ")");
}

/// Normalized projections available for the measured triple. When phi3 is
/// a right angle but phi1, phi2 are not, the third is P1 P2.
inline std::vector<Eigen::MatrixXd> block_operators(const Subspace& V, const Analysis& a) {
    std::vector<Eigen::MatrixXd> ops;
    for (int i = 0; i < 3; ++i)
        if (!a.triple.is_right(i)) ops.push_back(pbar_from_cos(V, a.joint->basis, i, a.triple.cos(i)));
    if (ops.size() == 2) ops.push_back(ops[0] * ops[1]);
    return ops;
}

/// Orthonormal basis (columns) of the smallest subspace containing the
/// columns of `seed` and closed under `ops`. Works in V coordinates.
inline bool absorb(Eigen::MatrixXd& q, const Eigen::VectorXd& v) {
    Eigen::VectorXd w = v;
    for (int pass = 0; pass < 2; ++pass)
        if (q.cols() > 0) w -= q * (q.transpose() * w);
    const double nrm = w.norm();
    if (nrm <= 1e-6 * std::max(1.0, v.norm())) return false;
    q.conservativeResize(q.rows(), q.cols() + 1);
    q.col(q.cols() - 1) = w / nrm;
    return true;
}

inline void close_under(Eigen::MatrixXd& q, const std::vector<Eigen::MatrixXd>& ops) {
    for (Eigen::Index c = 0; c < q.cols(); ++c)
        for (const auto& op : ops) {
            const Eigen::VectorXd img = op * q.col(c);
            absorb(q, img);
        }
}

}  // namespace detail

/// Splits a constant-angle subspace of dimension 4l into l mutually
/// H-orthogonal 4-dimensional blocks, each invariant under the normalized
/// projections of a common canonical basis.
inline std::vector<Subspace> factorize(const Subspace& V, const ClassifyOptions& o = {}) {
    if (V.k() % 4 != 0) throw DimensionError("factorize needs dimension 4l");
    const detail::Analysis a = detail::analyze(V, o, true);
    detail::require_constant(a);
    detail::require_joint(a);
    const auto ops = detail::block_operators(V, a);

    const Eigen::Index k = V.k();
    Eigen::MatrixXd rest = Eigen::MatrixXd::Identity(k, k);
    std::vector<Subspace> blocks;
    while (rest.cols() > 0) {
        Eigen::MatrixXd q(k, 0);
        for (Eigen::Index c = 0; c < rest.cols() && q.cols() < 4; ++c) {
            if (detail::absorb(q, rest.col(c))) detail::close_under(q, ops);
        }
        if (q.cols() != 4) throw NumericalFailure("invariant block does not have dimension 4");
        blocks.emplace_back(V.n(), Eigen::MatrixXd(V.basis() * q));

        // deflate: orthonormal basis of rest minus the block
        const Eigen::MatrixXd r = rest - q * (q.transpose() * rest);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU);
        Eigen::Index keep = 0;
        while (keep < svd.singularValues().size() && svd.singularValues()(keep) > 0.5) ++keep;
        if (keep != rest.cols() - 4) throw NumericalFailure("deflation lost rank");
        rest = svd.matrixU().leftCols(keep);
    }
    return blocks;
}

/// (l+, l-): a quarter of the kernel dimensions of P1P2 - P3 and P1P2 + P3.
/// Triples with phi3 = pi/2 are of type (l, 0) by convention.
inline TypeSignature type_of(const Subspace& V, const ClassifyOptions& o = {}) {
    if (V.k() % 4 != 0) throw DimensionError("type is defined for dimension 4l");
    const int l = V.k() / 4;
    const detail::Analysis a = detail::analyze(V, o, true);
    detail::require_constant(a);
    if (a.triple.is_right(2)) return {l, 0};
    detail::require_joint(a);
    const auto ops = detail::block_operators(V, a);

    auto kernel_dim = [](const Eigen::MatrixXd& m) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto& s = svd.singularValues();
        const double cut = 1e-8 * std::max(s(0), 1e-300);
        int d = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i) d += (s(0) < 1e-12 || s(i) <= cut) ? 1 : 0;
        return d;
    };
    const Eigen::MatrixXd prod = ops[0] * ops[1];
    const int kp = kernel_dim(prod - ops[2]);
    const int km = kernel_dim(prod + ops[2]);
    if (kp % 4 != 0 || km % 4 != 0 || kp + km != V.k())
        throw NumericalFailure("kernel dimensions " + std::to_string(kp) + "/" + std::to_string(km) +
                               " are not a 4-block split");
    return {kp / 4, km / 4};
}

inline Verdict is_protohomogeneous(const Subspace& V, const ClassifyOptions& o = {}) {
    const bool block_case = V.k() % 4 == 0 && V.k() > 4;
    const detail::Analysis a = detail::analyze(V, o, block_case);
    if (!a.report.constant) return {Answer::no, "angle is not constant", 0.0};
    if (!block_case) return {Answer::yes, "constant angle in dimension " + std::to_string(V.k()), 0.0};
    if (a.joint->residual >= 1e-8)
        return {Answer::unknown, "constant angle but no common canonical basis", a.joint->residual};
    try {
        const TypeSignature t = type_of(V, o);
        if (t.pure())
            return {Answer::yes, "type (" + std::to_string(t.l_plus) + "," + std::to_string(t.l_minus) + ")",
                    a.joint->residual};
        return {Answer::no, "mixed type (" + std::to_string(t.l_plus) + "," + std::to_string(t.l_minus) + ")",
                a.joint->residual};
    } catch (const Error& e) {
        return {Answer::unknown, e.what(), a.joint->residual};
    }
}

namespace detail {

/// <e1, e2> reconstructed at base point x (V coordinates, unit) of a
/// 3-dimensional subspace with triple (phi, phi, pi/2).
inline double v3_theta(const Subspace& V, const Eigen::VectorXd& x, double c) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    auto [vals, vecs] = sym3_eigen(V.omega_coords(x));
    const CanonicalBasis cb(proper(vecs));
    const Eigen::VectorXd e0 = V.basis() * x;
    std::array<Eigen::VectorXd, 2> e;
    for (int i = 0; i < 2; ++i) {
        const Eigen::VectorXd pbar = V.basis() * (V.m_block(cb, i) * x) / c;
        const Eigen::VectorXd jp = right_mult_columns(cb.quaternion(i), pbar);
        e[i] = -(jp + c * e0) / s;
    }
    return e[0].dot(e[1]);
}

}  // namespace detail

/// Values of <e1, e2> at sampled base points; constant on a valid input.
inline std::vector<double> v3_theta_samples(const Subspace& V, int samples, std::uint64_t seed) {
    if (V.k() != 3) throw DimensionError("branch is defined for dimension 3");
    const ConstancyReport r = constancy_check(V, 50, seed);
    if (!r.constant) throw InvalidArgument("quaternionic Kahler angle is not constant");
    const AngleTriple t = r.triple.snapped();
    const double c = t.cos(0);
    if (t.is_right(0) || c >= 1.0 - 1e-12) throw InvalidArgument("branches merge for phi in {0, pi/2}");
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    for (int i = 0; i < samples; ++i) out.push_back(detail::v3_theta(V, V.sample_coordinates(rng), c));
    return out;
}

/// eps with <e1, e2> = cos/(cos + eps).
inline int branch_of_v3(const Subspace& V, std::uint64_t seed = 11) {
    const ConstancyReport r = constancy_check(V, 50, seed);
    const double c = r.triple.snapped().cos(0);
    const double theta = v3_theta_samples(V, 1, seed).front();
    if (std::abs(theta - c / (c + 1.0)) <= 1e-8) return 1;
    if (std::abs(theta - c / (c - 1.0)) <= 1e-8) return -1;
    throw NumericalFailure("reconstructed <e1,e2> = " + std::to_string(theta) + " matches neither branch");
}

inline Verdict are_equivalent(const Subspace& V, const Subspace& W, const ClassifyOptions& o = {}) {
    if (V.k() != W.k()) return {Answer::no, "dimensions differ"};
    if (V.n() != W.n()) return {Answer::no, "ambient spaces differ"};
    const detail::Analysis a = detail::analyze(V, o, false);
    const detail::Analysis b = detail::analyze(W, o, false);
    if (a.report.constant != b.report.constant) return {Answer::no, "only one has constant angle"};
    if (!a.report.constant) return {Answer::unknown, "neither has constant angle"};
    if (a.report.triple.max_cos2_deviation(b.report.triple) > 1e-8) return {Answer::no, "angle triples differ"};
    const AngleTriple& t = a.triple;

    if (V.k() == 3) {
        if (t.is_right(0) || t.cos(0) >= 1.0 - 1e-12) return {Answer::yes, "branches merge at this angle"};
        const int bv = branch_of_v3(V, o.seed), bw = branch_of_v3(W, o.seed);
        return bv == bw ? Verdict{Answer::yes, "same branch"} : Verdict{Answer::no, "different branches"};
    }
    if (V.k() % 4 == 0) {
        if (t.cos(0) >= 1.0 - 1e-12 || t.is_right(2)) return {Answer::yes, "triple determines the class"};
        try {
            const TypeSignature tv = type_of(V, o), tw = type_of(W, o);
            return tv == tw ? Verdict{Answer::yes, "same type"} : Verdict{Answer::no, "types differ"};
        } catch (const Error& e) {
            return {Answer::unknown, std::string("type unavailable: ") + e.what()};
        }
    }
    return {Answer::yes, "triple determines the class"};
}

}  // namespace qka
