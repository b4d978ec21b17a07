#include "qka/subspace.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace qka;

namespace {

constexpr double pi = std::numbers::pi;

HVector axis(int n, int slot, const Quaternion& q = Quaternion::one()) { return HVector::axis(n, slot, q); }

// Omega(v)_ab = <pi_V J_a v, pi_V J_b v> with pi_V from a least-squares
// solve and J_a built from right multiplication of each slot.
Eigen::Matrix3d brute_omega(const Subspace& V, const HVector& v) {
    const Eigen::MatrixXd& B = V.basis();
    const std::array<Quaternion, 3> js{Quaternion::i(), Quaternion::j(), Quaternion(0, 0, 0, -1)};
    Eigen::MatrixXd p(4 * V.n(), 3);
    for (int a = 0; a < 3; ++a) {
        const Eigen::VectorXd jv = (v * js[a]).coords();
        const Eigen::VectorXd coef = (B.transpose() * B).ldlt().solve(B.transpose() * jv);
        p.col(a) = B * coef;
    }
    return p.transpose() * p;
}

Subspace random_span(int n, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(4 * n, k);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return Subspace::from_matrix(m);
}

HVector unit_member(const Subspace& V, std::mt19937_64& rng) { return V.vector(V.sample_coordinates(rng)); }

}  // namespace

TEST(AngleTriple, FactoriesAgree) {
    const AngleTriple a = AngleTriple::from_angles(0.3, 0.9, pi / 2);
    const AngleTriple b = AngleTriple::from_cos(std::cos(0.3), std::cos(0.9), 0.0);
    EXPECT_LT(a.max_cos2_deviation(b), 1e-15);
    EXPECT_TRUE(a.is_right(2));
    EXPECT_EQ(a.non_right_count(), 2);
    EXPECT_NEAR(a.phi(1), 0.9, 1e-14);
}

TEST(AngleTriple, Validation) {
    EXPECT_THROW(AngleTriple::from_cos(0.2, 0.5, 0.1), InvalidArgument);
    EXPECT_THROW(AngleTriple::from_cos(1.5, 0.5, 0.1), InvalidArgument);
    EXPECT_THROW(AngleTriple::from_angles(0.1, 0.2, 2.0), InvalidArgument);
    EXPECT_THROW(AngleTriple::from_angles(0.5, 0.2, 0.3), InvalidArgument);
}

TEST(AngleTriple, FromCos2SortsAndSnaps) {
    const AngleTriple t = AngleTriple::from_cos2({0.04, 0.81, 1e-12});
    EXPECT_NEAR(t.cos(0), 0.9, 1e-15);
    EXPECT_NEAR(t.cos(1), 0.2, 1e-15);
    EXPECT_TRUE(t.is_right(2));
    EXPECT_EQ(t.snapped().cos(2), 0.0);
}

TEST(Subspace, ConstructorChecks) {
    EXPECT_THROW(Subspace(2, Eigen::MatrixXd::Identity(7, 2)), DimensionError);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(8, 2);
    b(0, 0) = 1.0;
    b(0, 1) = 1.0;
    EXPECT_THROW(Subspace(2, b), InvalidArgument);
    Eigen::MatrixXd dep(8, 2);
    dep.col(0) = Eigen::VectorXd::Ones(8);
    dep.col(1) = 2.0 * Eigen::VectorXd::Ones(8);
    EXPECT_THROW(Subspace::from_matrix(dep), InvalidArgument);
}

TEST(Subspace, FromMatrixSpansInput) {
    const Subspace V = random_span(3, 5, 2);
    EXPECT_EQ(V.k(), 5);
    EXPECT_LT((V.basis().transpose() * V.basis() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Subspace, MembershipAndCoordinates) {
    const Subspace V = Subspace::from_spanning({axis(2, 0), axis(2, 1, Quaternion::j())});
    EXPECT_TRUE(V.contains(axis(2, 0)));
    EXPECT_FALSE(V.contains(axis(2, 0, Quaternion::i())));
    const HVector v = V.vector(Eigen::Vector2d(0.6, 0.8));
    EXPECT_LT((V.coordinates(v) - Eigen::Vector2d(0.6, 0.8)).norm(), 1e-15);
}

TEST(Omega, MatchesBruteForce) {
    std::mt19937_64 rng(5);
    for (std::uint64_t s = 1; s <= 6; ++s) {
        const Subspace V = random_span(3, static_cast<int>(2 + s), s);
        for (int t = 0; t < 20; ++t) {
            const HVector v = unit_member(V, rng);
            EXPECT_LT((omega(V, v) - brute_omega(V, v)).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Omega, RejectsNonUnitAndNonMember) {
    const Subspace V = Subspace::from_spanning({axis(2, 0), axis(2, 1)});
    EXPECT_THROW(omega(V, 2.0 * axis(2, 0)), InvalidArgument);
    EXPECT_THROW(omega(V, axis(2, 0, Quaternion::k())), InvalidArgument);
    EXPECT_THROW(omega(V, axis(3, 0)), DimensionError);
}

TEST(Omega, ChangeOfCanonicalBasis) {
    const Subspace V = random_span(2, 4, 9);
    std::mt19937_64 rng(1);
    const HVector v = unit_member(V, rng);
    const GroupElement t(random_unit_quaternion(4), QuatMatrix::identity(2));
    const CanonicalBasis b(induced_rotation(t));
    const Eigen::Matrix3d R = b.rotation();
    EXPECT_LT((omega(V, v, b) - R.transpose() * omega(V, v) * R).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Constancy, ClassicalExamples) {
    // quaternionic line: Omega = Id; totally real: Omega = 0
    const Subspace H = Subspace::from_spanning({axis(2, 0), axis(2, 0, Quaternion::i()), axis(2, 0, Quaternion::j()),
                                                axis(2, 0, Quaternion::k())});
    const ConstancyReport qh = constancy_check(H, 100, 1);
    EXPECT_TRUE(qh.constant);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(qh.triple.cos(i), 1.0, 1e-12);

    const Subspace R = Subspace::from_spanning({axis(3, 0), axis(3, 1), axis(3, 2)});
    const ConstancyReport qr = constancy_check(R, 100, 1);
    EXPECT_TRUE(qr.constant);
    EXPECT_EQ(qr.triple.non_right_count(), 0);
}

TEST(Constancy, KaehlerAnglePlane) {
    // span{e0, cos(phi) e0 i + sin(phi) e1}: triple (phi, pi/2, pi/2)
    for (double phi : {0.2, 0.7, 1.3}) {
        const HVector w = std::cos(phi) * axis(2, 0, Quaternion::i()) + std::sin(phi) * axis(2, 1);
        const Subspace V = Subspace::from_spanning({axis(2, 0), w});
        const ConstancyReport rep = constancy_check(V, 200, 2);
        EXPECT_TRUE(rep.constant);
        EXPECT_NEAR(rep.triple.cos2(0), std::cos(phi) * std::cos(phi), 1e-12);
        EXPECT_TRUE(rep.triple.is_right(1));
        EXPECT_EQ(distribution_rank(V), 1);
    }
}

TEST(Constancy, EveryRealPlaneIsConstant) {
    // for V = span{v, w}: Omega(x) = a a^T with a_b = <J_b v, w>, whatever x is
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const Subspace V = random_span(3, 2, s);
        const ConstancyReport rep = constancy_check(V, 200, 3);
        EXPECT_TRUE(rep.constant);
        Eigen::Vector3d a;
        for (int b = 0; b < 3; ++b) a(b) = V.m_block(b)(1, 0);
        EXPECT_NEAR(rep.triple.cos2(0), a.squaredNorm(), 1e-12);
        EXPECT_TRUE(rep.triple.is_right(1));
    }
}

TEST(Constancy, RandomThreeSpaceIsNotConstant) {
    const ConstancyReport rep = constancy_check(random_span(3, 3, 17), 200, 3);
    EXPECT_FALSE(rep.constant);
    EXPECT_GT(rep.max_spread, 1e-3);
    EXPECT_THROW(constancy_check(random_span(3, 2, 17), 1), InvalidArgument);
}

TEST(Constancy, Deterministic) {
    const Subspace V = random_span(3, 3, 21);
    const ConstancyReport a = constancy_check(V, 50, 9), b = constancy_check(V, 50, 9);
    EXPECT_EQ(a.max_spread, b.max_spread);
    EXPECT_EQ(a.triple.cosines(), b.triple.cosines());
}

TEST(VectorQka, DiagonalizesOmega) {
    const Subspace V = random_span(3, 4, 31);
    std::mt19937_64 rng(2);
    const HVector v = unit_member(V, rng);
    const auto [t, b] = vector_qka(V, v);
    const Eigen::Matrix3d w = omega(V, v, b);
    EXPECT_LT(std::abs(w(0, 1)) + std::abs(w(0, 2)) + std::abs(w(1, 2)), 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(w(i, i), t.cos2(i), 1e-12);
}

TEST(JointBasis, DiagonalizesCommonlyDiagonalFamily) {
    // a complex line in a rotated canonical basis: Omega(v) = diag(1,0,0) in it
    const GroupElement g(random_unit_quaternion(77), QuatMatrix::identity(2));
    const Subspace V0 = Subspace::from_spanning({axis(2, 0), axis(2, 0, Quaternion::i())});
    const Subspace V = transform(g, V0);
    const JointBasis jb = joint_canonical_basis(V);
    EXPECT_LT(jb.residual, 1e-12);
    std::mt19937_64 rng(3);
    const Eigen::Matrix3d w = omega(V, unit_member(V, rng), jb.basis);
    EXPECT_NEAR(w(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(w(1, 1) + w(2, 2), 0.0, 1e-12);
}

TEST(JointDiagonalize, OffMassDecreases) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::Matrix3d q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
    std::vector<Eigen::Matrix3d> mats;
    for (int s = 0; s < 10; ++s)
        mats.push_back(q * Eigen::Vector3d(g(rng), g(rng), g(rng)).asDiagonal() * q.transpose());
    std::vector<Eigen::Matrix3d> work = mats;
    const double before = detail::off_mass(work);
    const Eigen::Matrix3d r = detail::joint_diagonalize(work);
    EXPECT_GT(before, 1e-2);
    EXPECT_LT(detail::off_mass(work), 1e-20);
    EXPECT_LT((r.transpose() * mats[0] * r - work[0]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pbar, ComplexStructureOnComplexLine) {
    const Subspace V = Subspace::from_spanning({axis(2, 0), axis(2, 0, Quaternion::i())});
    const Eigen::MatrixXd p = pbar_operator(V, CanonicalBasis::standard(), 0, 0.0);
    EXPECT_LT((p * p + Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(pbar_operator(V, CanonicalBasis::standard(), 1, pi / 2), InvalidArgument);
    EXPECT_THROW(pbar_operator(V, CanonicalBasis::standard(), 1, 0.3), InvalidArgument);
}

TEST(HOrthogonal, DetectsOverlapThroughStructure) {
    const Subspace A = Subspace::from_spanning({axis(2, 0)});
    const Subspace B = Subspace::from_spanning({axis(2, 0, Quaternion::j())});
    const Subspace C = Subspace::from_spanning({axis(2, 1)});
    EXPECT_FALSE(is_h_orthogonal(A, B));
    EXPECT_TRUE(is_h_orthogonal(A, C));
}

TEST(Transform, PreservesTriple) {
    const HVector w = std::cos(0.5) * axis(3, 0, Quaternion::i()) + std::sin(0.5) * axis(3, 1);
    const Subspace V = Subspace::from_spanning({axis(3, 0), w});
    const AngleTriple base = constancy_check(V, 50, 1).triple;
    for (std::uint64_t s = 0; s < 10; ++s)
        EXPECT_LT(constancy_check(transform(random_group_element(3, s), V), 50, 1).triple.max_cos2_deviation(base),
                  1e-12);
}
