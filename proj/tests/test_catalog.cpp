#include "qka/catalog.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace qka;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double h = pi / 2;

AngleTriple cosines(double a, double b, double c) { return AngleTriple::from_cos(a, b, c); }

void expect_triple(const Subspace& V, const AngleTriple& want, double tol = 1e-10) {
    const ConstancyReport rep = constancy_check(V, 300, 4);
    EXPECT_TRUE(rep.constant) << "spread " << rep.max_spread;
    EXPECT_LT(rep.triple.max_cos2_deviation(want), tol);
}

// Gram matrix written from the entry formula G_{i,i+1} = (eps c_{i+2} - c_i c_{i+1}) / (s_i s_{i+1}).
Eigen::Matrix3d gram_oracle(double c1, double c2, double c3, int eps) {
    const double c[3] = {c1, c2, c3};
    double s[3];
    for (int i = 0; i < 3; ++i) s[i] = std::sqrt(1 - c[i] * c[i]);
    Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
    g(0, 1) = g(1, 0) = (eps * c[2] - c[0] * c[1]) / (s[0] * s[1]);
    g(1, 2) = g(2, 1) = (eps * c[0] - c[1] * c[2]) / (s[1] * s[2]);
    g(2, 0) = g(0, 2) = (eps * c[1] - c[2] * c[0]) / (s[2] * s[0]);
    return g;
}

}  // namespace

TEST(Family, NamesRoundTrip) {
    for (Family f : {Family::totally_real, Family::v3, Family::v4, Family::sum_type, Family::complexified_cka})
        EXPECT_EQ(parse_family(family_name(f)), f);
    EXPECT_FALSE(parse_family("v5").has_value());
}

TEST(Gram, MatchesEntryFormula) {
    for (int eps : {1, -1}) {
        const Eigen::Matrix3d g = gram_matrix(cosines(0.6, 0.3, 0.1), eps);
        EXPECT_LT((g - gram_oracle(0.6, 0.3, 0.1, eps)).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_THROW(gram_matrix(cosines(1.0, 0.5, 0.5), 1), InvalidArgument);
    EXPECT_THROW(gram_matrix(cosines(0.5, 0.5, 0.5), 0), InvalidArgument);
}

TEST(Gram, AdmissibilityAgreesWithSpectrum) {
    // eigenvalues of the oracle Gram matrix against c1 + c2 - eps c3 <= 1
    int checked = 0;
    for (int a = 1; a < 20; ++a)
        for (int b = 0; b <= a; ++b)
            for (int c = 0; c <= b; ++c)
                for (int eps : {1, -1}) {
                    const double c1 = a / 20.0, c2 = b / 20.0, c3 = c / 20.0;
                    const Eigen::Vector3d ev =
                        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(gram_oracle(c1, c2, c3, eps)).eigenvalues();
                    const Admissibility ad = admissible(cosines(c1, c2, c3), eps);
                    EXPECT_EQ(ev(0) >= -1e-10, ad.exists) << c1 << " " << c2 << " " << c3 << " " << eps;
                    if (ad.exists) {
                        const int rank = (ev.array() > 1e-10).count();
                        EXPECT_EQ(rank, ad.gram_rank) << c1 << " " << c2 << " " << c3 << " " << eps;
                    }
                    ++checked;
                }
    EXPECT_GT(checked, 2000);
}

TEST(Gram, BoundaryIsRankTwo) {
    // 0.5 + 0.3 + 0.2 = 1 for eps = -1
    const Admissibility ad = admissible(cosines(0.5, 0.3, 0.2), -1);
    EXPECT_TRUE(ad.exists);
    EXPECT_EQ(ad.gram_rank, 2);
    EXPECT_FALSE(admissible(cosines(0.9, 0.9, 0.1), -1).exists);
    EXPECT_FALSE(admissible(cosines(0.9, 0.9, 0.1), 1).exists);
    EXPECT_TRUE(admissible(cosines(0.5, 0.5, 0.1), 1).exists);
    EXPECT_FALSE(admissible(cosines(0.5, 0.5, 0.1), -1).exists);
}

TEST(PsdCholesky, ReconstructsAndDetectsRank) {
    const Eigen::Matrix3d g = gram_matrix(cosines(0.5, 0.3, 0.2), -1);
    const Eigen::MatrixXd l = psd_cholesky(g);
    EXPECT_EQ(l.cols(), 2);
    EXPECT_LT((l * l.transpose() - g).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
    bad(0, 1) = bad(1, 0) = 2.0;
    EXPECT_THROW(psd_cholesky(bad), Inadmissible);
}

TEST(Classical, Triples) {
    expect_triple(construct_totally_real(3, 4), cosines(0, 0, 0));
    expect_triple(construct_totally_complex(4, 2), cosines(1, 0, 0));
    expect_triple(construct_quaternionic(8, 2), cosines(1, 1, 1));
    expect_triple(construct_im_h_line(1), cosines(1, 1, 0));
    expect_triple(construct_cka_plane_sum(0.8, 4, 4), cosines(std::cos(0.8), 0, 0));
    expect_triple(construct_complexified_cka(0.8, 8, 4), cosines(1, std::cos(0.8), std::cos(0.8)));
}

TEST(Classical, DimensionLimits) {
    EXPECT_THROW(construct_totally_real(4, 3), Inadmissible);
    EXPECT_THROW(construct_totally_complex(3, 3), Inadmissible);
    EXPECT_THROW(construct_quaternionic(12, 2), Inadmissible);
    EXPECT_THROW(construct_cka_plane_sum(0.5, 4, 3), Inadmissible);
    EXPECT_THROW(construct_complexified_cka(0.5, 4, 1), Inadmissible);
    EXPECT_THROW(construct_cka_plane_sum(0.0, 2, 2), Inadmissible);
}

TEST(V3, TripleAndMinimalDimension) {
    for (double phi : {0.0, 0.4, pi / 3, 1.3, h}) expect_triple(construct_v3(phi, 1, 3), cosines(std::cos(phi), std::cos(phi), 0));
    for (double phi : {pi / 3, 1.2, h}) expect_triple(construct_v3(phi, -1, 3), cosines(std::cos(phi), std::cos(phi), 0));
    EXPECT_EQ(v3_min_dim(0.0, 1), 1);
    EXPECT_EQ(v3_min_dim(pi / 3, -1), 2);
    EXPECT_EQ(v3_min_dim(1.0, 1), 3);
    EXPECT_NO_THROW(construct_v3(pi / 3, -1, 2));
    EXPECT_THROW(construct_v3(1.2, -1, 2), Inadmissible);
    EXPECT_THROW(construct_v3(0.9, -1, 3), Inadmissible);
}

TEST(V3, SevenDigitRadiansAtTheBoundary) {
    // 1.0471975 is pi/3 to seven decimals
    const Subspace V = construct_v3(1.0471975, -1, 2);
    expect_triple(V, cosines(0.5, 0.5, 0));
}

TEST(V4, TripleBothSigns) {
    // arccos 0.3 = 1.2661036727794992
    EXPECT_NEAR(std::acos(0.3), 1.2661036727794992, 1e-15);
    for (int eps : {1, -1}) {
        const Subspace V = construct_v4(cosines(0.3, 0.3, 0.3), eps, 4);
        EXPECT_EQ(V.k(), 4);
        expect_triple(V, cosines(0.3, 0.3, 0.3));
    }
    expect_triple(construct_v4(cosines(0.6, 0.3, 0.0), 1, 4), cosines(0.6, 0.3, 0.0));
    expect_triple(construct_v4(cosines(0.5, 0.3, 0.2), -1, 3), cosines(0.5, 0.3, 0.2));
}

TEST(V4, RejectsInadmissible) {
    try {
        construct_v4(cosines(0.9, 0.9, 0.1), -1, 4);
        FAIL() << "expected Inadmissible";
    } catch (const Inadmissible& e) {
        EXPECT_NE(std::string(e.what()).find("1.9"), std::string::npos);
    }
    EXPECT_THROW(construct_v4(cosines(0.5, 0.3, 0.2), -1, 2), Inadmissible);
    EXPECT_THROW(construct_v4(cosines(0.5, 0.3, 0.0), -1, 4), Inadmissible);
}

TEST(V4, ZeroFirstAngleRoutes) {
    expect_triple(construct_v4(cosines(1, 1, 1), 1, 1), cosines(1, 1, 1));
    expect_triple(construct_v4(cosines(1, 0, 0), 1, 2), cosines(1, 0, 0));
    expect_triple(construct_v4(cosines(1, 0.4, 0.4), 1, 2), cosines(1, 0.4, 0.4));
    EXPECT_THROW(construct_v4(cosines(1, 0.5, 0.4), 1, 2), Inadmissible);
    EXPECT_THROW(construct_v4(cosines(1, 0.5, 0.5), -1, 2), Inadmissible);
}

TEST(V4, MinimalDimensionIsOnePlusGramRank) {
    EXPECT_EQ(v4_min_dim(cosines(0.3, 0.3, 0.3), 1), 4);
    EXPECT_EQ(v4_min_dim(cosines(0.5, 0.3, 0.2), -1), 3);
    EXPECT_EQ(v4_min_dim(cosines(1, 1, 1), 1), 1);
    EXPECT_EQ(v4_min_dim(cosines(1, 0.5, 0.5), 1), 2);
}

TEST(Sum, WitnessDimensions) {
    // (1,1) at cosines 1/3: 1/3 + 1/3 - 1/3 < 1 and 1/3 + 1/3 + 1/3 = 1, so 4 + 3 = 7
    const AngleTriple t = cosines(1.0 / 3, 1.0 / 3, 1.0 / 3);
    EXPECT_EQ(sum_min_dim(t, 1, 1), 7);
    const Subspace V = construct_sum(t, 1, 1, 7);
    EXPECT_EQ(V.k(), 8);
    expect_triple(V, t);
    EXPECT_THROW(construct_sum(t, 1, 1, 6), Inadmissible);
}

TEST(Sum, Validation) {
    EXPECT_THROW(construct_sum(cosines(0.3, 0.3, 0.3), 0, 0, 8), Inadmissible);
    EXPECT_THROW(construct_sum(cosines(0.5, 0.3, 0.0), 1, 1, 8), Inadmissible);
}

TEST(Spec, DispatchAndDeclaredTriple) {
    FamilySpec s;
    s.family = Family::sum_type;
    s.angles = cosines(0.5, 0.3, 0.1);
    s.lplus = 2;
    s.n = sum_min_dim(s.angles, 2, 0);
    EXPECT_EQ(min_quaternionic_dim(s), s.n);
    const Subspace V = construct(s);
    EXPECT_EQ(V.k(), spec_dimension(s));
    expect_triple(V, declared_triple(s));

    FamilySpec v;
    v.family = Family::v3;
    v.angles = AngleTriple::from_angles(1.2, 1.2, h);
    v.sign = -1;
    v.n = 3;
    EXPECT_EQ(construct(v).k(), 3);
    v.angles = AngleTriple::from_angles(1.0, 1.0, h);
    EXPECT_THROW(construct(v), Inadmissible);
    v.angles = AngleTriple::from_angles(1.2, 1.3, h);
    EXPECT_THROW(construct(v), Inadmissible);
}
