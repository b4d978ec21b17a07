#include "qka/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qka;
using json = nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("qka_test_" + name)).string();
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
    json j() const { return json::parse(out); }
};

Outcome construct(cli::ConstructArgs a) {
    std::ostringstream o, e;
    const int rc = cli::cmd_construct(a, o, e);
    return {rc, o.str(), e.str()};
}

Outcome classify(const std::string& path) {
    std::ostringstream o, e;
    const int rc = cli::cmd_classify({path, 1}, o, e);
    return {rc, o.str(), e.str()};
}

Outcome angles(const std::string& path) {
    std::ostringstream o, e;
    const int rc = cli::cmd_angles({path, 200, 1}, o, e);
    return {rc, o.str(), e.str()};
}

Outcome moduli(cli::ModuliArgs a) {
    std::ostringstream o, e;
    const int rc = cli::cmd_moduli(a, o, e);
    return {rc, o.str(), e.str()};
}

cli::ConstructArgs v4_args(const std::string& sign, const std::string& out) {
    cli::ConstructArgs a;
    a.family = "v4";
    a.cos = {0.3, 0.3, 0.3};
    a.sign = sign;
    a.n = 4;
    a.out = out;
    return a;
}

}  // namespace

TEST(Io, RoundTripIsBitExact) {
    const Subspace V = construct_v4(AngleTriple::from_cos(0.5, 0.3, 0.1), -1, 4);
    const auto back = io::from_json(json::parse(io::to_json(V).dump(1))).subspace;
    EXPECT_EQ(back.basis(), V.basis());
    const std::string p = temp_path("rt.json");
    io::Meta m;
    m.family = "v4";
    m.sign = -1;
    io::save(p, V, m);
    const io::SubspaceFile f = io::load(p);
    EXPECT_EQ(f.subspace.basis(), V.basis());
    EXPECT_EQ(f.meta.sign, -1);
    EXPECT_TRUE(f.warnings.empty());
    std::remove(p.c_str());
}

TEST(Io, SlightlyOffBasisIsRepairedWithWarning) {
    json j = io::to_json(construct_totally_real(2, 2));
    j["basis"][0][0] = 1.0 + 1e-9;
    const io::SubspaceFile f = io::from_json(j);
    EXPECT_EQ(f.warnings.size(), 1u);
    EXPECT_EQ(f.subspace.k(), 2);
}

TEST(Io, RejectsMalformed) {
    json j = io::to_json(construct_totally_real(2, 2));
    json bad = j;
    bad["basis"][0][0] = 1.1;
    EXPECT_THROW(io::from_json(bad), InvalidArgument);
    bad = j;
    bad["format_version"] = 2;
    EXPECT_THROW(io::from_json(bad), InvalidArgument);
    bad = j;
    bad.erase("basis");
    EXPECT_THROW(io::from_json(bad), InvalidArgument);
    bad = j;
    bad["k"] = 3;
    EXPECT_THROW(io::from_json(bad), InvalidArgument);
    EXPECT_THROW(io::load(temp_path("missing.json")), InvalidArgument);
}

TEST(Cli, ConstructV4MinusAndAnalyze) {
    const std::string p = temp_path("v4m.json");
    const Outcome r = construct(v4_args("-", p));
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.j();
    EXPECT_EQ(j["k"], 4);
    EXPECT_TRUE(j["constant"].get<bool>());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(j["triple"]["angles"][i].get<double>(), std::acos(0.3), 1e-8);

    const Outcome a = angles(p);
    ASSERT_EQ(a.code, 0);
    EXPECT_TRUE(a.j()["constant"].get<bool>());
    EXPECT_LT(a.j()["joint_residual"].get<double>(), 1e-9);

    const Outcome c = classify(p);
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(c.j()["type"], json::array({0, 1}));
    EXPECT_EQ(c.j()["protohomogeneous"], "yes");
    std::remove(p.c_str());
}

TEST(Cli, ConstructInadmissibleExitsTwo) {
    cli::ConstructArgs a = v4_args("-", "");
    a.cos = {0.9, 0.9, 0.1};
    const Outcome r = construct(a);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("inadmissible"), std::string::npos);
    EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
}

TEST(Cli, ConstructArgumentErrors) {
    cli::ConstructArgs a = v4_args("x", "");
    EXPECT_EQ(construct(a).code, 2);
    a = v4_args("+", "");
    a.family = "v7";
    EXPECT_EQ(construct(a).code, 2);
    a = v4_args("+", "");
    a.angles = {1.0, 1.0, 1.0};
    EXPECT_EQ(construct(a).code, 2);
    a = v4_args("+", "");
    a.cos.clear();
    EXPECT_EQ(construct(a).code, 2);
}

TEST(Cli, ConstructV3AtSevenDigitThird) {
    cli::ConstructArgs a;
    a.family = "v3";
    a.angles = {1.0471975};
    a.sign = "-";
    a.n = 2;
    a.out = temp_path("v3.json");
    const Outcome r = construct(a);
    ASSERT_EQ(r.code, 0) << r.err;
    const Outcome c = classify(a.out);
    EXPECT_EQ(c.j()["branch"], -1);
    EXPECT_EQ(c.j()["protohomogeneous"], "yes");
    std::remove(a.out.c_str());
}

TEST(Cli, ClassifyMixedSumAndPureBlock) {
    cli::ConstructArgs a;
    a.family = "sum_type";
    a.cos = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    a.lplus = 1;
    a.lminus = 1;
    a.n = 7;
    a.out = temp_path("sum.json");
    ASSERT_EQ(construct(a).code, 0);
    EXPECT_EQ(classify(a.out).j()["protohomogeneous"], "no");

    const std::string p = temp_path("v4p.json");
    ASSERT_EQ(construct(v4_args("+", p)).code, 0);
    EXPECT_EQ(classify(p).j()["type"], json::array({1, 0}));
    std::remove(a.out.c_str());
    std::remove(p.c_str());
}

TEST(Cli, AnglesOnQuaternionicAndRandomFiles) {
    const std::string q = temp_path("quat.json");
    cli::ConstructArgs a;
    a.family = "quaternionic";
    a.k = 4;
    a.n = 2;
    a.out = q;
    ASSERT_EQ(construct(a).code, 0);
    const json j = angles(q).j();
    EXPECT_TRUE(j["constant"].get<bool>());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(j["triple"]["angles"][i].get<double>(), 0.0, 1e-6);

    Eigen::MatrixXd m(12, 3);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    const std::string r = temp_path("rand.json");
    io::save(r, Subspace::from_matrix(m));
    EXPECT_FALSE(angles(r).j()["constant"].get<bool>());
    std::remove(q.c_str());
    std::remove(r.c_str());
}

TEST(Cli, MalformedFileExitsTwo) {
    const std::string p = temp_path("bad.json");
    std::ofstream(p) << "{\"format_version\": 1, \"n\": ";
    EXPECT_EQ(classify(p).code, 2);
    EXPECT_EQ(angles(p).code, 2);
    std::remove(p.c_str());
}

TEST(Cli, Moduli) {
    const json five = moduli({5, 5, {}, {}}).j();
    ASSERT_EQ(five["strata"].size(), 1u);
    EXPECT_EQ(five["strata"][0]["kind"], "point");

    const json four = moduli({4, 4, {}, {}}).j();
    ASSERT_EQ(four["strata"].size(), 2u);
    EXPECT_EQ(four["strata"][1]["multiplicity"], 2);

    const json zero = moduli({0, 3, {}, {}}).j();
    EXPECT_TRUE(zero["strata"].empty());
    ASSERT_EQ(zero["special_actions"].size(), 3u);
    EXPECT_EQ(zero["special_actions"][2]["label"], "SU(1,4)");

    const json mem = moduli({4, 4, {}, {0.3, 0.3, 0.3}}).j();
    EXPECT_EQ(mem["strata"].size(), 2u);

    EXPECT_EQ(moduli({20, 4, {}, {}}).code, 2);
    EXPECT_EQ(moduli({4, 4, {}, {0.3, 0.3}}).code, 2);
}

TEST(Cli, DefaultSeedFromEnvironment) {
    ::setenv("QKA_SEED", "1234", 1);
    EXPECT_EQ(cli::default_seed(), 1234u);
    ::setenv("QKA_SEED", "junk", 1);
    EXPECT_EQ(cli::default_seed(), 1u);
    ::unsetenv("QKA_SEED");
    EXPECT_EQ(cli::default_seed(), 1u);
}

TEST(Cli, SelftestQuickIsDeterministic) {
    std::ostringstream a, b, e;
    EXPECT_EQ(cli::cmd_selftest({false, 3}, a, e), 0) << a.str();
    EXPECT_EQ(cli::cmd_selftest({false, 3}, b, e), 0);
    EXPECT_EQ(a.str(), b.str());
}

#ifdef QKA_BINARY
TEST(Binary, ExitCodes) {
    const std::string bin = QKA_BINARY;
    auto rc = [](const std::string& cmd) {
        const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(rc(bin + " moduli --k 5 --n 5"), 0);
    EXPECT_EQ(rc(bin + " construct --family v4 --cos 0.9 0.9 0.1 --sign - --n 4"), 2);
    EXPECT_EQ(rc(bin + " moduli --k 5"), 2);
    EXPECT_EQ(rc(bin + " bogus"), 2);
}
#endif
