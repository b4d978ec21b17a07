#pragma once

// Acceptance battery: one check per published property, each returning a
// pass/fail line with the measured worst case. Quick mode thins the grids.

#include "qka/catalog.hpp"
#include "qka/classify.hpp"
#include "qka/io.hpp"
#include "qka/moduli.hpp"
#include "qka/oracle.hpp"
#include "qka/quaternion.hpp"
#include "qka/subspace.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qka::acceptance {

enum class Mode { quick, full };

struct CriterionResult {
    CriterionResult(int i, std::string t) : id(i), title(std::move(t)) {}

    int id{0};
    std::string title;
    bool passed{false};
    std::string detail;
    double seconds{0.0};
};

struct Config {
    Mode mode{Mode::full};
    std::uint64_t seed{1};
};

namespace detail {

constexpr double pi = std::numbers::pi;

inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
}

struct Case {
    std::string label;
    FamilySpec spec;
};

inline FamilySpec classical(Family f, int k, int n, double phi = 0.0) {
    FamilySpec s;
    s.family = f;
    s.k = k;
    s.n = n;
    if (f == Family::cka_plane_sum || f == Family::complexified_cka) s.angles = classical_triple(f, phi);
    return s;
}

inline FamilySpec v3(double phi, int eps, int n) {
    FamilySpec s;
    s.family = Family::v3;
    s.angles = AngleTriple::from_angles(phi, phi, pi / 2);
    s.sign = eps;
    s.n = n;
    return s;
}

inline FamilySpec v4(const AngleTriple& a, int eps) {
    FamilySpec s;
    s.family = Family::v4;
    s.angles = a;
    s.sign = eps;
    s.n = min_quaternionic_dim(s);
    return s;
}

inline FamilySpec sum(const AngleTriple& a, int p, int q) {
    FamilySpec s;
    s.family = Family::sum_type;
    s.angles = a;
    s.lplus = p;
    s.lminus = q;
    s.n = sum_min_dim(a, p, q);
    return s;
}

inline std::vector<Case> catalog_grid(Mode mode) {
    std::vector<Case> out;
    auto add = [&](std::string label, FamilySpec s) { out.push_back({std::move(label), s}); };
    for (int k = 1; k <= 6; ++k)
        for (int n = k; n <= k + 1; ++n) add("totally_real", classical(Family::totally_real, k, n));
    for (int k : {2, 4, 6})
        for (int n : {3, 4}) add("totally_complex", classical(Family::totally_complex, k, n));
    for (int k : {4, 8})
        for (int n : {2, 3}) add("quaternionic", classical(Family::quaternionic, k, n));
    for (int n : {1, 2, 3}) add("im_h_line", classical(Family::im_h_line, 3, n));
    for (double phi : {0.1, 0.5, pi / 4, 1.2, 1.5}) {
        add("cka_plane_sum", classical(Family::cka_plane_sum, 2, 4, phi));
        add("cka_plane_sum", classical(Family::cka_plane_sum, 4, 4, phi));
        add("complexified_cka", classical(Family::complexified_cka, 4, 2, phi));
        add("complexified_cka", classical(Family::complexified_cka, 8, 4, phi));
    }
    for (int i = 0; i <= 19; ++i) add("v3+", v3(pi / 2 * i / 19.0, 1, 3));
    for (int i = 0; i <= 9; ++i) add("v3-", v3(pi / 3 + pi / 6 * i / 9.0, -1, 3));
    add("v3-", v3(pi / 3, -1, 2));

    // dimension 4 over a cosine grid, both signs where admissible
    const std::vector<double> xs{0.0, 0.1, 0.15, 0.2, 0.3, 1.0 / 3.0, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.97};
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            for (std::size_t l = 0; l <= j; ++l) {
                const AngleTriple a = AngleTriple::from_cos(xs[i], xs[j], xs[l]);
                for (int eps : {1, -1}) {
                    if (eps == -1 && a.is_right(2, tol::right_angle_cos)) continue;
                    if (!admissible(a, eps).exists) continue;
                    add(eps > 0 ? "v4+" : "v4-", v4(a, eps));
                }
            }
    add("v4", v4(AngleTriple::from_cos(1.0, 0.5, 0.5), 1));
    add("v4", v4(AngleTriple::from_cos(1.0, 1.0, 1.0), 1));

    for (auto a : {AngleTriple::from_cos(1.0 / 3, 1.0 / 3, 1.0 / 3), AngleTriple::from_cos(0.3, 0.3, 0.3),
                   AngleTriple::from_cos(0.5, 0.3, 0.1), AngleTriple::from_cos(0.6, 0.3, 0.1)})
        for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 0}, {0, 2}, {1, 1}, {2, 1}}) add("sum", sum(a, p, q));
    add("sum", sum(AngleTriple::from_cos(0.9, 0.5, 0.45), 2, 0));
    add("sum", sum(AngleTriple::from_cos(0.7, 0.3, 0.0), 3, 0));

    if (mode == Mode::quick) {
        std::vector<Case> thin;
        for (std::size_t i = 0; i < out.size(); i += 5) thin.push_back(out[i]);
        return thin;
    }
    return out;
}

/// Catalog grid with the constructed subspaces (constructions that throw
/// are reported by C1).
struct Built {
    Case c;
    Subspace v;
};

inline std::vector<Built> build(const std::vector<Case>& cases, std::vector<std::string>* errors = nullptr) {
    std::vector<Built> out;
    for (const auto& c : cases) {
        try {
            out.push_back({c, construct(c.spec)});
        } catch (const std::exception& e) {
            if (errors) errors->push_back(c.label + ": " + e.what());
        }
    }
    return out;
}

inline bool is_mixed_sum(const Case& c) {
    return c.spec.family == Family::sum_type && c.spec.lplus > 0 && c.spec.lminus > 0;
}

}  // namespace detail

inline CriterionResult c1_constancy(const Config& cfg) {
    CriterionResult r(1, "constancy of all constructors");
    std::vector<std::string> errors;
    const auto built = detail::build(detail::catalog_grid(cfg.mode), &errors);
    double spread = 0.0, dev = 0.0;
    int bad = 0;
    for (const auto& b : built) {
        const ConstancyReport rep = constancy_check(b.v, 500, cfg.seed);
        const double d = rep.triple.max_cos2_deviation(declared_triple(b.c.spec));
        spread = std::max(spread, rep.max_spread);
        dev = std::max(dev, d);
        if (rep.max_spread >= 1e-9 || d > 1e-8) ++bad;
    }
    const std::size_t need = cfg.mode == Mode::full ? 300 : 60;
    r.passed = errors.empty() && bad == 0 && built.size() >= need;
    r.detail = std::to_string(built.size()) + " constructions, max spread " + detail::fmt(spread) +
               ", max triple dev " + detail::fmt(dev) + ", failures " + std::to_string(bad + errors.size());
    if (!errors.empty()) r.detail += "; first error: " + errors.front();
    return r;
}

inline CriterionResult c2_gram(const Config& cfg) {
    CriterionResult r(2, "Gram admissibility equivalence");
    const int res = cfg.mode == Mode::full ? 50 : 20;
    long points = 0, disagree = 0;
    double det_dev = 0.0;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j <= i; ++j)
            for (int l = 0; l <= j; ++l) {
                const AngleTriple a = AngleTriple::from_cos(double(i) / res, double(j) / res, double(l) / res);
                for (int eps : {1, -1}) {
                    ++points;
                    const Admissibility ad = admissible(a, eps);
                    try {
                        const auto o = oracle::psd_oracle(gram_matrix(a, eps));
                        if (o.psd != ad.exists || (o.psd && o.rank != ad.gram_rank)) ++disagree;
                    } catch (const NumericalFailure&) {
                        ++disagree;
                    }
                    if (l > 0) det_dev = std::max(det_dev, oracle::det_formula_check(a, eps));
                }
            }
    r.passed = disagree == 0 && det_dev <= 1e-10;
    r.detail = std::to_string(points) + " grid points, disagreements " + std::to_string(disagree) +
               ", max |det - closed form| " + detail::fmt(det_dev);
    return r;
}

inline CriterionResult c3_omega_closed_form(const Config& cfg) {
    CriterionResult r(3, "closed-form Omega in dimension 3");
    const int vectors = cfg.mode == Mode::full ? 100 : 20;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0, eig = 0.0;
    int cases = 0;
    for (int eps : {1, -1})
        for (int i = 0; i < 20; ++i) {
            const double phi = eps > 0 ? detail::pi / 2 * (i + 1) / 20.0 : detail::pi / 3 + detail::pi / 6 * i / 19.0;
            const Subspace V = construct_v3(phi, eps, 3);
            const double c2 = std::cos(phi) * std::cos(phi), e = eps;
            ++cases;
            for (int s = 0; s < vectors; ++s) {
                Eigen::Vector3d x(g(rng), g(rng), g(rng));
                x.normalize();
                const double x0 = x(0), x1 = x(1), x2 = x(2);
                Eigen::Matrix3d expect;
                expect << x0 * x0 + x1 * x1, x1 * x2, -e * x0 * x2, x1 * x2, x0 * x0 + x2 * x2, e * x0 * x1,
                    -e * x0 * x2, e * x0 * x1, x1 * x1 + x2 * x2;
                expect *= c2;
                const OmegaMatrix w = omega(V, V.vector(x));
                worst = std::max(worst, (w - expect).cwiseAbs().maxCoeff());
                const auto ev = oracle::sym3_eigenvalues(w);
                eig = std::max({eig, std::abs(ev[0] - c2), std::abs(ev[1] - c2), std::abs(ev[2])});
            }
        }
    r.passed = worst <= 1e-10 && eig <= 1e-10;
    r.detail = std::to_string(cases) + " subspaces x " + std::to_string(vectors) + " vectors, max entry error " +
               detail::fmt(worst) + ", max eigenvalue error " + detail::fmt(eig);
    return r;
}

namespace detail {

/// max |P1 P2 - eps P3| for a 4-dimensional V.
inline double sign_defect(const Subspace& V, int eps, std::uint64_t seed) {
    ClassifyOptions o;
    o.seed = seed;
    const auto a = qka::detail::analyze(V, o, true);
    const auto ops = qka::detail::block_operators(V, a);
    return (ops[0] * ops[1] - eps * ops[2]).cwiseAbs().maxCoeff();
}

}  // namespace detail

inline CriterionResult c4_sign_relation(const Config& cfg) {
    CriterionResult r(4, "sign relation P1P2 = eps P3");
    const int res = cfg.mode == Mode::full ? 12 : 6;
    double worst = 0.0;
    int cases = 0, fails = 0;
    for (int i = 1; i < res; ++i)
        for (int j = 1; j <= i; ++j)
            for (int l = 1; l <= j; ++l) {
                const AngleTriple a = AngleTriple::from_cos(double(i) / res, double(j) / res, double(l) / res);
                for (int eps : {1, -1}) {
                    if (!admissible(a, eps).exists) continue;
                    ++cases;
                    try {
                        const double d = detail::sign_defect(construct_v4(a, eps, 4), eps, cfg.seed);
                        worst = std::max(worst, d);
                        if (d > 1e-8) ++fails;
                    } catch (const std::exception&) {
                        ++fails;
                    }
                }
            }
    r.passed = fails == 0 && cases > 0;
    r.detail = std::to_string(cases) + " subspaces, max defect " + detail::fmt(worst) + ", failures " +
               std::to_string(fails);
    return r;
}

inline CriterionResult c5_type(const Config& cfg) {
    CriterionResult r(5, "type and protohomogeneity of sums");
    std::vector<AngleTriple> triples{AngleTriple::from_cos(1.0 / 3, 1.0 / 3, 1.0 / 3), AngleTriple::from_cos(0.3, 0.3, 0.3),
                                     AngleTriple::from_cos(0.5, 0.3, 0.1), AngleTriple::from_cos(0.2, 0.1, 0.05),
                                     AngleTriple::from_cos(0.6, 0.3, 0.1), AngleTriple::from_cos(0.9, 0.5, 0.45),
                                     AngleTriple::from_cos(0.7, 0.3, 0.0)};
    if (cfg.mode == Mode::quick) triples.resize(3);
    int cases = 0, fails = 0;
    std::string first;
    ClassifyOptions o;
    o.seed = cfg.seed;
    for (const auto& a : triples)
        for (int p = 0; p <= 4; ++p)
            for (int q = 0; p + q <= 4; ++q) {
                if (p + q == 0) continue;
                if (q > 0 && (a.is_right(2, tol::right_angle_cos) || !admissible(a, -1).exists)) continue;
                if (p > 0 && !admissible(a, 1).exists) continue;
                ++cases;
                try {
                    const Subspace V = construct_sum(a, p, q, sum_min_dim(a, p, q));
                    const TypeSignature t = type_of(V, o);
                    const TypeSignature want = a.is_right(2, tol::right_angle_cos) ? TypeSignature{p + q, 0}
                                                                                    : TypeSignature{p, q};
                    const Answer proto = is_protohomogeneous(V, o).value;
                    const Answer want_proto = (p == 0 || q == 0) ? Answer::yes : Answer::no;
                    if (!(t == want) || proto != want_proto) {
                        ++fails;
                        if (first.empty())
                            first = "(" + std::to_string(p) + "," + std::to_string(q) + ") got (" +
                                    std::to_string(t.l_plus) + "," + std::to_string(t.l_minus) + ")";
                    }
                } catch (const std::exception& e) {
                    ++fails;
                    if (first.empty()) first = e.what();
                }
            }

    const AngleTriple w = AngleTriple::from_cos(1.0 / 3, 1.0 / 3, 1.0 / 3);
    bool witness = false, rejected = false;
    try {
        const Subspace V = construct_sum(w, 1, 1, 7);
        witness = type_of(V, o) == TypeSignature{1, 1} && constancy_check(V, 500, cfg.seed).constant &&
                  is_protohomogeneous(V, o).value == Answer::no;
    } catch (const std::exception&) {
    }
    try {
        (void)construct_sum(w, 1, 1, 6);
    } catch (const Inadmissible&) {
        rejected = true;
    }
    r.passed = fails == 0 && witness && rejected;
    r.detail = std::to_string(cases) + " sums, failures " + std::to_string(fails) + "; n=7 witness " +
               (witness ? "ok" : "FAILED") + ", n=6 " + (rejected ? "rejected" : "NOT rejected");
    if (!first.empty()) r.detail += "; first failure: " + first;
    return r;
}

inline CriterionResult c6_inequivalence(const Config& cfg) {
    CriterionResult r(6, "inequivalence of the two signs");
    ClassifyOptions o;
    o.seed = cfg.seed;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.02, 1.0);
    const int interior = cfg.mode == Mode::full ? 20 : 5;
    int ok_in = 0;
    for (int t = 0; t < interior;) {
        std::array<double, 3> c{u(rng), u(rng), u(rng)};
        const double s = c[0] + c[1] + c[2];
        const double scale = u(rng) * 0.97 / s;  // strictly inside the sign -1 region
        for (double& x : c) x *= scale;
        std::sort(c.begin(), c.end(), std::greater<>());
        if (c[2] < 0.01) continue;
        const AngleTriple a = AngleTriple::from_cos(c[0], c[1], c[2]);
        ++t;
        if (are_equivalent(construct_v4(a, 1, 4), construct_v4(a, -1, 4), o).value == Answer::no) ++ok_in;
    }

    int ok_right = 0, right_cases = 0;
    for (double c1 : {0.0, 0.2, 0.5, 0.7})
        for (double c2 : {0.0, 0.1, 0.3}) {
            if (c2 > c1 || c1 + c2 > 1.0) continue;
            const AngleTriple a = AngleTriple::from_cos(c1, c2, 0.0);
            ++right_cases;
            const Subspace vp = construct_v4(a, 1, 4), vm = qka::detail::construct_v4_raw(a, -1, 4);
            if (are_equivalent(vp, vm, o).value == Answer::yes) ++ok_right;
        }

    int ok3 = 0, cases3 = 0;
    for (int i = 0; i < 10; ++i) {
        const double phi = detail::pi / 3 + (detail::pi / 6) * i / 10.0;
        ++cases3;
        const int bp = branch_of_v3(construct_v3(phi, 1, 3), cfg.seed);
        const int bm = branch_of_v3(construct_v3(phi, -1, 3), cfg.seed);
        const bool ineq = are_equivalent(construct_v3(phi, 1, 3), construct_v3(phi, -1, 3), o).value == Answer::no;
        if (bp == 1 && bm == -1 && ineq) ++ok3;
    }
    bool merge = false;
    try {
        (void)branch_of_v3(construct_v3(detail::pi / 2, -1, 3), cfg.seed);
    } catch (const InvalidArgument&) {
        merge = are_equivalent(construct_v3(detail::pi / 2, 1, 3), construct_v3(detail::pi / 2, -1, 3), o).value ==
                Answer::yes;
    }
    r.passed = ok_in == interior && ok_right == right_cases && ok3 == cases3 && merge;
    r.detail = "interior inequivalent " + std::to_string(ok_in) + "/" + std::to_string(interior) +
               ", phi3=pi/2 equivalent " + std::to_string(ok_right) + "/" + std::to_string(right_cases) +
               ", dim-3 branches separated " + std::to_string(ok3) + "/" + std::to_string(cases3) + ", merge at pi/2 " +
               (merge ? "ok" : "FAILED");
    return r;
}

namespace detail {

/// Expected strata names per (k, n), written out by hand from the table.
inline std::map<std::pair<int, int>, std::vector<std::string>> expected_cells() {
    return {
        {{5, 5}, {"(pi/2,pi/2,pi/2)"}},
        {{5, 4}, {}},
        {{7, 4}, {}},
        {{9, 4}, {}},
        {{6, 8}, {"(phi,pi/2,pi/2)"}},
        {{10, 8}, {"(0,pi/2,pi/2)"}},
        {{6, 4}, {"(0,pi/2,pi/2)"}},
        {{10, 4}, {}},
        {{4, 4}, {"R4+ \\ R4-", "R4- x Z2"}},
        {{8, 8}, {"R4+ \\ R4-", "R4- x Z2"}},
        {{8, 6}, {"S"}},
        {{8, 4}, {"(0,phi,phi)"}},
        {{12, 8}, {"(0,phi,phi)"}},
        {{8, 2}, {"(0,0,0)"}},
        {{3, 8}, {"R3+ \\ R3-", "R3- x Z2"}},
        {{3, 2}, {"(0,0,pi/2)", "(pi/3,pi/3,pi/2)"}},
        {{3, 1}, {"(0,0,pi/2)"}},
    };
}

inline int row_of(int k) {
    if (k % 4 == 0) return 0;
    if (k % 4 == 2) return 1;
    if (k == 3) return 3;
    return 2;
}

}  // namespace detail

inline CriterionResult c7_moduli_table(const Config& cfg) {
    CriterionResult r(7, "moduli table and round trips");
    const int per_region = cfg.mode == Mode::full ? 20 : 3;
    ClassifyOptions o;
    o.seed = cfg.seed;
    o.samples = 200;
    int cell_fail = 0, trips = 0, trip_fail = 0;
    std::set<std::pair<int, int>> cells;
    std::string first;
    for (const auto& [kn, names] : detail::expected_cells()) {
        const auto [k, n] = kn;
        const ModuliDescription d = moduli_describe(k, n);
        cells.insert({detail::row_of(k), d.column});
        std::vector<std::string> got;
        for (const auto& s : d.strata) got.push_back(s.name);
        if (got != names) {
            ++cell_fail;
            if (first.empty()) first = "cell (" + std::to_string(k) + "," + std::to_string(n) + ")";
        }
        for (const auto& s : d.strata) {
            const int count = s.kind == StratumKind::point ? 1 : per_region;
            for (const AngleTriple& t : stratum_samples(s.id, count, cfg.seed + static_cast<std::uint64_t>(k * 100 + n))) {
                for (const Stratum& e : moduli_membership(k, n, t)) {
                    if (e.id != s.id) continue;
                    ++trips;
                    try {
                        const std::optional<int> br = e.multiplicity == 2 ? std::optional<int>(e.branch) : std::nullopt;
                        const Subspace V = representative(k, n, t, br);
                        // through the file format, as the classify command sees it
                        const Subspace W = io::from_json(io::to_json(V)).subspace;
                        const ClassificationRecord rec = classify_record(W, o);
                        bool hit = false;
                        for (const auto& m : rec.strata) hit = hit || (m.id == e.id && m.branch == e.branch);
                        const bool ok = hit && rec.protohomogeneous.value == Answer::yes &&
                                        rec.report.triple.max_cos2_deviation(t) <= 1e-8;
                        if (!ok) {
                            ++trip_fail;
                            if (first.empty())
                                first = "round trip " + s.name + " (" + std::to_string(k) + "," + std::to_string(n) + ")";
                        }
                    } catch (const std::exception& ex) {
                        ++trip_fail;
                        if (first.empty()) first = s.name + ": " + ex.what();
                    }
                }
            }
        }
    }
    r.passed = cell_fail == 0 && trip_fail == 0 && cells.size() == 15;
    r.detail = std::to_string(cells.size()) + " table cells checked (the k=3, n<k<=4n/3 cell has no integer n), " +
               std::to_string(trips) + " round trips, failures " + std::to_string(cell_fail + trip_fail);
    if (!first.empty()) r.detail += "; first failure: " + first;
    return r;
}

inline CriterionResult c8_steenrod(const Config& cfg) {
    CriterionResult r(8, "distribution rank and dimension constraints");
    const auto built = detail::build(detail::catalog_grid(cfg.mode));
    int fails = 0;
    std::string first;
    for (const auto& b : built) {
        const AngleTriple t = constancy_check(b.v, 50, cfg.seed).triple.snapped();
        bool ok = false;
        try {
            ok = distribution_rank(b.v, 20, cfg.seed) == t.non_right_count() && oracle::steenrod_oracle(b.v, 20, cfg.seed);
        } catch (const std::exception&) {
        }
        if (!ok) {
            ++fails;
            if (first.empty()) first = b.c.label;
        }
    }
    r.passed = fails == 0 && !built.empty();
    r.detail = std::to_string(built.size()) + " subspaces, failures " + std::to_string(fails);
    if (!first.empty()) r.detail += "; first failure: " + first;
    return r;
}

inline CriterionResult c9_invariance(const Config& cfg) {
    CriterionResult r(9, "group invariance");
    const int trials = cfg.mode == Mode::full ? 100 : 20;
    const double h = detail::pi / 2;
    std::vector<Subspace> vs{construct_totally_real(3, 4),
                             construct_quaternionic(4, 3),
                             construct_im_h_line(3),
                             construct_cka_plane_sum(0.7, 4, 4),
                             construct_complexified_cka(0.6, 4, 3),
                             construct_v3(1.2, 1, 3),
                             construct_v3(1.2, -1, 3),
                             construct_v4(AngleTriple::from_cos(0.3, 0.3, 0.3), 1, 4),
                             construct_v4(AngleTriple::from_cos(0.3, 0.3, 0.3), -1, 4),
                             construct_v4(AngleTriple::from_angles(1.0, 1.2, h), 1, 4),
                             construct_sum(AngleTriple::from_cos(1.0 / 3, 1.0 / 3, 1.0 / 3), 1, 1, 7)};
    double triple_dev = 0.0, oracle_dev = 0.0, rot_dev = 0.0, conj_dev = 0.0;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uint64_t s = cfg.seed * 1000;
    for (const auto& V : vs) {
        const AngleTriple base = constancy_check(V, 20, cfg.seed).triple;
        for (int t = 0; t < trials; ++t) {
            const GroupElement T = random_group_element(V.n(), ++s);
            triple_dev = std::max(triple_dev, constancy_check(transform(T, V), 20, s).triple.max_cos2_deviation(base));
            const Eigen::Matrix3d R = induced_rotation(T);
            rot_dev = std::max({rot_dev, (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
                                std::abs(R.determinant() - 1.0)});
            // T J_u = J_{Ru} T on a random vector
            Eigen::VectorXd x(4 * V.n());
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
            const Eigen::Vector3d u = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
            const HVector v(x);
            const HVector lhs = T.apply(apply_structure(u, v));
            const HVector rhs = apply_structure(R * u, T.apply(v));
            conj_dev = std::max(conj_dev, (lhs.coords() - rhs.coords()).cwiseAbs().maxCoeff());
        }
        oracle_dev = std::max(oracle_dev, oracle::invariance_oracle(V, cfg.mode == Mode::full ? 20 : 5, cfg.seed));
    }
    r.passed = triple_dev <= 1e-9 && oracle_dev <= 1e-9 && rot_dev <= 1e-12 && conj_dev <= 1e-10;
    r.detail = std::to_string(vs.size()) + " subspaces x " + std::to_string(trials) + " elements, triple dev " +
               detail::fmt(triple_dev) + ", oracle dev " + detail::fmt(oracle_dev) + ", rotation defect " +
               detail::fmt(rot_dev) + ", intertwining " + detail::fmt(conj_dev);
    return r;
}

inline CriterionResult c10_joint(const Config& cfg) {
    CriterionResult r(10, "joint canonical basis");
    const auto built = detail::build(detail::catalog_grid(cfg.mode));
    double worst = 0.0;
    int cases = 0;
    std::uint64_t s = cfg.seed * 31;
    for (const auto& b : built) {
        if (b.v.k() < 4 || detail::is_mixed_sum(b.c)) continue;
        ++cases;
        worst = std::max(worst, joint_canonical_basis(b.v, 64, cfg.seed).residual);
        const Subspace moved = transform(random_group_element(b.v.n(), ++s), b.v);
        worst = std::max(worst, joint_canonical_basis(moved, 64, cfg.seed).residual);
    }
    double low = 1e300;
    for (int n = 1; n <= 4; ++n) {
        low = std::min(low, joint_canonical_basis(construct_im_h_line(n), 64, cfg.seed).residual);
        low = std::min(low, joint_canonical_basis(transform(random_group_element(n, ++s), construct_im_h_line(n)), 64,
                                                  cfg.seed)
                                .residual);
    }
    r.passed = cases > 0 && worst < 1e-9 && low > 1e-2;
    r.detail = std::to_string(cases) + " subspaces (and rotated copies), max residual " + detail::fmt(worst) +
               "; min residual on (Im H)v " + detail::fmt(low);
    return r;
}

inline CriterionResult c11_factorization(const Config& cfg) {
    CriterionResult r(11, "factorization round trip");
    std::vector<AngleTriple> triples{AngleTriple::from_cos(1.0 / 3, 1.0 / 3, 1.0 / 3), AngleTriple::from_cos(0.3, 0.3, 0.3),
                                     AngleTriple::from_cos(0.5, 0.3, 0.1), AngleTriple::from_cos(0.9, 0.5, 0.45),
                                     AngleTriple::from_cos(0.7, 0.3, 0.0), AngleTriple::from_cos(1.0, 0.4, 0.4),
                                     AngleTriple::from_cos(1.0, 1.0, 1.0), AngleTriple::from_cos(0.0, 0.0, 0.0)};
    if (cfg.mode == Mode::quick) triples.resize(3);
    ClassifyOptions o;
    o.seed = cfg.seed;
    int cases = 0, fails = 0;
    double resid = 0.0;
    std::string first;
    std::uint64_t s = cfg.seed * 97;
    for (const auto& a : triples)
        for (int p = 0; p <= 3; ++p)
            for (int q = 0; p + q <= 3; ++q) {
                if (p + q == 0) continue;
                const bool minus_ok = !a.is_right(2, tol::right_angle_cos) && qka::detail::sine_of(a.cos(0)) > 1e-12 &&
                                      admissible(a, -1).exists;
                if (q > 0 && !minus_ok) continue;
                for (bool rotate : {false, true}) {
                    ++cases;
                    try {
                        Subspace V = construct_sum(a, p, q, sum_min_dim(a, p, q));
                        if (rotate) V = transform(random_group_element(V.n(), ++s), V);
                        const auto blocks = factorize(V, o);
                        bool ok = static_cast<int>(blocks.size()) == p + q;
                        Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(4 * V.n(), 4 * V.n());
                        for (std::size_t i = 0; i < blocks.size(); ++i) {
                            proj += blocks[i].projector();
                            for (std::size_t j = i + 1; j < blocks.size(); ++j)
                                ok = ok && is_h_orthogonal(blocks[i], blocks[j], 1e-9);
                        }
                        const double d = (proj - V.projector()).norm();
                        resid = std::max(resid, d);
                        ok = ok && d < 1e-8;
                        if (!ok) {
                            ++fails;
                            if (first.empty()) first = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
                        }
                    } catch (const std::exception& e) {
                        ++fails;
                        if (first.empty()) first = e.what();
                    }
                }
            }
    r.passed = fails == 0 && cases > 0;
    r.detail = std::to_string(cases) + " sums, max reconstruction residual " + detail::fmt(resid) + ", failures " +
               std::to_string(fails);
    if (!first.empty()) r.detail += "; first failure: " + first;
    return r;
}

inline std::vector<std::function<CriterionResult(const Config&)>> criteria() {
    return {c1_constancy, c2_gram,  c3_omega_closed_form, c4_sign_relation, c5_type,          c6_inequivalence,
            c7_moduli_table, c8_steenrod, c9_invariance,  c10_joint,        c11_factorization};
}

inline std::vector<CriterionResult> run_all(const Config& cfg) {
    std::vector<CriterionResult> out;
    for (const auto& c : criteria()) {
        const auto t0 = std::chrono::steady_clock::now();
        const int id = static_cast<int>(out.size()) + 1;
        CriterionResult r(id, "criterion " + std::to_string(id));
        try {
            r = c(cfg);
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(r);
    }
    return out;
}

inline std::string format_line(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.title << ": " << r.detail;
    return s.str();
}

}  // namespace qka::acceptance
