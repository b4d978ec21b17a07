#pragma once

// The moduli of protohomogeneous k-dimensional subspaces of H^n, as strata
// of angle triples, plus action labels and representatives.
//
// Columns of the table (by the size of k against n):
//   0: k <= n     1: n < k <= 4n/3     2: 4n/3 < k <= 2n     3: k > 2n

#include "qka/catalog.hpp"
#include "qka/classify.hpp"
#include "qka/error.hpp"
#include "qka/subspace.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qka {

enum class StratumKind { point, curve, region, region_with_Z2, surface };

inline std::string_view kind_name(StratumKind k) {
    switch (k) {
        case StratumKind::point: return "point";
        case StratumKind::curve: return "curve";
        case StratumKind::region: return "region";
        case StratumKind::region_with_Z2: return "region_with_Z2";
        case StratumKind::surface: return "surface";
    }
    return "?";
}

enum class StratumId {
    r4_plus_only,    // R4+ minus R4-
    r4_minus,        // R4- x Z2
    s_surface,       // cos1 + cos2 +- cos3 = 1
    zero_phi_phi,    // (0, phi, phi)
    quaternionic,    // (0, 0, 0)
    phi_right_right, // (phi, pi/2, pi/2)
    complex_point,   // (0, pi/2, pi/2)
    real_point,      // (pi/2, pi/2, pi/2)
    r3_plus_only,    // (phi, phi, pi/2), phi in [0, pi/3) or pi/2
    r3_minus,        // (phi, phi, pi/2), phi in [pi/3, pi/2), x Z2
    line_point,      // (0, 0, pi/2)
    third_point,     // (pi/3, pi/3, pi/2), branch -1 only
};

struct Stratum {
    StratumId id{StratumId::real_point};
    StratumKind kind{StratumKind::point};
    std::string name;
    std::string parametrization;
    int multiplicity{1};
    int branch{0};  // sign of the class in membership results; 0 when meaningless
    std::string action;
};

struct SpecialAction {
    std::string label;
    std::string description;
};

struct ModuliDescription {
    int k{0};
    int n{0};
    int column{-1};  // -1 for k = 0
    std::vector<Stratum> strata;
    std::vector<SpecialAction> special;
};

inline std::vector<SpecialAction> special_actions(int n) {
    return {{"N", "horosphere foliation"},
            {"K", "geodesic spheres centered at a point"},
            {"SU(1," + std::to_string(n + 1) + ")", "tubes around a totally geodesic CH^" + std::to_string(n + 1)}};
}

inline int moduli_column(int k, int n) {
    if (k <= n) return 0;
    if (3 * k <= 4 * n) return 1;
    if (k <= 2 * n) return 2;
    return 3;
}

namespace detail {

constexpr double region_tol = 1e-10;

inline bool right(double c) { return c <= region_tol; }
inline bool zero_angle(double c) { return c >= 1.0 - region_tol; }
inline bool eq(double a, double b) { return std::abs(a - b) <= region_tol; }

inline bool in_r4_plus(const AngleTriple& t) { return t.cos(0) + t.cos(1) - t.cos(2) <= 1.0 + region_tol; }
inline bool in_r4_minus(const AngleTriple& t) {
    return t.cos(0) + t.cos(1) + t.cos(2) <= 1.0 + region_tol && !right(t.cos(2));
}
/// eps of the equality cos1 + cos2 - eps cos3 = 1 that holds (+1 preferred), 0 if none.
inline int s_branch(const AngleTriple& t) {
    if (eq(t.cos(0) + t.cos(1) - t.cos(2), 1.0)) return 1;
    if (eq(t.cos(0) + t.cos(1) + t.cos(2), 1.0) && !right(t.cos(2))) return -1;
    return 0;
}
inline bool is_r3(const AngleTriple& t) { return eq(t.cos(0), t.cos(1)) && right(t.cos(2)); }
inline bool is_r3_minus(const AngleTriple& t) {
    return is_r3(t) && t.cos(0) <= 0.5 + region_tol && !right(t.cos(0));
}

inline std::string subspace_action(int k, int, const std::string& extra = {}) {
    std::string s = "subspace-induced";
    if (k == 1) s += "; solvable foliation";
    if (!extra.empty()) s += "; " + extra;
    return s;
}

inline std::string quaternionic_note(int k, int n) {
    return "tubes around a totally geodesic HH^" + std::to_string(n - k / 4 + 1);
}

inline Stratum make(StratumId id, int k, int n) {
    Stratum s;
    s.id = id;
    s.action = subspace_action(k, n);
    switch (id) {
        case StratumId::r4_plus_only:
            s.kind = StratumKind::region;
            s.name = "R4+ \\ R4-";
            s.parametrization = "cos1+cos2-cos3<=1 and not (cos1+cos2+cos3<=1, phi3!=pi/2)";
            s.action = subspace_action(k, n, "contains (0,0,0): " + quaternionic_note(k, n));
            break;
        case StratumId::r4_minus:
            s.kind = StratumKind::region_with_Z2;
            s.name = "R4- x Z2";
            s.parametrization = "cos1+cos2+cos3<=1, phi3!=pi/2";
            s.multiplicity = 2;
            break;
        case StratumId::s_surface:
            s.kind = StratumKind::surface;
            s.name = "S";
            s.parametrization = "cos1+cos2+eps*cos3=1, eps=+1 or -1";
            s.action = subspace_action(k, n, "contains (0,0,0): " + quaternionic_note(k, n));
            break;
        case StratumId::zero_phi_phi:
            s.kind = StratumKind::curve;
            s.name = "(0,phi,phi)";
            s.parametrization = "phi in [0,pi/2]";
            s.action = subspace_action(k, n, "phi=0: " + quaternionic_note(k, n));
            break;
        case StratumId::quaternionic:
            s.name = "(0,0,0)";
            s.parametrization = "point";
            s.action = subspace_action(k, n, quaternionic_note(k, n));
            break;
        case StratumId::phi_right_right:
            s.kind = StratumKind::curve;
            s.name = "(phi,pi/2,pi/2)";
            s.parametrization = "phi in [0,pi/2]";
            break;
        case StratumId::complex_point:
            s.name = "(0,pi/2,pi/2)";
            s.parametrization = "point";
            break;
        case StratumId::real_point:
            s.name = "(pi/2,pi/2,pi/2)";
            s.parametrization = "point";
            break;
        case StratumId::r3_plus_only:
            s.kind = StratumKind::curve;
            s.name = "R3+ \\ R3-";
            s.parametrization = "(phi,phi,pi/2), phi in [0,pi/3) or phi=pi/2";
            break;
        case StratumId::r3_minus:
            s.kind = StratumKind::curve;
            s.name = "R3- x Z2";
            s.parametrization = "(phi,phi,pi/2), phi in [pi/3,pi/2)";
            s.multiplicity = 2;
            break;
        case StratumId::line_point:
            s.name = "(0,0,pi/2)";
            s.parametrization = "point";
            break;
        case StratumId::third_point:
            s.name = "(pi/3,pi/3,pi/2)";
            s.parametrization = "point";
            break;
    }
    return s;
}

inline std::vector<StratumId> stratum_ids(int k, int n) {
    const int col = moduli_column(k, n);
    if (k % 4 == 0) {
        switch (col) {
            case 0: return {StratumId::r4_plus_only, StratumId::r4_minus};
            case 1: return {StratumId::s_surface};
            case 2: return {StratumId::zero_phi_phi};
            default: return {StratumId::quaternionic};
        }
    }
    if (k % 4 == 2) {
        if (col == 0) return {StratumId::phi_right_right};
        if (col <= 2) return {StratumId::complex_point};
        return {};
    }
    if (k == 3) {
        if (col == 0) return {StratumId::r3_plus_only, StratumId::r3_minus};
        if (col == 1) return {};
        if (col == 2) return {StratumId::line_point, StratumId::third_point};
        return {StratumId::line_point};
    }
    if (col == 0) return {StratumId::real_point};
    return {};
}

inline void check_range(int k, int n, int kmin) {
    if (n < 1) throw InvalidArgument("n must be positive");
    if (k < kmin || k > 4 * n) throw InvalidArgument("k must lie in " + std::to_string(kmin) + "..4n");
}

}  // namespace detail

/// True when the triple lies in the stratum (as a set of triples).
inline bool stratum_contains(StratumId id, const AngleTriple& t) {
    using namespace detail;
    const double c1 = t.cos(0), c2 = t.cos(1), c3 = t.cos(2);
    switch (id) {
        case StratumId::r4_plus_only: return in_r4_plus(t) && !in_r4_minus(t);
        case StratumId::r4_minus: return in_r4_minus(t);
        case StratumId::s_surface: return s_branch(t) != 0;
        case StratumId::zero_phi_phi: return zero_angle(c1) && eq(c2, c3);
        case StratumId::quaternionic: return zero_angle(c1) && zero_angle(c2) && zero_angle(c3);
        case StratumId::phi_right_right: return right(c2) && right(c3);
        case StratumId::complex_point: return zero_angle(c1) && right(c2) && right(c3);
        case StratumId::real_point: return right(c1) && right(c2) && right(c3);
        case StratumId::r3_plus_only: return is_r3(t) && !is_r3_minus(t);
        case StratumId::r3_minus: return is_r3_minus(t);
        case StratumId::line_point: return is_r3(t) && zero_angle(c1);
        case StratumId::third_point: return is_r3(t) && eq(c1, 0.5);
    }
    return false;
}

/// Strata of M_{k,n} containing the triple. Z2 strata give one entry per
/// branch.
inline std::vector<Stratum> moduli_membership(int k, int n, const AngleTriple& t) {
    detail::check_range(k, n, 1);
    std::vector<Stratum> out;
    for (StratumId id : detail::stratum_ids(k, n)) {
        if (!stratum_contains(id, t)) continue;
        Stratum s = detail::make(id, k, n);
        if (s.multiplicity == 2) {
            for (int b : {1, -1}) {
                s.branch = b;
                out.push_back(s);
            }
            continue;
        }
        if (k % 4 == 0) s.branch = id == StratumId::s_surface ? detail::s_branch(t) : 1;
        else if (k == 3) s.branch = id == StratumId::third_point ? -1 : 1;
        out.push_back(s);
    }
    return out;
}

inline ModuliDescription moduli_describe(int k, int n) {
    detail::check_range(k, n, 0);
    ModuliDescription d;
    d.k = k;
    d.n = n;
    d.special = special_actions(n);
    if (k == 0) return d;
    d.column = moduli_column(k, n);
    for (StratumId id : detail::stratum_ids(k, n)) d.strata.push_back(detail::make(id, k, n));
    return d;
}

/// Deterministic sample triples inside a stratum of M_{k,n}. Continuous
/// parameters keep cosines in [1e-3, 1 - 1e-3], so that measured triples
/// stay resolvable from the lower-dimensional strata they bound.
inline std::vector<AngleTriple> stratum_samples(StratumId id, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    constexpr double margin = 1e-3;
    auto interior = [&](const AngleTriple& t) { return t.cos(0) <= 1.0 - margin && t.cos(2) >= margin; };
    constexpr double pi = std::numbers::pi;
    std::vector<AngleTriple> out;
    auto sorted = [](double a, double b, double c) {
        std::array<double, 3> x{a, b, c};
        std::sort(x.begin(), x.end(), std::greater<>());
        return AngleTriple::from_cos(x[0], x[1], x[2]);
    };
    int guard = 0;
    while (static_cast<int>(out.size()) < count && ++guard < 100000) {
        std::optional<AngleTriple> t;
        switch (id) {
            case StratumId::r4_plus_only:
            case StratumId::r4_minus: t = sorted(u(rng), u(rng), u(rng)); break;
            case StratumId::s_surface: {
                // alternate between the two equalities
                if (out.size() % 2 == 0) {
                    const double c2 = u(rng), c3 = u(rng) * c2, c1 = 1.0 + c3 - c2;
                    if (c1 >= c2) t = AngleTriple::from_cos(c1, c2, c3);
                } else {
                    std::exponential_distribution<double> e(1.0);
                    const double x = e(rng), y = e(rng), z = e(rng), s = x + y + z;
                    t = sorted(x / s, y / s, z / s);
                }
                break;
            }
            case StratumId::zero_phi_phi: {
                const double c = margin + (1.0 - 2.0 * margin) * u(rng);
                t = AngleTriple::from_cos(1.0, c, c);
                break;
            }
            case StratumId::phi_right_right:
                t = AngleTriple::from_cos(margin + (1.0 - 2.0 * margin) * u(rng), 0.0, 0.0);
                break;
            case StratumId::r3_plus_only: {
                const double phi = u(rng) * pi / 3.0 * 0.999;
                t = AngleTriple::from_angles(phi, phi, pi / 2);
                break;
            }
            case StratumId::r3_minus: {
                const double phi = pi / 3.0 + u(rng) * pi / 6.0 * 0.999;
                t = AngleTriple::from_angles(phi, phi, pi / 2);
                break;
            }
            case StratumId::quaternionic: t = AngleTriple::from_cos(1.0, 1.0, 1.0); break;
            case StratumId::complex_point: t = AngleTriple::from_cos(1.0, 0.0, 0.0); break;
            case StratumId::real_point: t = AngleTriple::from_cos(0.0, 0.0, 0.0); break;
            case StratumId::line_point: t = AngleTriple::from_cos(1.0, 1.0, 0.0); break;
            case StratumId::third_point: t = AngleTriple::from_cos(0.5, 0.5, 0.0); break;
        }
        const bool open = id == StratumId::r4_plus_only || id == StratumId::r4_minus || id == StratumId::s_surface;
        if (t && open && !interior(*t)) continue;
        if (t && stratum_contains(id, *t)) out.push_back(*t);
    }
    return out;
}

/// A subspace realizing the class (k, n, triple, branch). The branch may
/// only be given when the triple lies on a Z2 stratum.
inline Subspace representative(int k, int n, const AngleTriple& t, std::optional<int> branch = std::nullopt) {
    const std::vector<Stratum> m = moduli_membership(k, n, t);
    if (m.empty()) throw Inadmissible("triple is not in the moduli space for this (k, n)");
    const Stratum* pick = &m.front();
    if (branch) {
        if (*branch != 1 && *branch != -1) throw InvalidArgument("branch must be +1 or -1");
        if (m.front().multiplicity != 2) throw InvalidArgument("branch requested on a multiplicity-1 stratum");
        pick = *branch == 1 ? &m[0] : &m[1];
    }
    const AngleTriple& a = t;
    switch (pick->id) {
        case StratumId::r4_plus_only:
        case StratumId::r4_minus:
        case StratumId::s_surface:
        case StratumId::zero_phi_phi:
        case StratumId::quaternionic: {
            const int l = k / 4;
            return pick->branch > 0 ? construct_sum(a, l, 0, n) : construct_sum(a, 0, l, n);
        }
        case StratumId::phi_right_right:
            if (detail::right(a.cos(0))) return construct_totally_real(k, n);
            if (detail::zero_angle(a.cos(0))) return construct_totally_complex(k, n);
            return construct_cka_plane_sum(a.phi(0), k, n);
        case StratumId::complex_point: return construct_totally_complex(k, n);
        case StratumId::real_point: return construct_totally_real(k, n);
        case StratumId::r3_plus_only:
        case StratumId::r3_minus: return construct_v3(a.phi(0), pick->branch, n);
        case StratumId::line_point: return construct_im_h_line(n);
        case StratumId::third_point: return construct_v3(std::numbers::pi / 3.0, -1, n);
    }
    throw Inadmissible("no representative");
}

/// Strata of M_{k,n} containing the class of V (empty when V is not
/// protohomogeneous).
inline std::vector<Stratum> locate(const Subspace& V, const ClassifyOptions& o = {}) {
    const ConstancyReport r = constancy_check(V, o.samples, o.seed);
    if (!r.constant) return {};
    const AngleTriple t = r.triple.snapped();
    std::vector<Stratum> m = moduli_membership(V.k(), V.n(), t);
    if (m.empty()) return m;

    int b = 0;
    if (V.k() == 3) {
        try {
            b = branch_of_v3(V, o.seed);
        } catch (const InvalidArgument&) {
            b = 1;  // branches merge
        }
    } else if (V.k() % 4 == 0) {
        try {
            const TypeSignature ts = type_of(V, o);
            if (!ts.pure()) return {};
            b = ts.l_minus == 0 ? 1 : -1;
        } catch (const Error&) {
            return {};
        }
    }
    if (b == 0) return m;
    std::vector<Stratum> out;
    for (const auto& s : m)
        if (s.branch == b) out.push_back(s);
    return out;
}

struct ClassificationRecord {
    int k{0};
    int n{0};
    ConstancyReport report;
    double joint_residual{0.0};
    std::optional<TypeSignature> type;
    std::string type_note;
    Verdict protohomogeneous;
    std::optional<int> branch;
    std::string branch_note;
    std::vector<Stratum> strata;
};

inline ClassificationRecord classify_record(const Subspace& V, const ClassifyOptions& o = {}) {
    ClassificationRecord rec;
    rec.k = V.k();
    rec.n = V.n();
    rec.report = constancy_check(V, o.samples, o.seed);
    rec.joint_residual = joint_canonical_basis(V, o.joint_samples, o.seed + 17).residual;
    rec.protohomogeneous = is_protohomogeneous(V, o);
    if (!rec.report.constant) return rec;
    if (V.k() % 4 == 0) {
        try {
            rec.type = type_of(V, o);
        } catch (const Error& e) {
            rec.type_note = e.what();
        }
    }
    if (V.k() == 3) {
        try {
            rec.branch = branch_of_v3(V, o.seed);
        } catch (const Error& e) {
            rec.branch_note = e.what();
        }
    }
    rec.strata = locate(V, o);
    return rec;
}

}  // namespace qka
