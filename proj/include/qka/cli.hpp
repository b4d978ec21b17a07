#pragma once

// Command implementations behind the qka executable. Each command writes
// JSON (or a table, for selftest) to `out`, diagnostics to `err`, and
// returns the process exit code:
//   0 success, 2 user or parameter error, 3 numerical failure.

#include "qka/acceptance.hpp"
#include "qka/catalog.hpp"
#include "qka/classify.hpp"
#include "qka/error.hpp"
#include "qka/io.hpp"
#include "qka/moduli.hpp"
#include "qka/subspace.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qka::cli {

using json = nlohmann::json;

enum Exit : int { ok = 0, user_error = 2, numerical_error = 3 };

/// QKA_SEED if set and numeric, otherwise 1.
inline std::uint64_t default_seed() {
    if (const char* s = std::getenv("QKA_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

struct ConstructArgs {
    std::string family;
    std::vector<double> angles;  // radians, 1 or 3 values
    std::vector<double> cos;     // cosines, 1 or 3 values
    std::string sign{"+"};
    int lplus{0};
    int lminus{0};
    int k{0};
    int n{0};
    std::string out;
    std::uint64_t seed{1};
};

struct AnglesArgs {
    std::string path;
    int samples{500};
    std::uint64_t seed{1};
};

struct ClassifyArgs {
    std::string path;
    std::uint64_t seed{1};
};

struct ModuliArgs {
    int k{0};
    int n{0};
    std::vector<double> angles;
    std::vector<double> cos;
};

struct SelftestArgs {
    bool full{false};
    std::uint64_t seed{1};
};

namespace detail {

inline json triple_json(const AngleTriple& t) {
    return json{{"angles", t.angles()}, {"cos", t.cosines()}, {"cos2", {t.cos2(0), t.cos2(1), t.cos2(2)}}};
}

inline json stratum_json(const Stratum& s) {
    json j{{"name", s.name},
           {"kind", std::string(kind_name(s.kind))},
           {"parametrization", s.parametrization},
           {"multiplicity", s.multiplicity},
           {"action", s.action}};
    if (s.branch != 0) j["branch"] = s.branch;
    return j;
}

inline int parse_sign(const std::string& s) {
    if (s == "+" || s == "+1" || s == "1") return 1;
    if (s == "-" || s == "-1") return -1;
    throw InvalidArgument("sign must be + or -");
}

/// Full triple from 1 or 3 user values. A single value is the family's free
/// angle; `is_cos` says whether the values are cosines.
inline AngleTriple user_triple(Family f, const std::vector<double>& vals, bool is_cos) {
    constexpr double h = std::numbers::pi / 2.0;
    auto angle = [&](double v) {
        if (!is_cos) return v;
        if (v < -1e-12 || v > 1.0 + 1e-12) throw InvalidArgument("cosines must lie in [0, 1]");
        return std::acos(std::clamp(v, 0.0, 1.0));
    };
    if (vals.size() == 3) {
        if (is_cos) return AngleTriple::from_cos(vals[0], vals[1], vals[2]);
        return AngleTriple::from_angles(vals[0], vals[1], vals[2]);
    }
    if (vals.size() != 1) throw InvalidArgument("give one or three angle values");
    const double phi = angle(vals[0]);
    switch (f) {
        case Family::v3: return AngleTriple::from_angles(phi, phi, h);
        case Family::cka_plane_sum: return AngleTriple::from_angles(phi, h, h);
        case Family::complexified_cka: return AngleTriple::from_angles(0.0, phi, phi);
        default: return AngleTriple::from_angles(phi, phi, phi);
    }
}

inline bool needs_angles(Family f) {
    return f == Family::v3 || f == Family::v4 || f == Family::sum_type || f == Family::cka_plane_sum ||
           f == Family::complexified_cka;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return user_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return user_error;
    }
}

}  // namespace detail

inline int cmd_construct(const ConstructArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto fam = parse_family(a.family);
        if (!fam) throw InvalidArgument("unknown family '" + a.family + "'");
        FamilySpec s;
        s.family = *fam;
        s.sign = detail::parse_sign(a.sign);
        s.k = a.k;
        s.n = a.n;
        s.lplus = a.lplus;
        s.lminus = a.lminus;
        if (!a.angles.empty() && !a.cos.empty()) throw InvalidArgument("give --angles or --cos, not both");
        if (detail::needs_angles(s.family)) {
            if (a.angles.empty() && a.cos.empty()) throw InvalidArgument("this family needs --angles or --cos");
            s.angles = detail::user_triple(s.family, a.cos.empty() ? a.angles : a.cos, !a.cos.empty());
        }
        if (s.n < 1) throw InvalidArgument("--n must be positive");

        const Subspace V = construct(s);
        const ConstancyReport rep = constancy_check(V, 500, a.seed);
        if (!rep.constant) throw NumericalFailure("constructed subspace failed the constancy check");

        io::Meta m;
        m.family = std::string(family_name(s.family));
        const AngleTriple declared = declared_triple(s);
        m.cos = declared.cosines();
        m.angles = declared.angles();
        if (s.family == Family::v3 || s.family == Family::v4) m.sign = s.sign;
        if (s.family == Family::sum_type) {
            m.lplus = s.lplus;
            m.lminus = s.lminus;
        }
        m.seed = a.seed;
        if (!a.out.empty()) io::save(a.out, V, m);

        json j{{"file", a.out.empty() ? json(nullptr) : json(a.out)},
               {"n", V.n()},
               {"k", V.k()},
               {"triple", detail::triple_json(rep.triple)},
               {"max_spread", rep.max_spread},
               {"constant", rep.constant},
               {"meta", io::meta_json(m)}};
        out << j.dump(2) << '\n';
        return ok;
    });
}

inline int cmd_angles(const AnglesArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (a.samples < 2) throw InvalidArgument("--samples must be at least 2");
        const io::SubspaceFile f = io::load(a.path);
        for (const auto& w : f.warnings) err << "warning: " << w << '\n';
        const ConstancyReport rep = constancy_check(f.subspace, a.samples, a.seed);
        const JointBasis jb = joint_canonical_basis(f.subspace, 64, a.seed);
        json j{{"n", f.subspace.n()},
               {"k", f.subspace.k()},
               {"triple", detail::triple_json(rep.triple)},
               {"max_spread", rep.max_spread},
               {"samples", rep.samples},
               {"constant", rep.constant},
               {"joint_residual", jb.residual}};
        out << j.dump(2) << '\n';
        return ok;
    });
}

inline json classification_json(const ClassificationRecord& rec) {
    json j{{"n", rec.n},
           {"k", rec.k},
           {"triple", detail::triple_json(rec.report.triple)},
           {"max_spread", rec.report.max_spread},
           {"constant", rec.report.constant},
           {"joint_residual", rec.joint_residual},
           {"protohomogeneous", std::string(answer_name(rec.protohomogeneous.value))},
           {"reason", rec.protohomogeneous.reason}};
    j["type"] = rec.type ? json::array({rec.type->l_plus, rec.type->l_minus}) : json(nullptr);
    if (!rec.type_note.empty()) j["type_note"] = rec.type_note;
    j["branch"] = rec.branch ? json(*rec.branch) : json(nullptr);
    if (!rec.branch_note.empty()) j["branch_note"] = rec.branch_note;
    json strata = json::array();
    for (const auto& s : rec.strata) strata.push_back(detail::stratum_json(s));
    j["strata"] = strata;
    return j;
}

inline int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const io::SubspaceFile f = io::load(a.path);
        for (const auto& w : f.warnings) err << "warning: " << w << '\n';
        ClassifyOptions o;
        o.seed = a.seed;
        out << classification_json(classify_record(f.subspace, o)).dump(2) << '\n';
        return ok;
    });
}

inline int cmd_moduli(const ModuliArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (!a.angles.empty() && !a.cos.empty()) throw InvalidArgument("give --angles or --cos, not both");
        json j{{"k", a.k}, {"n", a.n}};
        if (!a.angles.empty() || !a.cos.empty()) {
            const auto& v = a.cos.empty() ? a.angles : a.cos;
            if (v.size() != 3) throw InvalidArgument("a triple needs three values");
            const AngleTriple t = a.cos.empty() ? AngleTriple::from_angles(v[0], v[1], v[2])
                                                : AngleTriple::from_cos(v[0], v[1], v[2]);
            json strata = json::array();
            for (const auto& s : moduli_membership(a.k, a.n, t)) strata.push_back(detail::stratum_json(s));
            j["triple"] = detail::triple_json(t);
            j["strata"] = strata;
        } else {
            const ModuliDescription d = moduli_describe(a.k, a.n);
            json strata = json::array();
            for (const auto& s : d.strata) strata.push_back(detail::stratum_json(s));
            json special = json::array();
            for (const auto& s : d.special) special.push_back({{"label", s.label}, {"description", s.description}});
            j["column"] = d.column < 0 ? json(nullptr) : json(d.column);
            j["strata"] = strata;
            j["special_actions"] = special;
        }
        out << j.dump(2) << '\n';
        return ok;
    });
}

inline int cmd_selftest(const SelftestArgs& a, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        acceptance::Config cfg;
        cfg.mode = a.full ? acceptance::Mode::full : acceptance::Mode::quick;
        cfg.seed = a.seed;
        bool all = true;
        for (const auto& r : acceptance::run_all(cfg)) {
            out << acceptance::format_line(r) << '\n';
            all = all && r.passed;
        }
        out << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
        return all ? ok : 1;
    });
}

}  // namespace qka::cli
