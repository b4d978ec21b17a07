#pragma once

// JSON persistence of subspaces.
//
// {
//   "format_version": 1,
//   "n": 4, "k": 4,
//   "basis": [[...4n reals...], ... k rows],
//   "meta": {"family": "v4", "cos": [..], "angles": [..], "sign": -1,
//            "lplus": 0, "lminus": 0, "seed": 1}
// }
//
// Reals are written in shortest round-trip form, so write -> read is exact.

#include "qka/error.hpp"
#include "qka/subspace.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qka::io {

using json = nlohmann::json;

inline constexpr int format_version = 1;

struct Meta {
    std::optional<std::string> family;
    std::optional<std::array<double, 3>> cos;
    std::optional<std::array<double, 3>> angles;
    std::optional<int> sign;
    std::optional<int> lplus;
    std::optional<int> lminus;
    std::optional<std::uint64_t> seed;
};

struct SubspaceFile {
    Subspace subspace;
    Meta meta;
    std::vector<std::string> warnings;
};

inline json meta_json(const Meta& m) {
    json j = json::object();
    if (m.family) j["family"] = *m.family;
    if (m.cos) j["cos"] = *m.cos;
    if (m.angles) j["angles"] = *m.angles;
    if (m.sign) j["sign"] = *m.sign;
    if (m.lplus) j["lplus"] = *m.lplus;
    if (m.lminus) j["lminus"] = *m.lminus;
    if (m.seed) j["seed"] = *m.seed;
    return j;
}

inline json to_json(const Subspace& v, const Meta& m = {}) {
    json rows = json::array();
    for (int c = 0; c < v.k(); ++c) {
        std::vector<double> row(static_cast<std::size_t>(4 * v.n()));
        for (int r = 0; r < 4 * v.n(); ++r) row[static_cast<std::size_t>(r)] = v.basis()(r, c);
        rows.push_back(row);
    }
    return json{{"format_version", format_version}, {"n", v.n()}, {"k", v.k()}, {"basis", rows}, {"meta", meta_json(m)}};
}

namespace detail {

template <class T>
std::optional<T> opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace detail

/// Parses and validates a subspace file. Rows are re-orthonormalized (with
/// a warning) when off by more than 1e-10, and rejected above 1e-8.
inline SubspaceFile from_json(const json& j) {
    try {
        if (!j.is_object()) throw InvalidArgument("subspace file must be a JSON object");
        const int ver = j.at("format_version").get<int>();
        if (ver != format_version) throw InvalidArgument("unsupported format_version " + std::to_string(ver));
        const int n = j.at("n").get<int>();
        const int k = j.at("k").get<int>();
        const json& rows = j.at("basis");
        if (n < 1 || k < 1 || k > 4 * n) throw InvalidArgument("n and k out of range");
        if (!rows.is_array() || static_cast<int>(rows.size()) != k) throw InvalidArgument("basis must have k rows");
        Eigen::MatrixXd b(4 * n, k);
        for (int c = 0; c < k; ++c) {
            const auto row = rows.at(static_cast<std::size_t>(c)).get<std::vector<double>>();
            if (static_cast<int>(row.size()) != 4 * n) throw InvalidArgument("basis rows must have 4n entries");
            for (int r = 0; r < 4 * n; ++r) b(r, c) = row[static_cast<std::size_t>(r)];
        }
        const double defect = (b.transpose() * b - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
        if (!(defect <= 1e-8)) throw InvalidArgument("basis rows are not orthonormal (defect " + std::to_string(defect) + ")");

        std::vector<std::string> warnings;
        std::optional<Subspace> v;
        if (defect > tol::orthonormal) {
            warnings.push_back("basis re-orthonormalized (defect " + std::to_string(defect) + ")");
            v = Subspace::from_matrix(b);
        } else {
            v = Subspace(n, b);
        }

        Meta m;
        if (j.contains("meta") && j.at("meta").is_object()) {
            const json& mj = j.at("meta");
            m.family = detail::opt<std::string>(mj, "family");
            m.cos = detail::opt<std::array<double, 3>>(mj, "cos");
            m.angles = detail::opt<std::array<double, 3>>(mj, "angles");
            m.sign = detail::opt<int>(mj, "sign");
            m.lplus = detail::opt<int>(mj, "lplus");
            m.lminus = detail::opt<int>(mj, "lminus");
            m.seed = detail::opt<std::uint64_t>(mj, "seed");
        }
        return {*v, m, warnings};
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed subspace file: ") + e.what());
    }
}

inline void save(const std::string& path, const Subspace& v, const Meta& m = {}) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << to_json(v, m).dump(1) << '\n';
    if (!out) throw InvalidArgument("failed writing " + path);
}

inline SubspaceFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace qka::io
