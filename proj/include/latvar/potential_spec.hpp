#pragma once

// JSON potential specifications:
//   {"family": "...", "params": {...}, "domain": {"kind": "half_line", "n": N}}
// with domain kinds half_line {n}, whole_line {left, right} and
// box {half_widths: [...]}.  Errors carry a JSON pointer to the offending field.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "latvar/families.hpp"
#include "latvar/greens.hpp"
#include "latvar/lattice.hpp"
#include "latvar/oscillation.hpp"

namespace latvar {

using json = nlohmann::json;

class SpecError : public std::runtime_error {
public:
    SpecError(std::string pointer, const std::string& what)
        : std::runtime_error((pointer.empty() ? std::string("document root") : pointer) + ": " + what),
          pointer(std::move(pointer)) {}
    std::string pointer;
};

inline const std::vector<std::string>& potential_families() {
    static const std::vector<std::string> f{"zero",   "single-site", "dipole",    "alternating",
                                            "power-law", "staircase", "sparse-3d", "custom"};
    return f;
}

namespace detail {

inline const json& field(const json& obj, const std::string& key, const std::string& at) {
    if (!obj.is_object()) throw SpecError(at, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(at + "/" + key, "missing required field");
    return *it;
}

inline double number(const json& obj, const std::string& key, const std::string& at,
                     std::optional<double> fallback = std::nullopt) {
    if (!obj.is_object()) throw SpecError(at, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw SpecError(at + "/" + key, "missing required field");
    }
    if (!it->is_number()) throw SpecError(at + "/" + key, "expected a number");
    const double x = it->get<double>();
    if (!std::isfinite(x)) throw SpecError(at + "/" + key, "must be finite");
    return x;
}

inline std::int64_t integer(const json& obj, const std::string& key, const std::string& at,
                            std::optional<std::int64_t> fallback = std::nullopt) {
    if (!obj.is_object()) throw SpecError(at, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw SpecError(at + "/" + key, "missing required field");
    }
    if (!it->is_number_integer()) throw SpecError(at + "/" + key, "expected an integer");
    return it->get<std::int64_t>();
}

inline bool boolean(const json& obj, const std::string& key, const std::string& at, bool fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) throw SpecError(at + "/" + key, "expected a boolean");
    return it->get<bool>();
}

}  // namespace detail

inline LatticeDomain parse_domain(const json& d, const std::string& at = "/domain") {
    const auto& kind = detail::field(d, "kind", at);
    if (!kind.is_string()) throw SpecError(at + "/kind", "expected a string");
    const auto k = kind.get<std::string>();
    try {
        if (k == "half_line") {
            const auto n = detail::integer(d, "n", at);
            if (n < 1) throw SpecError(at + "/n", "must be >= 1");
            return LatticeDomain::half_line(n);
        }
        if (k == "whole_line") {
            const auto l = detail::integer(d, "left", at);
            const auto r = detail::integer(d, "right", at);
            if (l < 0 || r < 0) throw SpecError(at, "left and right must be >= 0");
            return LatticeDomain::whole_line(l, r);
        }
        if (k == "box") {
            const auto& hw = detail::field(d, "half_widths", at);
            if (!hw.is_array() || hw.empty()) throw SpecError(at + "/half_widths", "expected a nonempty array");
            std::vector<std::int64_t> h;
            for (std::size_t i = 0; i < hw.size(); ++i) {
                if (!hw[i].is_number_integer() || hw[i].get<std::int64_t>() < 0)
                    throw SpecError(at + "/half_widths/" + std::to_string(i), "expected a nonnegative integer");
                h.push_back(hw[i].get<std::int64_t>());
            }
            return LatticeDomain::box(h);
        }
    } catch (const PreconditionError& e) {
        throw SpecError(at, e.what());
    }
    throw SpecError(at + "/kind", "unknown domain kind '" + k + "'");
}

/// "half_line:100", "whole_line:50" (symmetric), "whole_line:20:30", "box:10,10"
inline json domain_from_string(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw SpecError("/domain", "expected kind:size, got '" + s + "'");
    const auto kind = s.substr(0, colon);
    const auto rest = s.substr(colon + 1);
    auto to_int = [&](const std::string& x) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoll(x, &pos);
            if (pos != x.size()) throw std::invalid_argument(x);
            return static_cast<std::int64_t>(v);
        } catch (const std::exception&) {
            throw SpecError("/domain", "bad size '" + x + "' in '" + s + "'");
        }
    };
    if (kind == "half_line") return {{"kind", kind}, {"n", to_int(rest)}};
    if (kind == "whole_line") {
        const auto c = rest.find(':');
        if (c == std::string::npos) return {{"kind", kind}, {"left", to_int(rest)}, {"right", to_int(rest)}};
        return {{"kind", kind}, {"left", to_int(rest.substr(0, c))}, {"right", to_int(rest.substr(c + 1))}};
    }
    if (kind == "box") {
        json hw = json::array();
        std::stringstream ss(rest);
        for (std::string part; std::getline(ss, part, ',');) hw.push_back(to_int(part));
        return {{"kind", kind}, {"half_widths", hw}};
    }
    throw SpecError("/domain/kind", "unknown domain kind '" + kind + "'");
}

/// Rows "index,value" (1D coordinate, or a full site as several leading
/// columns for boxes); '#' comments and a non-numeric header line are skipped.
inline Potential read_values_csv(const std::string& path, const LatticeDomain& d, const std::string& at) {
    std::ifstream in(path);
    if (!in) throw SpecError(at, "cannot open values file '" + path + "'");
    std::vector<double> v(d.size(), 0.0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        std::vector<double> nums;
        try {
            for (const auto& c : cells) {
                std::size_t pos = 0;
                nums.push_back(std::stod(c, &pos));
                while (pos < c.size() && std::isspace(static_cast<unsigned char>(c[pos]))) ++pos;
                if (pos != c.size()) throw std::invalid_argument(c);
            }
        } catch (const std::exception&) {
            if (lineno == 1) continue;
            throw SpecError(at, path + ":" + std::to_string(lineno) + ": expected numeric cells");
        }
        if (nums.size() != static_cast<std::size_t>(d.dim()) + 1)
            throw SpecError(at, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d.dim() + 1) +
                                    " columns");
        Site s(static_cast<std::size_t>(d.dim()));
        for (int a = 0; a < d.dim(); ++a) s[a] = static_cast<std::int64_t>(std::llround(nums[a]));
        auto idx = d.index(s);
        if (!idx) throw SpecError(at, path + ":" + std::to_string(lineno) + ": site outside " + d.describe());
        if (!std::isfinite(nums.back())) throw SpecError(at, path + ":" + std::to_string(lineno) + ": value not finite");
        v[*idx] = nums.back();
    }
    return Potential(d, std::move(v));
}

struct PotentialSpec {
    std::string family;
    json params = json::object();
    json domain;
    /// Directory against which a relative values_file is resolved.
    std::string base_dir;

    static PotentialSpec parse(const json& j, std::string base_dir = "") {
        if (!j.is_object()) throw SpecError("", "potential spec must be a JSON object");
        PotentialSpec s;
        const auto& f = detail::field(j, "family", "");
        if (!f.is_string()) throw SpecError("/family", "expected a string");
        s.family = f.get<std::string>();
        bool known = false;
        for (const auto& name : potential_families()) known = known || name == s.family;
        if (!known) throw SpecError("/family", "unknown family '" + s.family + "'");
        if (auto it = j.find("params"); it != j.end()) {
            if (!it->is_object()) throw SpecError("/params", "expected an object");
            s.params = *it;
        }
        if (auto it = j.find("domain"); it != j.end()) {
            s.domain = *it;
            parse_domain(s.domain);
        } else if (s.family != "sparse-3d" && s.family != "staircase") {
            throw SpecError("/domain", "missing required field");
        }
        s.base_dir = std::move(base_dir);
        return s;
    }

    static PotentialSpec load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw SpecError("", "cannot open potential spec '" + path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw SpecError("", std::string("invalid JSON in ") + path + ": " + e.what());
        }
        const auto slash = path.find_last_of('/');
        return parse(j, slash == std::string::npos ? "" : path.substr(0, slash));
    }

    json to_json() const {
        json j{{"family", family}, {"params", params}};
        if (!domain.is_null()) j["domain"] = domain;
        return j;
    }

    /// The window the family is evaluated on.
    LatticeDomain window() const {
        if (!domain.is_null()) return parse_domain(domain);
        throw SpecError("/domain", "family '" + family + "' needs an explicit domain here");
    }

    /// Scale parameter swept by coupling grids.
    std::string coupling_name() const {
        if (family == "single-site" || family == "dipole" || family == "sparse-3d") return "lambda";
        if (family == "alternating") return "beta";
        if (family == "power-law") return "C";
        return "";
    }

    PotentialSpec with_coupling(double x) const {
        const auto name = coupling_name();
        if (name.empty()) throw SpecError("/family", "family '" + family + "' has no coupling parameter");
        PotentialSpec s = *this;
        s.params[name] = x;
        return s;
    }

    StaircaseExample staircase() const {
        const auto base = detail::integer(params, "base", "/params");
        const auto kmax = detail::integer(params, "k_max", "/params");
        if (base < 2) throw SpecError("/params/base", "must be >= 2");
        if (kmax < 1) throw SpecError("/params/k_max", "must be >= 1");
        try {
            return staircase_potential(base, static_cast<int>(kmax));
        } catch (const PreconditionError& e) {
            throw SpecError("/params/k_max", e.what());
        }
    }

    /// Half-line families as functions of n, so oscillation counts can run
    /// past the stored window.
    std::optional<HalfLinePotential> half_line() const {
        if (!domain.is_null() && parse_domain(domain).kind() != DomainKind::HalfLine) return std::nullopt;
        const std::string at = "/params";
        if (family == "zero") return HalfLinePotential::sparse({});
        if (family == "single-site" || family == "dipole") {
            const auto n0 = detail::integer(params, "n0", at);
            const double lambda = detail::number(params, "lambda", at);
            if (n0 < 1) throw SpecError(at + "/n0", "must be >= 1");
            return family == "dipole" ? dipole(n0, lambda) : single_site(n0, lambda);
        }
        if (family == "alternating") return alternating(detail::number(params, "beta", at));
        if (family == "power-law") {
            const double alpha = detail::number(params, "alpha", at);
            if (!(alpha > 0)) throw SpecError(at + "/alpha", "must be positive");
            return power_law(detail::number(params, "C", at), alpha, detail::boolean(params, "alternate", at, false));
        }
        if (family == "staircase") return staircase().potential();
        if (family == "custom") return HalfLinePotential::from(build());
        return std::nullopt;
    }

    Potential build() const {
        const std::string at = "/params";
        if (family == "sparse-3d") return sparse_3d().second;
        const auto d = window();
        if (family == "zero") return Potential(d);
        if (family == "custom") {
            auto it = params.find("values_file");
            if (it == params.end()) throw SpecError(at + "/values_file", "missing required field");
            if (!it->is_string()) throw SpecError(at + "/values_file", "expected a path or \"none\"");
            const auto file = it->get<std::string>();
            if (file == "none") return Potential(d);
            const auto path = (!file.empty() && file[0] != '/' && !base_dir.empty()) ? base_dir + "/" + file : file;
            return read_values_csv(path, d, at + "/values_file");
        }
        if (d.dim() != 1) throw SpecError("/domain", "family '" + family + "' is one-dimensional");
        if (family == "single-site" || family == "dipole") {
            const auto n0 = detail::integer(params, "n0", at);
            const double lambda = detail::number(params, "lambda", at);
            if (!d.index_of(n0)) throw SpecError(at + "/n0", "site outside " + d.describe());
            std::vector<std::pair<std::size_t, double>> e{{*d.index_of(n0), lambda}};
            if (family == "dipole") {
                if (!d.index_of(n0 + 1)) throw SpecError(at + "/n0", "site n0+1 outside " + d.describe());
                e.emplace_back(*d.index_of(n0 + 1), -lambda);
            }
            return Potential::sparse(d, e);
        }
        if (family == "staircase") {
            const auto ex = staircase();
            if (d.kind() != DomainKind::HalfLine) throw SpecError("/domain/kind", "staircase lives on the half-line");
            return ex.on_window(static_cast<std::int64_t>(d.size()));
        }
        if (d.kind() == DomainKind::HalfLine) return half_line()->on_window(static_cast<std::int64_t>(d.size()));
        // whole line: n = 0 is left at zero for the singular families
        const auto f = [&]() -> std::function<double(std::int64_t)> {
            if (family == "alternating") {
                const double beta = detail::number(params, "beta", at);
                return [beta](std::int64_t n) {
                    return n == 0 ? 0.0 : ((std::abs(n) & 1) ? -beta : beta) / static_cast<double>(std::abs(n));
                };
            }
            const double c = detail::number(params, "C", at);
            const double alpha = detail::number(params, "alpha", at);
            const bool alt = detail::boolean(params, "alternate", at, false);
            return [c, alpha, alt](std::int64_t n) {
                if (n == 0) return 0.0;
                const double x = c * std::pow(static_cast<double>(std::abs(n)), -alpha);
                return (alt && (std::abs(n) & 1)) ? -x : x;
            };
        }();
        return Potential::from_function(d, f);
    }

    /// The sparse counterexample together with its potential on the
    /// stretched verification box.
    std::pair<SparseCounterexample, Potential> sparse_3d() const {
        const std::string at = "/params";
        const auto nu = detail::integer(params, "nu", at, 3);
        const double lambda = detail::number(params, "lambda", at, 1.0);
        const auto count = detail::integer(params, "sites", at, 5);
        const auto res = detail::integer(params, "resolution", at, 256);
        const auto transverse = detail::integer(params, "transverse", at, 10);
        const auto margin = detail::integer(params, "margin", at, 10);
        if (nu < 3) throw SpecError(at + "/nu", "must be >= 3");
        if (count < 1) throw SpecError(at + "/sites", "must be >= 1");
        try {
            GreenTable table(static_cast<int>(nu), static_cast<int>(res));
            auto c = sparse_counterexample(static_cast<int>(nu), static_cast<std::size_t>(count), lambda, table);
            const auto box = c.verification_box(transverse, margin);
            auto p = c.on(box);
            return {std::move(c), std::move(p)};
        } catch (const PreconditionError& e) {
            throw SpecError(at, e.what());
        }
    }
};

}  // namespace latvar
