#pragma once

// Deterministic report serialization: JSON with sorted keys and doubles
// printed with 17 significant digits, plus CSV tables.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "latvar/greens.hpp"
#include "latvar/lattice.hpp"
#include "latvar/oscillation.hpp"
#include "latvar/spectrum.hpp"
#include "latvar/theorems.hpp"
#include "latvar/variational.hpp"

namespace latvar {

using json = nlohmann::json;

inline constexpr int kReportVersion = 1;

namespace detail {

inline std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

inline void write_json(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{" << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << "," << nl;
                first = false;
                os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
                write_json(os, it.value(), indent, depth + 1);
            }
            os << nl << close << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[" << nl;
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << "," << nl;
                os << pad;
                write_json(os, j[i], indent, depth + 1);
            }
            os << nl << close << "]";
            return;
        }
        case json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << j.dump();
    }
}

}  // namespace detail

/// Sorted keys, 17 significant digits, non-finite numbers as null.
inline std::string to_json_text(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::write_json(os, j, indent, 0);
    os << "\n";
    return os.str();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_number(double x) { return std::isfinite(x) ? detail::format_double(x) : ""; }

/// Two-column path,value table of every leaf of a report.
inline std::string flatten_csv(const json& j) {
    std::ostringstream os;
    os << "path,value\n";
    auto walk = [&](auto&& self, const json& x, const std::string& path) -> void {
        if (x.is_object()) {
            for (auto it = x.begin(); it != x.end(); ++it) self(self, it.value(), path + "/" + it.key());
        } else if (x.is_array()) {
            for (std::size_t i = 0; i < x.size(); ++i) self(self, x[i], path + "/" + std::to_string(i));
        } else if (x.is_number_float()) {
            os << csv_field(path) << "," << csv_number(x.get<double>()) << "\n";
        } else if (x.is_string()) {
            os << csv_field(path) << "," << csv_field(x.get<std::string>()) << "\n";
        } else {
            os << csv_field(path) << "," << x.dump() << "\n";
        }
    };
    walk(walk, j, "");
    return os.str();
}

inline json site_json(const Site& s) { return json(s); }

inline json to_json(const SpectralReport& r) {
    return {{"eigenvalues_above", r.above}, {"eigenvalues_below", r.below},   {"band", {-r.band_edge, r.band_edge}},
            {"truncation_size", r.truncation_size}, {"tolerance", r.tolerance}, {"count", r.count()}};
}

/// index,eigenvalue,side,gap_to_band
inline std::string spectrum_csv(const SpectralReport& r) {
    std::ostringstream os;
    os << "index,eigenvalue,side,gap_to_band\n";
    std::size_t k = 0;
    for (double e : r.below) os << k++ << "," << csv_number(e) << ",below," << csv_number(-r.band_edge - e) << "\n";
    for (double e : r.above) os << k++ << "," << csv_number(e) << ",above," << csv_number(e - r.band_edge) << "\n";
    return os.str();
}

inline json to_json(const BoundStateCount& c) {
    json j{{"n", c.n},         {"above", c.above},     {"below", c.below},   {"above_2n", c.above_2n},
           {"below_2n", c.below_2n}, {"stable", c.stable}, {"decays", c.decays}, {"tail_extrapolated", c.tail_extrapolated},
           {"tail_borderline", c.tail_borderline}};
    if (!c.warning.empty()) j["warning"] = c.warning;
    return j;
}

inline json trial_summary(const TrialFunction& t) {
    const auto s = t.support();
    json j{{"norm2", t.norm2()}, {"support_size", s.size()}};
    if (!s.empty()) {
        j["first_site"] = site_json(t.domain().site(s.front()));
        j["last_site"] = site_json(t.domain().site(s.back()));
    }
    return j;
}

inline json to_json(const DeltaCertificate& c) {
    return {{"delta", c.delta},
            {"lower_bound_rhs", c.lower_bound_rhs},
            {"band_edge", c.band_edge},
            {"rq_plus", c.rq_plus},
            {"rq_minus", c.rq_minus},
            {"winner", c.winner == 0 ? "plus" : "minus"},
            {"winning_gap", c.winning_gap()},
            {"positive", c.positive()},
            {"phi_plus", trial_summary(c.phi_plus)},
            {"phi_minus", trial_summary(c.phi_minus)}};
}

inline json to_json(const ComparisonVerdict& v) {
    json certs = json::array();
    for (const auto& c : v.certificates) certs.push_back(to_json(c));
    return {{"n", v.n},
            {"m", v.m},
            {"hypothesis_count", v.hypothesis_count},
            {"conclusion_count", v.conclusion_count},
            {"hypothesis_count_2n", v.hypothesis_count_2n},
            {"conclusion_count_2n", v.conclusion_count_2n},
            {"stable", v.stable},
            {"holds", v.holds},
            {"certificates", certs},
            {"note", v.note}};
}

inline json to_json(const EssentialSpectrumResult& r) {
    json certs = json::array();
    for (const auto& c : r.certificates) {
        auto j = to_json(c.certificate);
        j["site"] = site_json(c.site);
        j["guaranteed_gap"] = c.guaranteed_gap;
        certs.push_back(j);
    }
    return {{"nu", r.nu},
            {"a", r.a},
            {"radius", r.l},
            {"trial_energy", r.trial_energy},
            {"potential_gain", r.potential_gain},
            {"separation", r.separation},
            {"certificates", certs}};
}

inline json to_json(const ZeroPotentialReport& r) {
    json rows = json::array();
    for (const auto& b : r.bounds)
        rows.push_back({{"site", site_json(b.site)},
                        {"value", b.value},
                        {"bound", b.bound},
                        {"radius", b.radius},
                        {"energy", b.energy},
                        {"satisfied", b.satisfied}});
    json j{{"nu", r.nu}, {"l_max", r.l_max}, {"bounds", rows}, {"all_satisfied", r.all_satisfied()}};
    j["no_bound_states"] = r.no_bound_states ? json(*r.no_bound_states) : json(nullptr);
    return j;
}

inline json to_json(const BargmannResult& r) {
    return {{"sum", r.sum},
            {"predicts_no_bound_states", r.predicts_no_bound_states},
            {"counts", to_json(r.counts)},
            {"consistent", r.consistent}};
}

inline json to_json(const DecayBoundCheck& c) {
    return {{"no_bound_states", c.no_bound_states},
            {"nonnegative", c.nonnegative},
            {"max_n_v", c.max_n_v},
            {"max_sqrt_n_v", c.max_sqrt_n_v},
            {"positive_bound_holds", c.positive_bound_holds},
            {"general_bound_holds", c.general_bound_holds},
            {"holds", c.holds()}};
}

inline json to_json(const InfinitudeEvidence& e) {
    json counts = json::array();
    for (const auto& c : e.counts) counts.push_back(to_json(c));
    json witness = json::object();
    for (std::size_t i = 0; i < e.truncations.size(); ++i)
        witness[std::to_string(e.truncations[i])] = e.counts[i].total();
    return {{"criterion", to_string(e.criterion)},
            {"hypotheses_hold", e.hypotheses_hold},
            {"parameter", e.parameter},
            {"statistic", e.statistic},
            {"threshold", e.threshold},
            {"nk", e.nk},
            {"positive_witnesses", e.positive_witnesses},
            {"truncations", e.truncations},
            {"counts", counts},
            {"witness_count_at_n", witness},
            {"strictly_increasing", e.strictly_increasing},
            {"increasing_subsequence", e.increasing_subsequence},
            {"note", e.note}};
}

inline json to_json(const WholeLineCounts& w) {
    return {{"truncations", w.truncations},   {"right", w.right}, {"left", w.left}, {"total", w.total},
            {"coupling_tolerance", w.coupling_tolerance}, {"strictly_increasing", w.strictly_increasing}};
}

inline json to_json(const MomentReport& r) {
    json sums = json::array();
    for (const auto& p : r.partial_sums)
        sums.push_back({{"n", p.n},
                        {"lower", p.lower},
                        {"upper", p.upper},
                        {"estimate", p.estimate()},
                        {"above", p.above},
                        {"below", p.below}});
    return {{"gamma", r.gamma},
            {"decay_c", r.decay_c},
            {"decay_alpha", r.decay_alpha},
            {"threshold", r.threshold},
            {"below_threshold", r.below_threshold},
            {"partial_sums", sums},
            {"growth_ratio", r.growth_ratio},
            {"growth_factor", r.growth_factor},
            {"monotone", r.monotone},
            {"diverging", r.diverging},
            {"decay_verified", r.decay_verified},
            {"note", r.note}};
}

/// n,N,...,value,error rows for a moment report's partial sums
inline std::string moments_csv(const MomentReport& r) {
    std::ostringstream os;
    os << "n,lower,upper,estimate,above,below\n";
    for (const auto& p : r.partial_sums)
        os << p.n << "," << csv_number(p.lower) << "," << csv_number(p.upper) << "," << csv_number(p.estimate()) << ","
           << p.above << "," << p.below << "\n";
    return os.str();
}

inline json to_json(const GreenTable& t) {
    json rows = json::array();
    for (const auto& [k, e] : t.entries()) rows.push_back({{"offset", site_json(k)}, {"value", e.value}, {"error", e.error}});
    return {{"nu", t.nu()},
            {"resolution", t.resolution()},
            {"entries", rows},
            {"max_error", t.max_error()},
            {"converged", t.converged()}};
}

inline std::string green_csv(const GreenTable& t) {
    std::ostringstream os;
    t.write_csv(os);
    return os.str();
}

inline json to_json(const PowerIterationResult& r) {
    return {{"estimate", r.estimate},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"last_increment", r.last_increment}};
}

inline json to_json(const SparseCounterexample& c) {
    return {{"nu", c.nu},
            {"lambda", c.lambda},
            {"value", c.value},
            {"positions", c.positions},
            {"partial_sums", c.partial_sums},
            {"schur_bound", c.bs.schur_bound},
            {"support_size", c.bs.sites.size()}};
}

}  // namespace latvar
