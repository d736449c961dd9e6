#pragma once

// Aggregate run of every theorem check over builtin families, random
// property suites (seeded) and the potential specs of a corpus directory.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "latvar/families.hpp"
#include "latvar/greens.hpp"
#include "latvar/oscillation.hpp"
#include "latvar/potential_spec.hpp"
#include "latvar/report.hpp"
#include "latvar/spectrum.hpp"
#include "latvar/theorems.hpp"

namespace latvar {

struct CheckResult {
    std::string name;
    std::string statement;
    /// "pass", "fail" or "unstable"
    std::string status = "pass";
    json detail = json::object();
    double seconds = 0.0;
};

inline json to_json(const CheckResult& c) {
    return {{"name", c.name}, {"statement", c.statement}, {"status", c.status}, {"detail", c.detail}};
}

struct ScoreboardOptions {
    bool quick = false;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string corpus_dir;
    /// Green table resolution for the three-dimensional counterexample.
    int green_resolution = 0;
};

/// Corpus entry: file name and parsed spec.
struct CorpusEntry {
    std::string file;
    PotentialSpec spec;
};

inline std::vector<CorpusEntry> load_corpus(const std::string& dir) {
    std::vector<CorpusEntry> out;
    if (dir.empty()) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            out.push_back({f.filename().string(), PotentialSpec::load(f.string())});
        } catch (const SpecError& e) {
            throw SpecError(e.pointer, f.filename().string() + ": " + e.what());
        }
    }
    return out;
}

namespace detail {

/// s_n A n^{-p} on [1, K], zero beyond; signs, A, p and K drawn from `rng`.
inline HalfLinePotential random_decaying(std::mt19937_64& rng, bool mixed_signs = true) {
    std::uniform_real_distribution<double> amp(0.2, 4.0), pw(0.5, 2.0);
    std::uniform_int_distribution<int> len(3, 200), coin(0, 1);
    const double a = amp(rng), p = pw(rng);
    const int k = len(rng);
    std::map<std::int64_t, double> m;
    for (int n = 1; n <= k; ++n) {
        const double s = mixed_signs && coin(rng) ? -1.0 : 1.0;
        m[n] = s * a * std::pow(static_cast<double>(n), -p);
    }
    return HalfLinePotential::sparse(m);
}

/// Uniform values in [-amp, amp] on [1, K] of a window of size N.
inline Potential random_compact(std::mt19937_64& rng, std::int64_t max_window = 300) {
    std::uniform_int_distribution<std::int64_t> win(10, max_window);
    const auto n = win(rng);
    std::uniform_int_distribution<std::int64_t> sup(1, n);
    std::uniform_real_distribution<double> amp(0.1, 3.0);
    const auto k = sup(rng);
    const double a = amp(rng);
    std::uniform_real_distribution<double> val(-a, a);
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = val(rng);
    return Potential(LatticeDomain::half_line(n), std::move(v));
}

/// Eigenvalues of the dense tridiagonal matrix strictly outside [-2, 2].
inline std::pair<std::size_t, std::size_t> dense_counts(const Potential& v) {
    const auto eig = symmetric_eigen(SymMatrix::from(SymTridiagonal::from(LatticeOperator(v))));
    std::size_t above = 0, below = 0;
    for (double e : eig.values) {
        if (e > 2.0) ++above;
        if (e < -2.0) ++below;
    }
    return {above, below};
}

template <class F>
CheckResult timed(const std::string& name, const std::string& statement, F&& body) {
    CheckResult c;
    c.name = name;
    c.statement = statement;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.status = "fail";
        c.detail["error"] = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

}  // namespace detail

inline CheckResult check_single_site_threshold(int n0_max) {
    return detail::timed("single-site-threshold", "lambda W_n0 binds exactly when lambda > 1/n0", [&](CheckResult& c) {
        json rows = json::array();
        for (int n0 = 1; n0 <= n0_max; ++n0) {
            const auto at = count_bound_states(single_site(n0, 1.0 / n0), 1000);
            const auto past = count_bound_states(single_site(n0, 1.0 / n0 + 1e-6), 1000);
            const bool ok = at.none() && at.stable && past.above == 1 && past.below == 0 && past.stable;
            if (!ok) c.status = "fail";
            rows.push_back({{"n0", n0}, {"at", to_json(at)}, {"past", to_json(past)}, {"ok", ok}});
        }
        c.detail["cases"] = rows;
    });
}

inline CheckResult check_dipole_threshold(int n0_max) {
    return detail::timed("dipole-threshold", "the dipole binds exactly past 2/(1+sqrt(1+4 n0))", [&](CheckResult& c) {
        json rows = json::array();
        for (int n0 = 1; n0 <= n0_max; ++n0) {
            const double crit = dipole_threshold(n0);
            const auto at = count_bound_states(dipole(n0, crit), 1000);
            const auto past = count_bound_states(dipole(n0, crit + 1e-6), 1000);
            const bool ok = at.none() && !past.none();
            if (!ok) c.status = "fail";
            rows.push_back({{"n0", n0}, {"critical", crit}, {"at_total", at.total()}, {"past_total", past.total()}, {"ok", ok}});
        }
        if (dipole_threshold(2) != 0.5) c.status = "fail";
        c.detail["n0_2_threshold"] = dipole_threshold(2);
        c.detail["cases"] = rows;
    });
}

inline CheckResult check_alternating_borderline(std::int64_t n) {
    return detail::timed("alternating-borderline", "beta (-1)^n / n has no bound states for |beta| <= 1", [&](CheckResult& c) {
        for (int s : {1, -1}) {
            const auto r = altex_solution(s, n);
            const bool ok = r.exact_identity && r.dirichlet_above == 0 && r.dirichlet_below == 0 &&
                            r.max_relative_error <= 1e-9;
            if (!ok) c.status = "fail";
            c.detail[s > 0 ? "plus" : "minus"] = {{"dirichlet_above", r.dirichlet_above},
                                                  {"dirichlet_below", r.dirichlet_below},
                                                  {"max_relative_error", r.max_relative_error},
                                                  {"exact_identity", r.exact_identity},
                                                  {"exact_checked_through", r.exact_checked_through}};
        }
        const auto over = count_bound_states(alternating(1.05), 1000000);
        c.detail["beta_1_05_total"] = over.total();
        if (over.none()) c.status = "fail";
    });
}

inline CheckResult check_staircase() {
    return detail::timed("staircase-sharpness", "sparse potentials with n V(n) -> (1-1/N)/(1+1/N) have no bound states",
                         [&](CheckResult& c) {
                             json rows = json::array();
                             for (auto [base, k] : std::vector<std::pair<std::int64_t, int>>{{2, 30}, {10, 9}, {100, 4}}) {
                                 const auto ex = staircase_potential(base, k);
                                 const auto cnt = count_bound_states(ex.potential(), ex.sites.back() + 1);
                                 const double scaled = static_cast<double>(ex.sites.back()) * ex.closed_form.back();
                                 const bool ok = cnt.none() && ex.max_relative_mismatch() <= 1e-12;
                                 if (!ok) c.status = "fail";
                                 rows.push_back({{"base", base},
                                                 {"k_max", k},
                                                 {"counts", to_json(cnt)},
                                                 {"max_relative_mismatch", ex.max_relative_mismatch()},
                                                 {"scaled_last", scaled},
                                                 {"limit", staircase_limit(base)},
                                                 {"ok", ok}});
                             }
                             c.detail["cases"] = rows;
                         });
}

inline CheckResult check_v_squared(std::size_t trials, std::uint64_t seed) {
    return detail::timed("v-squared-comparison", "a bound state of H0 + V^2/4 forces one of H0 + V", [&](CheckResult& c) {
        std::mt19937_64 rng(seed);
        std::size_t stable = 0, unstable = 0, failures = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto v = detail::random_decaying(rng);
            const auto verdict = v_squared_comparison(v, 1000, 1);
            if (verdict.stable) {
                ++stable;
                if (!verdict.holds) ++failures;
            } else {
                ++unstable;
            }
        }
        const auto w = HalfLinePotential::function([](std::int64_t n) { return std::sqrt(8.0 / static_cast<double>(n)); });
        const auto family = v_squared_comparison(w, 4000, 3);
        bool certs = family.certificates.size() == 3;
        for (const auto& cert : family.certificates) certs = certs && cert.positive();
        c.detail["random"] = {{"trials", trials}, {"stable", stable}, {"unstable", unstable}, {"failures", failures}};
        c.detail["two_over_n"] = to_json(family);
        if (failures > 0 || !certs) c.status = "fail";
    });
}

inline CheckResult check_oracle_equivalence(std::size_t trials, std::uint64_t seed) {
    return detail::timed("oracle-equivalence", "sign changes of the band-edge solution count eigenvalues outside the band",
                         [&](CheckResult& c) {
                             std::mt19937_64 rng(seed);
                             std::size_t mismatches = 0;
                             for (std::size_t t = 0; t < trials; ++t) {
                                 const auto v = detail::random_compact(rng);
                                 const auto osc = count_bound_states(v);
                                 const auto [a, b] = detail::dense_counts(v);
                                 if (osc.above != a || osc.below != b) ++mismatches;
                             }
                             c.detail = {{"trials", trials}, {"mismatches", mismatches}};
                             if (mismatches) c.status = "fail";
                         });
}

inline CheckResult check_essential_spectrum() {
    return detail::timed("essential-spectrum", "|V| >= a infinitely often gives spectrum outside the band", [&](CheckResult& c) {
        const auto l = tent_radius_for(1.0);
        const auto d = LatticeDomain::half_line(12 * (l + 2));
        std::vector<std::pair<std::size_t, double>> e;
        for (std::int64_t n = l + 1; n + l <= d.upper(0); n += 2 * (l + 2)) e.emplace_back(*d.index_of(n), 1.0);
        const auto r = essential_spectrum_certificates(Potential::sparse(d, e), 1.0, 5);
        bool ok = r.certificates.size() == 5;
        for (const auto& cert : r.certificates)
            ok = ok && cert.certificate.positive() && cert.certificate.winning_gap() >= cert.guaranteed_gap - 1e-12;
        c.detail = to_json(r);
        if (!ok) c.status = "fail";
    });
}

inline CheckResult check_birman_schwinger(int resolution, unsigned workers, std::uint64_t seed) {
    return detail::timed("birman-schwinger", "a sparse non-decaying potential in three dimensions with no spectrum above 6",
                         [&](CheckResult& c) {
                             GreenTable table(3, resolution, workers);
                             const auto ex = sparse_counterexample(3, 5, 1.0, table);
                             const auto box = ex.verification_box(10, 10);
                             const auto top = operator_norm_power_iteration(LatticeOperator(ex.on(box)), 7.0, 200000, seed);
                             c.detail = to_json(ex);
                             c.detail["green_max_error"] = table.max_error();
                             c.detail["box"] = box.describe();
                             c.detail["power_iteration"] = to_json(top);
                             if (!(ex.bs.schur_bound < 1.0) || top.estimate > 6.0 + 1e-6 || !table.converged())
                                 c.status = "fail";
                         });
}

inline CheckResult check_infinitude(const std::vector<std::int64_t>& truncations, unsigned workers) {
    return detail::timed("infinitely-many", "|V(n)| >= beta/n with beta > 1 gives infinitely many bound states",
                         [&](CheckResult& c) {
                             for (auto [name, v] : std::vector<std::pair<std::string, HalfLinePotential>>{
                                      {"1.5/n", power_law(1.5, 1.0)}, {"1.2(-1)^n/n", alternating(1.2)}}) {
                                 const auto e = infinitude_check(v, Criterion::InverseLinear, truncations, {}, 1, workers);
                                 const bool ok = e.hypotheses_hold && e.increasing_subsequence.size() >= 2 &&
                                                 e.counts.back().total() > e.counts.front().total();
                                 if (!ok) c.status = "fail";
                                 c.detail[name] = to_json(e);
                             }
                         });
}

inline CheckResult check_moments(const std::vector<std::int64_t>& truncations, unsigned workers) {
    return detail::timed("moment-divergence", "sum (|E|-2)^gamma diverges for gamma < (1-alpha)/(2 alpha)",
                         [&](CheckResult& c) {
                             const auto r = moment_divergence_experiment(1.0, 0.5, 0.3, truncations, workers);
                             c.detail = to_json(r);
                             if (!r.diverging || !r.monotone) c.status = "fail";
                         });
}

inline CheckResult check_bargmann(const std::vector<CorpusEntry>& corpus, std::size_t trials, std::uint64_t seed) {
    return detail::timed("bargmann-bound", "sum n|V(n)| <= 1 rules out bound states", [&](CheckResult& c) {
        std::mt19937_64 rng(seed);
        std::size_t predicted = 0, inconsistent = 0;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t t = 0; t < trials; ++t) {
            auto v = detail::random_compact(rng, 200);
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += static_cast<double>(i + 1) * std::abs(v[i]);
            if (s > 0) v = v.scaled(u(rng) / s);
            const auto r = bargmann_check(v);
            predicted += r.predicts_no_bound_states;
            inconsistent += !r.consistent;
        }
        json files = json::object();
        for (const auto& e : corpus) {
            const auto hl = e.spec.half_line();
            if (!hl || e.spec.domain.is_null()) continue;
            const auto r = bargmann_check(e.spec.build());
            inconsistent += !r.consistent;
            files[e.file] = to_json(r);
        }
        for (int n0 = 1; n0 <= 20; ++n0) {
            const auto r = bargmann_check(single_site(n0, 1.0 / n0).on_window(100));
            if (r.sum != 1.0 || !r.consistent) ++inconsistent;
        }
        c.detail = {{"random_trials", trials}, {"predicted", predicted}, {"inconsistent", inconsistent}, {"corpus", files}};
        if (inconsistent) c.status = "fail";
    });
}

inline CheckResult check_corpus_bounds(const std::vector<CorpusEntry>& corpus) {
    return detail::timed("decay-bounds", "no bound states forces V <= 1/n for V >= 0 and |V| <= 2 n^{-1/2}",
                         [&](CheckResult& c) {
                             json files = json::object();
                             for (const auto& e : corpus) {
                                 if (e.spec.domain.is_null()) continue;
                                 const auto d = e.spec.window();
                                 if (d.kind() != DomainKind::HalfLine) continue;
                                 const auto v = e.spec.build();
                                 const auto r = decay_bound_check(v);
                                 json j = to_json(r);
                                 if (r.no_bound_states) {
                                     const auto z = zero_potential_check(v, 64);
                                     j["zero_potential_bounds_hold"] = z.all_satisfied();
                                     if (!z.all_satisfied()) c.status = "fail";
                                 }
                                 if (!r.holds()) c.status = "fail";
                                 files[e.file] = j;
                             }
                             c.detail["corpus"] = files;
                         });
}

inline json run_scoreboard(const ScoreboardOptions& opt) {
    const bool q = opt.quick;
    const auto corpus = load_corpus(opt.corpus_dir);
    const std::vector<std::int64_t> ladder =
        q ? std::vector<std::int64_t>{1000, 10000, 100000} : std::vector<std::int64_t>{1000, 10000, 100000, 1000000};
    std::vector<CheckResult> checks;
    checks.push_back(check_single_site_threshold(20));
    checks.push_back(check_dipole_threshold(q ? 20 : 50));
    checks.push_back(check_alternating_borderline(q ? 100000 : 1000000));
    checks.push_back(check_staircase());
    checks.push_back(check_oracle_equivalence(q ? 25 : 100, opt.seed));
    checks.push_back(check_v_squared(q ? 25 : 100, opt.seed));
    checks.push_back(check_essential_spectrum());
    checks.push_back(check_bargmann(corpus, q ? 50 : 200, opt.seed));
    checks.push_back(check_corpus_bounds(corpus));
    checks.push_back(check_infinitude(ladder, opt.workers));
    checks.push_back(check_moments(ladder, opt.workers));
    checks.push_back(check_birman_schwinger(opt.green_resolution > 0 ? opt.green_resolution : (q ? 256 : 512),
                                            opt.workers, opt.seed));
    json list = json::array();
    std::size_t pass = 0, fail = 0, unstable = 0;
    for (const auto& c : checks) {
        list.push_back(to_json(c));
        pass += c.status == "pass";
        fail += c.status == "fail";
        unstable += c.status == "unstable";
    }
    json files = json::array();
    for (const auto& e : corpus) files.push_back(e.file);
    return {{"quick", q},
            {"seed", opt.seed},
            {"corpus", files},
            {"checks", list},
            {"summary", {{"pass", pass}, {"fail", fail}, {"unstable", unstable}}}};
}

}  // namespace latvar
