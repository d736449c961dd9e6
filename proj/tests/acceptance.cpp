// Acceptance run: one PASS/FAIL line per criterion, each with its runtime limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latvar/latvar.hpp"
#include "latvar/scoreboard.hpp"
#include "oracles.hpp"
#include "suites.hpp"

using namespace latvar;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        if (!ok) note << "; ";
        ok = false;
        note << what;
    }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f s of %.0f s", s, limit_s);
    o.require(s < limit_s, "runtime limit exceeded");
    if (!o.ok) ++failures;
    std::printf("AC%-2d %s  %s (%s)%s%s\n", id, o.ok ? "PASS" : "FAIL", name.c_str(), buf,
                o.note.tellp() > 0 ? ": " : "", o.note.str().c_str());
    std::fflush(stdout);
}

std::string str(const std::vector<std::size_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

}  // namespace

int main() {
    criterion(1, "single-site threshold", 5, [](Outcome& o) {
        for (std::int64_t n0 = 1; n0 <= 20; ++n0) {
            const double crit = 1.0 / static_cast<double>(n0);
            for (std::int64_t n : {1000, 2000}) {
                const auto at = count_bound_states(single_site(n0, crit), n);
                const auto past = count_bound_states(single_site(n0, crit + 1e-6), n);
                const std::string where = "n0=" + std::to_string(n0) + " N=" + std::to_string(n);
                o.require(at.none() && at.stable, where + ": bound state at 1/n0");
                o.require(past.above == 1 && past.below == 0 && past.stable, where + ": no single bound state past 1/n0");
            }
        }
    });

    criterion(2, "dipole threshold", 10, [](Outcome& o) {
        o.require(dipole_threshold(2) == 0.5, "threshold at n0=2 is not 1/2");
        for (std::int64_t n0 = 1; n0 <= 50; ++n0) {
            const double crit = dipole_threshold(n0);
            o.require(count_bound_states(dipole(n0, crit), 1000).none(), "bound state at threshold, n0=" + std::to_string(n0));
            o.require(!count_bound_states(dipole(n0, crit + 1e-6), 1000).none(),
                      "no bound state past threshold, n0=" + std::to_string(n0));
        }
    });

    criterion(3, "alternating borderline", 30, [](Outcome& o) {
        for (int s : {1, -1}) {
            const auto r = altex_solution(s, 1000000);
            const std::string b = s > 0 ? "beta=1" : "beta=-1";
            o.require(r.exact_identity && r.max_relative_error <= 1e-9, b + ": recursion differs from closed form");
            o.require(r.solution.sign_changes == 0 && r.dirichlet_above == 0 && r.dirichlet_below == 0, b + ": bound state");
            o.require(count_bound_states(alternating(s), 1000000).none(), b + ": counts nonzero");
        }
        o.require(!count_bound_states(alternating(1.05), 1000000).none(), "beta=1.05: no bound state by N=1e6");
    });

    criterion(4, "staircase sharpness", 10, [](Outcome& o) {
        double previous = 0.0;
        for (auto [base, k] : std::vector<std::pair<std::int64_t, int>>{{2, 30}, {10, 9}, {100, 4}}) {
            const auto ex = staircase_potential(base, k);
            const std::string b = "base " + std::to_string(base);
            o.require(count_bound_states(ex.potential(), ex.sites.back() + 1).none(), b + ": counts nonzero");
            o.require(ex.max_relative_mismatch() <= 1e-12, b + ": V(n_k) differs from closed form");
            const double limit = (1.0 - 1.0 / static_cast<double>(base)) / (1.0 + 1.0 / static_cast<double>(base));
            o.require(std::abs(staircase_scaled_coupling(base, 60) - limit) <= 1e-9 * limit, b + ": n_k V(n_k) limit");
            o.require(limit > previous, b + ": limit does not increase towards 1");
            previous = limit;
        }
    });

    criterion(5, "variational inequality suite", 60, [](Outcome& o) {
        for (const auto& s : {suites::perturbation_suite(11, 500), suites::trial_pair_suite(12, 500, false),
                              suites::jacobi_suite(13, 500), suites::trial_pair_suite(14, 500, true),
                              suites::side_witness_suite(15, 500)}) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s: %zu instances, min slack %.3g", s.name.c_str(), s.instances, s.min_slack);
            o.require(s.instances == 500 && s.holds(), buf);
        }
    });

    criterion(6, "tent and logarithmic trial functions", 60, [](Outcome& o) {
        std::mt19937_64 rng(6);
        std::uniform_int_distribution<std::int64_t> ul(1, 1000);
        for (int t = 0; t < 100; ++t) {
            const auto l1 = ul(rng), l2 = ul(rng);
            const auto f = tent_1d(l1, l2);
            const double want = tent_energy(l1, l2);
            o.require(std::abs(gradient_energy(f) - want) <= 1e-12 * want,
                      "tent identity at L1=" + std::to_string(l1) + " L2=" + std::to_string(l2));
        }
        const double cap = log_trial_energy_bound(16);
        for (std::int64_t l = 16; l <= 4096; l *= 2) {
            const double scaled = log_trial_2d(l).energy() * std::log(static_cast<double>(l + 1));
            o.require(scaled <= cap, "energy ln(L+1) above " + std::to_string(cap) + " at L=" + std::to_string(l));
        }
        const double integral = diamond_log_square_integral();
        const double d = log_trial_2d(4096).d_estimate();
        o.require(std::abs(d - integral) <= 0.05 * integral, "norm estimate at L=4096 off by more than 5%");
    });

    criterion(7, "V squared comparison", 120, [](Outcome& o) {
        std::mt19937_64 rng(7);
        std::size_t stable = 0, draws = 0;
        while (stable < 100 && draws < 1000) {
            ++draws;
            const auto v = detail::random_decaying(rng, true);
            const auto r = v_squared_comparison(v, 1000);
            if (!r.stable) continue;
            ++stable;
            o.require(r.holds, "comparison fails on random instance " + std::to_string(draws));
        }
        o.require(stable == 100, "only " + std::to_string(stable) + " stable instances");
        const auto v = HalfLinePotential::function([](std::int64_t n) { return std::sqrt(8.0 / static_cast<double>(n)); });
        const auto r = v_squared_comparison(v, 4000, 3);
        bool positive = r.certificates.size() == 3;
        for (const auto& c : r.certificates) positive = positive && c.positive();
        o.require(positive && r.holds, "W = 2/n does not give 3 positive certificates");
    });

    criterion(8, "oscillation and eigensolver agree", 60, [](Outcome& o) {
        std::mt19937_64 rng(8);
        for (int t = 0; t < 100; ++t) {
            const auto v = detail::random_compact(rng, 300);
            const auto osc = count_bound_states(v);
            const auto [a, b] = detail::dense_counts(v);
            o.require(osc.above == a && osc.below == b, "count mismatch on instance " + std::to_string(t));
        }
    });

    criterion(9, "Birman-Schwinger counterexample", 180, [](Outcome& o) {
        GreenTable table(3, 256);
        const double g0 = table.axis(0);
        const double walk = oracle::green3_origin_random_walk();
        o.require(std::abs(g0 - walk) <= 1e-3, "G(0) differs from the random-walk sum");
        const auto ex = sparse_counterexample(3, 5, 1.0, table);
        o.require(ex.bs.schur_bound < 1.0, "Schur bound not below 1");
        const auto box = ex.verification_box(10, 10);
        const auto top = operator_norm_power_iteration(LatticeOperator(ex.on(box)), 7.0, 200000, 9);
        char buf[96];
        std::snprintf(buf, sizeof buf, "top eigenvalue %.9f above 6 + 1e-6", top.estimate);
        o.require(top.estimate <= 6.0 + 1e-6, buf);
        o.require(top.converged, "power iteration did not converge");
    });

    criterion(10, "infinitude and moments", 180, [](Outcome& o) {
        const std::vector<std::int64_t> ladder{1000, 10000, 100000, 1000000};
        for (auto [name, v] : std::vector<std::pair<std::string, HalfLinePotential>>{{"1.5/n", power_law(1.5, 1.0)},
                                                                                   {"1.2(-1)^n/n", alternating(1.2)}}) {
            const auto e = infinitude_check(v, Criterion::InverseLinear, ladder);
            std::vector<std::size_t> totals;
            for (const auto& c : e.counts) totals.push_back(c.total());
            o.require(e.strictly_increasing, name + ": counts " + str(totals) + " not strictly increasing");
        }
        const auto m = moment_divergence_experiment(1.0, 0.5, 0.3, ladder);
        o.require(m.diverging, "moment sums grow by less than 2x");
        const auto h = infinitude_check(power_law(0.25, 2.0), Criterion::InverseLinear, ladder);
        o.require(h.counts.front().total() == h.counts.back().total(), "1/(4n^2) count does not saturate");
    });

    criterion(11, "decay bounds on the corpus", 10, [](Outcome& o) {
        const auto corpus = load_corpus(LATVAR_CORPUS_DIR);
        std::size_t checked = 0;
        for (const auto& e : corpus) {
            if (e.spec.domain.is_null() || e.spec.window().kind() != DomainKind::HalfLine) continue;
            const auto c = decay_bound_check(e.spec.build());
            if (!c.no_bound_states) continue;
            ++checked;
            o.require(c.holds(), e.file + ": decay bound violated");
        }
        o.require(checked > 0, "no potential without bound states in the corpus");
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
