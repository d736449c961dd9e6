#include <catch_amalgamated.hpp>

#include <random>

#include "latvar/families.hpp"
#include "latvar/spectrum.hpp"
#include "latvar/theorems.hpp"
#include "oracles.hpp"

using namespace latvar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("V squared comparison on the half-line", "[theorems]") {
    const auto three = v_squared_comparison(single_site(1, 3.0), 1000);
    CHECK(three.hypothesis_count >= 1);
    CHECK(three.conclusion_count >= 1);
    CHECK(three.holds);
    CHECK(three.stable);
    REQUIRE(three.certificates.size() == 1);
    CHECK(three.certificates[0].positive());

    const auto zero = v_squared_comparison(HalfLinePotential::sparse({}), 1000);
    CHECK(zero.hypothesis_count == 0);
    CHECK(zero.conclusion_count == 0);
    CHECK(zero.holds);

    const auto alt = HalfLinePotential::function(
        [](std::int64_t n) { return (n % 2 ? -3.0 : 3.0) / std::sqrt(static_cast<double>(n)); });
    std::size_t previous = 0;
    for (std::int64_t n : {1000, 10000, 100000}) {
        const auto r = v_squared_comparison(alt, n);
        CHECK(r.holds);
        CHECK(r.hypothesis_count >= 1);
        CHECK(r.conclusion_count > previous);
        previous = r.conclusion_count;
    }

    CHECK_THROWS_AS(v_squared_comparison(HalfLinePotential::sparse({}), 1), PreconditionError);
    CHECK_THROWS_AS(v_squared_comparison(single_site(1, 3.0), 100, 0), PreconditionError);
}

TEST_CASE("constructive certificates for W = 2/n", "[theorems]") {
    // 2/n is the square-quarter of V = 2 sqrt(2/n)
    const auto v = HalfLinePotential::function([](std::int64_t n) { return 2.0 * std::sqrt(2.0 / static_cast<double>(n)); });
    const auto r = v_squared_comparison(v, 100000, 3);
    CHECK(r.hypothesis_count >= 3);
    REQUIRE(r.certificates.size() == 3);
    for (const auto& c : r.certificates) CHECK(c.positive());
    CHECK(r.holds);
}

TEST_CASE("comparison on random decaying potentials", "[theorems]") {
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> u(-1.0, 1.0), amp(0.5, 6.0), rate(0.5, 2.0);
    for (int t = 0; t < 30; ++t) {
        const double a = amp(rng), r = rate(rng);
        std::vector<double> noise(64);
        for (auto& x : noise) x = u(rng);
        const auto v = HalfLinePotential::function([=](std::int64_t n) {
            return a * noise[static_cast<std::size_t>(n % 64)] * std::pow(static_cast<double>(n), -r);
        });
        const auto verdict = v_squared_comparison(v, 500);
        CHECK(verdict.holds);
    }
}

TEST_CASE("V squared comparison on boxes", "[theorems]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int nu : {1, 2, 3}) {
        const auto box = LatticeDomain::cube(nu, nu == 1 ? 20 : (nu == 2 ? 5 : 2));
        for (int t = 0; t < 5; ++t) {
            std::vector<double> v(box.size());
            for (auto& x : v) x = u(rng);
            const auto r = v_squared_comparison(Potential(box, v));
            CHECK(r.holds);
        }
        CHECK(v_squared_comparison(Potential::zero(box)).hypothesis_count == 0);
    }
}

TEST_CASE("Jacobi comparison", "[theorems]") {
    SECTION("a = 1 agrees with the Schroedinger comparison") {
        std::vector<double> b(200, 0.0);
        b[0] = 3.0;
        const auto j = JacobiOperator(std::vector<double>(199, 1.0), b);
        const auto jr = jacobi_comparison(j);
        const auto sr = v_squared_comparison(single_site(1, 3.0), 100);
        CHECK(jr.hypothesis_count == sr.hypothesis_count);
        CHECK(jr.conclusion_count == sr.conclusion_count);
        CHECK(jr.hypothesis_count_2n == sr.hypothesis_count_2n);
        CHECK(jr.conclusion_count_2n == sr.conclusion_count_2n);
        CHECK(jr.holds);
    }
    SECTION("b = 0") {
        const auto r = jacobi_comparison(JacobiOperator::free(100));
        CHECK(r.holds);
        CHECK(r.conclusion_count == 0);
    }
    SECTION("random couplings near 1 with b = 3 delta_1") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        for (int t = 0; t < 20; ++t) {
            const std::size_t n = 120;
            std::vector<double> a(n - 1), b(n, 0.0);
            for (std::size_t k = 0; k < a.size(); ++k) a[k] = 1.0 + u(rng) / static_cast<double>(k + 1);
            b[0] = 3.0;
            const JacobiOperator j(a, b);
            const auto r = jacobi_comparison(j);
            CHECK(r.holds);
            CHECK(r.hypothesis_count >= 1);
            REQUIRE(r.certificates.size() == 1);
            CHECK(r.certificates[0].positive());
            std::vector<double> dense(n * n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                dense[i * n + i] = b[i];
                if (i + 1 < n) dense[i * n + i + 1] = dense[(i + 1) * n + i] = a[i];
            }
            const auto [above, below] = oracle::counts_outside(oracle::jacobi_eigenvalues(dense, n), 2.0);
            CHECK(r.conclusion_count_2n == above + below);
        }
    }
    CHECK_THROWS_AS(jacobi_comparison(JacobiOperator::free(3)), PreconditionError);
}

TEST_CASE("essential spectrum certificates in one dimension", "[theorems]") {
    const double a = 1.0;
    const auto l = tent_radius_for(a);
    CHECK(l == 16);
    CHECK(2.0 / static_cast<double>(l + 1) < 0.125 * std::min(a * a, 2.0 * a));
    const std::int64_t step = 2 * (l + 2);
    const auto v = Potential::from_function(LatticeDomain::half_line(step * 7),
                                            [&](std::int64_t n) { return n % step == 0 ? a : 0.0; });
    const auto r = essential_spectrum_certificates(v, a, 5);
    REQUIRE(r.certificates.size() == 5);
    for (const auto& c : r.certificates) {
        CHECK(c.certificate.positive());
        CHECK(c.guaranteed_gap > 0.0);
        CHECK(std::abs(v.at(c.site)) >= a);
    }
    for (std::size_t i = 1; i < r.certificates.size(); ++i)
        CHECK(r.certificates[i].site[0] - r.certificates[i - 1].site[0] >= r.separation);

    const auto neg = Potential::from_function(LatticeDomain::half_line(step * 7),
                                              [&](std::int64_t n) { return n % step == 0 ? -5.0 : 0.0; });
    for (const auto& c : essential_spectrum_certificates(neg, a, 5).certificates) {
        CHECK(c.certificate.positive());
        CHECK(c.certificate.winner == 1);
    }

    const auto decaying = Potential::from_function(LatticeDomain::half_line(5000),
                                                   [](std::int64_t n) { return 1.0 / static_cast<double>(n); });
    CHECK_THROWS_AS(essential_spectrum_certificates(decaying, 0.5, 5), QualifyingSitesExhausted);
    CHECK_THROWS_AS(tent_radius_for(0.0), PreconditionError);
}

TEST_CASE("essential spectrum certificates in two dimensions", "[theorems]") {
    CHECK_THROWS_AS(log_radius_for(1.0), PreconditionError);
    const double a = 8.0;
    const auto l = log_radius_for(a);
    CHECK(log_trial_2d(l).energy() < 0.5 * 0.125 * std::min(a * a, 4.0 * a));
    const std::int64_t step = 2 * (l + 2);
    const auto box = LatticeDomain::box({2 * step, step / 2 + l + 1});
    std::vector<std::pair<std::size_t, double>> e;
    for (std::int64_t x = -2 * step + l; x <= 2 * step - l; x += step) e.emplace_back(*box.index({x, 0}), a);
    const auto r = essential_spectrum_certificates(Potential::sparse(box, e), a, e.size());
    REQUIRE(r.certificates.size() == e.size());
    for (const auto& c : r.certificates) {
        CHECK(c.certificate.positive());
        CHECK(c.guaranteed_gap > 0.0);
    }
    CHECK_THROWS_AS(essential_spectrum_certificates(Potential::zero(LatticeDomain::cube(3, 2)), 1.0, 1),
                    PreconditionError);
}

TEST_CASE("zero-potential bounds", "[theorems]") {
    const auto zero = zero_potential_check(Potential::zero(LatticeDomain::half_line(200)), 50);
    CHECK(zero.all_satisfied());
    REQUIRE(zero.no_bound_states.has_value());
    CHECK(*zero.no_bound_states);

    const auto d = LatticeDomain::whole_line(100, 100);
    const auto r = zero_potential_check(Potential::zero(d), 30);
    const auto& centre = r.bounds[*d.index_of(0)];
    CHECK(centre.radius == 30);
    CHECK_THAT(centre.bound, WithinRel(std::sqrt(8.0 / 31.0), 1e-12));
    for (std::int64_t l : {1, 3, 10, 100}) {
        const double e = tent_energy(l, l);
        CHECK_THAT(potential_bound_from_energy(1, e), WithinRel(std::sqrt(8.0 / static_cast<double>(l + 1)), 1e-12));
    }

    const auto single = zero_potential_check(single_site(1, 1.0).on_window(100), 40);
    CHECK(*single.no_bound_states);
    CHECK(single.all_satisfied());

    double previous = std::numeric_limits<double>::infinity();
    for (std::int64_t l : {4, 16, 64, 256, 1024}) {
        const double b = potential_bound_from_energy(2, log_trial_2d(l).energy());
        CHECK(b < previous);
        CHECK(b * std::sqrt(std::log(static_cast<double>(l + 1))) <= std::sqrt(8.0 * log_trial_energy_bound(l)));
        previous = b;
    }
    const auto box = zero_potential_check(Potential::zero(LatticeDomain::cube(2, 8)), 8);
    CHECK(box.all_satisfied());
    CHECK_THROWS_AS(zero_potential_check(Potential::zero(LatticeDomain::cube(3, 1)), 2), PreconditionError);
}

TEST_CASE("Bargmann bound", "[theorems]") {
    for (std::int64_t n0 : {1, 2, 5, 17}) {
        const auto r = bargmann_check(single_site(n0, 1.0 / static_cast<double>(n0)).on_window(1000));
        CHECK_THAT(r.sum, WithinAbs(1.0, 1e-12));
        CHECK(r.predicts_no_bound_states);
        CHECK(r.counts.none());
        CHECK(r.consistent);
    }
    const auto over = bargmann_check(single_site(1, 1.5).on_window(1000));
    CHECK(over.sum == 1.5);
    CHECK_FALSE(over.predicts_no_bound_states);
    CHECK(over.counts.above == 1);
    const auto zero = bargmann_check(Potential::zero(LatticeDomain::half_line(10)));
    CHECK(zero.sum == 0.0);
    CHECK(zero.predicts_no_bound_states);
    CHECK_THROWS_AS(bargmann_check(Potential::zero(LatticeDomain::whole_line(2, 2))), PreconditionError);
}

TEST_CASE("decay bounds", "[theorems]") {
    const auto at = decay_bound_check(single_site(4, 0.25).on_window(500));
    CHECK(at.no_bound_states);
    CHECK(at.nonnegative);
    CHECK_THAT(at.max_n_v, WithinAbs(1.0, 1e-15));
    CHECK(at.holds());

    const auto alt = decay_bound_check(alternating(1.0).on_window(10000));
    CHECK(alt.no_bound_states);
    CHECK_FALSE(alt.nonnegative);
    CHECK(alt.max_sqrt_n_v <= 2.0);
    CHECK(alt.holds());

    const auto bound = decay_bound_check(single_site(1, 1.5).on_window(500));
    CHECK_FALSE(bound.no_bound_states);
    CHECK(bound.holds());
}

TEST_CASE("infinitude criteria", "[theorems]") {
    const std::vector<std::int64_t> ladder{1000, 10000, 100000};

    const auto inv = infinitude_check(power_law(1.5, 1.0), Criterion::InverseLinear, ladder);
    CHECK(inv.hypotheses_hold);
    CHECK_THAT(inv.parameter, WithinAbs(1.5, 1e-12));
    CHECK(inv.strictly_increasing);

    const auto alt = infinitude_check(power_law(1.2, 1.0, true), Criterion::InverseLinear, ladder);
    CHECK(alt.hypotheses_hold);
    CHECK(alt.increasing_subsequence.size() >= 2);
    for (std::size_t i = 1; i < alt.counts.size(); ++i) CHECK(alt.counts[i].total() >= alt.counts[i - 1].total());

    const auto hardy = infinitude_check(power_law(0.25, 2.0), Criterion::InverseLinear, ladder);
    CHECK_FALSE(hardy.hypotheses_hold);
    CHECK(hardy.counts.front().total() == hardy.counts.back().total());
    CHECK_FALSE(hardy.strictly_increasing);

    const auto avg = infinitude_check(power_law(200.0, 1.5), Criterion::AveragedPositive, ladder);
    CHECK(avg.parameter > 0.0);
    CHECK(avg.hypotheses_hold);
    CHECK(avg.positive_witnesses >= 2);
    CHECK(avg.counts.back().total() >= avg.counts.front().total());

    const auto sq = infinitude_check(power_law(100.0, 1.0, true), Criterion::AveragedSquare, ladder);
    CHECK(sq.hypotheses_hold);
    CHECK(sq.statistic > 8.0 * std::sqrt(3.0));

    const auto neg = infinitude_check(power_law(200.0, 1.5, true), Criterion::AveragedPositive, ladder);
    CHECK_FALSE(neg.hypotheses_hold);

    CHECK(criterion_from_string("inverse-linear") == Criterion::InverseLinear);
    CHECK_FALSE(criterion_from_string("Thm5.7").has_value());
    CHECK_THROWS_AS(infinitude_check(power_law(1.5, 1.0), Criterion::InverseLinear, {100, 10}), PreconditionError);
}

TEST_CASE("whole-line counts", "[theorems]") {
    const auto w = whole_line_counts([](std::int64_t n) { return n == 0 ? 0.0 : 1.5 / std::abs(static_cast<double>(n)); },
                                     {1000, 10000, 100000});
    CHECK(w.strictly_increasing);
    for (std::size_t k = 0; k < w.total.size(); ++k) {
        CHECK(w.left[k] == w.right[k]);
        CHECK(w.total[k] == w.left[k] + w.right[k]);
    }

    // coupled against decoupled on a dense window
    const auto d = LatticeDomain::whole_line(400, 400);
    const auto f = [](std::int64_t n) { return n == 0 ? 0.0 : 1.5 / std::abs(static_cast<double>(n)); };
    const auto coupled = eigenvalues_outside_band(LatticeOperator(Potential::from_function(d, f)), 1e-10).count();
    const auto split = whole_line_counts(f, {400});
    CHECK(static_cast<double>(coupled) >= static_cast<double>(split.total[0]) - 2.0);
    CHECK(static_cast<double>(coupled) <= static_cast<double>(split.total[0]) + 2.0);
}

TEST_CASE("moment divergence", "[theorems]") {
    const auto r = moment_divergence_experiment(1.0, 0.5, 0.3, {1000, 10000, 100000});
    CHECK(r.below_threshold);
    CHECK(r.threshold == 0.5);
    CHECK(r.decay_verified);
    CHECK(r.monotone);
    CHECK(r.growth_ratio > 1.0);
    for (const auto& p : r.partial_sums) CHECK(p.lower <= p.upper);

    const auto z = moment_divergence_experiment(HalfLinePotential::sparse({}), 0.0, 0.5, 0.3, {100, 1000});
    for (const auto& p : z.partial_sums) CHECK(p.upper == 0.0);
    CHECK_FALSE(z.diverging);

    const auto flagged = moment_divergence_experiment(HalfLinePotential::sparse({}), 1.0, 0.5, 0.3, {100});
    CHECK_FALSE(flagged.decay_verified);
    CHECK_THROWS_AS(moment_divergence_experiment(1.0, 1.5, 0.3, {100}), PreconditionError);
    CHECK_THROWS_AS(moment_divergence_experiment(1.0, 0.5, 0.0, {100}), PreconditionError);
}
