#include <catch_amalgamated.hpp>

#include <random>

#include "latvar/families.hpp"
#include "latvar/oscillation.hpp"
#include "latvar/spectrum.hpp"
#include "oracles.hpp"

using namespace latvar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("band-edge solution of a single-site potential is piecewise linear", "[oscillation]") {
    const auto s = band_edge_solve(single_site(3, 0.5), Side::Above, 20);
    for (std::int64_t n = 3; n <= 21; ++n) CHECK_THAT(s.u[n], WithinAbs(3.0 - 0.5 * (n - 3), 1e-12));
    CHECK(s.u[9] == 0.0);
    CHECK(s.u[10] < 0.0);
    CHECK(s.sign_changes >= 1);

    const auto c = band_edge_solve(single_site(3, 1.0 / 3.0), Side::Above, 1000);
    for (std::int64_t n = 3; n <= 1001; ++n) CHECK_THAT(c.u[n], WithinAbs(3.0, 1e-12));
    CHECK(c.sign_changes == 0);
}

TEST_CASE("single-site threshold is exact", "[oscillation]") {
    CHECK(single_site_threshold(1) == Rational{1, 1});
    CHECK(single_site_threshold(3) == Rational{1, 3});
    for (std::int64_t n0 = 1; n0 <= 20; ++n0) {
        const double crit = single_site_threshold(n0).value();
        for (std::int64_t n : {1000, 2000}) {
            const auto at = count_bound_states(single_site(n0, crit), n);
            const auto past = count_bound_states(single_site(n0, crit + 1e-6), n);
            CHECK(at.none());
            CHECK(at.stable);
            CHECK(past.above == 1);
            CHECK(past.below == 0);
            CHECK(past.stable);
        }
    }
}

TEST_CASE("dipole threshold", "[oscillation]") {
    CHECK(dipole_threshold(2) == 0.5);
    CHECK_THAT(dipole_threshold(1), WithinAbs(std::sqrt(5.0) / 2.0 - 0.5, 1e-15));
    CHECK(count_bound_states(HalfLinePotential::sparse({}), 1000).none());
    const auto over = count_bound_states(dipole(2, 0.6), 1000);
    CHECK(over.above == 0);
    CHECK(over.below == 1);
    CHECK(over.stable);
    CHECK(count_bound_states(dipole(2, 0.5), 1000).none());
    for (std::int64_t n0 = 1; n0 <= 50; ++n0) {
        const double crit = dipole_threshold(n0);
        CHECK(count_bound_states(dipole(n0, crit), 1000).none());
        CHECK_FALSE(count_bound_states(dipole(n0, crit + 1e-6), 1000).none());
    }
}

TEST_CASE("sign changes match dense eigenvalue counts", "[oscillation]") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::int64_t> size(5, 120);
    std::uniform_real_distribution<double> amp(0.1, 4.0);
    for (int t = 0; t < 60; ++t) {
        const auto n = size(rng);
        const double a = amp(rng);
        std::uniform_real_distribution<double> u(-a, a);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = u(rng);
        const auto count = count_bound_states(Potential(LatticeDomain::half_line(n), v));
        const auto [above, below] =
            oracle::counts_outside(oracle::jacobi_eigenvalues(oracle::schroedinger_1d(v), v.size()), 2.0);
        CHECK(count.above == above);
        CHECK(count.below == below);
    }
}

TEST_CASE("sparse jumps agree with site-by-site recursion", "[oscillation]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    std::uniform_int_distribution<int> gap(1, 40);
    for (int t = 0; t < 30; ++t) {
        std::map<std::int64_t, double> m;
        std::int64_t n = 0;
        for (int k = 0; k < 12; ++k) m[n += gap(rng)] = u(rng);
        const auto sparse = HalfLinePotential::sparse(m);
        const auto dense = HalfLinePotential::function([&m](std::int64_t k) {
            auto it = m.find(k);
            return it == m.end() ? 0.0 : it->second;
        });
        for (Side side : {Side::Above, Side::Below}) {
            const auto a = band_edge_solve(sparse, side, n + 50);
            const auto b = band_edge_solve(dense, side, n + 50);
            CHECK(a.sign_changes == b.sign_changes);
            REQUIRE(a.u.size() == b.u.size());
            for (std::size_t k = 0; k < a.u.size(); ++k)
                CHECK_THAT(a.u[k], WithinAbs(b.u[k], 1e-9 * std::max(1.0, std::abs(b.u[k]))));
        }
    }
}

TEST_CASE("free tail extrapolation of finitely supported potentials", "[oscillation]") {
    // lambda slightly above 1/n0: the crossing lies far beyond any modest window
    const auto v = single_site(10, 0.1 + 1e-9);
    const auto truncated = count_bound_states(v, 1000, TailMode::Truncated);
    const auto full = count_bound_states(v, 1000, TailMode::Auto);
    CHECK(truncated.above == 0);
    CHECK(full.above == 1);
    CHECK(full.tail_extrapolated);
    const auto exact = count_bound_states(single_site(10, 0.1), 1000, TailMode::Auto);
    CHECK(exact.none());
}

TEST_CASE("Jacobi sign changes", "[oscillation]") {
    const auto pot = single_site(1, 1.5).on_window(300);
    const auto j = JacobiOperator::schroedinger(pot);
    CHECK(jacobi_sign_changes(j, Side::Above) == 1);
    CHECK(jacobi_sign_changes(j, Side::Below) == 0);

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ua(0.5, 1.5), ub(-2.5, 2.5);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 40;
        std::vector<double> a(n - 1), b(n);
        for (auto& x : a) x = ua(rng);
        for (auto& x : b) x = ub(rng);
        const JacobiOperator jj(a, b);
        std::vector<double> dense(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            dense[i * n + i] = b[i];
            if (i + 1 < n) dense[i * n + i + 1] = dense[(i + 1) * n + i] = a[i];
        }
        const auto [above, below] = oracle::counts_outside(oracle::jacobi_eigenvalues(dense, n), 2.0);
        CHECK(jacobi_sign_changes(jj, Side::Above) == above);
        CHECK(jacobi_sign_changes(jj, Side::Below) == below);
    }
}

TEST_CASE("alternating borderline potentials", "[oscillation]") {
    for (int s : {1, -1}) {
        const auto r = altex_solution(s, 1000000);
        CHECK(r.exact_identity);
        CHECK(r.max_relative_error <= 1e-9);
        CHECK(r.solution.sign_changes == 0);
        CHECK(r.dirichlet_above == 0);
        CHECK(r.dirichlet_below == 0);
    }
    const auto plus = altex_solution(1, 10);
    CHECK_THAT(plus.solution.u[2], WithinAbs(2.0, 1e-15));
    CHECK_THAT(plus.solution.u[3], WithinAbs(2.0, 1e-15));
    CHECK_THAT(plus.solution.u[4], WithinAbs(8.0 / 3.0, 1e-15));
    const auto minus = altex_solution(-1, 10);
    CHECK_THAT(minus.solution.u[2], WithinAbs(1.0, 1e-15));
    CHECK_THAT(minus.solution.u[4], WithinAbs(1.5, 1e-15));
    CHECK_THAT(minus.solution.u[6], WithinAbs(15.0 / 8.0, 1e-15));

    CHECK_FALSE(count_bound_states(alternating(1.05), 1000000).none());
    CHECK_THROWS_AS(altex_solution(2, 10), PreconditionError);
    CHECK_THROWS_AS(altex_solution(1, 11), PreconditionError);
}

TEST_CASE("staircase potentials", "[oscillation]") {
    const auto two = staircase_potential(2, 3);
    CHECK(two.sites.front() == 4);
    CHECK(two.closed_form.front() == 0.125);
    CHECK_THAT(two.u_at_sites[1], WithinAbs(10.0, 1e-12));
    CHECK_THAT(staircase_limit(10), WithinAbs(9.0 / 11.0, 1e-15));
    for (auto [base, k] : std::vector<std::pair<std::int64_t, int>>{{2, 30}, {10, 9}, {100, 4}}) {
        const auto ex = staircase_potential(base, k);
        CHECK(ex.max_relative_mismatch() <= 1e-12);
        CHECK(count_bound_states(ex.potential(), ex.sites.back() + 1).none());
        CHECK_THAT(staircase_scaled_coupling(base, 60), WithinRel(staircase_limit(base), 1e-9));
    }
    CHECK(staircase_limit(2) < staircase_limit(10));
    CHECK(staircase_limit(10) < staircase_limit(100));
    CHECK(staircase_limit(1000000) > 0.999996);
    CHECK_THROWS_AS(staircase_potential(2, 40), PreconditionError);
    CHECK_THROWS_AS(staircase_potential(1, 3), PreconditionError);
}

TEST_CASE("dense window of the staircase agrees with the sparse count", "[oscillation]") {
    const auto ex = staircase_potential(2, 5);
    const auto w = ex.on_window(2048);
    const auto dense = eigenvalues_outside_band(LatticeOperator(w), 1e-10);
    CHECK(dense.count() == 0);
}
