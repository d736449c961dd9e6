#pragma once

// Bound-state counting on the half-line by Sturm oscillation: the number of
// sign changes of the energy-2 solution with u(0) = 0, u(1) = 1 equals the
// number of eigenvalues above 2.  The side below -2 is the side above 2 for
// -V, since U H0 U^{-1} = -H0 and U V U^{-1} = V.  Also the explicit
// single-site, dipole, staircase and alternating examples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "latvar/families.hpp"
#include "latvar/lattice.hpp"

namespace latvar {

enum class Side { Above, Below };

inline const char* to_string(Side s) { return s == Side::Above ? "above" : "below"; }

namespace detail {

/// u(n) u(n+1) < 0, or u(n+1) = 0 with u(n) != 0.
inline int sign_change(double a, double b) {
    if (b == 0.0) return a != 0.0 ? 1 : 0;
    return ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) ? 1 : 0;
}

inline constexpr int kRescaleExponent = 512;

}  // namespace detail

/// Solution of u(n+1) + u(n-1) + V(n) u(n) = 2 u(n) (V replaced by -V on
/// the side below).  Stored values u[k] carry a scale factor
/// 2^{-exponent(k)} from the dynamic-range guard.
struct BandEdgeSolution {
    Side side = Side::Above;
    std::int64_t n = 0;
    std::vector<double> u;
    std::size_t sign_changes = 0;
    std::size_t overflow_rescales = 0;
    /// Stored values from these indices on were rescaled by another 2^-512.
    std::vector<std::int64_t> rescale_sites;
    bool tail_extrapolated = false;
    bool tail_borderline = false;
    bool tail_crossing = false;

    int exponent(std::int64_t k) const {
        const auto c = std::upper_bound(rescale_sites.begin(), rescale_sites.end(), k) - rescale_sites.begin();
        return static_cast<int>(c) * detail::kRescaleExponent;
    }

    /// u[k] expressed in the scale of index `ref`.
    double value_in_scale_of(std::int64_t k, std::int64_t ref) const {
        return std::ldexp(u[static_cast<std::size_t>(k)], exponent(k) - exponent(ref));
    }

    /// log2 |u(k)| with the rescalings undone.
    double log2_abs(std::int64_t k) const {
        return std::log2(std::abs(u[static_cast<std::size_t>(k)])) + exponent(k);
    }
};

struct BandEdgeOptions {
    double u0 = 0.0;
    double u1 = 1.0;
    /// Number of leading values u(0), u(1), ... kept; negative keeps all N+2.
    std::int64_t store = -1;
    /// When V vanishes beyond its support, continue the count to infinity.
    bool free_tail = false;
};

/// Runs the recursion to u(N+1) and counts sign changes over u(0..N+1).
/// Across stretches where V vanishes the solution is linear, so sparse
/// potentials are advanced in one step per gap.  With `free_tail`, the
/// linear continuation beyond the support adds one crossing when its slope
/// is decisively opposite in sign to u; a slope within rounding of zero
/// counts nothing and sets `tail_borderline`.
inline BandEdgeSolution band_edge_solve(const HalfLinePotential& pot, Side side, std::int64_t n,
                                        const BandEdgeOptions& opt = {}) {
    if (n < 1) throw PreconditionError("band_edge_solve: N must be >= 1");
    BandEdgeSolution r;
    r.side = side;
    r.n = n;
    const std::int64_t last = n + 1;
    const std::int64_t store = opt.store < 0 ? last + 1 : std::min(opt.store, last + 1);
    r.u.reserve(static_cast<std::size_t>(store));
    auto keep = [&](std::int64_t k, double x) {
        if (k < store) r.u.push_back(x);
    };
    const double sign = side == Side::Above ? 1.0 : -1.0;
    const double big = std::ldexp(1.0, detail::kRescaleExponent);
    const double shrink = std::ldexp(1.0, -detail::kRescaleExponent);

    // first-difference form d(n) = u(n+1) - u(n), d(n) = d(n-1) - V(n) u(n),
    // which avoids the cancellation in 2u(n) - u(n-1)
    double cur = opt.u1, d = opt.u1 - opt.u0;
    double maxabs = std::max(std::abs(opt.u0), std::abs(cur));
    keep(0, opt.u0);
    keep(1, cur);
    std::size_t changes = detail::sign_change(opt.u0, cur);
    std::int64_t pos = 1;
    std::size_t site_ptr = 0;
    const bool tail = opt.free_tail && pot.support_end.has_value();
    const std::int64_t stop = tail ? std::min(last, *pot.support_end + 1) : last;

    auto rescale = [&] {
        if (std::abs(cur) > big) {
            cur *= shrink;
            d *= shrink;
            maxabs *= shrink;
            ++r.overflow_rescales;
            r.rescale_sites.push_back(pos);
            if (pos < store) r.u.back() *= shrink;
        }
    };

    while (pos < stop) {
        if (!pot.sites.empty()) {
            while (site_ptr < pot.sites.size() && pot.sites[site_ptr] < pos) ++site_ptr;
            const std::int64_t next_site = site_ptr < pot.sites.size() ? pot.sites[site_ptr] : last;
            const std::int64_t target = std::min(next_site, stop);
            if (target > pos + 1) {
                for (std::int64_t k = pos + 1; k < std::min(target + 1, store); ++k)
                    r.u.push_back(cur + static_cast<double>(k - pos) * d);
                const double end = cur + static_cast<double>(target - pos) * d;
                if (cur != 0.0) changes += detail::sign_change(cur, end);
                cur = end;
                maxabs = std::max(maxabs, std::abs(cur));
                pos = target;
                rescale();
                continue;
            }
        }
        d -= sign * pot(pos) * cur;
        const double next = cur + d;
        changes += detail::sign_change(cur, next);
        cur = next;
        ++pos;
        maxabs = std::max(maxabs, std::abs(cur));
        keep(pos, cur);
        rescale();
    }

    if (tail && pos > *pot.support_end) {
        r.tail_extrapolated = true;
        const double flat = 8.0 * std::numeric_limits<double>::epsilon() *
                            static_cast<double>(*pot.support_end + 1) * std::max(maxabs, 1e-300);
        for (std::int64_t k = pos + 1; k < store; ++k) r.u.push_back(cur + static_cast<double>(k - pos) * d);
        if (std::abs(d) <= flat) {
            r.tail_borderline = true;
        } else if (cur != 0.0 && ((cur > 0.0) != (d > 0.0))) {
            r.tail_crossing = true;
            ++changes;
        }
    }
    r.sign_changes = changes;
    return r;
}

/// Sign changes of the energy-2 solution of a truncated Jacobi matrix
/// a_n u(n+1) + b_n u(n) + a_{n-1} u(n-1) = 2 u(n), equal to its number of
/// eigenvalues above 2 (below -2 via b -> -b).
inline std::size_t jacobi_sign_changes(const JacobiOperator& j, Side side) {
    const auto a = j.a();
    const auto b = j.b();
    const double sign = side == Side::Above ? 1.0 : -1.0;
    const double big = std::ldexp(1.0, detail::kRescaleExponent);
    const double shrink = std::ldexp(1.0, -detail::kRescaleExponent);
    double prev = 0.0, cur = 1.0;
    std::size_t changes = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const double coupling_in = i > 0 ? a[i - 1] : 0.0;
        const double coupling_out = i < a.size() ? a[i] : 1.0;
        const double next = ((2.0 - sign * b[i]) * cur - coupling_in * prev) / coupling_out;
        changes += detail::sign_change(cur, next);
        prev = cur;
        cur = next;
        if (std::abs(cur) > big) {
            cur *= shrink;
            prev *= shrink;
        }
    }
    return changes;
}

enum class TailMode {
    /// Finitely supported potentials are counted on the whole half-line.
    Auto,
    /// Counts refer to the Dirichlet truncation at N.
    Truncated
};

struct BoundStateCount {
    std::int64_t n = 0;
    std::size_t above = 0;
    std::size_t below = 0;
    std::size_t above_2n = 0;
    std::size_t below_2n = 0;
    bool stable = true;
    bool decays = true;
    bool tail_extrapolated = false;
    bool tail_borderline = false;
    std::string warning;

    bool none() const { return above == 0 && below == 0; }
    std::size_t total() const { return above + below; }
};

/// max |V| over the last decile of [1, N] is at most a tenth of the max
/// over the first decile (or V vanishes there).
inline bool decays_over_window(const HalfLinePotential& v, std::int64_t n) {
    const std::int64_t tail_start = std::max<std::int64_t>(1, n - n / 10);
    if (v.support_end && *v.support_end < tail_start) return true;
    double head = 0.0, tail = 0.0;
    if (v.support_end && !v.sites.empty()) {
        for (auto k : v.sites) {
            if (k <= std::max<std::int64_t>(1, n / 10)) head = std::max(head, std::abs(v(k)));
            if (k >= tail_start && k <= n) tail = std::max(tail, std::abs(v(k)));
        }
        return tail <= std::max(1e-12, 0.1 * head);
    }
    for (std::int64_t k = 1; k <= std::max<std::int64_t>(1, n / 10); ++k) head = std::max(head, std::abs(v(k)));
    for (std::int64_t k = tail_start; k <= n; ++k) tail = std::max(tail, std::abs(v(k)));
    return tail <= std::max(1e-12, 0.1 * head);
}

/// Bound states above 2 and below -2 from sign changes at N, repeated at
/// 2N for the stability flag.
inline BoundStateCount count_bound_states(const HalfLinePotential& v, std::int64_t n, TailMode mode = TailMode::Auto) {
    if (n < 1) throw PreconditionError("count_bound_states: N must be >= 1");
    BoundStateCount c;
    c.n = n;
    BandEdgeOptions opt;
    opt.store = 0;
    opt.free_tail = mode == TailMode::Auto;
    auto run = [&](std::int64_t size, Side side) {
        auto s = band_edge_solve(v, side, size, opt);
        c.tail_extrapolated = c.tail_extrapolated || s.tail_extrapolated;
        c.tail_borderline = c.tail_borderline || s.tail_borderline;
        return s.sign_changes;
    };
    c.above = run(n, Side::Above);
    c.below = run(n, Side::Below);
    c.above_2n = run(2 * n, Side::Above);
    c.below_2n = run(2 * n, Side::Below);
    c.decays = decays_over_window(v, n);
    c.stable = c.decays && c.above == c.above_2n && c.below == c.below_2n;
    if (!c.decays) c.warning = "potential does not decay over the last decile of the window";
    return c;
}

inline BoundStateCount count_bound_states(const Potential& v, TailMode mode = TailMode::Truncated) {
    return count_bound_states(HalfLinePotential::from(v), static_cast<std::int64_t>(v.size()), mode);
}

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
    bool operator==(const Rational&) const = default;
};

/// lambda W_{n0} has a bound state iff |lambda| > 1/n0.
inline Rational single_site_threshold(std::int64_t n0) {
    if (n0 < 1) throw PreconditionError("single_site_threshold: n0 must be >= 1");
    return {1, n0};
}

/// Positive root of n0 lambda^2 + lambda - 1 = 0, i.e.
/// sqrt(1/(4 n0^2) + 1/n0) - 1/(2 n0), in the cancellation-free form
/// 2 / (1 + sqrt(1 + 4 n0)).
inline double dipole_threshold(std::int64_t n0) {
    if (n0 < 1) throw PreconditionError("dipole_threshold: n0 must be >= 1");
    return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * static_cast<double>(n0)));
}

/// Sparse staircase potential: V vanishes except at n_k = N^{2k}, chosen so
/// the energy-2 solution has slope N^{-k} on [n_k, n_{k+1}).
struct StaircaseExample {
    std::int64_t base = 2;
    int k_max = 1;
    std::vector<std::int64_t> sites;
    /// (1 - N^{-1}) / (1 + N^{-1} - N^{-k}) / n_k
    std::vector<double> closed_form;
    /// (slope before - slope after) / u(n_k) read off the staircase
    std::vector<double> from_staircase;
    /// u(n_k) = N^{k+1} (1 + N^{-1} - N^{-k})
    std::vector<double> u_at_sites;

    HalfLinePotential potential() const {
        std::map<std::int64_t, double> m;
        for (std::size_t i = 0; i < sites.size(); ++i) m[sites[i]] = closed_form[i];
        return HalfLinePotential::sparse(m);
    }

    Potential on_window(std::int64_t window) const {
        if (window < sites.back())
            throw PreconditionError("staircase example: window " + std::to_string(window) + " does not reach n_kmax = " +
                                    std::to_string(sites.back()));
        std::vector<std::pair<std::size_t, double>> e;
        for (std::size_t i = 0; i < sites.size(); ++i) e.emplace_back(static_cast<std::size_t>(sites[i] - 1), closed_form[i]);
        return Potential::sparse(LatticeDomain::half_line(window), e);
    }

    double max_relative_mismatch() const {
        double m = 0.0;
        for (std::size_t i = 0; i < sites.size(); ++i)
            m = std::max(m, std::abs(closed_form[i] - from_staircase[i]) / std::abs(closed_form[i]));
        return m;
    }
};

/// n_k V(n_k) = (1 - N^{-1}) / (1 + N^{-1} - N^{-k}).
inline double staircase_scaled_coupling(std::int64_t base, int k) {
    const double inv = 1.0 / static_cast<double>(base);
    return (1.0 - inv) / (1.0 + inv - std::pow(inv, k));
}

/// lim_k n_k V(n_k) = (1 - N^{-1}) / (1 + N^{-1}).
inline double staircase_limit(std::int64_t base) {
    const double inv = 1.0 / static_cast<double>(base);
    return (1.0 - inv) / (1.0 + inv);
}

inline StaircaseExample staircase_potential(std::int64_t base, int k_max) {
    if (base < 2) throw PreconditionError("staircase example: N must be >= 2");
    if (k_max < 1) throw PreconditionError("staircase example: k_max must be >= 1");
    StaircaseExample ex;
    ex.base = base;
    ex.k_max = k_max;
    const double nb = static_cast<double>(base);
    std::int64_t site = 1;
    for (int k = 1; k <= k_max; ++k) {
        for (int s = 0; s < 2; ++s) {
            if (site > std::numeric_limits<std::int64_t>::max() / base)
                throw PreconditionError("staircase example: n_kmax = N^{2 k_max} overflows the index range");
            site *= base;
        }
        ex.sites.push_back(site);
        const double nk = static_cast<double>(site);
        const double tail = std::pow(nb, -k);
        ex.closed_form.push_back((1.0 - 1.0 / nb) / (1.0 + 1.0 / nb - tail) / nk);
        const double u = std::pow(nb, k + 1) * (1.0 + 1.0 / nb - tail);
        ex.u_at_sites.push_back(u);
        ex.from_staircase.push_back((std::pow(nb, -(k - 1)) - tail) / u);
    }
    return ex;
}

namespace detail {

struct SmallRational {
    __int128 p;
    __int128 q;
};

inline SmallRational make_ratio(__int128 p, __int128 q) {
    if (q < 0) p = -p, q = -q;
    const auto g = std::gcd(static_cast<long long>(p < 0 ? -p : p), static_cast<long long>(q));
    return {p / g, q / g};
}

inline bool same(const SmallRational& a, const SmallRational& b) { return a.p * b.q == b.p * a.q; }

}  // namespace detail

/// Explicit positive solutions for V0(n) = (-1)^n / n at energy 2:
///   +V0: u(0) = u(1) = 1, u(2n) = u(2n+1), u(2n+2) = (1 + 1/(2n+1)) u(2n)
///   -V0: u(0) = 0, u(1) = u(2) = 1, u(2n+1) = u(2n+2), u(2n+2) = (1 + 1/(2n)) u(2n)
struct AltexResult {
    int beta_sign = 1;
    std::int64_t n = 0;
    BandEdgeSolution solution;
    /// Counts from u(0) = 0, u(1) = 1 for V = beta_sign V0 on both sides.
    std::size_t dirichlet_above = 0;
    std::size_t dirichlet_below = 0;
    double max_relative_error = 0.0;
    /// Recursion satisfied exactly by the closed-form ratios, in integer arithmetic.
    bool exact_identity = false;
    std::int64_t exact_checked_through = 0;
    /// (2n, u(2n) / sqrt(2n)) at powers of ten.
    std::vector<std::pair<std::int64_t, double>> growth;
};

inline AltexResult altex_solution(int beta_sign, std::int64_t n, std::int64_t exact_limit = 100000) {
    if (beta_sign != 1 && beta_sign != -1) throw PreconditionError("altex: beta_sign must be +1 or -1");
    if (n < 2 || n % 2 != 0) throw PreconditionError("altex: N must be even and >= 2");
    AltexResult r;
    r.beta_sign = beta_sign;
    r.n = n;
    const auto pot = alternating(static_cast<double>(beta_sign));
    BandEdgeOptions opt;
    opt.u0 = beta_sign > 0 ? 1.0 : 0.0;
    opt.u1 = 1.0;
    r.solution = band_edge_solve(pot, Side::Above, n, opt);

    // closed-form products
    double closed = 1.0;
    std::int64_t next_decade = 10;
    for (std::int64_t m = 1; 2 * m <= n; ++m) {
        if (beta_sign > 0)
            closed *= static_cast<double>(2 * m) / static_cast<double>(2 * m - 1);
        else if (m > 1)
            closed *= static_cast<double>(2 * m - 1) / static_cast<double>(2 * m - 2);
        for (std::int64_t k : {2 * m, beta_sign > 0 ? 2 * m + 1 : 2 * m - 1}) {
            if (k > n + 1) continue;
            const double got = r.solution.value_in_scale_of(k, 0);
            r.max_relative_error = std::max(r.max_relative_error, std::abs(got - closed) / closed);
        }
        if (2 * m == next_decade) {
            r.growth.emplace_back(2 * m, r.solution.value_in_scale_of(2 * m, 0) / std::sqrt(static_cast<double>(2 * m)));
            next_decade *= 10;
        }
    }

    // rho(m) = u(m+1)/u(m) from the closed form must equal (2 - V(m)) - 1/rho(m-1)
    auto rho = [&](std::int64_t m) -> detail::SmallRational {
        if (beta_sign > 0) return (m % 2 == 0) ? detail::SmallRational{1, 1} : detail::make_ratio(m + 1, m);
        return (m % 2 == 1) ? detail::SmallRational{1, 1} : detail::make_ratio(m + 1, m);
    };
    const std::int64_t limit = std::min(n, exact_limit);
    bool ok = true;
    for (std::int64_t m = 1; m <= limit && ok; ++m) {
        // 2 - V(m) with V(m) = beta_sign (-1)^m / m
        const std::int64_t vs = ((m % 2 == 0) ? 1 : -1) * beta_sign;
        const auto two_minus_v = detail::make_ratio(2 * m - vs, m);
        detail::SmallRational expect;
        if (beta_sign < 0 && m == 1) {
            expect = two_minus_v;
        } else {
            const auto prev = rho(m - 1);
            expect = detail::make_ratio(two_minus_v.p * prev.p - two_minus_v.q * prev.q, two_minus_v.q * prev.p);
        }
        ok = detail::same(rho(m), expect);
        r.exact_checked_through = m;
    }
    r.exact_identity = ok;

    const auto d_above = band_edge_solve(pot, Side::Above, n, {0.0, 1.0, 0, false});
    const auto d_below = band_edge_solve(pot, Side::Below, n, {0.0, 1.0, 0, false});
    r.dirichlet_above = d_above.sign_changes;
    r.dirichlet_below = d_below.sign_changes;
    return r;
}

}  // namespace latvar
