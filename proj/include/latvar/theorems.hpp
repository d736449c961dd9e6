#pragma once

// Executable checks of the structural results: the V^2 comparison on the
// half-line and for Jacobi matrices, essential-spectrum certificates built
// from tents and logarithmic trial functions, pointwise bounds forced by the
// absence of bound states, the Bargmann-type bound, criteria for infinitely
// many bound states and divergence of eigenvalue moments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latvar/families.hpp"
#include "latvar/lattice.hpp"
#include "latvar/oscillation.hpp"
#include "latvar/parallel.hpp"
#include "latvar/spectrum.hpp"
#include "latvar/variational.hpp"

namespace latvar {

/// hypothesis: eigenvalues of H0 + (4nu)^{-1} V^2 above 2nu;
/// conclusion: eigenvalues of H0 + V outside [-2nu, 2nu].
struct ComparisonVerdict {
    std::int64_t n = 0;
    std::size_t m = 1;
    std::size_t hypothesis_count = 0;
    std::size_t conclusion_count = 0;
    std::size_t hypothesis_count_2n = 0;
    std::size_t conclusion_count_2n = 0;
    bool stable = true;
    bool holds = true;
    std::vector<DeltaCertificate> certificates;
    std::string note;
};

namespace detail {

inline void settle_verdict(ComparisonVerdict& v) {
    auto implication = [&](std::size_t hyp, std::size_t concl) { return hyp == 0 || concl >= 1; };
    v.holds = implication(v.hypothesis_count, v.conclusion_count) &&
              implication(v.hypothesis_count_2n, v.conclusion_count_2n);
    if (v.certificates.size() == v.m && v.m > 0) {
        bool all = true;
        for (const auto& c : v.certificates) all = all && c.positive();
        if (!all) v.holds = false;
        if (v.conclusion_count < v.m) v.holds = false;
    }
    if (v.hypothesis_count != v.hypothesis_count_2n || v.conclusion_count != v.conclusion_count_2n) {
        v.stable = false;
        if (!v.note.empty()) v.note += "; ";
        v.note += "counts differ between N and 2N";
    }
}

/// Disjoint windows of [1, cap] whose Dirichlet block of `j` has top
/// eigenvalue above 2 + margin; same doubling schedule as disjoint_family.
inline std::vector<std::pair<std::int64_t, std::vector<double>>> jacobi_disjoint_windows(
    const JacobiOperator& j, std::size_t m, std::int64_t cap, std::int64_t initial_width = 8, double margin = 1e-12) {
    std::vector<std::pair<std::int64_t, std::vector<double>>> out;
    const auto a = j.a();
    const auto b = j.b();
    cap = std::min<std::int64_t>(cap, static_cast<std::int64_t>(j.size()));
    std::int64_t start = 1;
    while (out.size() < m) {
        std::int64_t width = initial_width;
        bool found = false;
        while (start + width - 1 <= cap) {
            SymTridiagonal t;
            t.diag.assign(b.begin() + (start - 1), b.begin() + (start - 1 + width));
            t.off.assign(a.begin() + (start - 1), a.begin() + (start - 1 + width - 1));
            auto pair = top_eigenpair(t);
            if (pair.value > 2.0 + margin) {
                out.emplace_back(start, std::move(pair.vector));
                found = true;
                start += width + 1;
                break;
            }
            width *= 2;
        }
        if (!found) throw InsufficientSpectrum(out.size(), m, "below site " + std::to_string(cap));
    }
    return out;
}

}  // namespace detail

/// Half-line comparison on the Dirichlet truncations N and 2N.  When the
/// hypothesis count reaches m, m disjoint top eigenvectors of H0 + V^2/4 are
/// turned into trial pairs for H0 + V.
inline ComparisonVerdict v_squared_comparison(const HalfLinePotential& v, std::int64_t n, std::size_t m = 1) {
    if (n < 2) throw PreconditionError("v_squared_comparison: N must be >= 2");
    if (m < 1) throw PreconditionError("v_squared_comparison: m must be >= 1");
    auto f = v.v;
    HalfLinePotential w = v;
    w.v = [f](std::int64_t k) {
        const double x = f(k);
        return 0.25 * x * x;
    };
    ComparisonVerdict r;
    r.n = n;
    r.m = m;
    const auto hyp = count_bound_states(w, n, TailMode::Truncated);
    const auto con = count_bound_states(v, n, TailMode::Truncated);
    r.hypothesis_count = hyp.above;
    r.hypothesis_count_2n = hyp.above_2n;
    r.conclusion_count = con.total();
    r.conclusion_count_2n = con.above_2n + con.below_2n;
    if (!con.decays) r.note = con.warning;
    if (r.hypothesis_count >= m) {
        try {
            const auto fam = disjoint_family(w, m, n);
            const LatticeOperator op(v.on_window(static_cast<std::int64_t>(fam.domain.size())));
            for (const auto& phi : fam.members) r.certificates.push_back(trial_pair(phi, op));
        } catch (const InsufficientSpectrum& e) {
            if (!r.note.empty()) r.note += "; ";
            r.note += e.what();
        }
    }
    detail::settle_verdict(r);
    if (!con.decays) r.stable = false;
    return r;
}

/// Box comparison in any dimension from dense spectra of H0 + V and
/// H0 + (4nu)^{-1} V^2.  The conclusion side uses a tolerance shrunk by
/// (1 + max|V|/4nu)^2, the worst ratio between the two Rayleigh gaps, so a
/// hypothesis eigenvalue clearing `tolerance` forces one that is counted.
/// A single truncation is examined; the 2N counts repeat the N counts.
inline ComparisonVerdict v_squared_comparison(const Potential& v, std::size_t m = 1, double tolerance = 1e-9,
                                              std::size_t dense_cap = kDefaultDenseCap) {
    const double nu = v.domain().dim();
    const auto w = v.squared_scaled(1.0 / (4.0 * nu));
    ComparisonVerdict r;
    r.n = static_cast<std::int64_t>(v.size());
    r.m = m;
    const double shrink = std::pow(1.0 + v.max_abs() / (4.0 * nu), 2);
    r.hypothesis_count = eigenvalues_outside_band(LatticeOperator(w), tolerance, 1, dense_cap).above.size();
    r.conclusion_count = eigenvalues_outside_band(LatticeOperator(v), 0.5 * tolerance / shrink, 1, dense_cap).count();
    r.hypothesis_count_2n = r.hypothesis_count;
    r.conclusion_count_2n = r.conclusion_count;
    r.note = "single truncation";
    if (r.hypothesis_count >= m) {
        try {
            const auto fam = disjoint_family(w, m, dense_cap);
            const LatticeOperator op(v);
            for (const auto& phi : fam.members) r.certificates.push_back(trial_pair(phi, op));
        } catch (const InsufficientSpectrum& e) {
            r.note += "; ";
            r.note += e.what();
        }
    }
    detail::settle_verdict(r);
    return r;
}

/// Jacobi comparison: hypothesis operator J({a_n}, {gamma b_n^2}) with
/// gamma = (2 + alpha)^{-1}.  N is half the size of J; the 2N counts use all of J.
inline ComparisonVerdict jacobi_comparison(const JacobiOperator& j, std::size_t m = 1) {
    if (j.size() < 4) throw PreconditionError("jacobi_comparison: need at least 4 sites");
    if (m < 1) throw PreconditionError("jacobi_comparison: m must be >= 1");
    const double gamma = j.gamma();
    const auto a = j.a();
    const auto b = j.b();
    std::vector<double> av(a.begin(), a.end()), bw(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) bw[i] = gamma * b[i] * b[i];
    const JacobiOperator jw(av, bw);
    const std::size_t half = j.size() / 2;
    auto leading = [&](std::span<const double> bb) {
        return JacobiOperator(std::vector<double>(a.begin(), a.begin() + (half - 1)),
                              std::vector<double>(bb.begin(), bb.begin() + half));
    };
    const auto jh = leading(b);
    const auto jwh = leading(bw);
    ComparisonVerdict r;
    r.n = static_cast<std::int64_t>(half);
    r.m = m;
    r.hypothesis_count = jacobi_sign_changes(jwh, Side::Above);
    r.conclusion_count = jacobi_sign_changes(jh, Side::Above) + jacobi_sign_changes(jh, Side::Below);
    r.hypothesis_count_2n = jacobi_sign_changes(jw, Side::Above);
    r.conclusion_count_2n = jacobi_sign_changes(j, Side::Above) + jacobi_sign_changes(j, Side::Below);
    if (r.hypothesis_count >= m) {
        try {
            const auto wins = detail::jacobi_disjoint_windows(jw, m, static_cast<std::int64_t>(half));
            const auto d = j.domain();
            for (const auto& [start, vec] : wins)
                r.certificates.push_back(jacobi_trial_pair(TrialFunction::on_sites(d, start, vec), j));
        } catch (const InsufficientSpectrum& e) {
            r.note = e.what();
        }
    }
    detail::settle_verdict(r);
    return r;
}

/// Certificate built around one site where |V| >= a.
struct EssentialCertificate {
    Site site;
    DeltaCertificate certificate;
    /// Delta / (|phi+|^2 + |phi-|^2): the winning Rayleigh quotient clears
    /// the band by at least this much.
    double guaranteed_gap = 0.0;
};

struct EssentialSpectrumResult {
    int nu = 1;
    double a = 1.0;
    std::int64_t l = 1;
    /// <psi, (2nu - H0) psi> for the trial function with psi(center) = 1
    double trial_energy = 0.0;
    /// (4nu)^{-1} min(a^2, 2nu a), what the cutoff potential contributes at the centre
    double potential_gain = 0.0;
    std::int64_t separation = 0;
    std::vector<EssentialCertificate> certificates;
};

class QualifyingSitesExhausted : public std::runtime_error {
public:
    QualifyingSitesExhausted(std::size_t found, std::size_t wanted, const std::string& detail)
        : std::runtime_error("essential spectrum: only " + std::to_string(found) + " of " + std::to_string(wanted) +
                             " qualifying sites " + detail),
          found(found) {}
    std::size_t found;
};

/// Smallest L with 2/(L+1) < (1/8) min(a^2, 2a).
inline std::int64_t tent_radius_for(double a) {
    if (!(a > 0)) throw PreconditionError("essential spectrum: a must be positive");
    const double target = 0.125 * std::min(a * a, 2.0 * a);
    const auto l = static_cast<std::int64_t>(std::floor(2.0 / target));
    return std::max<std::int64_t>(l, 1);
}

/// Smallest L with E(L) < (1/2)(1/8) min(a^2, 4a) for the planar log trial,
/// searched up to `l_cap`.
inline std::int64_t log_radius_for(double a, std::int64_t l_cap = 4096) {
    if (!(a > 0)) throw PreconditionError("essential spectrum: a must be positive");
    const double target = 0.5 * 0.125 * std::min(a * a, 4.0 * a);
    for (std::int64_t l = 1; l <= l_cap; ++l)
        if (log_trial_2d(l).energy() < target) return l;
    throw PreconditionError("essential spectrum: no logarithmic trial radius <= " + std::to_string(l_cap) +
                            " reaches energy " + std::to_string(target) + " for a = " + std::to_string(a));
}

/// Picks m sites with |V| >= a - tolerance, pairwise l1 distance >= 2(L+2),
/// whose trial supports fit in the domain, and certifies each with the
/// cutoff trial pair F = min(1, 2nu/|V|).  One-dimensional domains use tents
/// of radius L, two-dimensional boxes the logarithmic trial function.
inline EssentialSpectrumResult essential_spectrum_certificates(const Potential& v, double a, std::size_t m,
                                                               double tolerance = 1e-12) {
    const auto& d = v.domain();
    const int nu = d.dim();
    if (nu > 2) throw PreconditionError("essential spectrum: only dimensions 1 and 2 have trial families");
    EssentialSpectrumResult r;
    r.nu = nu;
    r.a = a;
    if (nu == 1) {
        r.l = tent_radius_for(a);
        r.trial_energy = tent_energy(r.l, r.l);
    } else {
        r.l = log_radius_for(a);
        r.trial_energy = log_trial_2d(r.l).energy();
    }
    r.potential_gain = std::min(a * a, 2.0 * nu * a) / (4.0 * nu);
    r.separation = 2 * (r.l + 2);
    const LatticeOperator op(v);
    const auto cutoff = CutoffF::from_potential(v);
    std::vector<Site> chosen;
    auto fits = [&](const Site& s) {
        for (int ax = 0; ax < nu; ++ax)
            if (s[ax] - r.l < d.lower(ax) || s[ax] + r.l > d.upper(ax)) return false;
        return true;
    };
    auto far = [&](const Site& s) {
        for (const auto& c : chosen) {
            std::int64_t dist = 0;
            for (int ax = 0; ax < nu; ++ax) dist += std::abs(s[ax] - c[ax]);
            if (dist < r.separation) return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < d.size() && chosen.size() < m; ++i) {
        if (std::abs(v[i]) < a - tolerance) continue;
        const auto s = d.site(i);
        if (!fits(s) || !far(s)) continue;
        chosen.push_back(s);
    }
    if (chosen.size() < m) throw QualifyingSitesExhausted(chosen.size(), m, "in " + d.describe());
    for (const auto& s : chosen) {
        const TrialFunction psi = nu == 1 ? tent_at(d, s[0], r.l, r.l) : log_trial_2d(r.l).materialize(d, s);
        EssentialCertificate e;
        e.site = s;
        e.certificate = trial_pair(psi, op, cutoff);
        e.guaranteed_gap =
            e.certificate.delta / (e.certificate.phi_plus.norm2() + e.certificate.phi_minus.norm2());
        r.certificates.push_back(std::move(e));
    }
    return r;
}

/// Upper bound on |V(s)| forced at each site when H0 + V has no spectrum
/// outside the band: with psi(s) = 1 centred at s and
/// E = <psi, (2nu - H0) psi>, (4nu)^{-1} min(V(s)^2, 2nu |V(s)|) <= E.
struct SiteBound {
    Site site;
    double value = 0.0;
    double bound = 0.0;
    std::int64_t radius = 0;
    double energy = 0.0;
    bool satisfied = true;
};

struct ZeroPotentialReport {
    int nu = 1;
    std::int64_t l_max = 1;
    /// Whether the spectrum outside the band was computed and found empty.
    std::optional<bool> no_bound_states;
    std::vector<SiteBound> bounds;

    bool all_satisfied() const {
        return std::all_of(bounds.begin(), bounds.end(), [](const SiteBound& b) { return b.satisfied; });
    }
};

/// |V| bound from min(V^2, 2nu|V|) <= 4nu E.
inline double potential_bound_from_energy(int nu, double e) {
    return e <= nu ? std::sqrt(4.0 * nu * e) : 2.0 * e;
}

inline ZeroPotentialReport zero_potential_check(const Potential& v, std::int64_t l_max,
                                                std::size_t dense_cap = kDefaultDenseCap) {
    const auto& d = v.domain();
    const int nu = d.dim();
    if (nu > 2) throw PreconditionError("zero_potential_check: dimension must be 1 or 2");
    if (l_max < 1) throw PreconditionError("zero_potential_check: L_max must be >= 1");
    ZeroPotentialReport r;
    r.nu = nu;
    r.l_max = l_max;
    if (nu == 1 || d.size() <= dense_cap)
        r.no_bound_states = eigenvalues_outside_band(LatticeOperator(v), 1e-10, 1, dense_cap).count() == 0;
    std::vector<double> log_energy;
    if (nu == 2) {
        log_energy.resize(static_cast<std::size_t>(l_max) + 1, 0.0);
        for (std::int64_t l = 1; l <= l_max; ++l) log_energy[static_cast<std::size_t>(l)] = log_trial_2d(l).energy();
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        SiteBound b;
        b.site = d.site(i);
        b.value = v[i];
        if (nu == 1) {
            const std::int64_t l1 = std::min(l_max, b.site[0] - d.lower(0));
            const std::int64_t l2 = std::min(l_max, d.upper(0) - b.site[0]);
            b.radius = std::min(l1, l2);
            b.energy = tent_energy(l1, l2);
        } else {
            std::int64_t room = l_max;
            for (int ax = 0; ax < 2; ++ax)
                room = std::min({room, b.site[ax] - d.lower(ax) + 1, d.upper(ax) - b.site[ax] + 1});
            b.radius = room;
            b.energy = log_energy[static_cast<std::size_t>(room)];
            for (std::int64_t l = 1; l < room; ++l) b.energy = std::min(b.energy, log_energy[static_cast<std::size_t>(l)]);
        }
        b.bound = potential_bound_from_energy(nu, b.energy);
        b.satisfied = std::abs(b.value) <= b.bound * (1.0 + 1e-12);
        r.bounds.push_back(std::move(b));
    }
    return r;
}

/// sum n |V(n)| <= 1 rules out bound states on the half-line.
struct BargmannResult {
    double sum = 0.0;
    bool predicts_no_bound_states = false;
    BoundStateCount counts;
    /// A prediction of no bound states is matched by the counts.
    bool consistent = true;
};

inline BargmannResult bargmann_check(const Potential& v) {
    if (v.domain().kind() != DomainKind::HalfLine) throw PreconditionError("bargmann_check: needs a half-line potential");
    BargmannResult r;
    for (std::size_t i = 0; i < v.size(); ++i) r.sum += static_cast<double>(i + 1) * std::abs(v[i]);
    r.predicts_no_bound_states = r.sum <= 1.0;
    r.counts = count_bound_states(v);
    r.consistent = !r.predicts_no_bound_states || r.counts.none();
    return r;
}

/// With no bound states, V >= 0 forces V(n) <= 1/n and any sign forces
/// |V(n)| <= 2 n^{-1/2}.
struct DecayBoundCheck {
    bool no_bound_states = false;
    bool nonnegative = false;
    double max_n_v = 0.0;
    double max_sqrt_n_v = 0.0;
    bool positive_bound_holds = true;
    bool general_bound_holds = true;

    bool holds() const { return positive_bound_holds && general_bound_holds; }
};

inline DecayBoundCheck decay_bound_check(const Potential& v) {
    if (v.domain().kind() != DomainKind::HalfLine) throw PreconditionError("decay_bound_check: needs a half-line potential");
    DecayBoundCheck c;
    c.no_bound_states = count_bound_states(v).none();
    c.nonnegative = v.nonnegative();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        c.max_n_v = std::max(c.max_n_v, n * std::abs(v[i]));
        c.max_sqrt_n_v = std::max(c.max_sqrt_n_v, std::sqrt(n) * std::abs(v[i]));
    }
    if (c.no_bound_states) {
        if (c.nonnegative) c.positive_bound_holds = c.max_n_v <= 1.0 + 1e-12;
        c.general_bound_holds = c.max_sqrt_n_v <= 2.0 + 1e-12;
    }
    return c;
}

/// Sufficient conditions for infinitely many bound states on the half-line.
/// AveragedPositive: V >= 0, (2/n_k) sum_{n_k/2}^{n_k} V >= eps V(n_k) and
/// eps n_k^2 V(n_k) > 48.  AveragedSquare: the same average for |V|^2 with
/// eps^2 and eps n_k |V(n_k)| > 8 sqrt 3.  InverseLinear: |V(n)| >= beta/n
/// with beta > 1 and V -> 0.
enum class Criterion { AveragedPositive, AveragedSquare, InverseLinear };

inline const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::AveragedPositive: return "averaged-positive";
        case Criterion::AveragedSquare: return "averaged-square";
        case Criterion::InverseLinear: return "inverse-linear";
    }
    return "?";
}

inline std::optional<Criterion> criterion_from_string(const std::string& s) {
    for (auto c : {Criterion::AveragedPositive, Criterion::AveragedSquare, Criterion::InverseLinear})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

struct InfinitudeEvidence {
    Criterion criterion = Criterion::InverseLinear;
    bool hypotheses_hold = false;
    /// eps for the averaged criteria, beta for the inverse-linear one
    double parameter = std::numeric_limits<double>::quiet_NaN();
    /// eps n_k^2 V(n_k), eps n_k |V(n_k)| or beta, compared with `threshold`
    double statistic = std::numeric_limits<double>::quiet_NaN();
    double threshold = 0.0;
    std::vector<std::int64_t> nk;
    /// Averaged-positive only: disjoint piecewise linear witnesses u_k with
    /// <u_k, (J0 + V - 2) u_k> > 0.
    std::size_t positive_witnesses = 0;
    std::vector<std::int64_t> truncations;
    std::vector<BoundStateCount> counts;
    bool strictly_increasing = false;
    /// Truncations along which the total count strictly increases (longest such chain).
    std::vector<std::int64_t> increasing_subsequence;
    std::string note;
};

namespace detail {

inline std::vector<std::size_t> longest_increasing(const std::vector<std::size_t>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> len(n, 1), prev(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (x[j] < x[i] && len[j] + 1 > len[i]) {
                len[i] = len[j] + 1;
                prev[i] = j;
            }
    std::vector<std::size_t> out;
    if (n == 0) return out;
    std::size_t best = static_cast<std::size_t>(std::max_element(len.begin(), len.end()) - len.begin());
    for (std::size_t i = best; i != n; i = prev[i]) out.push_back(i);
    std::reverse(out.begin(), out.end());
    return out;
}

/// <u, (J0 + V - 2) u> for u = 1 at c, linear down to 0 at lo and hi.
inline double hat_form(const HalfLinePotential& v, std::int64_t lo, std::int64_t c, std::int64_t hi) {
    auto u = [&](std::int64_t j) {
        if (j <= lo || j >= hi) return 0.0;
        return j <= c ? static_cast<double>(j - lo) / static_cast<double>(c - lo)
                      : static_cast<double>(hi - j) / static_cast<double>(hi - c);
    };
    double s = 0.0;
    for (std::int64_t j = lo; j < hi; ++j) {
        const double du = u(j + 1) - u(j);
        s -= du * du;
        s += v(j + 1) * u(j + 1) * u(j + 1);
    }
    return s;
}

}  // namespace detail

/// Geometric n_k = 8, 16, 32, ... up to `limit`.
inline std::vector<std::int64_t> default_nk(std::int64_t limit) {
    std::vector<std::int64_t> nk;
    for (std::int64_t x = 8; x <= limit; x *= 2) nk.push_back(x);
    return nk;
}

/// Evaluates the criterion's hypotheses on the data (eps is the largest value
/// satisfying the averaged inequality at every n_k; the lim sup is taken
/// over the second half of the n_k list; beta is the minimum of n|V(n)| over
/// [beta_from, max N]) and counts bound states at each truncation.
inline InfinitudeEvidence infinitude_check(const HalfLinePotential& v, Criterion criterion,
                                           std::vector<std::int64_t> truncations,
                                           std::vector<std::int64_t> nk = {}, std::int64_t beta_from = 1,
                                           unsigned workers = 1) {
    if (truncations.empty()) throw PreconditionError("infinitude_check: empty truncation list");
    for (std::size_t i = 0; i < truncations.size(); ++i)
        if (truncations[i] < 1 || (i > 0 && truncations[i] <= truncations[i - 1]))
            throw PreconditionError("infinitude_check: truncations must be positive and increasing");
    InfinitudeEvidence e;
    e.criterion = criterion;
    e.truncations = truncations;
    const std::int64_t nmax = truncations.back();
    const bool decays = decays_over_window(v, nmax);
    if (criterion == Criterion::InverseLinear) {
        e.threshold = 1.0;
        double beta = std::numeric_limits<double>::infinity();
        for (std::int64_t n = std::max<std::int64_t>(1, beta_from); n <= nmax; ++n)
            beta = std::min(beta, static_cast<double>(n) * std::abs(v(n)));
        e.parameter = e.statistic = beta;
        e.hypotheses_hold = beta > 1.0 && decays;
        if (!decays) e.note = "V does not visibly decay over the window";
    } else {
        if (nk.empty()) nk = default_nk(nmax / 2);
        for (auto k : nk)
            if (k < 4 || k > nmax) throw PreconditionError("infinitude_check: n_k must lie in [4, max N]");
        e.nk = nk;
        const bool square = criterion == Criterion::AveragedSquare;
        e.threshold = square ? 8.0 * std::sqrt(3.0) : 48.0;
        bool nonneg = true;
        if (!square)
            for (std::int64_t n = 1; n <= nmax; ++n) nonneg = nonneg && v(n) >= 0.0;
        double eps = std::numeric_limits<double>::infinity();
        for (auto k : nk) {
            double avg = 0.0;
            for (std::int64_t j = k / 2; j <= k; ++j) avg += square ? v(j) * v(j) : v(j);
            avg *= 2.0 / static_cast<double>(k);
            const double at = square ? v(k) * v(k) : v(k);
            const double ek = at > 0 ? (square ? std::sqrt(avg / at) : avg / at) : std::numeric_limits<double>::infinity();
            eps = std::min(eps, ek);
        }
        e.parameter = eps;
        double stat = 0.0;
        for (std::size_t i = nk.size() / 2; i < nk.size(); ++i) {
            const double k = static_cast<double>(nk[i]);
            stat = std::max(stat, square ? eps * k * std::abs(v(nk[i])) : eps * k * k * v(nk[i]));
        }
        e.statistic = stat;
        e.hypotheses_hold = std::isfinite(eps) && eps > 0 && stat > e.threshold && (square || nonneg);
        if (!square && !nonneg) e.note = "V takes negative values";
        if (!square) {
            std::int64_t last_hi = 0;
            for (auto k : nk) {
                const std::int64_t c = k - k % 4;
                const std::int64_t lo = c / 4 - 1, hi = 3 * c / 2 + 1;
                if (c < 8 || lo <= last_hi) continue;
                if (detail::hat_form(v, lo, c, hi) > 0.0) {
                    ++e.positive_witnesses;
                    last_hi = hi;
                }
            }
        }
    }
    e.counts.resize(truncations.size());
    parallel_for(truncations.size(), workers,
                 [&](std::size_t i) { e.counts[i] = count_bound_states(v, truncations[i], TailMode::Auto); });
    std::vector<std::size_t> totals;
    for (const auto& c : e.counts) totals.push_back(c.total());
    e.strictly_increasing = true;
    for (std::size_t i = 1; i < totals.size(); ++i) e.strictly_increasing = e.strictly_increasing && totals[i] > totals[i - 1];
    for (auto i : detail::longest_increasing(totals)) e.increasing_subsequence.push_back(truncations[i]);
    return e;
}

/// Whole-line counts by Dirichlet decoupling at the origin: the half-lines
/// n >= 1 and n <= -1 are counted separately and summed.  Removing the
/// origin is a finite-rank change, so the sum may differ from the coupled
/// count by at most `coupling_tolerance`.
struct WholeLineCounts {
    std::vector<std::int64_t> truncations;
    std::vector<std::size_t> right;
    std::vector<std::size_t> left;
    std::vector<std::size_t> total;
    std::size_t coupling_tolerance = 2;
    bool strictly_increasing = false;
};

inline WholeLineCounts whole_line_counts(const std::function<double(std::int64_t)>& v,
                                         const std::vector<std::int64_t>& truncations, unsigned workers = 1) {
    WholeLineCounts w;
    w.truncations = truncations;
    const auto right = HalfLinePotential::function(v);
    const auto left = HalfLinePotential::function([v](std::int64_t n) { return v(-n); });
    w.right.resize(truncations.size());
    w.left.resize(truncations.size());
    parallel_for(2 * truncations.size(), workers, [&](std::size_t i) {
        const auto k = i / 2;
        if (i % 2 == 0)
            w.right[k] = count_bound_states(right, truncations[k]).total();
        else
            w.left[k] = count_bound_states(left, truncations[k]).total();
    });
    w.strictly_increasing = true;
    for (std::size_t k = 0; k < truncations.size(); ++k) {
        w.total.push_back(w.right[k] + w.left[k]);
        if (k > 0) w.strictly_increasing = w.strictly_increasing && w.total[k] > w.total[k - 1];
    }
    return w;
}

struct MomentPoint {
    std::int64_t n = 0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t above = 0;
    std::size_t below = 0;

    double estimate() const { return 0.5 * (lower + upper); }
};

/// Partial sums of (|E_j| - 2)^gamma over the Dirichlet truncations.
/// Divergence below the threshold (1 - alpha)/(2 alpha) is judged by the
/// conservative ratio (lower bound at the last N) / (upper bound at the first N).
struct MomentReport {
    double gamma = 0.0;
    double decay_c = 0.0;
    double decay_alpha = 0.0;
    double threshold = 0.0;
    bool below_threshold = false;
    std::vector<MomentPoint> partial_sums;
    double growth_ratio = 0.0;
    double growth_factor = 2.0;
    bool monotone = true;
    bool diverging = false;
    bool decay_verified = true;
    std::string note;
};

inline MomentReport moment_divergence_experiment(const HalfLinePotential& v, double c, double alpha, double gamma,
                                                 std::vector<std::int64_t> truncations, unsigned workers = 1,
                                                 double growth_factor = 2.0, double tolerance = 1e-10) {
    if (!(alpha > 0 && alpha < 1)) throw PreconditionError("moment experiment: need 0 < alpha < 1");
    if (!(gamma > 0)) throw PreconditionError("moment experiment: gamma must be positive");
    if (truncations.empty()) throw PreconditionError("moment experiment: empty truncation list");
    for (std::size_t i = 0; i < truncations.size(); ++i)
        if (truncations[i] < 1 || (i > 0 && truncations[i] <= truncations[i - 1]))
            throw PreconditionError("moment experiment: truncations must be positive and increasing");
    MomentReport r;
    r.gamma = gamma;
    r.decay_c = c;
    r.decay_alpha = alpha;
    r.threshold = (1.0 - alpha) / (2.0 * alpha);
    r.below_threshold = gamma < r.threshold;
    r.growth_factor = growth_factor;
    for (std::int64_t n = 1; n <= truncations.back(); ++n)
        if (std::abs(v(n)) < c * std::pow(static_cast<double>(n), -alpha) * (1.0 - 1e-12)) {
            r.decay_verified = false;
            r.note = "|V(n)| < C n^-alpha at n = " + std::to_string(n);
            break;
        }
    r.partial_sums.resize(truncations.size());
    parallel_for(truncations.size(), workers, [&](std::size_t i) {
        const auto n = truncations[i];
        SymTridiagonal t;
        t.diag.resize(static_cast<std::size_t>(n));
        for (std::int64_t k = 1; k <= n; ++k) t.diag[static_cast<std::size_t>(k - 1)] = v(k);
        t.off.assign(static_cast<std::size_t>(n - 1), 1.0);
        const auto m = moment_by_counting(t, 2.0, tolerance, gamma);
        r.partial_sums[i] = {n, m.lower, m.upper, m.above, m.below};
    });
    for (std::size_t i = 1; i < r.partial_sums.size(); ++i)
        r.monotone = r.monotone && r.partial_sums[i].upper >= r.partial_sums[i - 1].lower;
    const auto& first = r.partial_sums.front();
    const auto& last = r.partial_sums.back();
    if (first.upper > 0)
        r.growth_ratio = last.lower / first.upper;
    else
        r.growth_ratio = last.lower > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.diverging = r.growth_ratio >= growth_factor;
    return r;
}

/// V(n) = C n^{-alpha}.
inline MomentReport moment_divergence_experiment(double c, double alpha, double gamma,
                                                 std::vector<std::int64_t> truncations, unsigned workers = 1,
                                                 double growth_factor = 2.0) {
    return moment_divergence_experiment(power_law(c, alpha), c, alpha, gamma, std::move(truncations), workers,
                                        growth_factor);
}

}  // namespace latvar
