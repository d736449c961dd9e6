#pragma once

// Trial-function machinery: the Delta functional, parity trial pairs with an
// optional cutoff, tent and logarithmic test functions, disjoint-support
// families built from Dirichlet annuli, and the moment trial family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latvar/families.hpp"
#include "latvar/lattice.hpp"
#include "latvar/spectrum.hpp"

namespace latvar {

/// <phi+, (H - 2nu) phi+> + <phi-, (-H - 2nu) phi->
inline double delta_functional(const TrialFunction& plus, const TrialFunction& minus, const LatticeOperator& op) {
    require_same(op.domain(), plus.domain());
    require_same(op.domain(), minus.domain());
    const double e = op.band_edge();
    return quadratic_form(op, plus) - e * plus.norm2() - quadratic_form(op, minus) - e * minus.norm2();
}

struct DeltaCertificate {
    TrialFunction phi_plus{LatticeDomain::half_line(1)};
    TrialFunction phi_minus{LatticeDomain::half_line(1)};
    double delta = 0.0;
    double lower_bound_rhs = 0.0;
    double band_edge = 2.0;
    /// Rayleigh quotients of phi+ and phi-; NaN for a zero vector.
    double rq_plus = std::numeric_limits<double>::quiet_NaN();
    double rq_minus = std::numeric_limits<double>::quiet_NaN();
    /// 0 when phi+ is the better witness (ties included), 1 for phi-.
    int winner = 0;

    double gap_plus() const { return std::isnan(rq_plus) ? -std::numeric_limits<double>::infinity() : rq_plus - band_edge; }
    double gap_minus() const {
        return std::isnan(rq_minus) ? -std::numeric_limits<double>::infinity() : -band_edge - rq_minus;
    }
    /// How far the winning Rayleigh quotient lies outside the band.
    double winning_gap() const { return winner == 0 ? gap_plus() : gap_minus(); }
    const TrialFunction& witness() const { return winner == 0 ? phi_plus : phi_minus; }
    bool positive() const { return delta > 0.0; }
};

namespace detail {

template <class Op>
void finish_certificate(DeltaCertificate& c, const Op& op) {
    if (c.phi_plus.norm2() > 0) c.rq_plus = rayleigh_quotient(op, c.phi_plus);
    if (c.phi_minus.norm2() > 0) c.rq_minus = rayleigh_quotient(op, c.phi_minus);
    c.winner = c.gap_minus() > c.gap_plus() ? 1 : 0;
}

}  // namespace detail

/// Per-site weights 0 <= F <= 1 multiplying V in the trial pair.
struct CutoffF {
    std::vector<double> values;

    explicit CutoffF(std::vector<double> v) : values(std::move(v)) {
        for (double x : values)
            if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("cutoff F must satisfy 0 <= F <= 1");
    }

    /// F(n) = min(1, cap / |V(n)|); cap = 2 nu keeps |(4 nu)^{-1} F V| <= 1/2.
    static CutoffF from_potential(const Potential& v, std::optional<double> cap = std::nullopt) {
        const double c = cap.value_or(2.0 * v.domain().dim());
        std::vector<double> f(v.size(), 1.0);
        for (std::size_t i = 0; i < f.size(); ++i)
            if (std::abs(v[i]) > c) f[i] = c / std::abs(v[i]);
        return CutoffF(std::move(f));
    }

    double operator[](std::size_t i) const { return values[i]; }
};

/// phi+ = (1 + (4nu)^{-1} F V) phi, phi- = U (1 - (4nu)^{-1} F V) phi, and
/// the lower bound 2 <phi, (H0 - 2nu + (4nu)^{-1} F V^2) phi>.
inline DeltaCertificate trial_pair(const TrialFunction& phi, const LatticeOperator& op,
                                   const std::optional<CutoffF>& cutoff = std::nullopt) {
    require_same(op.domain(), phi.domain());
    if (cutoff && cutoff->values.size() != op.domain().size())
        throw DomainMismatch("cutoff F has " + std::to_string(cutoff->values.size()) + " sites, domain has " +
                             std::to_string(op.domain().size()));
    const double nu = op.nu();
    const auto& v = op.potential;
    auto g = [&](std::size_t i) { return (cutoff ? (*cutoff)[i] : 1.0) * v[i] / (4.0 * nu); };
    DeltaCertificate c;
    c.band_edge = op.band_edge();
    c.phi_plus = phi.multiplied([&](std::size_t i) { return 1.0 + g(i); });
    c.phi_minus = parity_conjugate(phi.multiplied([&](std::size_t i) { return 1.0 - g(i); }));
    c.delta = delta_functional(c.phi_plus, c.phi_minus, op);
    double fv2 = 0.0;
    for (auto i = phi.begin(); i < phi.end(); ++i) fv2 += g(i) * v[i] * phi[i] * phi[i];
    c.lower_bound_rhs = 2.0 * (free_form(phi) - 2.0 * nu * phi.norm2() + fv2);
    detail::finish_certificate(c, op);
    return c;
}

/// Jacobi version with gamma = (2 + alpha)^{-1}: phi+ = (1 + gamma b) phi,
/// phi- = U (1 - gamma b) phi, delta = <phi+, (J-2) phi+> + <phi-, (-2-J) phi->,
/// lower bound 2 <phi, (J1 - 2 + gamma b^2) phi> with J1 the b = 0 matrix.
inline DeltaCertificate jacobi_trial_pair(const TrialFunction& phi, const JacobiOperator& j) {
    require_same(j.domain(), phi.domain());
    const double gamma = j.gamma();
    const auto a = j.a();
    const auto b = j.b();
    DeltaCertificate c;
    c.band_edge = 2.0;
    c.phi_plus = phi.multiplied([&](std::size_t i) { return 1.0 + gamma * b[i]; });
    c.phi_minus = parity_conjugate(phi.multiplied([&](std::size_t i) { return 1.0 - gamma * b[i]; }));
    c.delta = quadratic_form(j, c.phi_plus) - 2.0 * c.phi_plus.norm2() - quadratic_form(j, c.phi_minus) -
              2.0 * c.phi_minus.norm2();
    double j1 = 0.0, gb2 = 0.0;
    for (auto i = phi.begin(); i < phi.end(); ++i) {
        if (i + 1 < j.size()) j1 += 2.0 * a[i] * phi[i] * phi[i + 1];
        gb2 += gamma * b[i] * b[i] * phi[i] * phi[i];
    }
    c.lower_bound_rhs = 2.0 * (j1 - 2.0 * phi.norm2() + gb2);
    detail::finish_certificate(c, j);
    return c;
}

/// Both sides of Delta(f+g, U(f-g); V) >= 2<f,(H0-2nu)f> - 8nu|g|^2 + 4<f,Vg>.
struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack() const { return lhs - rhs; }
};

inline InequalitySides perturbation_bound(const TrialFunction& f, const TrialFunction& g, const LatticeOperator& op) {
    require_same(f.domain(), g.domain());
    const double nu = op.nu();
    InequalitySides s;
    s.lhs = delta_functional(f + g, parity_conjugate(f - g), op);
    double fvg = 0.0;
    const auto lo = std::max(f.begin(), g.begin());
    const auto hi = std::min(f.end(), g.end());
    for (auto i = lo; i < hi; ++i) fvg += f[i] * op.potential[i] * g[i];
    s.rhs = 2.0 * (free_form(f) - 2.0 * nu * f.norm2()) - 8.0 * nu * g.norm2() + 4.0 * fvg;
    return s;
}

/// For |V| <= 4nu on supp phi, the better of psi+ = (1 + V/4nu) phi and
/// U psi- = U (1 - V/4nu) phi against the bound
/// |RQ_H(psi)| - 2nu >= (1/4) [RQ_{H0 + V^2/4nu}(phi) - 2nu].
struct SideWitness {
    TrialFunction psi{LatticeDomain::half_line(1)};
    bool from_plus = true;
    double lhs = 0.0;
    double rhs = 0.0;
    /// RQ_{H0 + V^2/4nu}(phi) - 2nu; the bound is informative when >= 0.
    double bracket = 0.0;
    double slack() const { return lhs - rhs; }
};

inline SideWitness side_witness(const TrialFunction& phi, const LatticeOperator& op) {
    require_same(op.domain(), phi.domain());
    if (phi.norm2() == 0.0) throw PreconditionError("side_witness: phi must be nonzero");
    const double nu = op.nu();
    const auto& v = op.potential;
    for (auto i : phi.support())
        if (std::abs(v[i]) > 4.0 * nu) throw PreconditionError("side_witness: |V| exceeds 4 nu on supp phi");
    const auto plus = phi.multiplied([&](std::size_t i) { return 1.0 + v[i] / (4.0 * nu); });
    const auto minus = parity_conjugate(phi.multiplied([&](std::size_t i) { return 1.0 - v[i] / (4.0 * nu); }));
    auto score = [&](const TrialFunction& psi) {
        return psi.norm2() > 0 ? std::abs(rayleigh_quotient(op, psi)) - 2.0 * nu
                               : -std::numeric_limits<double>::infinity();
    };
    SideWitness w;
    const double sp = score(plus), sm = score(minus);
    w.from_plus = sp >= sm;
    w.psi = w.from_plus ? plus : minus;
    w.lhs = std::max(sp, sm);
    double v2 = 0.0;
    for (auto i = phi.begin(); i < phi.end(); ++i) v2 += v[i] * v[i] * phi[i] * phi[i] / (4.0 * nu);
    w.bracket = (free_form(phi) + v2) / phi.norm2() - 2.0 * nu;
    w.rhs = 0.25 * w.bracket;
    return w;
}

/// 1 - n/(L2+1) for 0 <= n <= L2 + 1 and 1 + n/(L1+1) for -L1-1 <= n <= 0.
inline double tent_value(std::int64_t n, std::int64_t l1, std::int64_t l2) {
    if (n >= 0) return n > l2 ? 0.0 : 1.0 - static_cast<double>(n) / static_cast<double>(l2 + 1);
    return -n > l1 ? 0.0 : 1.0 + static_cast<double>(n) / static_cast<double>(l1 + 1);
}

/// Tent centred at `center` on a one-dimensional domain.
inline TrialFunction tent_at(const LatticeDomain& d, std::int64_t center, std::int64_t l1, std::int64_t l2) {
    if (l1 < 0 || l2 < 0) throw PreconditionError("tent: L1, L2 must be nonnegative");
    if (d.dim() != 1) throw PreconditionError("tent: needs a one-dimensional domain");
    if (!d.index_of(center - l1) || !d.index_of(center + l2))
        throw PreconditionError("tent: support [" + std::to_string(center - l1) + ", " + std::to_string(center + l2) +
                                "] leaves " + d.describe());
    std::vector<double> v(static_cast<std::size_t>(l1 + l2 + 1));
    for (std::int64_t k = -l1; k <= l2; ++k) v[static_cast<std::size_t>(k + l1)] = tent_value(k, l1, l2);
    return TrialFunction::on_sites(d, center - l1, std::move(v));
}

inline TrialFunction tent_1d(std::int64_t l1, std::int64_t l2) {
    if (l1 < 1 || l2 < 1) throw PreconditionError("tent_1d: L1, L2 must be >= 1");
    return tent_at(LatticeDomain::whole_line(l1 + 1, l2 + 1), 0, l1, l2);
}

/// <phi, (2 - H0) phi> = (L1+1)^{-1} + (L2+1)^{-1}
inline double tent_energy(std::int64_t l1, std::int64_t l2) {
    return 1.0 / static_cast<double>(l1 + 1) + 1.0 / static_cast<double>(l2 + 1);
}

/// |phi|^2 = 1 + sum_side L(2L+1) / (6(L+1))
inline double tent_norm2(std::int64_t l1, std::int64_t l2) {
    auto side = [](std::int64_t l) {
        const double x = static_cast<double>(l);
        return x * (2.0 * x + 1.0) / (6.0 * (x + 1.0));
    };
    return 1.0 + side(l1) + side(l2);
}

/// phi_L(n) = -ln((1 + |n|_1) / (L+1)) / ln(L+1) on Z^2, zero for |n|_1 >= L.
/// Energies and norms are summed over l1-shells: shell r holds 4r sites
/// (one for r = 0) and 8r + 4 bonds lead from shell r to shell r + 1 (4 for r = 0).
struct LogTrial2D {
    std::int64_t l = 1;

    double value(std::int64_t r) const {
        if (r >= l) return 0.0;
        const double ll = std::log(static_cast<double>(l + 1));
        return -std::log(static_cast<double>(1 + r) / static_cast<double>(l + 1)) / ll;
    }

    /// <phi, (4 - H0) phi>
    double energy() const {
        double s = 0.0;
        for (std::int64_t r = 0; r < l; ++r) {
            const double w = r == 0 ? 4.0 : 8.0 * static_cast<double>(r) + 4.0;
            const double dphi = value(r + 1) - value(r);
            s += w * dphi * dphi;
        }
        return s;
    }

    double norm2() const {
        double s = 0.0;
        for (std::int64_t r = 0; r < l; ++r) {
            const double c = r == 0 ? 1.0 : 4.0 * static_cast<double>(r);
            s += c * value(r) * value(r);
        }
        return s;
    }

    /// (L^{-1} ln L)^2 |phi_L|^2
    double d_estimate() const {
        const double x = std::log(static_cast<double>(l)) / static_cast<double>(l);
        return x * x * norm2();
    }

    /// Explicit vector centred at `center` on a two-dimensional box.
    TrialFunction materialize(const LatticeDomain& box, const Site& center) const {
        if (box.dim() != 2) throw PreconditionError("log trial: needs a two-dimensional box");
        Site lo{center[0] - l, center[1]}, hi{center[0] + l, center[1]};
        auto i0 = box.index(lo);
        auto i1 = box.index(hi);
        for (std::int64_t a = -l; a <= l; ++a)
            for (std::int64_t b : {-(l - std::abs(a)), l - std::abs(a)})
                if (!box.index(Site{center[0] + a, center[1] + b}))
                    throw PreconditionError("log trial: support leaves " + box.describe());
        std::vector<double> v(*i1 - *i0 + 1, 0.0);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto s = box.site(*i0 + k);
            v[k] = value(std::abs(s[0] - center[0]) + std::abs(s[1] - center[1]));
        }
        return TrialFunction(box, *i0, std::move(v));
    }
};

inline LogTrial2D log_trial_2d(std::int64_t l) {
    if (l < 1) throw PreconditionError("log_trial_2d: L must be >= 1");
    return LogTrial2D{l};
}

/// energy * ln(L+1) <= 8 (1 + 1/ln(L+1)), from ln(1 + 1/(r+1)) <= 1/(r+1)
/// and 8r + 4 <= 8(r+1).
inline double log_trial_energy_bound(std::int64_t l) { return 8.0 * (1.0 + 1.0 / std::log(static_cast<double>(l + 1))); }

/// Midpoint quadrature of the integral of ln^2(|x|+|y|) over |x|+|y| <= 1,
/// on `resolution`^2 cells of the first quadrant.
inline double diamond_log_square_integral(int resolution = 2000) {
    const double h = 1.0 / resolution;
    double s = 0.0;
    for (int i = 0; i < resolution; ++i) {
        const double x = (i + 0.5) * h;
        double row = 0.0;
        for (int j = 0; j < resolution - i; ++j) {
            const double y = (j + 0.5) * h;
            const double t = x + y;
            if (t > 1.0) continue;
            const double lt = std::log(t);
            row += lt * lt;
        }
        s += row;
    }
    return 4.0 * s * h * h;
}

class InsufficientSpectrum : public std::runtime_error {
public:
    InsufficientSpectrum(std::size_t achieved, std::size_t requested, const std::string& where)
        : std::runtime_error("insufficient spectrum: found " + std::to_string(achieved) + " of " +
                             std::to_string(requested) + " disjoint trial functions " + where),
          achieved(achieved) {}
    std::size_t achieved;
};

/// Trial functions with pairwise support distance >= 2 and Rayleigh quotient
/// above 2 nu, each the top Dirichlet eigenvector of H0 + W on an annulus
/// outside the previous members.
struct DisjointFamily {
    LatticeDomain domain = LatticeDomain::half_line(1);
    std::vector<TrialFunction> members;
    std::vector<double> rayleigh;
    /// Half-line: [first, last] site of each annulus.
    std::vector<std::pair<std::int64_t, std::int64_t>> windows;
};

/// Half-line version: annulus k starts two sites past the previous one and
/// doubles its length until its top eigenvalue exceeds 2 + margin, failing
/// once it would pass `box_cap`.
inline DisjointFamily disjoint_family(const HalfLinePotential& w, std::size_t m, std::int64_t box_cap,
                                      std::int64_t initial_width = 8, double margin = 1e-12) {
    DisjointFamily fam;
    if (m == 0) return fam;
    std::vector<std::vector<double>> vecs;
    std::int64_t start = 1;
    while (fam.windows.size() < m) {
        std::int64_t width = initial_width;
        bool found = false;
        while (start + width - 1 <= box_cap) {
            SymTridiagonal t;
            t.diag.resize(static_cast<std::size_t>(width));
            t.off.assign(static_cast<std::size_t>(width - 1), 1.0);
            for (std::int64_t k = 0; k < width; ++k) {
                const double x = w(start + k);
                if (x < 0.0) throw PreconditionError("disjoint_family: W must be nonnegative");
                t.diag[static_cast<std::size_t>(k)] = x;
            }
            auto pair = top_eigenpair(t);
            if (pair.value > 2.0 + margin) {
                fam.windows.emplace_back(start, start + width - 1);
                vecs.push_back(std::move(pair.vector));
                found = true;
                break;
            }
            width *= 2;
        }
        if (!found) throw InsufficientSpectrum(fam.windows.size(), m, "below site " + std::to_string(box_cap));
        start = fam.windows.back().second + 2;
    }
    fam.domain = LatticeDomain::half_line(fam.windows.back().second + 1);
    const auto op = LatticeOperator(w.on_window(fam.windows.back().second + 1));
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        fam.members.push_back(TrialFunction::on_sites(fam.domain, fam.windows[k].first, std::move(vecs[k])));
        fam.rayleigh.push_back(rayleigh_quotient(op, fam.members.back()));
    }
    return fam;
}

/// Box version on the domain of `w`: annuli are l-infinity shells about the
/// origin, solved densely, each holding at most `box_cap` sites.
inline DisjointFamily disjoint_family(const Potential& w, std::size_t m, std::size_t box_cap, double margin = 1e-12) {
    if (!w.nonnegative()) throw PreconditionError("disjoint_family: W must be nonnegative");
    const auto& d = w.domain();
    DisjointFamily fam;
    fam.domain = d;
    if (m == 0) return fam;
    std::int64_t reach = 0;
    for (int a = 0; a < d.dim(); ++a) reach = std::max({reach, std::abs(d.lower(a)), std::abs(d.upper(a))});
    const double edge = 2.0 * d.dim();
    std::int64_t inner = -2;  // previous shell ended at l-inf radius `inner`
    while (fam.members.size() < m) {
        bool found = false;
        for (std::int64_t outer = std::max<std::int64_t>(inner + 3, 1);; outer = 2 * outer + 1) {
            const std::int64_t capped = std::min(outer, reach);
            std::vector<std::size_t> sites;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const auto r = d.linf_norm(i);
                if (r >= inner + 2 && r <= capped) sites.push_back(i);
            }
            if (sites.size() > box_cap || sites.empty()) break;
            SymMatrix a(sites.size());
            for (std::size_t p = 0; p < sites.size(); ++p) {
                a(p, p) = w[sites[p]];
                d.for_each_neighbor(sites[p], [&](std::size_t j) {
                    auto it = std::lower_bound(sites.begin(), sites.end(), j);
                    if (it != sites.end() && *it == j) a(p, static_cast<std::size_t>(it - sites.begin())) = 1.0;
                });
            }
            const auto eig = symmetric_eigen(a, true);
            if (eig.values.back() > edge + margin) {
                auto vec = eig.vector(sites.size() - 1);
                std::vector<double> dense(sites.back() - sites.front() + 1, 0.0);
                for (std::size_t p = 0; p < sites.size(); ++p) dense[sites[p] - sites.front()] = vec[p];
                fam.members.emplace_back(d, sites.front(), std::move(dense));
                fam.rayleigh.push_back(rayleigh_quotient(LatticeOperator(w), fam.members.back()));
                fam.windows.emplace_back(inner + 2, capped);
                inner = capped;
                found = true;
                break;
            }
            if (capped == reach) break;
        }
        if (!found) throw InsufficientSpectrum(fam.members.size(), m, "within " + d.describe());
    }
    return fam;
}

/// Tent of half-width h centred at c (values 1 - |n - c|/(h+1)).
struct MomentTrial {
    std::int64_t m = 0;
    std::int64_t center = 0;
    std::int64_t half_width = 0;
    double kinetic = 0.0;       ///< <phi, (2 - H0) phi>
    double quarter_v2 = 0.0;    ///< <phi, V^2/4 phi>
    double norm2 = 0.0;
    double gap = 0.0;           ///< <phi, (H0 + V^2/4 - 2) phi> / |phi|^2

    std::int64_t first() const { return center - half_width; }
    std::int64_t last() const { return center + half_width; }

    TrialFunction materialize(const LatticeDomain& d) const { return tent_at(d, center, half_width, half_width); }
};

struct MomentFamily {
    double decay_c = 1.0;
    double decay_alpha = 0.5;
    double p = 1.0;
    double c1 = 0.0;
    std::vector<MomentTrial> members;
    /// Smallest m from which every gap is positive (0 if none).
    std::int64_t m0 = 0;
    double fitted_exponent = 0.0;
    double predicted_exponent = 0.0;
    double c2 = 0.0;  ///< max kinetic * m^p
    double c3 = 0.0;  ///< min quarter_v2 * m^{2 alpha (p+1)} / m^p
    double c4 = 0.0;  ///< min norm2 / m^p
    double c5 = 0.0;  ///< min gap * m^{2 alpha (p+1)} over m >= m0
    double min_separation = 0.0;
};

/// Tents near m^{p+1} with half-width C1 m^p for V(n) = C n^{-alpha}.  C1 is
/// fixed so the supports for m_min and m_min + 1 are exactly 2 sites apart.
/// Requires alpha (p+1) < p, i.e. p > alpha / (1 - alpha).
inline MomentFamily moment_trial_family(double c, double alpha, double p, std::int64_t m_min, std::int64_t m_max) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("moment_trial_family: need 0 < alpha < 1");
    if (!(p > alpha / (1.0 - alpha)))
        throw PreconditionError("moment_trial_family: need alpha (p+1) < p, i.e. p > alpha/(1-alpha) = " +
                                std::to_string(alpha / (1.0 - alpha)));
    if (m_min < 1 || m_max <= m_min) throw PreconditionError("moment_trial_family: need 1 <= m_min < m_max");
    MomentFamily f;
    f.decay_c = c;
    f.decay_alpha = alpha;
    f.p = p;
    f.predicted_exponent = -2.0 * alpha * (p + 1.0);
    auto center = [&](std::int64_t m) { return static_cast<std::int64_t>(std::llround(std::pow(double(m), p + 1.0))); };
    {
        const double m = static_cast<double>(m_min);
        f.c1 = (double(center(m_min + 1) - center(m_min)) - 2.0) / (std::pow(m + 1.0, p) + std::pow(m, p));
        if (!(f.c1 > 0.0)) throw PreconditionError("moment_trial_family: m_min too small for separated supports");
    }
    f.min_separation = std::numeric_limits<double>::infinity();
    for (std::int64_t m = m_min; m <= m_max; ++m) {
        MomentTrial t;
        t.m = m;
        t.center = center(m);
        t.half_width = static_cast<std::int64_t>(std::floor(f.c1 * std::pow(double(m), p) + 1e-9));
        if (t.half_width < 1) throw PreconditionError("moment_trial_family: tent half-width below 1");
        if (t.first() < 1) throw PreconditionError("moment_trial_family: support leaves the half-line");
        double kin = 0.0, q = 0.0, n2 = 0.0;
        double prev = 0.0;
        for (std::int64_t n = t.first() - 1; n <= t.last() + 1; ++n) {
            const double x = tent_value(n - t.center, t.half_width, t.half_width);
            const double dx = x - prev;
            kin += dx * dx;
            const double v = c * std::pow(static_cast<double>(n), -alpha);
            q += 0.25 * v * v * x * x;
            n2 += x * x;
            prev = x;
        }
        t.kinetic = kin;
        t.quarter_v2 = q;
        t.norm2 = n2;
        t.gap = (q - kin) / n2;
        if (!f.members.empty()) f.min_separation = std::min(f.min_separation, double(t.first() - f.members.back().last()));
        f.members.push_back(t);
    }
    f.m0 = 0;
    for (auto it = f.members.rbegin(); it != f.members.rend() && it->gap > 0.0; ++it) f.m0 = it->m;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
    f.c2 = 0.0;
    f.c3 = f.c4 = f.c5 = std::numeric_limits<double>::infinity();
    for (const auto& t : f.members) {
        const double m = static_cast<double>(t.m);
        f.c2 = std::max(f.c2, t.kinetic * std::pow(m, p));
        f.c3 = std::min(f.c3, t.quarter_v2 * std::pow(m, -f.predicted_exponent) / std::pow(m, p));
        f.c4 = std::min(f.c4, t.norm2 / std::pow(m, p));
        if (f.m0 > 0 && t.m >= f.m0) {
            f.c5 = std::min(f.c5, t.gap * std::pow(m, -f.predicted_exponent));
            const double x = std::log(m), y = std::log(t.gap);
            sx += x, sy += y, sxx += x * x, sxy += x * y, cnt += 1;
        }
    }
    if (cnt >= 2) f.fitted_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    if (f.m0 == 0) f.c5 = 0.0;
    return f;
}

}  // namespace latvar
