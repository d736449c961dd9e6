#pragma once

// Half-line potentials given as functions of the site n >= 1, so that the
// same potential can be evaluated on any truncation, plus the builtin
// families used throughout: single site, dipole, alternating, power law.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "latvar/lattice.hpp"

namespace latvar {

/// V(n) for n >= 1 on the half-line Z+.  `support_end`, when set, promises
/// V(n) = 0 for n > support_end; `sites`, when nonempty, promises V vanishes
/// off those (sorted) sites.
struct HalfLinePotential {
    std::function<double(std::int64_t)> v;
    std::optional<std::int64_t> support_end;
    std::vector<std::int64_t> sites;

    double operator()(std::int64_t n) const { return v(n); }
    bool finitely_supported() const { return support_end.has_value(); }

    static HalfLinePotential function(std::function<double(std::int64_t)> f) { return {std::move(f), std::nullopt, {}}; }

    /// Finitely many nonzero sites; zero elsewhere.
    static HalfLinePotential sparse(const std::map<std::int64_t, double>& values) {
        HalfLinePotential p;
        auto table = std::make_shared<std::map<std::int64_t, double>>();
        for (auto [n, x] : values) {
            if (n < 1) throw PreconditionError("half-line sites start at 1");
            if (!std::isfinite(x)) throw PreconditionError("potential: values must be finite");
            if (x != 0.0) {
                (*table)[n] = x;
                p.sites.push_back(n);
            }
        }
        p.support_end = p.sites.empty() ? 0 : p.sites.back();
        p.v = [table](std::int64_t n) {
            auto it = table->find(n);
            return it == table->end() ? 0.0 : it->second;
        };
        return p;
    }

    /// A potential stored on a window, zero beyond it.
    static HalfLinePotential from(const Potential& w) {
        if (w.domain().kind() != DomainKind::HalfLine)
            throw PreconditionError("expected a half-line potential");
        HalfLinePotential p;
        auto vals = std::make_shared<std::vector<double>>(w.values().begin(), w.values().end());
        p.v = [vals](std::int64_t n) {
            return (n >= 1 && n <= static_cast<std::int64_t>(vals->size())) ? (*vals)[static_cast<std::size_t>(n - 1)]
                                                                             : 0.0;
        };
        std::int64_t last = 0;
        for (std::size_t i = 0; i < vals->size(); ++i)
            if ((*vals)[i] != 0.0) last = static_cast<std::int64_t>(i) + 1;
        p.support_end = last;
        if (w.is_sparse())
            for (auto i : w.nonzero_sites()) p.sites.push_back(static_cast<std::int64_t>(i) + 1);
        return p;
    }

    /// Dense restriction to sites 1..N.
    Potential on_window(std::int64_t n) const {
        return Potential::from_function(LatticeDomain::half_line(n), [this](std::int64_t k) { return v(k); });
    }

    HalfLinePotential scaled(double c) const {
        HalfLinePotential p = *this;
        auto f = v;
        p.v = [f, c](std::int64_t n) { return c * f(n); };
        return p;
    }

    HalfLinePotential negated() const { return scaled(-1.0); }
};

/// lambda W_{n0}: lambda at n0, zero elsewhere.
inline HalfLinePotential single_site(std::int64_t n0, double lambda) {
    if (n0 < 1) throw PreconditionError("single-site: n0 must be >= 1");
    return HalfLinePotential::sparse({{n0, lambda}});
}

/// lambda at n0, -lambda at n0 + 1.
inline HalfLinePotential dipole(std::int64_t n0, double lambda) {
    if (n0 < 1) throw PreconditionError("dipole: n0 must be >= 1");
    return HalfLinePotential::sparse({{n0, lambda}, {n0 + 1, -lambda}});
}

/// beta (-1)^n / n.
inline HalfLinePotential alternating(double beta) {
    return HalfLinePotential::function(
        [beta](std::int64_t n) { return ((n & 1) ? -beta : beta) / static_cast<double>(n); });
}

/// C n^{-alpha}, optionally with the sign (-1)^n.
inline HalfLinePotential power_law(double c, double alpha, bool alternate = false) {
    return HalfLinePotential::function([c, alpha, alternate](std::int64_t n) {
        const double x = c * std::pow(static_cast<double>(n), -alpha);
        return (alternate && (n & 1)) ? -x : x;
    });
}

}  // namespace latvar
