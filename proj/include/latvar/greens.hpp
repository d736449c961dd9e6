#pragma once

// Band-edge lattice Green functions G_nu(n) = <delta_n, (2nu - H0)^{-1} delta_0>
// for nu >= 3, the Birman-Schwinger matrix V^{1/2} G V^{1/2}, the sparse
// non-decaying potential with no spectrum above 2nu, and a power-iteration
// check of the top eigenvalue on a Dirichlet box.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latvar/lattice.hpp"
#include "latvar/parallel.hpp"
#include "latvar/spectrum.hpp"

namespace latvar {

namespace detail {

inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const auto h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

/// Midpoint rule on the positive orthant of [-pi, pi]^nu with R/2 points per
/// axis (the integrand is even in every k_j).  Returns, for every first-axis
/// node k_1, the mean over the remaining axes of prod_{j>1} cos(k_j n_j) / den.
inline std::vector<double> green_slabs(int nu, const std::vector<std::int64_t>& n, int r, unsigned workers) {
    const std::size_t m = static_cast<std::size_t>(r / 2);
    const double h = 2.0 * std::numbers::pi / r;
    std::vector<double> c(m);
    for (std::size_t i = 0; i < m; ++i) c[i] = std::cos((static_cast<double>(i) + 0.5) * h);
    std::vector<std::vector<double>> w(static_cast<std::size_t>(nu), std::vector<double>(m));
    for (int a = 0; a < nu; ++a)
        for (std::size_t i = 0; i < m; ++i)
            w[a][i] = std::cos((static_cast<double>(i) + 0.5) * h * static_cast<double>(n[a]));
    const double two_nu = 2.0 * nu;
    std::vector<double> slab(m);
    parallel_for(m, workers, [&](std::size_t i1) {
        const double base = two_nu - 2.0 * c[i1];
        std::vector<double> rows;
        if (nu == 3) {
            rows.resize(m);
            for (std::size_t i2 = 0; i2 < m; ++i2) {
                const double b2 = base - 2.0 * c[i2];
                const double w2 = w[1][i2];
                double s = 0.0;
                for (std::size_t i3 = 0; i3 < m; ++i3) s += w[2][i3] / (b2 - 2.0 * c[i3]);
                rows[i2] = w2 * s;
            }
        } else {
            // odometer over axes 1..nu-1, one partial sum per index of axis 1
            rows.assign(m, 0.0);
            std::vector<std::size_t> idx(static_cast<std::size_t>(nu), 0);
            while (true) {
                double den = base, wt = 1.0;
                for (int a = 1; a < nu; ++a) {
                    den -= 2.0 * c[idx[a]];
                    wt *= w[a][idx[a]];
                }
                rows[idx[1]] += wt / den;
                int a = nu - 1;
                while (a >= 1 && ++idx[a] == m) idx[a--] = 0;
                if (a < 1) break;
            }
        }
        slab[i1] = pairwise_sum(rows) / std::pow(static_cast<double>(m), nu - 1);
    });
    return slab;
}

inline double green_from_slabs(const std::vector<double>& slab, std::int64_t n1, int r) {
    const std::size_t m = slab.size();
    const double h = 2.0 * std::numbers::pi / r;
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i)
        t[i] = std::cos((static_cast<double>(i) + 0.5) * h * static_cast<double>(n1)) * slab[i];
    return pairwise_sum(t) / static_cast<double>(m);
}

}  // namespace detail

struct GreenEntry {
    double value = 0.0;
    double error = 0.0;
};

inline constexpr double kGreenConvergence = 1e-4;

/// Canonical representative of n under sign flips and coordinate
/// permutations: absolute values sorted in decreasing order.
inline Site canonical_offset(Site n) {
    for (auto& x : n) x = std::abs(x);
    std::sort(n.begin(), n.end(), std::greater<>());
    return n;
}

/// Table of G_nu at quadrature resolution R.  Each value is the Richardson
/// extrapolation 2 S_{2R} - S_R of midpoint sums (leading error O(h)); the
/// error estimate is its distance to the extrapolation 2 S_R - S_{R/2}.
/// Axis offsets share one pass over the grid per resolution.
class GreenTable {
public:
    GreenTable(int nu, int resolution, unsigned workers = 1) : nu_(nu), r_(resolution), workers_(workers) {
        if (nu < 3) throw PreconditionError("green function: the band-edge resolvent is finite only for nu >= 3");
        if (resolution < 64 || resolution % 4 != 0)
            throw PreconditionError("green function: resolution must be a multiple of 4 and >= 64");
    }

    int nu() const { return nu_; }
    int resolution() const { return r_; }

    GreenEntry entry(const Site& n) {
        if (static_cast<int>(n.size()) != nu_) throw DomainMismatch("offset dimension differs from table dimension");
        const auto key = canonical_offset(n);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
        const bool on_axis = std::all_of(key.begin() + 1, key.end(), [](auto x) { return x == 0; });
        double s[3];
        const int res[3] = {r_ / 2, r_, 2 * r_};
        for (int k = 0; k < 3; ++k) {
            if (on_axis) {
                s[k] = detail::green_from_slabs(axis_slabs(res[k]), key[0], res[k]);
            } else {
                s[k] = detail::green_from_slabs(detail::green_slabs(nu_, key, res[k], workers_), key[0], res[k]);
            }
        }
        GreenEntry e;
        e.value = 2.0 * s[2] - s[1];
        e.error = std::abs(e.value - (2.0 * s[1] - s[0]));
        entries_[key] = e;
        return e;
    }

    double operator()(const Site& n) { return entry(n).value; }

    /// G_nu(m, 0, ..., 0)
    double axis(std::int64_t m) {
        Site n(static_cast<std::size_t>(nu_), 0);
        n[0] = m;
        return (*this)(n);
    }

    const std::map<Site, GreenEntry>& entries() const { return entries_; }

    double max_error() const {
        double e = 0.0;
        for (const auto& [k, v] : entries_) e = std::max(e, v.error);
        return e;
    }

    bool converged() const { return max_error() <= kGreenConvergence; }

    void insert(const Site& n, GreenEntry e) { entries_[canonical_offset(n)] = e; }

    static std::string cache_file_name(int nu, int resolution) {
        return "green_nu" + std::to_string(nu) + "_R" + std::to_string(resolution) + ".lvgt";
    }

    /// Header: magic "LVGT", u32 version, i32 nu, i32 resolution, u64 count;
    /// then per entry nu i64 offsets, f64 value, f64 error (little endian).
    void save(const std::filesystem::path& file) const {
        std::ofstream out(file, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write green table cache " + file.string());
        out.write(kMagic, 4);
        put<std::uint32_t>(out, kVersion);
        put<std::int32_t>(out, nu_);
        put<std::int32_t>(out, r_);
        put<std::uint64_t>(out, entries_.size());
        for (const auto& [k, v] : entries_) {
            for (auto x : k) put<std::int64_t>(out, x);
            put<double>(out, v.value);
            put<double>(out, v.error);
        }
        if (!out) throw std::runtime_error("short write to green table cache " + file.string());
    }

    /// Merges a cache file; returns false when it is missing or was written
    /// for another (nu, resolution) or format version.
    bool load(const std::filesystem::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) return false;
        char magic[4];
        in.read(magic, 4);
        if (!in || std::memcmp(magic, kMagic, 4) != 0) return false;
        if (get<std::uint32_t>(in) != kVersion) return false;
        if (get<std::int32_t>(in) != nu_ || get<std::int32_t>(in) != r_) return false;
        const auto count = get<std::uint64_t>(in);
        std::map<Site, GreenEntry> loaded;
        for (std::uint64_t i = 0; i < count; ++i) {
            Site k(static_cast<std::size_t>(nu_));
            for (auto& x : k) x = get<std::int64_t>(in);
            GreenEntry e;
            e.value = get<double>(in);
            e.error = get<double>(in);
            if (!in) throw std::runtime_error("truncated green table cache " + file.string());
            loaded[k] = e;
        }
        entries_.merge(loaded);
        return true;
    }

    /// Directory from LATVAR_CACHE_DIR, if set.
    static std::optional<std::filesystem::path> cache_dir_from_env() {
        if (const char* d = std::getenv("LATVAR_CACHE_DIR"); d && *d) return std::filesystem::path(d);
        return std::nullopt;
    }

    void write_csv(std::ostream& os) const {
        for (int a = 0; a < nu_; ++a) os << "n" << (a + 1) << ",";
        os << "value,error\n";
        char buf[64];
        for (const auto& [k, v] : entries_) {
            for (auto x : k) os << x << ",";
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.value, v.error);
            os << buf;
        }
    }

private:
    static constexpr char kMagic[4] = {'L', 'V', 'G', 'T'};
    static constexpr std::uint32_t kVersion = 1;

    template <class T>
    static void put(std::ostream& out, T v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    template <class T>
    static T get(std::istream& in) {
        T v{};
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }

    const std::vector<double>& axis_slabs(int res) {
        auto it = slabs_.find(res);
        if (it == slabs_.end()) {
            std::vector<std::int64_t> zero(static_cast<std::size_t>(nu_), 0);
            it = slabs_.emplace(res, detail::green_slabs(nu_, zero, res, workers_)).first;
        }
        return it->second;
    }

    int nu_;
    int r_;
    unsigned workers_;
    std::map<Site, GreenEntry> entries_;
    std::map<int, std::vector<double>> slabs_;
};

struct GreenValue {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

inline GreenValue green_function(int nu, const Site& n, int resolution, unsigned workers = 1) {
    GreenTable t(nu, resolution, workers);
    const auto e = t.entry(n);
    return {e.value, e.error, e.error <= kGreenConvergence};
}

/// M_{nm} = V(n)^{1/2} G(n - m) V(m)^{1/2} on the support of V.
struct BSMatrix {
    std::vector<Site> sites;
    SymMatrix m;
    double schur_bound = 0.0;
};

inline BSMatrix birman_schwinger(const std::vector<std::pair<Site, double>>& v, GreenTable& table) {
    BSMatrix b;
    std::vector<double> root;
    for (const auto& [s, x] : v) {
        if (x < 0.0) throw PreconditionError("birman_schwinger: V must be nonnegative");
        if (static_cast<int>(s.size()) != table.nu()) throw DomainMismatch("site dimension differs from the table");
        if (x == 0.0) continue;
        b.sites.push_back(s);
        root.push_back(std::sqrt(x));
    }
    const std::size_t n = b.sites.size();
    b.m = SymMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Site d(b.sites[i].size());
            for (std::size_t a = 0; a < d.size(); ++a) d[a] = b.sites[i][a] - b.sites[j][a];
            b.m(i, j) = b.m(j, i) = root[i] * table(d) * root[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(b.m(i, j));
        b.schur_bound = std::max(b.schur_bound, row);
    }
    return b;
}

inline BSMatrix birman_schwinger(const Potential& v, GreenTable& table) {
    std::vector<std::pair<Site, double>> e;
    for (auto i : v.nonzero_sites()) e.emplace_back(v.domain().site(i), v[i]);
    return birman_schwinger(e, table);
}

class CouplingTooLarge : public PreconditionError {
public:
    CouplingTooLarge(double lambda, double critical)
        : PreconditionError("sparse counterexample: lambda G(0) must be < 1/2; lambda = " + std::to_string(lambda) +
                            ", critical lambda = " + std::to_string(critical)),
          critical_lambda(critical) {}
    double critical_lambda;
};

/// V = min(1, lambda) on sites n_1 = 0 < n_2 < ... along the first axis,
/// each n_k the first position with sum_{j<k} G(n_j - n_k) < 2^{-k-2}.
struct SparseCounterexample {
    int nu = 3;
    double lambda = 1.0;
    double value = 1.0;
    std::vector<std::int64_t> positions;
    /// sum_{j<k} G(n_j - n_k) for each k
    std::vector<double> partial_sums;
    BSMatrix bs;

    std::vector<std::pair<Site, double>> support() const {
        std::vector<std::pair<Site, double>> s;
        for (auto p : positions) {
            Site x(static_cast<std::size_t>(nu), 0);
            x[0] = p;
            s.emplace_back(x, value);
        }
        return s;
    }

    /// Box of transverse half-width `transverse` around the ray, extending
    /// `margin` sites past both end sites along axis 1.
    LatticeDomain verification_box(std::int64_t transverse, std::int64_t margin) const {
        std::vector<std::int64_t> half(static_cast<std::size_t>(nu), transverse);
        const std::int64_t span = positions.back() - positions.front();
        half[0] = (span + 1) / 2 + margin;
        return LatticeDomain::box(half);
    }

    /// The potential on `box`, with the ray shifted to be centred.
    Potential on(const LatticeDomain& box) const {
        const std::int64_t shift = (positions.back() - positions.front() + 1) / 2;
        std::vector<std::pair<std::size_t, double>> e;
        for (auto p : positions) {
            Site x(static_cast<std::size_t>(nu), 0);
            x[0] = p - shift;
            auto i = box.index(x);
            if (!i) throw PreconditionError("sparse counterexample: site outside " + box.describe());
            e.emplace_back(*i, value);
        }
        return Potential::sparse(box, e);
    }
};

inline SparseCounterexample sparse_counterexample(int nu, std::size_t site_count, double lambda, GreenTable& table,
                                                  std::int64_t search_limit = 1 << 20) {
    if (table.nu() != nu) throw DomainMismatch("green table dimension differs from nu");
    if (site_count < 1) throw PreconditionError("sparse counterexample: need at least one site");
    if (!(lambda > 0.0)) throw PreconditionError("sparse counterexample: lambda must be positive");
    const double g0 = table.axis(0);
    if (lambda * g0 >= 0.5) throw CouplingTooLarge(lambda, 0.5 / g0);
    SparseCounterexample c;
    c.nu = nu;
    c.lambda = lambda;
    c.value = std::min(1.0, lambda);
    c.positions.push_back(0);
    c.partial_sums.push_back(0.0);
    for (std::size_t k = 2; k <= site_count; ++k) {
        const double bound = std::ldexp(1.0, -static_cast<int>(k) - 2);
        std::int64_t x = c.positions.back() + 1;
        for (;; ++x) {
            if (x > search_limit) throw std::runtime_error("sparse counterexample: no admissible site below the search limit");
            double s = 0.0;
            for (auto p : c.positions) s += table.axis(x - p);
            if (s < bound) {
                c.partial_sums.push_back(s);
                break;
            }
        }
        c.positions.push_back(x);
    }
    c.bs = birman_schwinger(c.support(), table);
    return c;
}

struct PowerIterationResult {
    double estimate = 0.0;
    bool converged = false;
    int iterations = 0;
    double last_increment = 0.0;
};

/// y = (H0 + V) x on the whole domain.
inline void apply_dense(const LatticeOperator& op, std::span<const double> x, std::span<double> y) {
    const auto& d = op.domain();
    for (std::size_t i = 0; i < d.size(); ++i) {
        double s = op.potential[i] * x[i];
        d.for_each_neighbor(i, [&](std::size_t j) { s += x[j]; });
        y[i] = s;
    }
}

/// Largest eigenvalue of op by power iteration on op + shift, stopping once
/// successive Rayleigh quotients differ by less than `tol`.
inline PowerIterationResult operator_norm_power_iteration(const LatticeOperator& op, double shift, int iters,
                                                          std::uint64_t seed, double tol = 1e-10) {
    double vmin = 0.0;
    for (double v : op.potential.values()) vmin = std::min(vmin, v);
    if (shift < op.band_edge() - vmin) throw PreconditionError("power iteration: shift must make op + shift >= 0");
    const std::size_t n = op.domain().size();
    std::vector<double> x(n), y(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    for (auto& v : x) v = u(rng);
    auto normalize = [](std::vector<double>& v) {
        double s = 0.0;
        for (double t : v) s += t * t;
        s = std::sqrt(s);
        for (double& t : v) t /= s;
    };
    normalize(x);
    PowerIterationResult r;
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= iters; ++it) {
        apply_dense(op, x, y);
        double rq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rq += x[i] * y[i];
            y[i] += shift * x[i];
        }
        r.estimate = rq;
        r.iterations = it;
        r.last_increment = std::abs(rq - prev);
        if (r.last_increment < tol) {
            r.converged = true;
            break;
        }
        prev = rq;
        normalize(y);
        std::swap(x, y);
    }
    return r;
}

}  // namespace latvar
