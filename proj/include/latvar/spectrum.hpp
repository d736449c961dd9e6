#pragma once

// Brute-force spectral oracles: Sturm-sequence counts and bisection for
// symmetric tridiagonal matrices, a dense symmetric solver (Householder
// reduction followed by implicit-shift QL), spectra outside the band
// [-2 nu, 2 nu], eigenvalue moments and the trace inequality for even
// monotone functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latvar/lattice.hpp"
#include "latvar/parallel.hpp"

namespace latvar {

class SizeCapExceeded : public std::runtime_error {
public:
    SizeCapExceeded(std::size_t n, std::size_t cap)
        : std::runtime_error("dense eigensolver: matrix size " + std::to_string(n) + " exceeds the cap of " +
                             std::to_string(cap) + " sites; use a smaller truncation or raise the cap"),
          size(n), cap(cap) {}
    std::size_t size;
    std::size_t cap;
};

inline constexpr std::size_t kDefaultDenseCap = 12000;

/// Symmetric tridiagonal matrix; off[i] couples rows i and i+1.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }

    static SymTridiagonal from(const JacobiOperator& j) {
        return {std::vector<double>(j.b().begin(), j.b().end()), std::vector<double>(j.a().begin(), j.a().end())};
    }

    static SymTridiagonal from(const LatticeOperator& op) {
        if (op.nu() != 1) throw PreconditionError("tridiagonal form needs a one-dimensional domain");
        auto v = op.potential.values();
        return {std::vector<double>(v.begin(), v.end()), std::vector<double>(v.size() > 0 ? v.size() - 1 : 0, 1.0)};
    }

    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            double r = std::abs(diag[i]);
            if (i > 0) r += std::abs(off[i - 1]);
            if (i + 1 < diag.size()) r += std::abs(off[i]);
            m = std::max(m, r);
        }
        return m;
    }

    /// Gershgorin enclosure of the spectrum.
    std::pair<double, double> gershgorin() const {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            double r = 0.0;
            if (i > 0) r += std::abs(off[i - 1]);
            if (i + 1 < diag.size()) r += std::abs(off[i]);
            lo = std::min(lo, diag[i] - r);
            hi = std::max(hi, diag[i] + r);
        }
        return {lo, hi};
    }
};

/// Number of eigenvalues strictly below E from the signs of the LDL^T
/// pivots q_i = (d_i - E) - off_{i-1}^2 / q_{i-1}.  A pivot of magnitude
/// below eps * ||T|| is replaced by -eps * ||T||.
inline std::size_t sturm_count(const SymTridiagonal& t, double e, double pivmin) {
    std::size_t count = 0;
    double q = 1.0;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double o = i > 0 ? t.off[i - 1] : 0.0;
        q = (t.diag[i] - e) - (i > 0 ? o * o / q : 0.0);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

inline double default_pivmin(const SymTridiagonal& t) {
    return std::numeric_limits<double>::epsilon() * std::max(1.0, t.norm_inf());
}

inline std::size_t sturm_count(const SymTridiagonal& t, double e) { return sturm_count(t, e, default_pivmin(t)); }

/// k-th smallest eigenvalue (0-based) by bisection inside [lo, hi], which
/// must bracket it.  The bisection path depends only on (lo, hi, k, tol).
inline double bisect_eigenvalue(const SymTridiagonal& t, std::size_t k, double lo, double hi, double tol,
                                double pivmin) {
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid, pivmin) > k)
            hi = mid;
        else
            lo = mid;
    }
    return lo + 0.5 * (hi - lo);
}

/// All eigenvalues in [lo, hi), ascending, each to absolute accuracy tol.
inline std::vector<double> bisect_eigenvalues(const SymTridiagonal& t, double lo, double hi, double tol,
                                              unsigned workers = 1) {
    if (t.size() == 0 || !(hi > lo)) return {};
    const double pivmin = default_pivmin(t);
    const std::size_t first = sturm_count(t, lo, pivmin);
    const std::size_t last = sturm_count(t, hi, pivmin);
    if (last <= first) return {};
    std::vector<double> out(last - first);
    parallel_for(out.size(), workers,
                 [&](std::size_t i) { out[i] = bisect_eigenvalue(t, first + i, lo, hi, tol, pivmin); });
    return out;
}

/// Dense symmetric matrix, row-major.
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static SymMatrix from(const SymTridiagonal& t) {
        SymMatrix m(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            m(i, i) = t.diag[i];
            if (i + 1 < t.size()) m(i, i + 1) = m(i + 1, i) = t.off[i];
        }
        return m;
    }

    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
            y[i] = s;
        }
        return y;
    }
};

/// Dense matrix of H0 + V on an arbitrary domain.
inline SymMatrix dense_matrix(const LatticeOperator& op, std::size_t cap = kDefaultDenseCap) {
    const auto& d = op.domain();
    if (d.size() > cap) throw SizeCapExceeded(d.size(), cap);
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = op.potential[i];
        d.for_each_neighbor(i, [&](std::size_t j) { m(i, j) = 1.0; });
    }
    return m;
}

/// Eigenvalues ascending; vectors[i * n + j] is component i of eigenvector j.
struct EigenDecomposition {
    std::vector<double> values;
    std::vector<double> vectors;
    std::size_t n = 0;

    std::vector<double> vector(std::size_t j) const {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = vectors[i * n + j];
        return v;
    }
};

namespace detail {

/// Implicit-shift QL on (d, e) with e[i] coupling i and i+1.  When z is
/// non-null its columns are rotated along (z starts as the reduction basis).
inline void implicit_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    e.resize(n);
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0, tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 200) throw std::runtime_error("implicit QL failed to converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (z) {
                        auto& zz = *z;
                        for (std::size_t k = 0; k < n; ++k) {
                            h = zz[k * n + ii + 1];
                            zz[k * n + ii + 1] = s * zz[k * n + ii] + c * h;
                            zz[k * n + ii] = c * zz[k * n + ii] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

inline void sort_decomposition(EigenDecomposition& r) {
    const std::size_t n = r.values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return r.values[x] < r.values[y]; });
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = r.values[order[j]];
    r.values = std::move(v);
    if (!r.vectors.empty()) {
        std::vector<double> z(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) z[i * n + j] = r.vectors[i * n + order[j]];
        r.vectors = std::move(z);
    }
}

}  // namespace detail

/// Orthogonal similarity reduction A = Q T Q^T by Householder reflections.
inline SymTridiagonal householder_tridiagonalize(SymMatrix a, std::vector<double>* q = nullptr) {
    const std::size_t n = a.n;
    SymTridiagonal t{std::vector<double>(n, 0.0), std::vector<double>(n > 0 ? n - 1 : 0, 0.0)};
    if (q) {
        q->assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) (*q)[i * n + i] = 1.0;
    }
    std::vector<double> v(n), p(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm = std::hypot(norm, a(k + 1 + i, k));
        if (norm == 0.0) {
            t.off[k] = 0.0;
            continue;
        }
        const double x0 = a(k + 1, k);
        const double alpha = x0 > 0 ? -norm : norm;
        for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
        v[0] -= alpha;
        double vv = 0.0;
        for (std::size_t i = 0; i < m; ++i) vv += v[i] * v[i];
        const double beta = 2.0 / vv;
        double pv = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
            p[i] = beta * s;
            pv += p[i] * v[i];
        }
        const double kk = 0.5 * beta * pv;
        for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kk * v[i];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) a(k + 1 + i, k + 1 + j) -= v[i] * w[j] + w[i] * v[j];
        t.off[k] = alpha;
        if (q) {
            auto& qq = *q;
            for (std::size_t r = 0; r < n; ++r) {
                double s = 0.0;
                for (std::size_t j = 0; j < m; ++j) s += qq[r * n + k + 1 + j] * v[j];
                s *= beta;
                for (std::size_t j = 0; j < m; ++j) qq[r * n + k + 1 + j] -= s * v[j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) t.diag[i] = a(i, i);
    if (n >= 2) t.off[n - 2] = a(n - 1, n - 2);
    return t;
}

inline EigenDecomposition tridiagonal_eigen(const SymTridiagonal& t, bool want_vectors = false) {
    EigenDecomposition r;
    r.n = t.size();
    r.values = t.diag;
    std::vector<double> e = t.off;
    if (want_vectors) {
        r.vectors.assign(r.n * r.n, 0.0);
        for (std::size_t i = 0; i < r.n; ++i) r.vectors[i * r.n + i] = 1.0;
    }
    detail::implicit_ql(r.values, e, want_vectors ? &r.vectors : nullptr);
    detail::sort_decomposition(r);
    return r;
}

inline EigenDecomposition symmetric_eigen(const SymMatrix& a, bool want_vectors = false) {
    EigenDecomposition r;
    r.n = a.n;
    std::vector<double> q;
    SymTridiagonal t = householder_tridiagonalize(a, want_vectors ? &q : nullptr);
    r.values = t.diag;
    std::vector<double> e = t.off;
    if (want_vectors) r.vectors = std::move(q);
    detail::implicit_ql(r.values, e, want_vectors ? &r.vectors : nullptr);
    detail::sort_decomposition(r);
    return r;
}

namespace detail {

/// Solves (T - shift) x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> shifted_tridiagonal_solve(const SymTridiagonal& t, double shift, std::vector<double> b) {
    const std::size_t n = t.size();
    std::vector<double> d(n), dl(t.off), du(t.off), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, t.norm_inf());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            const double tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i];
        }
    }
    if (n > 0 && d[n - 1] == 0.0) d[n - 1] = tiny;
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        if (i + 1 < n) s -= du[i] * x[i + 1];
        if (i + 2 < n) s -= du2[i] * x[i + 2];
        x[i] = s / d[i];
    }
    return x;
}

}  // namespace detail

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;
};

/// Largest eigenvalue by bisection and its eigenvector by inverse iteration.
inline Eigenpair top_eigenpair(const SymTridiagonal& t) {
    const std::size_t n = t.size();
    if (n == 0) throw PreconditionError("top_eigenpair: empty matrix");
    auto [lo, hi] = t.gershgorin();
    const double scale = std::max(1.0, t.norm_inf());
    const double pivmin = default_pivmin(t);
    Eigenpair r;
    r.value = bisect_eigenvalue(t, n - 1, lo - scale * 1e-12, hi + scale * 1e-12, 4 * scale * 1e-16, pivmin);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(static_cast<double>(i) + 0.5);
    for (int it = 0; it < 4; ++it) {
        x = detail::shifted_tridiagonal_solve(t, r.value + scale * 1e-13, std::move(x));
        double nrm = 0.0;
        for (double v : x) nrm = std::hypot(nrm, v);
        for (double& v : x) v /= nrm;
    }
    double s = 0.0;
    for (double v : x) s += v;
    if (s < 0)
        for (double& v : x) v = -v;
    r.vector = std::move(x);
    return r;
}

/// Eigenvalues outside [-band_edge, band_edge] that clear the edge by more
/// than `tolerance`.
struct SpectralReport {
    std::vector<double> above;
    std::vector<double> below;
    double band_edge = 2.0;
    std::size_t truncation_size = 0;
    double tolerance = 1e-8;

    std::size_t count() const { return above.size() + below.size(); }
};

inline SpectralReport eigenvalues_outside_band(const SymTridiagonal& t, double band_edge, double tolerance,
                                               unsigned workers = 1, double accuracy = 1e-13) {
    if (!(tolerance > 0)) throw PreconditionError("eigenvalues_outside_band: tolerance must be positive");
    SpectralReport r;
    r.band_edge = band_edge;
    r.truncation_size = t.size();
    r.tolerance = tolerance;
    if (t.size() == 0) return r;
    auto [lo, hi] = t.gershgorin();
    const double acc = std::max(accuracy, 4e-16 * std::max(1.0, t.norm_inf()));
    if (hi > band_edge + tolerance) r.above = bisect_eigenvalues(t, band_edge + tolerance, hi + acc, acc, workers);
    if (lo < -band_edge - tolerance) r.below = bisect_eigenvalues(t, lo - acc, -band_edge - tolerance, acc, workers);
    return r;
}

inline SpectralReport eigenvalues_outside_band(const JacobiOperator& j, double tolerance = 1e-8,
                                               unsigned workers = 1) {
    return eigenvalues_outside_band(SymTridiagonal::from(j), 2.0, tolerance, workers);
}

/// Tridiagonal bisection for one-dimensional windows, dense reduction and
/// QL iteration for boxes in two or more dimensions.
inline SpectralReport eigenvalues_outside_band(const LatticeOperator& op, double tolerance = 1e-8,
                                               unsigned workers = 1, std::size_t dense_cap = kDefaultDenseCap) {
    if (op.nu() == 1) return eigenvalues_outside_band(SymTridiagonal::from(op), op.band_edge(), tolerance, workers);
    if (!(tolerance > 0)) throw PreconditionError("eigenvalues_outside_band: tolerance must be positive");
    const auto eig = symmetric_eigen(dense_matrix(op, dense_cap));
    SpectralReport r;
    r.band_edge = op.band_edge();
    r.truncation_size = op.domain().size();
    r.tolerance = tolerance;
    for (double e : eig.values) {
        if (e > r.band_edge + tolerance) r.above.push_back(e);
        if (e < -r.band_edge - tolerance) r.below.push_back(e);
    }
    return r;
}

/// Sum over both lists of (|E| - band_edge)^gamma.
inline double moment_sum(const SpectralReport& r, double gamma) {
    if (!(gamma > 0)) throw PreconditionError("moment_sum: gamma must be positive");
    double s = 0.0;
    for (double e : r.below) s += std::pow(std::abs(e) - r.band_edge, gamma);
    for (double e : r.above) s += std::pow(std::abs(e) - r.band_edge, gamma);
    return s;
}

/// Moment sum bracketed through the counting function.  With
/// n(t) = #{|E| - edge > t}, the sum over gaps above `tolerance` equals
/// n(tol) tol^gamma + int_tol^inf gamma t^{gamma-1} n(t) dt, and the
/// monotone step function n is sampled on a geometric grid, giving a
/// rigorous lower/upper bracket without locating each eigenvalue.
struct CountingMoment {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t above = 0;
    std::size_t below = 0;
    std::size_t evaluations = 0;

    double estimate() const { return 0.5 * (lower + upper); }
};

inline CountingMoment moment_by_counting(const SymTridiagonal& t, double band_edge, double tolerance, double gamma,
                                         double ratio = 1.02) {
    if (!(gamma > 0)) throw PreconditionError("moment_by_counting: gamma must be positive");
    if (!(tolerance > 0)) throw PreconditionError("moment_by_counting: tolerance must be positive");
    if (!(ratio > 1)) throw PreconditionError("moment_by_counting: grid ratio must exceed 1");
    CountingMoment r;
    const std::size_t n = t.size();
    if (n == 0) return r;
    const double pivmin = default_pivmin(t);
    auto [glo, ghi] = t.gershgorin();

    auto side = [&](auto&& count_beyond, double tmax, std::size_t& at_tol) {
        at_tol = count_beyond(tolerance);
        ++r.evaluations;
        if (at_tol == 0) return;
        const double base = std::pow(tolerance, gamma) * static_cast<double>(at_tol);
        r.lower += base;
        r.upper += base;
        double t0 = tolerance;
        std::size_t n0 = at_tol;
        while (n0 > 0) {
            double t1 = t0 * ratio;
            std::size_t n1 = 0;
            if (t1 >= tmax) {
                t1 = std::max(tmax, t0);
            } else {
                n1 = count_beyond(t1);
                ++r.evaluations;
            }
            const double w = std::pow(t1, gamma) - std::pow(t0, gamma);
            r.lower += w * static_cast<double>(n1);
            r.upper += w * static_cast<double>(n0);
            t0 = t1;
            n0 = n1;
        }
    };
    side([&](double x) { return n - sturm_count(t, band_edge + x, pivmin); }, ghi - band_edge, r.above);
    side([&](double x) { return sturm_count(t, -band_edge - x, pivmin); }, -band_edge - glo, r.below);
    return r;
}

struct TraceCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Tr F(A) >= sum_j F(alpha_j) for an orthonormal family with
/// <phi_j, A phi_k> = alpha_j delta_jk and F even, nondecreasing on [0, inf).
inline TraceCheck trace_inequality_check(const SymMatrix& a, const std::vector<std::vector<double>>& phis,
                                         const std::function<double(double)>& f, double tol = 1e-10) {
    const std::size_t m = phis.size();
    std::vector<std::vector<double>> aphi(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (phis[j].size() != a.n) throw PreconditionError("trace_inequality_check: vector length mismatch");
        aphi[j] = a.multiply(phis[j]);
    }
    TraceCheck r;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            double g = 0.0, h = 0.0;
            for (std::size_t i = 0; i < a.n; ++i) {
                g += phis[j][i] * phis[k][i];
                h += phis[j][i] * aphi[k][i];
            }
            const double expect = j == k ? 1.0 : 0.0;
            if (std::abs(g - expect) > tol)
                throw PreconditionError("trace_inequality_check: family not orthonormal at (" + std::to_string(j) +
                                        "," + std::to_string(k) + ")");
            if (j != k && std::abs(h) > tol)
                throw PreconditionError("trace_inequality_check: <phi_j, A phi_k> not diagonal at (" +
                                        std::to_string(j) + "," + std::to_string(k) + ")");
            if (j == k) r.rhs += f(h);
        }
    }
    for (double e : symmetric_eigen(a).values) r.lhs += f(e);
    r.holds = r.lhs >= r.rhs - tol;
    return r;
}

/// Partial sums of the k largest positive eigenvalues of the size-N Jacobi
/// truncations with couplings a and a2 >= a (same diagonal b) are compared
/// for every k up to the number of positive eigenvalues of J(a).
inline bool eigenvalue_sum_monotonicity_check(std::span<const double> a, std::span<const double> a2,
                                              std::span<const double> b, std::size_t n) {
    if (a.size() < n - 1 || a2.size() < n - 1 || b.size() < n)
        throw PreconditionError("eigenvalue_sum_monotonicity_check: sequences shorter than N");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (a2[i] < a[i]) throw PreconditionError("eigenvalue_sum_monotonicity_check: a' must dominate a");
    auto top = [&](std::span<const double> off) {
        SymTridiagonal t{std::vector<double>(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(n)),
                         std::vector<double>(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(n - 1))};
        auto v = tridiagonal_eigen(t).values;
        std::reverse(v.begin(), v.end());
        return v;
    };
    const auto e1 = top(a);
    const auto e2 = top(a2);
    double s1 = 0.0, s2 = 0.0, scale = 1.0;
    for (double x : e2) scale = std::max(scale, std::abs(x));
    for (std::size_t k = 0; k < n && e1[k] > 0; ++k) {
        s1 += e1[k];
        s2 += std::max(e2[k], 0.0);
        if (s2 < s1 - 1e-12 * scale * static_cast<double>(k + 1)) return false;
    }
    return true;
}

}  // namespace latvar
