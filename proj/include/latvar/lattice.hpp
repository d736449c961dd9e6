#pragma once

// Lattice domains, potentials, the free hopping operator H0, full operators
// H = H0 + V, Jacobi matrices, finitely supported trial vectors and the
// parity operator U.  All operators act on Dirichlet truncations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latvar {

using Site = std::vector<std::int64_t>;

class DomainMismatch : public std::invalid_argument {
public:
    explicit DomainMismatch(const std::string& what)
        : std::invalid_argument("domain mismatch: " + what) {}
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class DomainKind { HalfLine, WholeLine, Box };

inline const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::HalfLine: return "half_line";
        case DomainKind::WholeLine: return "whole_line";
        case DomainKind::Box: return "box";
    }
    return "?";
}

/// A finite window of Z^nu (or of Z+ = {1,2,...}) with Dirichlet truncation.
///
/// Sites are linearly indexed row-major over the axes in declared order, so
/// axis 0 is the slowest.  The half-line holds sites 1..N with u(0) = 0
/// implicit; the whole line holds -left..right.
class LatticeDomain {
public:
    static LatticeDomain half_line(std::int64_t n) {
        if (n <= 0) throw PreconditionError("half_line: site count must be positive");
        return LatticeDomain(DomainKind::HalfLine, {1}, {n});
    }

    static LatticeDomain whole_line(std::int64_t left, std::int64_t right) {
        if (left < 0 || right < 0)
            throw PreconditionError("whole_line: window bounds must be nonnegative");
        return LatticeDomain(DomainKind::WholeLine, {-left}, {left + right + 1});
    }

    static LatticeDomain box(std::vector<std::int64_t> half_widths) {
        if (half_widths.empty()) throw PreconditionError("box: dimension must be >= 1");
        std::vector<std::int64_t> lower, extent;
        for (auto h : half_widths) {
            if (h < 0) throw PreconditionError("box: half widths must be nonnegative");
            lower.push_back(-h);
            extent.push_back(2 * h + 1);
        }
        return LatticeDomain(DomainKind::Box, std::move(lower), std::move(extent));
    }

    static LatticeDomain cube(int nu, std::int64_t half_width) {
        return box(std::vector<std::int64_t>(static_cast<std::size_t>(nu), half_width));
    }

    DomainKind kind() const { return kind_; }
    int dim() const { return static_cast<int>(extent_.size()); }
    std::size_t size() const { return size_; }
    std::int64_t lower(int axis) const { return lower_[axis]; }
    std::int64_t extent(int axis) const { return extent_[axis]; }
    std::int64_t upper(int axis) const { return lower_[axis] + extent_[axis] - 1; }
    std::size_t stride(int axis) const { return stride_[axis]; }

    /// Largest linear-index distance between neighbouring sites.
    std::size_t reach() const { return extent_.size() == 0 ? 0 : stride_[0]; }

    Site site(std::size_t idx) const {
        Site s(extent_.size());
        for (std::size_t a = 0; a < extent_.size(); ++a) {
            s[a] = lower_[a] + static_cast<std::int64_t>(idx / stride_[a]);
            idx %= stride_[a];
        }
        return s;
    }

    std::optional<std::size_t> index(const Site& s) const {
        if (s.size() != extent_.size()) return std::nullopt;
        std::size_t idx = 0;
        for (std::size_t a = 0; a < extent_.size(); ++a) {
            const auto off = s[a] - lower_[a];
            if (off < 0 || off >= extent_[a]) return std::nullopt;
            idx += static_cast<std::size_t>(off) * stride_[a];
        }
        return idx;
    }

    /// Coordinate of a site on a one-dimensional domain.
    std::int64_t coordinate(std::size_t idx) const { return lower_[0] + static_cast<std::int64_t>(idx); }

    std::optional<std::size_t> index_of(std::int64_t n) const {
        const auto off = n - lower_[0];
        if (dim() != 1 || off < 0 || off >= extent_[0]) return std::nullopt;
        return static_cast<std::size_t>(off);
    }

    /// |n| = |n_1| + ... + |n_nu|.
    std::int64_t l1_norm(std::size_t idx) const {
        std::int64_t r = 0;
        for (std::size_t a = 0; a < extent_.size(); ++a) {
            r += std::abs(lower_[a] + static_cast<std::int64_t>(idx / stride_[a]));
            idx %= stride_[a];
        }
        return r;
    }

    std::int64_t linf_norm(std::size_t idx) const {
        std::int64_t r = 0;
        for (std::size_t a = 0; a < extent_.size(); ++a) {
            r = std::max(r, std::abs(lower_[a] + static_cast<std::int64_t>(idx / stride_[a])));
            idx %= stride_[a];
        }
        return r;
    }

    /// (-1)^{|n|}
    int parity(std::size_t idx) const { return (l1_norm(idx) & 1) ? -1 : 1; }

    /// Calls f(j) for every nearest neighbour j of site idx inside the window.
    template <class F>
    void for_each_neighbor(std::size_t idx, F&& f) const {
        std::size_t rem = idx;
        for (std::size_t a = 0; a < extent_.size(); ++a) {
            const auto off = static_cast<std::int64_t>(rem / stride_[a]);
            rem %= stride_[a];
            if (off > 0) f(idx - stride_[a]);
            if (off + 1 < extent_[a]) f(idx + stride_[a]);
        }
    }

    bool operator==(const LatticeDomain& o) const {
        return kind_ == o.kind_ && lower_ == o.lower_ && extent_ == o.extent_;
    }

    std::string describe() const {
        std::string s = to_string(kind_);
        s += "[";
        for (std::size_t a = 0; a < extent_.size(); ++a) {
            if (a) s += "x";
            s += std::to_string(lower_[a]) + ".." + std::to_string(upper(static_cast<int>(a)));
        }
        return s + "]";
    }

private:
    LatticeDomain(DomainKind k, std::vector<std::int64_t> lower, std::vector<std::int64_t> extent)
        : kind_(k), lower_(std::move(lower)), extent_(std::move(extent)), stride_(extent_.size()) {
        std::size_t s = 1;
        for (std::size_t a = extent_.size(); a-- > 0;) {
            if (extent_[a] <= 0) throw PreconditionError("domain extents must be positive");
            stride_[a] = s;
            s *= static_cast<std::size_t>(extent_[a]);
        }
        size_ = s;
    }

    DomainKind kind_;
    std::vector<std::int64_t> lower_;
    std::vector<std::int64_t> extent_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 0;
};

inline void require_same(const LatticeDomain& a, const LatticeDomain& b) {
    if (!(a == b)) throw DomainMismatch(a.describe() + " vs " + b.describe());
}

/// Real site function V on a window.  Stored densely; sparse families also
/// keep the list of nonzero sites for O(support) iteration.
class Potential {
public:
    explicit Potential(LatticeDomain d) : domain_(std::move(d)), values_(domain_.size(), 0.0) {}

    Potential(LatticeDomain d, std::vector<double> values)
        : domain_(std::move(d)), values_(std::move(values)) {
        if (values_.size() != domain_.size())
            throw PreconditionError("potential: value count does not match the domain");
        for (double v : values_)
            if (!std::isfinite(v)) throw PreconditionError("potential: values must be finite");
        refresh();
    }

    static Potential zero(LatticeDomain d) { return Potential(std::move(d)); }

    static Potential sparse(LatticeDomain d, const std::vector<std::pair<std::size_t, double>>& entries) {
        Potential p(std::move(d));
        for (auto [i, v] : entries) {
            if (i >= p.values_.size()) throw PreconditionError("potential: sparse site outside domain");
            if (!std::isfinite(v)) throw PreconditionError("potential: values must be finite");
            p.values_[i] = v;
        }
        p.refresh();
        p.support_.emplace();
        for (std::size_t i = 0; i < p.values_.size(); ++i)
            if (p.values_[i] != 0.0) p.support_->push_back(i);
        return p;
    }

    /// Builds V(n) = f(n) on a one-dimensional window.
    template <class F>
    static Potential from_function(LatticeDomain d, F&& f) {
        std::vector<double> v(d.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(d.coordinate(i));
        return Potential(std::move(d), std::move(v));
    }

    const LatticeDomain& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// V at a 1D coordinate, zero outside the stored window.
    double operator()(std::int64_t n) const {
        auto i = domain_.index_of(n);
        return i ? values_[*i] : 0.0;
    }

    double at(const Site& s) const {
        auto i = domain_.index(s);
        return i ? values_[*i] : 0.0;
    }

    bool nonnegative() const { return nonnegative_; }
    bool is_sparse() const { return support_.has_value(); }

    /// Indices of nonzero sites (cached list for sparse potentials).
    std::vector<std::size_t> nonzero_sites() const {
        if (support_) return *support_;
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] != 0.0) s.push_back(i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    /// c * V^2, used for the comparison operator H0 + (4 nu)^{-1} V^2.
    Potential squared_scaled(double c) const {
        Potential p = *this;
        for (double& v : p.values_) v = c * v * v;
        p.refresh();
        return p;
    }

    Potential scaled(double c) const {
        Potential p = *this;
        for (double& v : p.values_) v *= c;
        p.refresh();
        return p;
    }

    Potential negated() const { return scaled(-1.0); }

private:
    void refresh() {
        nonnegative_ = std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
    }

    LatticeDomain domain_;
    std::vector<double> values_;
    bool nonnegative_ = true;
    std::optional<std::vector<std::size_t>> support_;
};

/// H = H0 + V on a Dirichlet window; band edge 2 nu.
struct LatticeOperator {
    Potential potential;

    explicit LatticeOperator(Potential v) : potential(std::move(v)) {}
    static LatticeOperator free(LatticeDomain d) { return LatticeOperator(Potential::zero(std::move(d))); }

    const LatticeDomain& domain() const { return potential.domain(); }
    int nu() const { return domain().dim(); }
    double band_edge() const { return 2.0 * nu(); }
};

/// Half-line Jacobi matrix (Ju)(n) = a_n u(n+1) + b_n u(n) + a_{n-1} u(n-1)
/// truncated to sites 1..N.  a holds the N-1 in-window couplings a_1..a_{N-1}.
class JacobiOperator {
public:
    JacobiOperator(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
        if (b_.empty()) throw PreconditionError("jacobi: empty diagonal");
        if (a_.size() + 1 != b_.size())
            throw PreconditionError("jacobi: need exactly N-1 off-diagonal entries for N diagonal entries");
        for (double x : a_)
            if (!(x > 0.0) || !std::isfinite(x)) throw PreconditionError("jacobi: a_n must be positive");
        for (double x : b_)
            if (!std::isfinite(x)) throw PreconditionError("jacobi: b_n must be finite");
        alpha_ = 0.0;
        if (a_.size() == 1) alpha_ = a_[0];
        for (std::size_t n = 0; n + 1 < a_.size(); ++n) alpha_ = std::max(alpha_, a_[n] + a_[n + 1]);
    }

    static JacobiOperator free(std::size_t n) {
        return JacobiOperator(std::vector<double>(n - 1, 1.0), std::vector<double>(n, 0.0));
    }

    static JacobiOperator schroedinger(const Potential& v) {
        if (v.domain().kind() != DomainKind::HalfLine)
            throw PreconditionError("jacobi: Schroedinger form needs a half-line potential");
        std::vector<double> b(v.values().begin(), v.values().end());
        std::vector<double> a(b.size() - 1, 1.0);
        return JacobiOperator(std::move(a), std::move(b));
    }

    std::size_t size() const { return b_.size(); }
    std::span<const double> a() const { return a_; }
    std::span<const double> b() const { return b_; }
    double alpha() const { return alpha_; }
    double gamma() const { return 1.0 / (2.0 + alpha_); }
    LatticeDomain domain() const { return LatticeDomain::half_line(static_cast<std::int64_t>(size())); }

    JacobiOperator with_diagonal(std::vector<double> b) const { return JacobiOperator(a_, std::move(b)); }

private:
    std::vector<double> a_;
    std::vector<double> b_;
    double alpha_ = 0.0;
};

/// Finitely supported real vector stored on a contiguous linear-index window.
class TrialFunction {
public:
    explicit TrialFunction(LatticeDomain d) : domain_(std::move(d)) {}

    TrialFunction(LatticeDomain d, std::size_t offset, std::vector<double> values)
        : domain_(std::move(d)), offset_(offset), values_(std::move(values)) {
        if (offset_ + values_.size() > domain_.size())
            throw PreconditionError("trial function window exceeds the domain");
        trim();
    }

    static TrialFunction delta(LatticeDomain d, std::size_t idx, double value = 1.0) {
        return TrialFunction(std::move(d), idx, {value});
    }

    static TrialFunction dense(LatticeDomain d, std::vector<double> values) {
        return TrialFunction(std::move(d), 0, std::move(values));
    }

    /// Values at consecutive 1D coordinates starting at `first`.
    static TrialFunction on_sites(LatticeDomain d, std::int64_t first, std::vector<double> values) {
        auto i = d.index_of(first);
        if (!i) throw PreconditionError("trial function: first site outside the domain");
        return TrialFunction(std::move(d), *i, std::move(values));
    }

    const LatticeDomain& domain() const { return domain_; }
    std::size_t begin() const { return offset_; }
    std::size_t end() const { return offset_ + values_.size(); }
    std::span<const double> values() const { return values_; }
    bool empty() const { return values_.empty(); }

    double operator[](std::size_t idx) const {
        return (idx >= offset_ && idx < end()) ? values_[idx - offset_] : 0.0;
    }

    double at(std::int64_t n) const {
        auto i = domain_.index_of(n);
        return i ? (*this)[*i] : 0.0;
    }

    double norm2() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return s;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (values_[k] != 0.0) s.push_back(offset_ + k);
        return s;
    }

    /// Pointwise (this * g)(n) with g given per linear index.
    template <class G>
    TrialFunction multiplied(G&& g) const {
        std::vector<double> v(values_.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] * g(offset_ + k);
        return TrialFunction(domain_, offset_, std::move(v));
    }

    TrialFunction scaled(double c) const {
        return multiplied([c](std::size_t) { return c; });
    }

private:
    void trim() {
        std::size_t lo = 0, hi = values_.size();
        while (lo < hi && values_[lo] == 0.0) ++lo;
        while (hi > lo && values_[hi - 1] == 0.0) --hi;
        if (lo == hi) {
            values_.clear();
            offset_ = 0;
            return;
        }
        if (lo > 0 || hi < values_.size()) {
            values_ = std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(lo),
                                          values_.begin() + static_cast<std::ptrdiff_t>(hi));
            offset_ += lo;
        }
    }

    LatticeDomain domain_;
    std::size_t offset_ = 0;
    std::vector<double> values_;
};

inline double inner(const TrialFunction& x, const TrialFunction& y) {
    require_same(x.domain(), y.domain());
    const auto lo = std::max(x.begin(), y.begin());
    const auto hi = std::min(x.end(), y.end());
    double s = 0.0;
    for (auto i = lo; i < hi; ++i) s += x[i] * y[i];
    return s;
}

inline TrialFunction operator+(const TrialFunction& x, const TrialFunction& y) {
    require_same(x.domain(), y.domain());
    if (x.empty()) return y;
    if (y.empty()) return x;
    const auto lo = std::min(x.begin(), y.begin());
    const auto hi = std::max(x.end(), y.end());
    std::vector<double> v(hi - lo);
    for (auto i = lo; i < hi; ++i) v[i - lo] = x[i] + y[i];
    return TrialFunction(x.domain(), lo, std::move(v));
}

inline TrialFunction operator-(const TrialFunction& x, const TrialFunction& y) { return x + y.scaled(-1.0); }

namespace detail {

inline std::pair<std::size_t, std::size_t> grown_window(const TrialFunction& v) {
    const auto r = v.domain().reach();
    const auto lo = v.begin() >= r ? v.begin() - r : 0;
    const auto hi = std::min(v.end() + r, v.domain().size());
    return {lo, hi};
}

}  // namespace detail

/// (H0 + V) v with Dirichlet truncation.
inline TrialFunction apply_operator(const LatticeOperator& op, const TrialFunction& v) {
    require_same(op.domain(), v.domain());
    if (v.empty()) return TrialFunction(v.domain());
    const auto& d = op.domain();
    auto [lo, hi] = detail::grown_window(v);
    std::vector<double> out(hi - lo, 0.0);
    for (auto i = v.begin(); i < v.end(); ++i) {
        const double x = v[i];
        if (x == 0.0) continue;
        out[i - lo] += op.potential[i] * x;
        d.for_each_neighbor(i, [&](std::size_t j) { out[j - lo] += x; });
    }
    return TrialFunction(d, lo, std::move(out));
}

inline TrialFunction apply_operator(const JacobiOperator& op, const TrialFunction& v) {
    require_same(op.domain(), v.domain());
    if (v.empty()) return TrialFunction(v.domain());
    const auto n = op.size();
    const auto lo = v.begin() > 0 ? v.begin() - 1 : 0;
    const auto hi = std::min(v.end() + 1, n);
    std::vector<double> out(hi - lo, 0.0);
    auto a = op.a();
    auto b = op.b();
    for (auto i = lo; i < hi; ++i) {
        double s = b[i] * v[i];
        if (i + 1 < n) s += a[i] * v[i + 1];
        if (i > 0) s += a[i - 1] * v[i - 1];
        out[i - lo] = s;
    }
    return TrialFunction(v.domain(), lo, std::move(out));
}

/// <v, op v> without materialising op v.
inline double quadratic_form(const LatticeOperator& op, const TrialFunction& v) {
    require_same(op.domain(), v.domain());
    const auto& d = op.domain();
    double diag = 0.0, hop = 0.0;
    for (auto i = v.begin(); i < v.end(); ++i) {
        const double x = v[i];
        if (x == 0.0) continue;
        diag += op.potential[i] * x * x;
        d.for_each_neighbor(i, [&](std::size_t j) {
            if (j > i) hop += x * v[j];
        });
    }
    return diag + 2.0 * hop;
}

inline double quadratic_form(const JacobiOperator& op, const TrialFunction& v) {
    require_same(op.domain(), v.domain());
    auto a = op.a();
    auto b = op.b();
    double s = 0.0;
    for (auto i = v.begin(); i < v.end(); ++i) {
        s += b[i] * v[i] * v[i];
        if (i + 1 < op.size()) s += 2.0 * a[i] * v[i] * v[i + 1];
    }
    return s;
}

/// <v, H0 v> on v's own domain.
inline double free_form(const TrialFunction& v) {
    return quadratic_form(LatticeOperator::free(v.domain()), v);
}

template <class Op>
double rayleigh_quotient(const Op& op, const TrialFunction& v) {
    const double n2 = v.norm2();
    if (n2 == 0.0) throw PreconditionError("rayleigh quotient of the zero vector");
    return quadratic_form(op, v) / n2;
}

/// (U v)(n) = (-1)^{|n|} v(n).
inline TrialFunction parity_conjugate(const TrialFunction& v) {
    const auto& d = v.domain();
    return v.multiplied([&d](std::size_t i) { return static_cast<double>(d.parity(i)); });
}

/// Sum over lattice bonds of (psi(x) - psi(y))^2, including bonds to the
/// implicit zero sites outside the window.  Equals <psi, (2 nu - H0) psi>.
inline double gradient_energy(const TrialFunction& v) {
    const auto& d = v.domain();
    const int nu = d.dim();
    double s = 0.0;
    for (auto i = v.begin(); i < v.end(); ++i) {
        const double x = v[i];
        int inside = 0;
        d.for_each_neighbor(i, [&](std::size_t j) {
            ++inside;
            if (j > i) s += (v[j] - x) * (v[j] - x);
        });
        s += static_cast<double>(2 * nu - inside) * x * x;
    }
    // bonds whose lower endpoint lies before v's window
    for (auto i = v.begin(); i < v.end(); ++i) {
        d.for_each_neighbor(i, [&](std::size_t j) {
            if (j < v.begin()) s += v[i] * v[i];
        });
    }
    return s;
}

}  // namespace latvar
