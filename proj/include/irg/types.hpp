#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace irg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared log conventions: log 0 = -inf and 0*log 0 = 0.
inline double log0(double x) {
    if (x < 0) throw std::domain_error("log0: negative argument");
    return x == 0 ? -kInf : std::log(x);
}

inline double xlogx(double x) { return x == 0 ? 0.0 : x * std::log(x); }

// x*log(y), with the 0*log 0 = 0 convention; x>0, y=0 gives -inf.
inline double xlogy(double x, double y) {
    if (x == 0) return 0.0;
    return x * log0(y);
}

struct TypeSpace {
    std::vector<std::string> labels;

    std::size_t size() const { return labels.size(); }

    void validate() const {
        if (labels.empty()) throw std::invalid_argument("TypeSpace: needs at least one type");
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                if (labels[i] == labels[j])
                    throw std::invalid_argument("TypeSpace: duplicate label '" + labels[i] + "'");
    }
};

// Nonnegative mass per type. Covers mu, c, nu, y, theta, b, rho in one shape.
struct Measure {
    std::vector<double> v;

    Measure() = default;
    explicit Measure(std::size_t n, double fill = 0.0) : v(n, fill) {}
    Measure(std::initializer_list<double> init) : v(init) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    double total() const {
        double t = 0;
        for (double x : v) t += x;
        return t;
    }

    bool is_zero() const {
        for (double x : v)
            if (x != 0) return false;
        return true;
    }

    void validate() const {
        for (double x : v)
            if (!(x >= 0)) throw std::invalid_argument("Measure: entries must be >= 0");
    }
};

inline Measure operator+(const Measure& a, const Measure& b) {
    Measure r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Measure operator-(const Measure& a, const Measure& b) {
    Measure r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline Measure operator*(double s, const Measure& a) {
    Measure r = a;
    for (auto& x : r.v) x *= s;
    return r;
}

inline bool leq(const Measure& a, const Measure& b, double slack = 0.0) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + slack) return false;
    return true;
}

// <a, f> = sum_r a_r f_r
inline double dot(const Measure& a, const Measure& f) {
    double t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i] * f[i];
    return t;
}

// Symmetric nonnegative matrix over types.
struct Kernel {
    std::size_t n = 0;
    std::vector<double> a;  // row-major n*n

    Kernel() = default;
    explicit Kernel(std::size_t n_, double fill = 0.0) : n(n_), a(n_ * n_, fill) {}
    Kernel(std::initializer_list<std::initializer_list<double>> rows) {
        n = rows.size();
        a.reserve(n * n);
        for (const auto& row : rows) {
            if (row.size() != n) throw std::invalid_argument("Kernel: ragged rows");
            for (double x : row) a.push_back(x);
        }
    }

    double& operator()(std::size_t r, std::size_t s) { return a[r * n + s]; }
    double operator()(std::size_t r, std::size_t s) const { return a[r * n + s]; }

    double max_entry() const {
        double m = 0;
        for (double x : a) m = std::max(m, x);
        return m;
    }

    void validate() const {
        for (double x : a)
            if (!(x >= 0)) throw std::invalid_argument("Kernel: entries must be >= 0");
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t s = r + 1; s < n; ++s)
                if ((*this)(r, s) != (*this)(s, r))
                    throw std::invalid_argument("Kernel: matrix must be symmetric");
    }
};

inline Kernel operator*(double t, const Kernel& k) {
    Kernel r = k;
    for (auto& x : r.a) x *= t;
    return r;
}

// Component type composition: the integer vector k.
struct TypeConfig {
    std::vector<std::int64_t> counts;

    TypeConfig() = default;
    explicit TypeConfig(std::size_t n, std::int64_t fill = 0) : counts(n, fill) {}
    TypeConfig(std::initializer_list<std::int64_t> init) : counts(init) {}

    static TypeConfig unit(std::size_t n, std::size_t r) {
        TypeConfig k(n);
        k.counts[r] = 1;
        return k;
    }

    std::size_t size() const { return counts.size(); }
    std::int64_t& operator[](std::size_t i) { return counts[i]; }
    std::int64_t operator[](std::size_t i) const { return counts[i]; }

    std::int64_t total() const {  // |k|
        std::int64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] > 0) s.push_back(i);
        return s;
    }

    bool operator==(const TypeConfig& o) const { return counts == o.counts; }
    bool operator<(const TypeConfig& o) const { return counts < o.counts; }

    void validate() const {
        for (auto c : counts)
            if (c < 0) throw std::invalid_argument("TypeConfig: counts must be >= 0");
    }
};

// Expands k into a vertex-type vector compatible with it.
inline std::vector<std::size_t> expand_types(const TypeConfig& k) {
    std::vector<std::size_t> x;
    x.reserve(static_cast<std::size_t>(k.total()));
    for (std::size_t s = 0; s < k.size(); ++s)
        for (std::int64_t i = 0; i < k[s]; ++i) x.push_back(s);
    return x;
}

struct TypeConfigHash {
    std::size_t operator()(const TypeConfig& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto c : k.counts) {
            std::uint64_t x = static_cast<std::uint64_t>(c);
            x *= 0xbf58476d1ce4e5b9ull;
            x ^= x >> 31;
            h = (h ^ x) * 0x94d049bb133111ebull;
        }
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

// Sparse lambda: positive weight per nonzero config. lambda_0 = 0 is structural.
struct MicroMeasure {
    std::unordered_map<TypeConfig, double, TypeConfigHash> weights;

    void add(const TypeConfig& k, double w) {
        if (w == 0) return;
        if (w < 0) throw std::invalid_argument("MicroMeasure: weights must be > 0");
        if (k.total() == 0) throw std::invalid_argument("MicroMeasure: zero config not allowed");
        weights[k] += w;
    }

    double at(const TypeConfig& k) const {
        auto it = weights.find(k);
        return it == weights.end() ? 0.0 : it->second;
    }

    double mass() const {  // |lambda|
        double t = 0;
        for (const auto& [k, w] : weights) t += w;
        return t;
    }
};

// Finite list of nonzero sub-probability measures: alpha = sum_n delta_{y_n}.
struct MacroMeasure {
    std::vector<Measure> atoms;

    void add(const Measure& y) {
        if (y.is_zero()) throw std::invalid_argument("MacroMeasure: zero atom not allowed");
        atoms.push_back(y);
    }

    bool empty() const { return atoms.empty(); }
};

}  // namespace irg
