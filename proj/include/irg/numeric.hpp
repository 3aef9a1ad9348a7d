#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace irg {

inline double log_factorial(std::int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Exact in double up to 170!.
inline double factorial(std::int64_t n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(171);
        t[0] = 1;
        for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    if (n < 0) throw std::domain_error("factorial: negative");
    if (n <= 170) return table[static_cast<std::size_t>(n)];
    return std::exp(log_factorial(n));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based stream seeding: replica i gets an independent generator.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x2545f4914f6cdd1dull + 1)));
}

inline double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa, in (0,1] so log() is always finite
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Poisson sampling: CDF inversion below mean 10, Hormann's PTRS above.
inline std::int64_t poisson_sample(double mean, std::mt19937_64& rng) {
    if (mean < 0) throw std::domain_error("poisson_sample: negative mean");
    if (mean == 0) return 0;
    if (mean < 10.0) {
        double p = std::exp(-mean), cum = p;
        double u = uniform01(rng);
        std::int64_t n = 0;
        while (u > cum) {
            ++n;
            p *= mean / static_cast<double>(n);
            cum += p;
            if (n > 2000) break;  // cum has saturated in double precision
        }
        return n;
    }
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    while (true) {
        double u = uniform01(rng) - 0.5;
        double v = uniform01(rng);
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <= kf * log_mean - mean - std::lgamma(kf + 1.0))
            return static_cast<std::int64_t>(kf);
    }
}

struct LogDet {
    double log_abs;  // -inf for singular
    int sign;        // 0 for singular
};

// Partial-pivot LU on a dense row-major matrix, log-scaled to avoid overflow.
inline LogDet log_det(std::vector<double> m, std::size_t n) {
    double log_abs = 0;
    int sign = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(m[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(m[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0) return {-std::numeric_limits<double>::infinity(), 0};
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(m[piv * n + c], m[col * n + c]);
            sign = -sign;
        }
        double d = m[col * n + col];
        log_abs += std::log(std::abs(d));
        if (d < 0) sign = -sign;
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = m[r * n + col] / d;
            if (f == 0) continue;
            for (std::size_t c = col + 1; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
        }
    }
    return {log_abs, sign};
}

struct SpectralRadius {
    double value;
    bool converged;
};

// Spectral radius of a nonnegative matrix. Power iteration on T + I (the shift
// removes periodicity); if the iteration stalls, normalized matrix squaring
// estimates rho = lim ||T^(2^m)||^(1/2^m).
inline SpectralRadius spectral_radius(const std::vector<double>& t, std::size_t n, double tol = 1e-12) {
    if (n == 0) return {0.0, true};
    for (double x : t)
        if (!(x >= 0)) throw std::domain_error("spectral_radius: matrix must be nonnegative");

    std::vector<double> x(n, 1.0), y(n);
    double est = 0, prev = -1;
    int stable = 0;
    for (int iter = 0; iter < 20000; ++iter) {
        double norm = 0;
        for (std::size_t r = 0; r < n; ++r) {
            double s = x[r];  // + I shift
            for (std::size_t c = 0; c < n; ++c) s += t[r * n + c] * x[c];
            y[r] = s;
            norm = std::max(norm, s);
        }
        est = norm - 1.0;
        for (std::size_t r = 0; r < n; ++r) x[r] = y[r] / norm;
        if (std::abs(est - prev) <= tol * std::max(1.0, std::abs(est)))
            ++stable;
        else
            stable = 0;
        prev = est;
        if (stable >= 4) return {est, true};
    }

    // squaring fallback: gap-independent, ~60 doublings resolve any tie
    std::vector<double> m(n * n), tmp(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m[r * n + c] = t[r * n + c] + (r == c ? 1.0 : 0.0);
    double log_scale = 0;
    double power = 1;
    for (int step = 0; step < 60; ++step) {
        double norm = 0;
        for (std::size_t r = 0; r < n; ++r) {
            double row = 0;
            for (std::size_t c = 0; c < n; ++c) row += m[r * n + c];
            norm = std::max(norm, row);
        }
        if (norm == 0) return {0.0, true};
        log_scale += std::log(norm) / power;
        for (auto& v : m) v /= norm;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                double s = 0;
                for (std::size_t k = 0; k < n; ++k) s += m[r * n + k] * m[k * n + c];
                tmp[r * n + c] = s;
            }
        m.swap(tmp);
        power *= 2;
    }
    return {std::exp(log_scale) - 1.0, true};
}

struct LineFit {
    double slope;
    double intercept;
};

// Weighted least squares for y = a + b x.
inline LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& w) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    double denom = sw * sxx - sx * sx;
    if (denom == 0) throw std::runtime_error("weighted_line_fit: degenerate abscissae");
    double slope = (sw * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / sw;
    return {slope, intercept};
}

}  // namespace irg
