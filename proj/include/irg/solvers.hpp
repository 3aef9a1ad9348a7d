#pragma once

#include <random>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "types.hpp"

namespace irg {

enum class Regime { subcritical, critical, supercritical };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        default: return "supercritical";
    }
}

// Spectral radius of T_{kappa,nu} = (kappa(r,s) nu_s)_{r,s}.
inline SpectralRadius sigma(const Kernel& kappa, const Measure& nu) {
    if (kappa.n != nu.size()) throw std::invalid_argument("sigma: dimension mismatch");
    const std::size_t n = nu.size();
    std::vector<double> t(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) t[r * n + s] = kappa(r, s) * nu[s];
    return spectral_radius(t, n);
}

inline Regime classify_regime(double sigma_value, double window = 1e-4) {
    if (std::abs(sigma_value - 1.0) < window) return Regime::critical;
    return sigma_value < 1.0 ? Regime::subcritical : Regime::supercritical;
}

inline constexpr std::int64_t kIterationCap = 1'000'000;

struct SurvivalResult {
    Measure rho;
    std::int64_t iterations;
    double residual;  // sup-norm of rho - (1 - exp(-T rho))
    Regime regime;
    bool converged;
};

// Survival probabilities: iterate rho <- 1 - exp(-T_{kappa,mu} rho) from
// rho = 1. The sequence is entrywise monotone decreasing and converges to the
// maximal solution.
inline SurvivalResult solve_survival(const Kernel& kappa, const Measure& mu, double tol = 1e-12,
                                     std::vector<Measure>* trace = nullptr) {
    if (!(tol > 0)) throw std::invalid_argument("solve_survival: tol must be > 0");
    if (kappa.n != mu.size()) throw std::invalid_argument("solve_survival: dimension mismatch");
    const std::size_t n = mu.size();
    SurvivalResult out;
    out.regime = classify_regime(sigma(kappa, mu).value);

    Measure rho(n, 1.0);
    if (trace) trace->push_back(rho);
    std::int64_t iter = 0;
    double change = kInf;
    for (; iter < kIterationCap; ++iter) {
        Measure next(n);
        for (std::size_t r = 0; r < n; ++r) {
            double acc = 0;
            for (std::size_t s = 0; s < n; ++s) acc += kappa(r, s) * mu[s] * rho[s];
            next[r] = -std::expm1(-acc);
        }
        change = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (next[r] > rho[r] + 1e-12 || next[r] < 0 || next[r] > 1.0)
                throw std::logic_error("solve_survival: iterate left the monotone band");
            change = std::max(change, std::abs(rho[r] - next[r]));
        }
        rho = next;
        if (trace) trace->push_back(rho);
        if (change <= tol) break;
    }
    // strictly below criticality the maximal solution is exactly 0
    if (out.regime == Regime::subcritical) {
        rho = Measure(n);
        change = 0;
    }
    out.rho = rho;
    out.iterations = iter;
    out.residual = change;
    out.converged = change <= tol;
    return out;
}

struct FixedPointResult {
    Measure solution;
    std::int64_t iterations;
    double residual;
    Regime regime;
    bool converged;
};

// c* = (1 - rho) mu solves c e^{-kappa c} = mu e^{-kappa mu}; equals mu when
// Sigma(kappa, mu) <= 1.
inline FixedPointResult solve_characteristic(const Kernel& kappa, const Measure& mu, double tol = 1e-12) {
    SurvivalResult sr = solve_survival(kappa, mu, tol);
    const std::size_t n = mu.size();
    FixedPointResult out;
    out.regime = sr.regime;
    out.iterations = sr.iterations;
    out.converged = sr.converged;
    out.solution = Measure(n);
    for (std::size_t r = 0; r < n; ++r) out.solution[r] = (1.0 - sr.rho[r]) * mu[r];

    Measure kc = kappa_apply(kappa, out.solution);
    Measure km = kappa_apply(kappa, mu);
    double res = 0;
    for (std::size_t r = 0; r < n; ++r)
        res = std::max(res, std::abs(out.solution[r] * std::exp(-kc[r]) - mu[r] * std::exp(-km[r])));
    out.residual = res;
    return out;
}

// Saturation measure b*(c): minimal non-trivial solution of
// kappa(c - b) b = c - b, b <= c, via the monotone iteration
// g <- U(g) = T_{kappa,c}(g / (1 + g)) started from g = T_{kappa,c} 1.
// Then f* = g*/(1+g*) and b* = (1 - f*) c, with Sigma(kappa, b*) = 1 in the
// irreducible supercritical case.
inline FixedPointResult solve_b_star(const Kernel& kappa, const Measure& c, double tol = 1e-12) {
    if (!(tol > 0)) throw std::invalid_argument("solve_b_star: tol must be > 0");
    if (kappa.n != c.size()) throw std::invalid_argument("solve_b_star: dimension mismatch");
    const std::size_t n = c.size();
    FixedPointResult out;
    double sig = sigma(kappa, c).value;
    out.regime = classify_regime(sig);

    Measure b(n);
    std::int64_t iter = 0;
    bool converged = true;
    if (sig <= 1.0) {
        b = c;  // only the trivial solution exists
    } else {
        Measure g = kappa_apply(kappa, c);  // g0 = T_{kappa,c} 1 (applied to constants)
        Measure g0 = g;
        std::vector<double> ratio(n);
        converged = false;
        for (iter = 0; iter < kIterationCap; ++iter) {
            Measure next(n);
            for (std::size_t r = 0; r < n; ++r) {
                double acc = 0;
                for (std::size_t s = 0; s < n; ++s) acc += kappa(r, s) * c[s] * (g[s] / (1.0 + g[s]));
                next[r] = acc;
            }
            double change = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (next[r] > g[r] + 1e-12 || next[r] < 0)
                    throw std::logic_error("solve_b_star: iterate left the monotone band");
                change = std::max(change, std::abs(next[r] - g[r]));
            }
            g = next;
            if (change <= tol) {
                converged = true;
                break;
            }
        }
        for (std::size_t r = 0; r < n; ++r) b[r] = c[r] / (1.0 + g[r]);  // (1 - f*) c
    }
    out.solution = b;
    out.iterations = iter;
    out.converged = converged;

    Measure diff(n);
    for (std::size_t r = 0; r < n; ++r) diff[r] = c[r] - b[r];
    Measure kd = kappa_apply(kappa, diff);
    double res = 0;
    for (std::size_t r = 0; r < n; ++r) res = std::max(res, std::abs(kd[r] * b[r] - diff[r]));
    out.residual = res;
    return out;
}

// chi(kappa, theta) = inf over probability vectors nu << theta of
// <nu, log(nu / ((kappa nu) theta))>. Softmax parametrization on the feasible
// support, gradient descent with backtracking, multi-start.
inline double chi(const Kernel& kappa, const Measure& theta, int restarts = 16, std::uint64_t seed = 12345) {
    if (kappa.n != theta.size()) throw std::invalid_argument("chi: dimension mismatch");
    theta.validate();

    // feasible support: iteratively drop types whose kappa row vanishes there
    std::vector<std::size_t> supp;
    for (std::size_t r = 0; r < theta.size(); ++r)
        if (theta[r] > 0) supp.push_back(r);
    while (true) {
        std::vector<std::size_t> kept;
        for (std::size_t r : supp) {
            double row = 0;
            for (std::size_t s : supp) row += kappa(r, s);
            if (row > 0) kept.push_back(r);
        }
        if (kept.size() == supp.size()) break;
        supp = std::move(kept);
    }
    const std::size_t m = supp.size();
    if (m == 0) return kInf;
    if (m == 1) {
        double d = kappa(supp[0], supp[0]) * theta[supp[0]];
        return d == 0 ? kInf : -std::log(d);
    }

    auto objective_grad = [&](const std::vector<double>& nu, std::vector<double>* grad) {
        std::vector<double> knu(m, 0.0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) knu[a] += kappa(supp[a], supp[b]) * nu[b];
        double f = 0;
        for (std::size_t a = 0; a < m; ++a) {
            if (nu[a] == 0) continue;
            if (knu[a] == 0) return kInf;
            f += nu[a] * (std::log(nu[a]) - std::log(knu[a]) - std::log(theta[supp[a]]));
        }
        if (grad) {
            for (std::size_t a = 0; a < m; ++a) {
                double g = std::log(std::max(nu[a], 1e-300)) + 1.0 - std::log(knu[a]) - std::log(theta[supp[a]]);
                for (std::size_t r = 0; r < m; ++r) g -= nu[r] * kappa(supp[r], supp[a]) / knu[r];
                (*grad)[a] = g;
            }
        }
        return f;
    };

    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double best = kInf;
    for (int start = 0; start < restarts; ++start) {
        std::vector<double> z(m, 0.0);
        if (start > 0)
            for (auto& v : z) v = normal(rng);
        std::vector<double> nu(m), grad_nu(m), grad_z(m);
        double step = 0.5;
        double fcur = kInf;
        for (int it = 0; it < 4000; ++it) {
            double zmax = *std::max_element(z.begin(), z.end());
            double norm = 0;
            for (std::size_t a = 0; a < m; ++a) norm += std::exp(z[a] - zmax);
            for (std::size_t a = 0; a < m; ++a) nu[a] = std::exp(z[a] - zmax) / norm;
            fcur = objective_grad(nu, &grad_nu);
            double gdot = 0;
            for (std::size_t a = 0; a < m; ++a) gdot += grad_nu[a] * nu[a];
            double gnorm = 0;
            for (std::size_t a = 0; a < m; ++a) {
                grad_z[a] = nu[a] * (grad_nu[a] - gdot);
                gnorm = std::max(gnorm, std::abs(grad_z[a]));
            }
            if (gnorm < 1e-12) break;
            // backtracking on the softmax coordinates
            bool moved = false;
            for (int bt = 0; bt < 40; ++bt) {
                std::vector<double> z2(m);
                for (std::size_t a = 0; a < m; ++a) z2[a] = z[a] - step * grad_z[a];
                double z2max = *std::max_element(z2.begin(), z2.end());
                double n2 = 0;
                std::vector<double> nu2(m);
                for (std::size_t a = 0; a < m; ++a) n2 += std::exp(z2[a] - z2max);
                for (std::size_t a = 0; a < m; ++a) nu2[a] = std::exp(z2[a] - z2max) / n2;
                double f2 = objective_grad(nu2, nullptr);
                if (f2 < fcur - 1e-16) {
                    z = std::move(z2);
                    moved = true;
                    step *= 1.3;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        best = std::min(best, fcur);
    }
    return best;
}

// Value of the chi objective at the Perron eigenvector of T_{kappa,nu}:
// Sigma - log Sigma. Exact for one type and an upper bound for the infimum
// in general; chi >= 1 holds either way, with equality iff Sigma = 1.
inline double chi_closed_form(const Kernel& kappa, const Measure& nu) {
    double s = sigma(kappa, nu).value;
    if (s == 0) return kInf;
    return s - std::log(s);
}

inline Measure theta_of(const Kernel& kappa, const Measure& nu) {
    Measure knu = kappa_apply(kappa, nu);
    Measure theta(nu.size());
    for (std::size_t r = 0; r < nu.size(); ++r) theta[r] = nu[r] * std::exp(-knu[r]);
    return theta;
}

}  // namespace irg
