#pragma once

#include <functional>
#include <map>
#include <string>

#include "measures.hpp"
#include "solvers.hpp"
#include "trees.hpp"

namespace irg {

enum class InfReason {
    none,
    tau_zero,             // lambda atom on a non-connectable config
    outside_mu,           // mass where mu vanishes
    macro_density_fails,  // y not << (1 - e^{-kappa y}) mu
    meso_density_fails,   // nu not << (kappa nu) mu
    mass_exceeds_mu,      // c(lambda) + c(alpha) <= mu violated
    not_connectable,      // reducible mode: alpha crosses irreducible classes
};

inline const char* inf_reason_name(InfReason r) {
    switch (r) {
        case InfReason::none: return "none";
        case InfReason::tau_zero: return "tau_zero";
        case InfReason::outside_mu: return "outside_mu";
        case InfReason::macro_density_fails: return "macro_density_fails";
        case InfReason::meso_density_fails: return "meso_density_fails";
        case InfReason::mass_exceeds_mu: return "mass_exceeds_mu";
        default: return "not_connectable";
    }
}

struct RateValue {
    double value = 0;
    InfReason reason = InfReason::none;
    std::map<std::string, double> breakdown;

    bool finite() const { return std::isfinite(value); }
};

inline RateValue infinite_rate(InfReason reason) {
    RateValue rv;
    rv.value = kInf;
    rv.reason = reason;
    return rv;
}

// slack for the entrywise constraint c(lambda) + c(alpha) <= mu; truncated
// minimizers sit a rounding error away from the boundary
inline constexpr double kMassSlack = 1e-12;

inline Measure clamp_nonneg(Measure m) {
    for (auto& x : m.v) x = std::max(0.0, x);
    return m;
}

namespace detail {

// all k with supp(k) in supp and |k| = n, in lexicographic order
template <typename Fn>
void for_each_config_of_size(const std::vector<std::size_t>& supp, std::size_t n_types, std::int64_t n,
                             Fn&& fn) {
    TypeConfig k(n_types);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::int64_t left) {
        if (pos + 1 == supp.size()) {
            k[supp[pos]] = left;
            fn(const_cast<const TypeConfig&>(k));
            k[supp[pos]] = 0;
            return;
        }
        for (std::int64_t take = 0; take <= left; ++take) {
            k[supp[pos]] = take;
            rec(pos + 1, left - take);
        }
        k[supp[pos]] = 0;
    };
    if (supp.empty()) return;
    rec(0, n);
}

}  // namespace detail

struct TruncatedSeries {
    double partial = 0;
    std::int64_t kmax = 0;
    double tail_bound = 0;
    double chi_value = kInf;
    bool diverged = false;
    bool critical_slow_tail = false;
};

// Gamma_r(theta) = sum_k tau(k) k_r prod_s theta_s^{k_s} / k_s!, truncated at
// |k| <= kmax with the geometric tail envelope at rate chi - 1.
inline TruncatedSeries gamma_series(const Measure& theta, const Kernel& kappa, std::size_t r,
                                    std::int64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("gamma_series: kmax must be >= 1");
    if (kappa.n != theta.size()) throw std::invalid_argument("gamma_series: dimension mismatch");
    TruncatedSeries out;
    out.kmax = kmax;

    std::vector<std::size_t> supp;
    for (std::size_t s = 0; s < theta.size(); ++s)
        if (theta[s] > 0) supp.push_back(s);
    if (supp.empty() || theta[r] == 0) {
        out.chi_value = chi(kappa, theta);
        return out;  // Gamma_r(0) = 0 and no mass can reach type r
    }

    TauTable table(kappa);
    std::vector<double> log_theta(theta.size(), -kInf);
    for (std::size_t s : supp) log_theta[s] = std::log(theta[s]);

    double last_shell = 0;
    for (std::int64_t n = 1; n <= kmax; ++n) {
        double shell = 0;
        detail::for_each_config_of_size(supp, theta.size(), n, [&](const TypeConfig& k) {
            if (k[r] == 0) return;
            double lt = table.log_tau(k);
            if (lt == -kInf) return;
            double lw = lt + std::log(static_cast<double>(k[r]));
            for (std::size_t s : supp) lw += static_cast<double>(k[s]) * log_theta[s] - log_factorial(k[s]);
            shell += std::exp(lw);
        });
        out.partial += shell;
        last_shell = shell;
    }

    out.chi_value = chi(kappa, theta);
    if (out.chi_value < 1.0 - 1e-9) {
        out.diverged = true;
        out.tail_bound = kInf;
        return out;
    }
    double rate = out.chi_value - 1.0;
    if (rate < 1e-3) out.critical_slow_tail = true;
    double q = std::exp(-rate);
    out.tail_bound = q < 1.0 ? last_shell * q / (1.0 - q) : kInf;
    return out;
}

struct LambdaCResult {
    MicroMeasure lambda;       // atoms with 1 <= |k| <= kmax
    std::int64_t kmax = 0;
    double sigma_c = 0;        // Sigma(kappa, c); c(lambda_c) = c only when <= 1
    Regime regime = Regime::subcritical;
    double chi_value = kInf;
    double mass_tail = 0;      // bound on sum of truncated lambda weights
    Measure config_tail;       // per-type bound on c - c(truncated lambda)
    bool critical_slow_tail = false;
};

// lambda_k(c) = tau(k) prod_s (c_s e^{-(kappa c)_s})^{k_s} / k_s!
inline LambdaCResult lambda_c(const Measure& c, const Kernel& kappa, std::int64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("lambda_c: kmax must be >= 1");
    if (kappa.n != c.size()) throw std::invalid_argument("lambda_c: dimension mismatch");
    LambdaCResult out;
    out.kmax = kmax;
    out.sigma_c = sigma(kappa, c).value;
    out.regime = classify_regime(out.sigma_c);
    out.config_tail = Measure(c.size());

    Measure theta = theta_of(kappa, c);
    std::vector<std::size_t> supp;
    for (std::size_t s = 0; s < c.size(); ++s)
        if (theta[s] > 0) supp.push_back(s);
    if (supp.empty()) {
        out.chi_value = kInf;
        return out;
    }

    TauTable table(kappa);
    std::vector<double> log_theta(c.size(), -kInf);
    for (std::size_t s : supp) log_theta[s] = std::log(theta[s]);

    Measure last_shell_config(c.size());
    for (std::int64_t n = 1; n <= kmax; ++n) {
        Measure shell_config(c.size());
        detail::for_each_config_of_size(supp, c.size(), n, [&](const TypeConfig& k) {
            double lt = table.log_tau(k);
            if (lt == -kInf) return;
            double lw = lt;
            for (std::size_t s : supp) lw += static_cast<double>(k[s]) * log_theta[s] - log_factorial(k[s]);
            double w = std::exp(lw);
            if (w > 0) {
                out.lambda.add(k, w);
                for (std::size_t s : supp) shell_config[s] += w * static_cast<double>(k[s]);
            }
        });
        last_shell_config = shell_config;
    }

    out.chi_value = chi(kappa, theta);
    double rate = out.chi_value - 1.0;
    if (rate <= 0) {
        out.mass_tail = kInf;
        for (std::size_t s : supp) out.config_tail[s] = kInf;
        out.critical_slow_tail = true;
        return out;
    }
    if (rate < 1e-3 || std::abs(out.sigma_c - 1.0) < 1e-4) out.critical_slow_tail = true;
    double q = std::exp(-rate);
    double total_cfg_tail = 0;
    for (std::size_t s : supp) {
        out.config_tail[s] = last_shell_config[s] * q / (1.0 - q);
        total_cfg_tail += out.config_tail[s];
    }
    out.mass_tail = total_cfg_tail / static_cast<double>(kmax + 1);
    return out;
}

// I_Mi per the explicit finite-type sum:
//   sum_k lambda_k log( lambda_k / (tau(k) prod_s mu_s^{k_s}/k_s!) )
//   + sum_k lambda_k (|k| - 1) + 1/2 <c(lambda), kappa mu>
inline RateValue rate_micro(const MicroMeasure& lambda, const Measure& mu, const Kernel& kappa) {
    TauTable table(kappa);
    double entropy = 0, size_term = 0;
    for (const auto& [k, w] : lambda.weights) {
        double lt = table.log_tau(k);
        if (lt == -kInf) return infinite_rate(InfReason::tau_zero);
        double log_ref = lt;
        for (std::size_t s = 0; s < mu.size(); ++s) {
            if (k[s] == 0) continue;
            if (mu[s] == 0) return infinite_rate(InfReason::outside_mu);
            log_ref += static_cast<double>(k[s]) * std::log(mu[s]) - log_factorial(k[s]);
        }
        entropy += w * (std::log(w) - log_ref);
        size_term += w * static_cast<double>(k.total() - 1);
    }
    Measure c = integrated_config(lambda, mu.size());
    double isolation = 0.5 * dot(c, kappa_apply(kappa, mu));
    RateValue rv;
    rv.value = entropy + size_term + isolation;
    rv.breakdown = {{"entropy", entropy}, {"size", size_term}, {"isolation", isolation}};
    return rv;
}

// I_Ma: sum over atoms of <y, log(y/((1-e^{-kappa y}) mu))> + 1/2 <y, kappa(mu - y)>
inline RateValue rate_macro(const MacroMeasure& alpha, const Measure& mu, const Kernel& kappa) {
    double log_term = 0, isolation = 0;
    for (const auto& y : alpha.atoms) {
        Measure ky = kappa_apply(kappa, y);
        for (std::size_t r = 0; r < mu.size(); ++r) {
            if (y[r] == 0) continue;
            double denom = -std::expm1(-ky[r]) * mu[r];
            if (denom == 0) return infinite_rate(InfReason::macro_density_fails);
            log_term += y[r] * std::log(y[r] / denom);
        }
        isolation += 0.5 * (dot(y, kappa_apply(kappa, mu)) - dot(y, ky));
    }
    RateValue rv;
    rv.value = log_term + isolation;
    rv.breakdown = {{"log_term", log_term}, {"isolation", isolation}};
    return rv;
}

// I_Me: <nu, log(nu/((kappa nu) mu))> + 1/2 <nu, kappa mu>
inline RateValue rate_meso(const Measure& nu, const Measure& mu, const Kernel& kappa) {
    Measure knu = kappa_apply(kappa, nu);
    double log_term = 0;
    for (std::size_t r = 0; r < mu.size(); ++r) {
        if (nu[r] == 0) continue;
        double denom = knu[r] * mu[r];
        if (denom == 0) return infinite_rate(InfReason::meso_density_fails);
        log_term += nu[r] * std::log(nu[r] / denom);
    }
    double isolation = 0.5 * dot(nu, kappa_apply(kappa, mu));
    RateValue rv;
    rv.value = log_term + isolation;
    rv.breakdown = {{"log_term", log_term}, {"isolation", isolation}};
    return rv;
}

// I(lambda, alpha) = I_Mi + I_Ma + I_Me(mu - c(lambda) - c(alpha)) when the
// configs fit below mu; with reducible_mode the connectability penalty applies.
inline RateValue rate_total(const MicroMeasure& lambda, const MacroMeasure& alpha, const Measure& mu,
                            const Kernel& kappa, bool reducible_mode = false) {
    Measure cl = integrated_config(lambda, mu.size());
    Measure ca = integrated_config(alpha, mu.size());
    if (!leq(cl + ca, mu, kMassSlack)) return infinite_rate(InfReason::mass_exceeds_mu);
    if (reducible_mode && !connectable(alpha, irreducible_classes(kappa, mu)))
        return infinite_rate(InfReason::not_connectable);

    RateValue mi = rate_micro(lambda, mu, kappa);
    if (!mi.finite()) return mi;
    RateValue ma = rate_macro(alpha, mu, kappa);
    if (!ma.finite()) return ma;
    Measure nu = clamp_nonneg(mu - cl - ca);
    RateValue me = rate_meso(nu, mu, kappa);
    if (!me.finite()) return me;

    RateValue rv;
    rv.value = mi.value + ma.value + me.value;
    rv.breakdown = {{"I_Mi", mi.value}, {"I_Ma", ma.value}, {"I_Me", me.value}};
    return rv;
}

// I_Mi at the full (untruncated) minimizer lambda_c, via the closed form
// <c, log(c/mu)> + 1/2 <c, kappa(mu - c)>; +inf if c has mass outside mu.
inline RateValue rate_micro_at_minimizer(const Measure& c, const Measure& mu, const Kernel& kappa) {
    double log_term = 0;
    for (std::size_t r = 0; r < mu.size(); ++r) {
        if (c[r] == 0) continue;
        if (mu[r] == 0) return infinite_rate(InfReason::outside_mu);
        log_term += c[r] * std::log(c[r] / mu[r]);
    }
    double isolation = 0.5 * (dot(c, kappa_apply(kappa, mu)) - dot(c, kappa_apply(kappa, c)));
    RateValue rv;
    rv.value = log_term + isolation;
    rv.breakdown = {{"log_term", log_term}, {"isolation", isolation}};
    return rv;
}

// J(c): optimal non-macroscopic cost. Saturates at b*(c) when Sigma(kappa,c)>1;
// the G_c(b*) form is evaluated alongside as an algebraic cross-check.
inline RateValue j_cost(const Measure& c, const Measure& mu, const Kernel& kappa, double tol = 1e-12) {
    double sig = sigma(kappa, c).value;
    if (sig <= 1.0) {
        RateValue rv = rate_micro_at_minimizer(c, mu, kappa);
        rv.breakdown["sigma_c"] = sig;
        return rv;
    }
    FixedPointResult bs = solve_b_star(kappa, c, tol);
    const Measure& b = bs.solution;
    RateValue mi = rate_micro_at_minimizer(b, mu, kappa);
    if (!mi.finite()) return mi;
    Measure rest = clamp_nonneg(c - b);
    RateValue me = rate_meso(rest, mu, kappa);
    if (!me.finite()) return me;

    // G_c(b) = <b, log(b/mu)> - 1/2 <b,kappa b> + <c-b, log((c-b)/((kappa(c-b)) mu))> + 1/2 <c,kappa mu>
    double g = -0.5 * dot(b, kappa_apply(kappa, b)) + 0.5 * dot(c, kappa_apply(kappa, mu));
    Measure krest = kappa_apply(kappa, rest);
    for (std::size_t r = 0; r < mu.size(); ++r) {
        if (b[r] > 0) g += b[r] * std::log(b[r] / mu[r]);
        if (rest[r] > 0) g += rest[r] * std::log(rest[r] / (krest[r] * mu[r]));
    }

    RateValue rv;
    rv.value = mi.value + me.value;
    rv.breakdown = {{"I_Mi_b_star", mi.value}, {"I_Me_rest", me.value}, {"G_c_b_star", g},
                    {"sigma_c", sig},          {"b_star_residual", bs.residual}};
    return rv;
}

// Contracted micro rate: I_Mi(lambda) + I_Ma(delta_{mu - c(lambda)})
inline RateValue contracted_micro(const MicroMeasure& lambda, const Measure& mu, const Kernel& kappa) {
    Measure cl = integrated_config(lambda, mu.size());
    if (!leq(cl, mu, kMassSlack)) return infinite_rate(InfReason::mass_exceeds_mu);
    RateValue mi = rate_micro(lambda, mu, kappa);
    if (!mi.finite()) return mi;
    Measure rest = clamp_nonneg(mu - cl);
    MacroMeasure alpha;
    if (!rest.is_zero()) alpha.add(rest);
    RateValue ma = rate_macro(alpha, mu, kappa);
    if (!ma.finite()) return ma;
    RateValue rv;
    rv.value = mi.value + ma.value;
    rv.breakdown = {{"I_Mi", mi.value}, {"I_Ma_rest", ma.value}};
    return rv;
}

// Contracted macro rate: I_Ma(alpha) + J(mu - c(alpha))
inline RateValue contracted_macro(const MacroMeasure& alpha, const Measure& mu, const Kernel& kappa,
                                  double tol = 1e-12) {
    Measure ca = integrated_config(alpha, mu.size());
    if (!leq(ca, mu, kMassSlack)) return infinite_rate(InfReason::mass_exceeds_mu);
    RateValue ma = rate_macro(alpha, mu, kappa);
    if (!ma.finite()) return ma;
    RateValue j = j_cost(clamp_nonneg(mu - ca), mu, kappa, tol);
    if (!j.finite()) return j;
    RateValue rv;
    rv.value = ma.value + j.value;
    rv.breakdown = j.breakdown;
    rv.breakdown["I_Ma"] = ma.value;
    rv.breakdown["J_rest"] = j.value;
    return rv;
}

struct MinimizeResult {
    MicroMeasure lambda;  // truncated lambda_{c*}
    MacroMeasure alpha;   // empty, one atom mu - c*, or one atom per class
    Regime regime = Regime::subcritical;
    double sigma_mu = 0;
    Measure c_star;
    bool reducible = false;  // per-class composition was applied
    double truncation_tail = 0;
    bool critical_slow_tail = false;
};

// Minimizer of I: (lambda_mu, 0) when Sigma(kappa,mu) <= 1, else
// (lambda_{c*}, delta_{mu-c*}); for reducible kernels the macro part splits
// into one atom per irreducible class.
inline MinimizeResult minimize_rate(const Measure& mu, const Kernel& kappa, std::int64_t kmax = 40,
                                    double tol = 1e-12) {
    MinimizeResult out;
    out.sigma_mu = sigma(kappa, mu).value;
    out.regime = classify_regime(out.sigma_mu);

    FixedPointResult ch = solve_characteristic(kappa, mu, tol);
    out.c_star = ch.solution;

    LambdaCResult lc = lambda_c(out.c_star, kappa, kmax);
    out.lambda = std::move(lc.lambda);
    out.truncation_tail = lc.config_tail.total();
    out.critical_slow_tail = lc.critical_slow_tail;

    // one macro atom per supercritical irreducible class; subcritical classes
    // keep all their mass microscopic and must not leave a solver-residual atom
    Measure giant = clamp_nonneg(mu - out.c_star);
    IrreducibleClasses classes = irreducible_classes(kappa, mu);
    out.reducible = classes.count() > 1;
    for (const auto& cls : classes.classes) {
        Measure mu_cls(mu.size());
        for (std::size_t r : cls) mu_cls[r] = mu[r];
        if (sigma(kappa, mu_cls).value <= 1.0) continue;
        Measure y(mu.size());
        for (std::size_t r : cls) y[r] = giant[r];
        if (!y.is_zero()) out.alpha.add(y);
    }
    return out;
}

// Exponential rate of the connection probability of a macroscopic cluster:
// sum_r y_r log(1 - e^{-(kappa y)_r}), -inf when y is not << kappa y.
inline double macro_rate(const Measure& y, const Kernel& kappa) {
    Measure ky = kappa_apply(kappa, y);
    double total = 0;
    for (std::size_t r = 0; r < y.size(); ++r) {
        if (y[r] == 0) continue;
        if (ky[r] == 0) return -kInf;
        total += y[r] * std::log(-std::expm1(-ky[r]));
    }
    return total;
}

// Mesoscopic connection probability bound:
// (||kappa_N||_inf |S_k|)^(|S_k|-1) N^{-(|k|-1)} (1/k_r^2) prod_{s in S_k} (kappa_N k)_s^{k_s-1} k_s
inline double meso_bound(const TypeConfig& k, const Kernel& kappa_n, std::int64_t n, std::size_t r) {
    if (k[r] < 1) throw std::invalid_argument("meso_bound: marked type needs k_r >= 1");
    auto supp = k.support();
    double log_b = static_cast<double>(supp.size() - 1) *
                   std::log(kappa_n.max_entry() * static_cast<double>(supp.size()));
    log_b -= static_cast<double>(k.total() - 1) * std::log(static_cast<double>(n));
    log_b -= 2.0 * std::log(static_cast<double>(k[r]));
    for (std::size_t s : supp) {
        double ks = 0;
        for (std::size_t u = 0; u < k.size(); ++u) ks += kappa_n(s, u) * static_cast<double>(k[u]);
        if (k[s] > 1) {
            if (ks == 0) return 0.0;
            log_b += static_cast<double>(k[s] - 1) * std::log(ks);
        }
        log_b += std::log(static_cast<double>(k[s]));
    }
    return std::exp(log_b);
}

}  // namespace irg
