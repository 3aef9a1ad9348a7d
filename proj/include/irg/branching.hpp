#pragma once

#include <random>

#include "measures.hpp"
#include "rates.hpp"
#include "trees.hpp"

namespace irg {

struct BorelParams {
    Kernel kappa;
    Measure nu;
};

// Multi-type Borel pmf: P_r(E = k) = tau(k) (k_r / nu_r) prod_s (nu_s e^{-(kappa nu)_s})^{k_s} / k_s!
inline double borel_pmf(const BorelParams& params, std::size_t r, const TypeConfig& k) {
    if (params.nu[r] <= 0) throw std::domain_error("borel_pmf: nu_r must be > 0");
    if (k[r] < 1) return 0.0;
    TauTable table(params.kappa);
    double lt = table.log_tau(k);
    if (lt == -kInf) return 0.0;
    Measure theta = theta_of(params.kappa, params.nu);
    double lw = lt + std::log(static_cast<double>(k[r])) - std::log(params.nu[r]);
    for (std::size_t s = 0; s < k.size(); ++s) {
        if (k[s] == 0) continue;
        if (theta[s] == 0) return 0.0;
        lw += static_cast<double>(k[s]) * std::log(theta[s]) - log_factorial(k[s]);
    }
    return std::exp(lw);
}

struct ProgenyResult {
    bool exploded = false;  // population exceeded the cap: treated as survival
    TypeConfig progeny;     // total progeny by type (valid when !exploded)
};

// Breadth-first simulation of the multitype Poisson branching process: an
// individual of type r has Poisson(kappa(r,s) nu_s) children of type s.
// Each generation is drawn in bulk: the offspring of n_t independent parents
// of type t sum to Poisson(n_t kappa(t,s) nu_s) children of type s.
inline ProgenyResult sample_total_progeny(const BorelParams& params, std::size_t r, std::uint64_t seed,
                                          std::int64_t cap = 10'000) {
    if (cap < 1) throw std::invalid_argument("sample_total_progeny: cap must be >= 1");
    const std::size_t n = params.nu.size();
    auto rng = make_rng(seed);
    std::vector<std::int64_t> generation(n, 0), total(n, 0);
    generation[r] = 1;
    total[r] = 1;
    std::int64_t population = 1;
    while (true) {
        std::vector<std::int64_t> next(n, 0);
        bool alive = false;
        for (std::size_t s = 0; s < n; ++s) {
            double mean = 0;
            for (std::size_t t = 0; t < n; ++t)
                mean += static_cast<double>(generation[t]) * params.kappa(t, s) * params.nu[s];
            if (mean == 0) continue;
            next[s] = poisson_sample(mean, rng);
            if (next[s] > 0) alive = true;
            total[s] += next[s];
            population += next[s];
        }
        if (population > cap) return {true, TypeConfig{}};
        if (!alive) break;
        generation = std::move(next);
    }
    ProgenyResult out;
    out.progeny = TypeConfig(n);
    for (std::size_t s = 0; s < n; ++s) out.progeny[s] = total[s];
    return out;
}

struct BranchingRelationCheck {
    double max_residual = 0;  // relative
    TypeConfig argmax;
    std::size_t argmax_type = 0;
};

// mu_r P_r(E = k) = lambda_k(mu) k_r, checked over all r and |k| <= kmax.
inline BranchingRelationCheck check_micro_branching_relation(const Measure& mu, const Kernel& kappa,
                                                             std::int64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("check_micro_branching_relation: kmax >= 1");
    BranchingRelationCheck out;
    LambdaCResult lc = lambda_c(mu, kappa, kmax);
    BorelParams params{kappa, mu};
    std::vector<std::size_t> supp;
    for (std::size_t s = 0; s < mu.size(); ++s)
        if (mu[s] > 0) supp.push_back(s);
    for (std::int64_t n = 1; n <= kmax; ++n) {
        detail::for_each_config_of_size(supp, mu.size(), n, [&](const TypeConfig& k) {
            double lk = lc.lambda.at(k);
            for (std::size_t r = 0; r < mu.size(); ++r) {
                if (mu[r] == 0) continue;  // both sides vanish
                double lhs = mu[r] * borel_pmf(params, r, k);
                double rhs = lk * static_cast<double>(k[r]);
                double scale = std::max({lhs, rhs, 1e-300});
                double rel = std::abs(lhs - rhs) / scale;
                if (rel > out.max_residual && (lhs > 0 || rhs > 0)) {
                    out.max_residual = rel;
                    out.argmax = k;
                    out.argmax_type = r;
                }
            }
        });
    }
    return out;
}

}  // namespace irg
