#pragma once

#include <vector>

#include "rates.hpp"
#include "solvers.hpp"
#include "trees.hpp"

namespace irg {

// Explicit microscopic state of the coagulation process at time t:
//   lambda_k(t) = t^{|k|-1} tau(k; kappa) e^{-t<k, kappa mu>} prod_r mu_r^{k_r}/k_r!
inline double flory_atom(const Measure& mu, const Kernel& kappa, const TauTable& table, double t,
                         const TypeConfig& k) {
    const std::int64_t sz = k.total();
    if (sz == 0) return 0.0;
    if (t == 0) return sz == 1 ? mu[k.support().front()] : 0.0;
    double lt = table.log_tau(k);
    if (lt == -kInf) return 0.0;
    Measure kmu = kappa_apply(kappa, mu);
    double dot_kmu = 0;
    double lw = lt + static_cast<double>(sz - 1) * std::log(t);
    for (std::size_t s = 0; s < k.size(); ++s) {
        if (k[s] == 0) continue;
        if (mu[s] == 0) return 0.0;
        dot_kmu += static_cast<double>(k[s]) * kmu[s];
        lw += static_cast<double>(k[s]) * std::log(mu[s]) - log_factorial(k[s]);
    }
    return std::exp(lw - t * dot_kmu);
}

inline MicroMeasure flory_state(const Measure& mu, const Kernel& kappa, double t, std::int64_t kmax) {
    if (t < 0) throw std::invalid_argument("flory_state: t must be >= 0");
    if (kmax < 1) throw std::invalid_argument("flory_state: kmax must be >= 1");
    MicroMeasure lambda;
    TauTable table(kappa);
    std::vector<std::size_t> supp;
    for (std::size_t s = 0; s < mu.size(); ++s)
        if (mu[s] > 0) supp.push_back(s);
    for (std::int64_t n = 1; n <= kmax; ++n)
        detail::for_each_config_of_size(supp, mu.size(), n, [&](const TypeConfig& k) {
            double w = flory_atom(mu, kappa, table, t, k);
            if (w > 0) lambda.add(k, w);
        });
    return lambda;
}

struct FloryResidual {
    double ddt_analytic;  // (|k|-1) lambda_k / t - <k, kappa mu> lambda_k
    double rhs;           // coagulation gain minus loss against the initial condition
    double residual;      // |ddt - rhs|
};

// Flory equation residual at a single config: the gain term is the exact
// finite convolution over splits m + m~ = k, the loss term pairs lambda_k
// with lambda_0 = mu on singletons.
inline FloryResidual flory_residual(const Measure& mu, const Kernel& kappa, double t, const TypeConfig& k) {
    if (!(t > 0)) throw std::invalid_argument("flory_residual: t must be > 0");
    if (k.total() < 1) throw std::invalid_argument("flory_residual: |k| must be >= 1");
    TauTable table(kappa);
    const std::size_t n_types = k.size();

    double lambda_k = flory_atom(mu, kappa, table, t, k);
    Measure kmu = kappa_apply(kappa, mu);
    double loss_rate = 0;
    for (std::size_t s = 0; s < n_types; ++s) loss_rate += static_cast<double>(k[s]) * kmu[s];

    double ddt = (static_cast<double>(k.total()) - 1.0) / t * lambda_k - loss_rate * lambda_k;

    double gain = 0;
    TypeConfig m(n_types);
    while (true) {
        std::size_t pos = 0;
        while (pos < n_types && ++m[pos] > k[pos]) m[pos++] = 0;
        if (pos == n_types) break;
        TypeConfig mt(n_types);
        for (std::size_t s = 0; s < n_types; ++s) mt[s] = k[s] - m[s];
        if (mt.total() == 0) continue;
        double lm = flory_atom(mu, kappa, table, t, m);
        if (lm == 0) continue;
        double lmt = flory_atom(mu, kappa, table, t, mt);
        if (lmt == 0) continue;
        double pair = 0;  // <m, kappa m~>
        for (std::size_t r = 0; r < n_types; ++r) {
            if (m[r] == 0) continue;
            for (std::size_t s = 0; s < n_types; ++s)
                pair += static_cast<double>(m[r]) * kappa(r, s) * static_cast<double>(mt[s]);
        }
        gain += lm * lmt * pair;
    }
    double rhs = 0.5 * gain - loss_rate * lambda_k;
    return {ddt, rhs, std::abs(ddt - rhs)};
}

// Gel mass mu - c*(t) where c*(t) solves the characteristic equation for t*kappa;
// identically zero until t_c = 1/Sigma(kappa, mu).
inline std::vector<Measure> gel_mass_curve(const Measure& mu, const Kernel& kappa,
                                           const std::vector<double>& t_grid, double tol = 1e-13) {
    std::vector<Measure> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (t < 0) throw std::invalid_argument("gel_mass_curve: t must be >= 0");
        if (t == 0) {
            out.emplace_back(mu.size());
            continue;
        }
        FixedPointResult c = solve_characteristic(t * kappa, mu, tol);
        out.push_back(clamp_nonneg(mu - c.solution));
    }
    return out;
}

inline double gelation_time(const Measure& mu, const Kernel& kappa) {
    double s = sigma(kappa, mu).value;
    return s == 0 ? kInf : 1.0 / s;
}

struct FloryTrajectory {
    std::vector<double> times;
    std::vector<MicroMeasure> states;
    std::vector<Measure> gel;
};

inline FloryTrajectory flory_trajectory(const Measure& mu, const Kernel& kappa,
                                        const std::vector<double>& t_grid, std::int64_t kmax) {
    FloryTrajectory out;
    out.times = t_grid;
    for (double t : t_grid) out.states.push_back(flory_state(mu, kappa, t, kmax));
    out.gel = gel_mass_curve(mu, kappa, t_grid);
    return out;
}

}  // namespace irg
