#pragma once

#include <atomic>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "graphsim.hpp"
#include "rates.hpp"
#include "solvers.hpp"
#include "trees.hpp"

namespace irg {

struct VerificationReport {
    std::string experiment;
    double theoretical = 0;
    double empirical = 0;
    double uncertainty = 0;
    double tolerance = 0;
    bool pass = false;
    std::map<std::string, double> details;
};

// Replica-parallel driver; replica i derives its RNG stream from (seed, i),
// so results are identical for any thread count.
template <typename Fn>
void run_replicas(std::int64_t replicas, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::int64_t i = 0; i < replicas; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                std::int64_t i = next.fetch_add(1);
                if (i >= replicas) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

// round(N mu) adjusted so the counts sum to exactly N
inline TypeConfig type_counts_for(std::int64_t n, const Measure& mu) {
    TypeConfig counts(mu.size());
    std::int64_t assigned = 0;
    for (std::size_t s = 0; s < mu.size(); ++s) {
        counts[s] = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * mu[s]));
        assigned += counts[s];
    }
    std::size_t biggest = 0;
    for (std::size_t s = 1; s < mu.size(); ++s)
        if (mu[s] > mu[biggest]) biggest = s;
    counts[biggest] += n - assigned;
    if (counts[biggest] < 0) throw std::invalid_argument("type_counts_for: degenerate mu");
    return counts;
}

inline bool is_connected(const GraphSample& g) {
    if (g.n <= 1) return true;
    UnionFind uf(static_cast<std::size_t>(g.n));
    for (auto [a, b] : g.edges) uf.unite(a, b);
    std::int32_t root = uf.find(0);
    for (std::int32_t v = 1; v < g.n; ++v)
        if (uf.find(v) != root) return false;
    return true;
}

// Largest component of G_N against the branching limit rho(r) mu(dr).
inline VerificationReport verify_giant_lln(const Measure& mu, const Kernel& kappa, std::int64_t n,
                                           std::int64_t replicas, std::uint64_t seed, double tolerance = 0.01,
                                           int threads = 1) {
    if (replicas < 1) throw std::invalid_argument("verify_giant_lln: replicas >= 1");
    VerificationReport rep;
    rep.experiment = "giant-lln";
    rep.tolerance = tolerance;

    SurvivalResult sv = solve_survival(kappa, mu);
    Measure target(mu.size());
    for (std::size_t s = 0; s < mu.size(); ++s) target[s] = sv.rho[s] * mu[s];
    rep.theoretical = target.total();

    TypeConfig counts = type_counts_for(n, mu);
    std::vector<Measure> largest(static_cast<std::size_t>(replicas));
    run_replicas(replicas, threads, [&](std::int64_t i) {
        GraphSample g = sample_graph(n, counts, kappa, splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(i)));
        UnionFind uf(static_cast<std::size_t>(n));
        for (auto [a, b] : g.edges) uf.unite(a, b);
        std::int32_t best_root = 0;
        for (std::int32_t v = 0; v < g.n; ++v) {
            std::int32_t root = uf.find(v);
            if (uf.size[root] > uf.size[uf.find(best_root)]) best_root = root;
        }
        Measure m(mu.size());
        best_root = uf.find(best_root);
        for (std::int32_t v = 0; v < g.n; ++v)
            if (uf.find(v) == best_root) m[static_cast<std::size_t>(g.type_of[v])] += 1.0 / static_cast<double>(n);
        largest[static_cast<std::size_t>(i)] = m;
    });

    Measure mean(mu.size());
    for (const auto& m : largest)
        for (std::size_t s = 0; s < mu.size(); ++s) mean[s] += m[s] / static_cast<double>(replicas);
    double var = 0;
    for (const auto& m : largest) var += (m.total() - mean.total()) * (m.total() - mean.total());
    rep.empirical = mean.total();
    rep.uncertainty = replicas > 1 ? std::sqrt(var / static_cast<double>(replicas * (replicas - 1))) : 0.0;

    bool pass = true;
    for (std::size_t s = 0; s < mu.size(); ++s) {
        rep.details["empirical_" + std::to_string(s)] = mean[s];
        rep.details["theoretical_" + std::to_string(s)] = target[s];
        if (std::abs(mean[s] - target[s]) > tolerance) pass = false;
    }
    rep.pass = pass && std::abs(rep.empirical - rep.theoretical) <= tolerance;
    return rep;
}

// Empirical Mi_N window against lambda(mu) (subcritical) or lambda(c*).
inline VerificationReport verify_micro_lln(const Measure& mu, const Kernel& kappa, std::int64_t n,
                                           std::int64_t replicas, std::uint64_t seed, std::int64_t kmax,
                                           double tolerance = 0.01, double eps = 0.05, int threads = 1) {
    if (replicas < 1) throw std::invalid_argument("verify_micro_lln: replicas >= 1");
    VerificationReport rep;
    rep.experiment = "micro-lln";
    rep.tolerance = tolerance;

    FixedPointResult ch = solve_characteristic(kappa, mu);
    bool supercritical = ch.regime == Regime::supercritical;
    LambdaCResult ref = lambda_c(ch.solution, kappa, kmax);

    TypeConfig counts = type_counts_for(n, mu);
    std::vector<MicroMeasure> windows(static_cast<std::size_t>(replicas));
    run_replicas(replicas, threads, [&](std::int64_t i) {
        GraphSample g = sample_graph(n, counts, kappa, splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(i) + 101));
        ComponentStats st = component_stats(g, eps, mu.size());
        MicroMeasure window;
        for (const auto& [k, w] : st.micro.weights) {
            if (k.total() > kmax) continue;
            // components above eps*N belong to Ma_N in the supercritical comparison
            if (supercritical && static_cast<double>(k.total()) > eps * static_cast<double>(n)) continue;
            window.add(k, w);
        }
        windows[static_cast<std::size_t>(i)] = std::move(window);
    });

    MicroMeasure mean;
    for (const auto& w : windows)
        for (const auto& [k, v] : w.weights) mean.add(k, v / static_cast<double>(replicas));

    double tv = 0;
    std::vector<TypeConfig> keys;
    for (const auto& [k, v] : mean.weights) keys.push_back(k);
    for (const auto& [k, v] : ref.lambda.weights)
        if (mean.at(k) == 0) keys.push_back(k);
    for (const auto& k : keys) tv += std::abs(mean.at(k) - ref.lambda.at(k));
    tv *= 0.5;

    rep.theoretical = 0.0;
    rep.empirical = tv;
    rep.uncertainty = 0;
    rep.pass = tv < tolerance;
    rep.details["tv_window"] = tv;
    for (std::size_t s = 0; s < mu.size(); ++s) {
        TypeConfig unit = TypeConfig::unit(mu.size(), s);
        rep.details["singleton_empirical_" + std::to_string(s)] = mean.at(unit);
        rep.details["singleton_theoretical_" + std::to_string(s)] = ref.lambda.at(unit);
    }
    return rep;
}

namespace detail {

struct SlopeData {
    double slope;
    double slope_se;
    std::vector<double> log_p;
};

// weighted fit of log p_hat against N; weights from binomial variance
inline SlopeData fit_log_slope(const std::vector<std::int64_t>& n_grid, const std::vector<double>& p_hat,
                               std::int64_t samples) {
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (p_hat[i] <= 0) throw std::runtime_error("fit_log_slope: zero successes; widen samples or shrink N");
        x.push_back(static_cast<double>(n_grid[i]));
        y.push_back(std::log(p_hat[i]));
        w.push_back(p_hat[i] * static_cast<double>(samples) / std::max(1e-12, 1.0 - p_hat[i]));
    }
    LineFit fit = weighted_line_fit(x, y, w);
    double sw = 0, sx = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sxx += w[i] * x[i] * x[i];
    }
    double denom = sw * sxx - sx * sx;
    SlopeData out{fit.slope, std::sqrt(sw / denom), y};
    return out;
}

}  // namespace detail

// Slope of log P(G_N connected) against <mu, log(1 - e^{-kappa mu})>.
inline VerificationReport verify_connectivity_rate(const Measure& mu, const Kernel& kappa,
                                                   const std::vector<std::int64_t>& n_grid,
                                                   std::int64_t samples, std::uint64_t seed,
                                                   double rel_tolerance = 0.15, int threads = 1) {
    VerificationReport rep;
    rep.experiment = "connectivity-rate";
    rep.theoretical = macro_rate(mu, kappa);
    rep.tolerance = rel_tolerance;
    if (rep.theoretical == -kInf) {
        // types isolated under kappa: empirical P is 0 for N >= 2 in that type
        rep.empirical = -kInf;
        rep.pass = true;
        return rep;
    }

    std::vector<double> p_hat(n_grid.size(), 0.0);
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        std::int64_t n = n_grid[gi];
        TypeConfig counts = type_counts_for(n, mu);
        std::atomic<std::int64_t> total_hits{0};
        run_replicas(samples, threads, [&](std::int64_t i) {
            GraphSample g = sample_graph(n, counts, kappa,
                                         splitmix64(seed + 7 * gi) ^ splitmix64(static_cast<std::uint64_t>(i)));
            if (is_connected(g)) total_hits.fetch_add(1);
        });
        p_hat[gi] = static_cast<double>(total_hits.load()) / static_cast<double>(samples);
    }
    detail::SlopeData fit = detail::fit_log_slope(n_grid, p_hat, samples);
    rep.empirical = fit.slope;
    rep.uncertainty = fit.slope_se;
    rep.pass = std::abs(fit.slope - rep.theoretical) <= rel_tolerance * std::abs(rep.theoretical);
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        rep.details["p_hat_N" + std::to_string(n_grid[gi])] = p_hat[gi];
    }
    return rep;
}

// Slope of log p_N(floor(N y) + 1) against the macroscopic connection rate.
inline VerificationReport verify_macro_connection(const Measure& y, const Kernel& kappa,
                                                  const std::vector<std::int64_t>& n_grid,
                                                  std::int64_t samples, std::uint64_t seed,
                                                  double rel_tolerance = 0.20, int threads = 1) {
    VerificationReport rep;
    rep.experiment = "macro-connection";
    rep.theoretical = macro_rate(y, kappa);
    rep.tolerance = rel_tolerance;

    TauTable table(kappa);
    std::vector<double> p_hat(n_grid.size(), 0.0);
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        std::int64_t n = n_grid[gi];
        TypeConfig k(y.size());
        for (std::size_t s = 0; s < y.size(); ++s)
            k[s] = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * y[s])) + 1;
        if (table.log_tau(k) == -kInf)
            throw std::invalid_argument("verify_macro_connection: floor(Ny)+1 is not connectable");
        std::atomic<std::int64_t> total_hits{0};
        run_replicas(samples, threads, [&](std::int64_t i) {
            GraphSample g = sample_typed_graph(k, kappa, n,
                                               splitmix64(seed + 13 * gi) ^ splitmix64(static_cast<std::uint64_t>(i)));
            if (is_connected(g)) total_hits.fetch_add(1);
        });
        p_hat[gi] = static_cast<double>(total_hits.load()) / static_cast<double>(samples);
    }
    detail::SlopeData fit = detail::fit_log_slope(n_grid, p_hat, samples);
    rep.empirical = fit.slope;
    rep.uncertainty = fit.slope_se;
    rep.pass = std::abs(fit.slope - rep.theoretical) <= rel_tolerance * std::abs(rep.theoretical);
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi)
        rep.details["p_hat_N" + std::to_string(n_grid[gi])] = p_hat[gi];
    return rep;
}

}  // namespace irg
