#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "numeric.hpp"
#include "types.hpp"

namespace irg {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;

    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
    }

    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];  // path halving
            x = parent[x];
        }
        return x;
    }

    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

struct GraphSample {
    std::int64_t n = 0;
    std::vector<std::int32_t> type_of;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
};

enum class EdgeSampler { pair_loop, geometric_skip };

namespace detail {

inline double edge_probability(const Kernel& kappa_n, std::int64_t n, std::size_t r, std::size_t s) {
    return std::min(1.0, kappa_n(r, s) / static_cast<double>(n));
}

// number of failures before the first success at success probability p in (0,1)
inline std::int64_t geometric_skip(double p, std::mt19937_64& rng) {
    double u = uniform01(rng);
    return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

}  // namespace detail

// Graph on sum(type_counts) vertices with edge probability 1 ^ kappa_N/prob_scale_n;
// the vertex count and the probability scale N may differ (used for p_N(k) of
// subgraphs carved out of a larger graph).
inline GraphSample sample_typed_graph(const TypeConfig& type_counts, const Kernel& kappa_n,
                                      std::int64_t prob_scale_n, std::uint64_t seed,
                                      EdgeSampler sampler = EdgeSampler::geometric_skip) {
    type_counts.validate();
    if (kappa_n.n != type_counts.size()) throw std::invalid_argument("sample_typed_graph: dimension mismatch");
    if (prob_scale_n < 1) throw std::invalid_argument("sample_typed_graph: probability scale must be >= 1");
    const std::int64_t n = prob_scale_n;
    const std::int64_t n_vertices = type_counts.total();

    GraphSample g;
    g.n = n_vertices;
    g.type_of.reserve(static_cast<std::size_t>(n_vertices));
    for (std::size_t s = 0; s < type_counts.size(); ++s)
        for (std::int64_t i = 0; i < type_counts[s]; ++i) g.type_of.push_back(static_cast<std::int32_t>(s));

    auto rng = make_rng(seed);

    if (sampler == EdgeSampler::pair_loop) {
        for (std::int64_t i = 0; i < n_vertices; ++i)
            for (std::int64_t j = i + 1; j < n_vertices; ++j) {
                double p = detail::edge_probability(kappa_n, n, g.type_of[i], g.type_of[j]);
                if (uniform01(rng) <= p)
                    g.edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
            }
        return g;
    }

    // geometric-skip over each type-pair block, where the edge probability is constant
    std::vector<std::int64_t> base(type_counts.size() + 1, 0);
    for (std::size_t s = 0; s < type_counts.size(); ++s) base[s + 1] = base[s] + type_counts[s];

    for (std::size_t r = 0; r < type_counts.size(); ++r) {
        for (std::size_t s = r; s < type_counts.size(); ++s) {
            const std::int64_t cr = type_counts[r], cs = type_counts[s];
            const double p = detail::edge_probability(kappa_n, n, r, s);
            if (p == 0.0) continue;
            const std::int64_t m = (r == s) ? cr * (cr - 1) / 2 : cr * cs;
            std::int64_t idx = -1;
            std::int64_t row = 0, row_start = 0;  // unranking state for the same-type triangle
            while (true) {
                idx += 1 + (p >= 1.0 ? 0 : detail::geometric_skip(p, rng));
                if (idx >= m) break;
                std::int64_t a, b;
                if (r == s) {
                    while (idx - row_start >= cr - 1 - row) {
                        row_start += cr - 1 - row;
                        ++row;
                    }
                    a = row;
                    b = row + 1 + (idx - row_start);
                } else {
                    a = idx / cs;
                    b = idx % cs;
                }
                g.edges.emplace_back(static_cast<std::int32_t>(base[r] + a),
                                     static_cast<std::int32_t>(base[s] + b));
            }
        }
    }
    return g;
}

// G(N, x, kappa_N / N): every pair {i,j} carries an edge independently with
// probability 1 ^ kappa_N(x_i, x_j)/N.
inline GraphSample sample_graph(std::int64_t n, const TypeConfig& type_counts, const Kernel& kappa_n,
                                std::uint64_t seed, EdgeSampler sampler = EdgeSampler::geometric_skip) {
    if (n < 1) throw std::invalid_argument("sample_graph: N must be >= 1");
    if (type_counts.total() != n) throw std::invalid_argument("sample_graph: type counts must sum to N");
    return sample_typed_graph(type_counts, kappa_n, n, seed, sampler);
}

struct ComponentStats {
    std::vector<std::vector<std::int32_t>> components;
    MicroMeasure micro;   // Mi_N: weight (#components with config k)/N
    MacroMeasure macro;   // atoms y = k/N for components with |k| > eps*N
    Measure mu_n;         // empirical type measure
    Measure residual;     // mu_n minus the mass listed in macro (micro carries all of mu_n)
};

inline ComponentStats component_stats(const GraphSample& g, double eps, std::size_t n_types) {
    if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("component_stats: need 0 < eps <= 1");
    UnionFind uf(static_cast<std::size_t>(g.n));
    for (auto [a, b] : g.edges) uf.unite(a, b);

    std::unordered_map<std::int32_t, std::size_t> root_index;
    ComponentStats stats;
    for (std::int32_t v = 0; v < g.n; ++v) {
        std::int32_t root = uf.find(v);
        auto [it, inserted] = root_index.try_emplace(root, stats.components.size());
        if (inserted) stats.components.emplace_back();
        stats.components[it->second].push_back(v);
    }

    const double inv_n = 1.0 / static_cast<double>(g.n);
    stats.mu_n = Measure(n_types);
    for (std::int32_t t : g.type_of) stats.mu_n[static_cast<std::size_t>(t)] += inv_n;

    for (const auto& comp : stats.components) {
        TypeConfig k(n_types);
        for (std::int32_t v : comp) ++k[static_cast<std::size_t>(g.type_of[v])];
        stats.micro.add(k, inv_n);
        if (static_cast<double>(k.total()) > eps * static_cast<double>(g.n)) {
            Measure y(n_types);
            for (std::size_t s = 0; s < n_types; ++s) y[s] = static_cast<double>(k[s]) * inv_n;
            stats.macro.add(y);
        }
    }
    stats.residual = stats.mu_n;
    for (const auto& y : stats.macro.atoms)
        for (std::size_t s = 0; s < n_types; ++s) stats.residual[s] -= y[s];
    return stats;
}

// Exact P(G(|k|, x, kappa_N/N) is connected) by subset-complement recursion:
// P(conn on V) = 1 - sum over proper S containing v0 of P(conn on S) P(no S <-> V\S edges).
inline double connection_probability_exact(const TypeConfig& k, const Kernel& kappa_n, std::int64_t n) {
    const std::int64_t sz = k.total();
    if (sz == 0) return 0.0;
    if (sz > 10) throw std::invalid_argument("connection_probability_exact: |k| > 10 exceeds exact budget");
    auto x = expand_types(k);
    const std::size_t m = static_cast<std::size_t>(sz);
    if (m == 1) return 1.0;

    std::vector<double> q(m * m, 1.0);  // non-edge probabilities
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) q[i * m + j] = 1.0 - detail::edge_probability(kappa_n, n, x[i], x[j]);

    const std::size_t full = std::size_t{1} << m;
    // ne[S*m + j] = prod_{i in S} q_{ij}
    std::vector<double> ne(full * m, 1.0);
    for (std::size_t mask = 1; mask < full; ++mask) {
        std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
        std::size_t rest = mask & (mask - 1);
        for (std::size_t j = 0; j < m; ++j) ne[mask * m + j] = ne[rest * m + j] * q[low * m + j];
    }

    std::vector<double> conn(full, 0.0);
    for (std::size_t mask = 1; mask < full; ++mask) {
        if ((mask & 1u) == 0) continue;  // only masks containing vertex 0 are ever queried
        std::size_t anchor = std::size_t{1} << __builtin_ctzll(mask);
        double p = 1.0;
        for (std::size_t sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask) {
            if (!(sub & anchor)) continue;
            double cross = 1.0;
            for (std::size_t t = mask & ~sub; t; t &= t - 1)
                cross *= ne[sub * m + static_cast<std::size_t>(__builtin_ctzll(t))];
            p -= conn[sub] * cross;
        }
        conn[mask] = p;
    }
    // recursion anchored at vertex 0 only ever queries masks containing bit 0
    return conn[full - 1];
}

// Brute force over all 2^(n(n-1)/2) edge subsets; cross-check for |k| <= 5.
inline double connection_probability_brute(const TypeConfig& k, const Kernel& kappa_n, std::int64_t n) {
    const std::int64_t sz = k.total();
    if (sz == 0) return 0.0;
    if (sz > 5) throw std::invalid_argument("connection_probability_brute: |k| > 5");
    auto x = expand_types(k);
    const std::size_t m = static_cast<std::size_t>(sz);
    if (m == 1) return 1.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> pe;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            pairs.emplace_back(i, j);
            pe.push_back(detail::edge_probability(kappa_n, n, x[i], x[j]));
        }
    double total = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
        double prob = 1;
        UnionFind uf(m);
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            if (mask & (std::size_t{1} << e)) {
                prob *= pe[e];
                uf.unite(static_cast<std::int32_t>(pairs[e].first), static_cast<std::int32_t>(pairs[e].second));
            } else {
                prob *= 1.0 - pe[e];
            }
        }
        if (prob == 0) continue;
        bool connected = true;
        for (std::size_t v = 1; v < m; ++v)
            if (uf.find(static_cast<std::int32_t>(v)) != uf.find(0)) {
                connected = false;
                break;
            }
        if (connected) total += prob;
    }
    return total;
}

struct McEstimate {
    double estimate;
    double std_error;
};

inline McEstimate connection_probability_mc(const TypeConfig& k, const Kernel& kappa_n, std::int64_t n,
                                            std::int64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("connection_probability_mc: samples >= 1 required");
    const std::int64_t sz = k.total();
    if (sz == 0) return {0.0, 0.0};
    auto x = expand_types(k);
    const std::size_t m = static_cast<std::size_t>(sz);
    auto rng = make_rng(seed);
    std::int64_t hits = 0;
    for (std::int64_t it = 0; it < samples; ++it) {
        UnionFind uf(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                double p = detail::edge_probability(kappa_n, n, x[i], x[j]);
                if (p > 0 && uniform01(rng) <= p)
                    uf.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
            }
        bool connected = true;
        for (std::size_t v = 1; v < m; ++v)
            if (uf.find(static_cast<std::int32_t>(v)) != uf.find(0)) {
                connected = false;
                break;
            }
        hits += connected;
    }
    double est = static_cast<double>(hits) / static_cast<double>(samples);
    double se = std::sqrt(std::max(0.0, est * (1.0 - est) / static_cast<double>(samples)));
    return {est, se};
}

// Cluster profile: the integer-valued measure ell with multiplicity per config.
struct ClusterProfile {
    std::vector<std::pair<TypeConfig, std::int64_t>> parts;  // sorted by config

    bool operator==(const ClusterProfile& o) const { return parts == o.parts; }
    bool operator<(const ClusterProfile& o) const { return parts < o.parts; }

    std::string to_string() const {
        std::string out;
        for (const auto& [k, mult] : parts) {
            if (!out.empty()) out += ";";
            for (std::size_t s = 0; s < k.size(); ++s) {
                if (s) out += ",";
                out += std::to_string(k[s]);
            }
            out += ":" + std::to_string(mult);
        }
        return out;
    }
};

namespace detail {

inline void enumerate_profiles(const std::vector<TypeConfig>& configs, std::size_t idx, TypeConfig& remaining,
                               std::vector<std::pair<TypeConfig, std::int64_t>>& acc,
                               std::vector<ClusterProfile>& out) {
    if (remaining.total() == 0) {
        ClusterProfile p;
        p.parts = acc;
        std::sort(p.parts.begin(), p.parts.end());
        out.push_back(std::move(p));
        return;
    }
    if (idx == configs.size()) return;
    const TypeConfig& c = configs[idx];
    std::int64_t max_mult = remaining.total();  // refined below
    for (std::size_t s = 0; s < c.size(); ++s)
        if (c[s] > 0) max_mult = std::min(max_mult, remaining[s] / c[s]);
    for (std::int64_t mult = max_mult; mult >= 0; --mult) {
        for (std::size_t s = 0; s < c.size(); ++s) remaining[s] -= mult * c[s];
        if (mult > 0) acc.emplace_back(c, mult);
        enumerate_profiles(configs, idx + 1, remaining, acc, out);
        if (mult > 0) acc.pop_back();
        for (std::size_t s = 0; s < c.size(); ++s) remaining[s] += mult * c[s];
    }
}

}  // namespace detail

// Exact law of N*Mi_N: P(N Mi_N = ell) = (prod_r (N mu_r)!) prod_k zeta(ell, k),
//   zeta(ell,k) = p_N(k)^ell_k / (ell_k! prod_r (k_r!)^ell_k)
//                 * prod_{r,s} (1 - kappa_N(r,s)/N)^(ell_k k_r (N mu_s - k_s)/2).
inline std::vector<std::pair<ClusterProfile, double>> exact_micro_distribution(std::int64_t n,
                                                                               const TypeConfig& type_counts,
                                                                               const Kernel& kappa_n) {
    if (type_counts.total() != n) throw std::invalid_argument("exact_micro_distribution: counts must sum to N");
    for (std::size_t r = 0; r < kappa_n.n; ++r)
        for (std::size_t s = 0; s < kappa_n.n; ++s)
            if (kappa_n(r, s) > static_cast<double>(n))
                throw std::invalid_argument("exact_micro_distribution: requires kappa_N <= N");

    const std::size_t n_types = type_counts.size();
    std::vector<TypeConfig> configs;  // all nonzero k <= type_counts, lexicographic
    TypeConfig cur(n_types);
    while (true) {
        std::size_t pos = 0;
        while (pos < n_types && ++cur[pos] > type_counts[pos]) cur[pos++] = 0;
        if (pos == n_types) break;
        configs.push_back(cur);
    }
    std::sort(configs.begin(), configs.end());

    std::unordered_map<TypeConfig, double, TypeConfigHash> p_conn;
    for (const auto& k : configs) p_conn.emplace(k, connection_probability_exact(k, kappa_n, n));

    std::vector<ClusterProfile> profiles;
    TypeConfig remaining = type_counts;
    std::vector<std::pair<TypeConfig, std::int64_t>> acc;
    detail::enumerate_profiles(configs, 0, remaining, acc, profiles);

    double log_labelings = 0;
    for (std::size_t r = 0; r < n_types; ++r) log_labelings += log_factorial(type_counts[r]);

    std::vector<std::pair<ClusterProfile, double>> out;
    out.reserve(profiles.size());
    for (const auto& prof : profiles) {
        double log_p = log_labelings;
        bool zero = false;
        for (const auto& [k, mult] : prof.parts) {
            double pk = p_conn.at(k);
            if (pk == 0) {
                zero = true;
                break;
            }
            log_p += static_cast<double>(mult) * std::log(pk) - log_factorial(mult);
            double iso_exp = 0;  // sum_{r,s} k_r (N mu_s - k_s) / 2
            for (std::size_t r = 0; r < n_types; ++r) {
                log_p -= static_cast<double>(mult) * log_factorial(k[r]);
                for (std::size_t s = 0; s < n_types; ++s) {
                    double no_edge = 1.0 - kappa_n(r, s) / static_cast<double>(n);
                    double e = 0.5 * static_cast<double>(k[r]) * static_cast<double>(type_counts[s] - k[s]) *
                               static_cast<double>(mult);
                    if (e == 0) continue;
                    if (no_edge == 0) {
                        zero = true;
                        break;
                    }
                    iso_exp += e * std::log(no_edge);
                }
                if (zero) break;
            }
            if (zero) break;
            log_p += iso_exp;
        }
        out.emplace_back(prof, zero ? 0.0 : std::exp(log_p));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace irg
