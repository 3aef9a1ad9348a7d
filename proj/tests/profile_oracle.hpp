#pragma once

// Test-only oracle: exact law of the cluster profile of G(N, x, kappa_N/N),
// independent of the production formula, by enumerating every graph on the
// (small) vertex set and accumulating its probability.

#include <map>

#include <irg/graphsim.hpp>

namespace irg_test {

inline std::map<irg::ClusterProfile, double> brute_force_profile_law(std::int64_t n,
                                                                     const irg::TypeConfig& counts,
                                                                     const irg::Kernel& kappa_n) {
    auto x = irg::expand_types(counts);
    const std::size_t m = static_cast<std::size_t>(n);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> pe;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            pairs.emplace_back(i, j);
            pe.push_back(std::min(1.0, kappa_n(x[i], x[j]) / static_cast<double>(n)));
        }
    std::map<irg::ClusterProfile, double> law;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
        double prob = 1;
        irg::UnionFind uf(m);
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            if (mask & (std::size_t{1} << e)) {
                prob *= pe[e];
                uf.unite(static_cast<std::int32_t>(pairs[e].first),
                         static_cast<std::int32_t>(pairs[e].second));
            } else {
                prob *= 1.0 - pe[e];
            }
        }
        if (prob == 0) continue;
        std::map<std::int32_t, irg::TypeConfig> comps;
        for (std::size_t v = 0; v < m; ++v) {
            auto [it, fresh] =
                comps.try_emplace(uf.find(static_cast<std::int32_t>(v)), irg::TypeConfig(counts.size()));
            ++it->second[x[v]];
        }
        irg::ClusterProfile prof;
        std::map<irg::TypeConfig, std::int64_t> mult;
        for (auto& [root, cfg] : comps) ++mult[cfg];
        for (auto& [cfg, c] : mult) prof.parts.emplace_back(cfg, c);
        law[prof] += prob;
    }
    return law;
}

}  // namespace irg_test
