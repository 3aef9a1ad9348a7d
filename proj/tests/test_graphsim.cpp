#include <catch2/catch_amalgamated.hpp>

#include <map>

#include <irg/graphsim.hpp>
#include <irg/measures.hpp>
#include <irg/trees.hpp>

#include "profile_oracle.hpp"

using namespace irg;

namespace {

Kernel random_symmetric_kernel(std::size_t n, std::mt19937_64& rng, double lo = 0.3, double hi = 3.0) {
    Kernel k(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r; s < n; ++s) k(r, s) = k(s, r) = lo + (hi - lo) * uniform01(rng);
    return k;
}

}  // namespace

TEST_CASE("sample_graph edge cases") {
    TypeConfig counts{3, 2};
    Kernel zero(2);
    for (auto sampler : {EdgeSampler::pair_loop, EdgeSampler::geometric_skip}) {
        GraphSample g = sample_graph(5, counts, zero, 1, sampler);
        CHECK(g.edges.empty());
        CHECK(g.n == 5);
    }

    Kernel huge{{10.0, 10.0}, {10.0, 10.0}};  // kappa >= N: every pair present
    for (auto sampler : {EdgeSampler::pair_loop, EdgeSampler::geometric_skip}) {
        GraphSample g = sample_graph(5, counts, huge, 2, sampler);
        CHECK(g.edges.size() == 10);
    }

    CHECK_THROWS_AS(sample_graph(0, TypeConfig{0}, Kernel{{1.0}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_graph(4, TypeConfig{3}, Kernel{{1.0}}, 1), std::invalid_argument);
}

TEST_CASE("edge count matches the binomial mean at large N") {
    const std::int64_t n = 100000;
    Kernel k{{2.0}};
    GraphSample g = sample_graph(n, TypeConfig{n}, k, 7);
    // Binomial(N(N-1)/2, 2/N): mean N-1, sd ~ sqrt(N)
    double mean = static_cast<double>(n - 1);
    double sd = std::sqrt(static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(g.edges.size()) - mean) < 3.5 * sd);
}

TEST_CASE("pair-loop and skip samplers draw from the same distribution") {
    const std::int64_t n = 60;
    TypeConfig counts{40, 20};
    auto rng = make_rng(4711);
    Kernel k = random_symmetric_kernel(2, rng, 0.5, 4.0);
    const int reps = 3000;
    double mean_pair = 0, mean_skip = 0, cross_pair = 0, cross_skip = 0;
    for (int i = 0; i < reps; ++i) {
        GraphSample a = sample_graph(n, counts, k, 1000 + i, EdgeSampler::pair_loop);
        GraphSample b = sample_graph(n, counts, k, 5000 + i, EdgeSampler::geometric_skip);
        mean_pair += static_cast<double>(a.edges.size()) / reps;
        mean_skip += static_cast<double>(b.edges.size()) / reps;
        auto count_cross = [&](const GraphSample& g) {
            int c = 0;
            for (auto [u, v] : g.edges) c += g.type_of[u] != g.type_of[v];
            return c;
        };
        cross_pair += static_cast<double>(count_cross(a)) / reps;
        cross_skip += static_cast<double>(count_cross(b)) / reps;
    }
    // expected totals per block
    double p00 = std::min(1.0, k(0, 0) / n), p01 = std::min(1.0, k(0, 1) / n),
           p11 = std::min(1.0, k(1, 1) / n);
    double expect_total = p00 * (40 * 39 / 2) + p01 * (40 * 20) + p11 * (20 * 19 / 2);
    double expect_cross = p01 * (40 * 20);
    double sd_total = std::sqrt(expect_total / reps) * 4.5;
    double sd_cross = std::sqrt(expect_cross / reps) * 4.5;
    CHECK(std::abs(mean_pair - expect_total) < sd_total);
    CHECK(std::abs(mean_skip - expect_total) < sd_total);
    CHECK(std::abs(cross_pair - expect_cross) < sd_cross);
    CHECK(std::abs(cross_skip - expect_cross) < sd_cross);
}

TEST_CASE("component stats") {
    SECTION("empty graph on three singletons") {
        GraphSample g;
        g.n = 3;
        g.type_of = {0, 0, 0};
        ComponentStats st = component_stats(g, 0.5, 1);
        CHECK(st.micro.at(TypeConfig{1}) == Catch::Approx(1.0));
        CHECK(st.components.size() == 3);
    }
    SECTION("connected graph on three vertices") {
        GraphSample g;
        g.n = 3;
        g.type_of = {0, 0, 0};
        g.edges = {{0, 1}, {1, 2}};
        ComponentStats st = component_stats(g, 0.5, 1);
        CHECK(st.micro.at(TypeConfig{3}) == Catch::Approx(1.0 / 3.0));
        CHECK(st.macro.atoms.size() == 1);  // 3 > 0.5 * 3
        CHECK(st.macro.atoms[0][0] == Catch::Approx(1.0));
    }
    SECTION("c(Mi_N) = mu_N exactly and components partition [N]") {
        auto rng = make_rng(9);
        Kernel k = random_symmetric_kernel(2, rng, 0.2, 5.0);
        TypeConfig counts{37, 63};
        GraphSample g = sample_graph(100, counts, k, 31);
        ComponentStats st = component_stats(g, 0.05, 2);
        Measure c = integrated_config(st.micro, 2);
        CHECK(c[0] == Catch::Approx(st.mu_n[0]).margin(1e-14));
        CHECK(c[1] == Catch::Approx(st.mu_n[1]).margin(1e-14));
        std::size_t total = 0;
        for (const auto& comp : st.components) total += comp.size();
        CHECK(total == 100);
        // macro atoms plus residual give back mu_N
        Measure back = st.residual;
        for (const auto& y : st.macro.atoms) back = back + y;
        CHECK(back[0] == Catch::Approx(st.mu_n[0]).margin(1e-14));
        CHECK(back[1] == Catch::Approx(st.mu_n[1]).margin(1e-14));
    }
    SECTION("epsilon must be a fraction") {
        GraphSample g;
        g.n = 1;
        g.type_of = {0};
        CHECK_THROWS_AS(component_stats(g, 0.0, 1), std::invalid_argument);
    }
}

TEST_CASE("exact connection probabilities") {
    SECTION("pair") {
        Kernel k{{0.0, 1.4}, {1.4, 0.0}};
        CHECK(connection_probability_exact(TypeConfig{1, 1}, k, 10) == Catch::Approx(0.14));
    }
    SECTION("triangle, single type") {
        Kernel k{{1.0}};
        double p = 0.1;
        CHECK(connection_probability_exact(TypeConfig{3}, k, 10) ==
              Catch::Approx(3 * p * p - 2 * p * p * p));  // 0.028
    }
    SECTION("degenerate sizes") {
        Kernel k{{1.0}};
        CHECK(connection_probability_exact(TypeConfig{0}, k, 10) == 0.0);
        CHECK(connection_probability_exact(TypeConfig{1}, k, 10) == 1.0);
        CHECK_THROWS_AS(connection_probability_exact(TypeConfig{11}, k, 100), std::invalid_argument);
    }
    SECTION("agrees with the brute-force oracle") {
        auto rng = make_rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            Kernel k = random_symmetric_kernel(2, rng, 0.2, 6.0);
            TypeConfig cfg{static_cast<std::int64_t>(rng() % 4), static_cast<std::int64_t>(rng() % 3)};
            if (cfg.total() == 0 || cfg.total() > 5) continue;
            double exact = connection_probability_exact(cfg, k, 10);
            double brute = connection_probability_brute(cfg, k, 10);
            CHECK(exact == Catch::Approx(brute).margin(1e-12));
        }
    }
    SECTION("sandwich against N^(1-|k|) tau_N(k)") {
        auto rng = make_rng(23);
        Kernel k = random_symmetric_kernel(2, rng, 0.5, 3.0);
        for (std::int64_t n : {10, 50, 200}) {
            for (std::int64_t a = 0; a <= 4; ++a)
                for (std::int64_t b = 0; b <= 4 - a; ++b) {
                    TypeConfig cfg{a, b};
                    if (cfg.total() < 1) continue;
                    double p = connection_probability_exact(cfg, k, n);
                    double tau = tau_enumerate(cfg, k).value;
                    double scale = std::pow(static_cast<double>(n), 1.0 - cfg.total()) * tau;
                    double lower = std::pow(1.0 - k.max_entry() / n,
                                            static_cast<double>(cfg.total() * cfg.total()) / 2.0);
                    CHECK(p <= scale * (1 + 1e-12));
                    CHECK(p >= scale * lower * (1 - 1e-12));
                }
        }
    }
}

TEST_CASE("gilbert expansion sums to one") {
    auto rng = make_rng(29);
    Kernel k = random_symmetric_kernel(2, rng, 0.5, 3.0);
    const std::int64_t n = 25;
    for (std::int64_t a = 1; a <= 4; ++a)
        for (std::int64_t b = 0; b <= 2; ++b) {
            TypeConfig m{a, b};
            if (m.total() > 6) continue;
            for (std::size_t r = 0; r < 2; ++r) {  // marked type with m_r >= 1
                if (m[r] < 1) continue;
                double total = 0;
                TypeConfig h(2);
                for (h[0] = (r == 0 ? 1 : 0); h[0] <= m[0]; ++h[0])
                    for (h[1] = (r == 1 ? 1 : 0); h[1] <= m[1]; ++h[1]) {
                        double choose = 1;
                        for (std::size_t s = 0; s < 2; ++s) {
                            std::int64_t msd = m[s] - (s == r ? 1 : 0);
                            std::int64_t hsd = h[s] - (s == r ? 1 : 0);
                            choose *= factorial(msd) / (factorial(hsd) * factorial(msd - hsd));
                        }
                        double no_edge = 1;
                        for (std::size_t s = 0; s < 2; ++s)
                            for (std::size_t t = 0; t < 2; ++t)
                                no_edge *= std::pow(1.0 - k(s, t) / n,
                                                    static_cast<double>(h[s] * (m[t] - h[t])));
                        total += choose * connection_probability_exact(h, k, n) * no_edge;
                    }
                CHECK(total == Catch::Approx(1.0).margin(1e-12));
            }
        }
}

TEST_CASE("monotone comparison bound") {
    auto rng = make_rng(37);
    Kernel k = random_symmetric_kernel(2, rng, 0.5, 3.0);
    const std::int64_t n = 30;
    for (std::int64_t a = 1; a <= 3; ++a)
        for (std::int64_t b = 0; b <= 3; ++b) {
            TypeConfig h{a, b};
            if (h.total() > 6) continue;
            TypeConfig hp(2);
            for (hp[0] = 0; hp[0] <= h[0]; ++hp[0])
                for (hp[1] = 0; hp[1] <= h[1]; ++hp[1]) {
                    if (hp.total() < 1) continue;
                    double lhs = connection_probability_exact(hp, k, n);
                    double rhs = connection_probability_exact(h, k, n);
                    Measure khp(2);
                    for (std::size_t s = 0; s < 2; ++s)
                        for (std::size_t t = 0; t < 2; ++t)
                            khp[s] += k(s, t) * static_cast<double>(hp[t]);
                    for (std::size_t s = 0; s < 2; ++s)
                        rhs *= std::pow(-std::expm1(-khp[s] / n),
                                        -static_cast<double>(h[s] - hp[s]));
                    CHECK(lhs <= rhs * (1 + 1e-9));
                }
        }
}

TEST_CASE("monte carlo connection probability") {
    Kernel k{{1.5}};
    SECTION("single vertex always connected") {
        auto est = connection_probability_mc(TypeConfig{1}, k, 10, 100, 5);
        CHECK(est.estimate == 1.0);
    }
    SECTION("no edges, no connection") {
        Kernel zero(1);
        auto est = connection_probability_mc(TypeConfig{3}, zero, 10, 100, 5);
        CHECK(est.estimate == 0.0);
    }
    SECTION("agrees with the exact value") {
        auto rng = make_rng(41);
        for (int trial = 0; trial < 5; ++trial) {
            Kernel kk = random_symmetric_kernel(2, rng, 1.0, 4.0);
            TypeConfig cfg{3, 2};
            double exact = connection_probability_exact(cfg, kk, 12);
            auto est = connection_probability_mc(cfg, kk, 12, 20000, 1000 + trial);
            CHECK(std::abs(est.estimate - exact) <= 4.0 * std::max(est.std_error, 1e-4));
        }
    }
}

TEST_CASE("exact micro distribution") {
    SECTION("N = 2, single type") {
        double kappa_val = 0.8;
        Kernel k{{kappa_val}};
        double p = kappa_val / 2.0;
        auto dist = exact_micro_distribution(2, TypeConfig{2}, k);
        REQUIRE(dist.size() == 2);
        for (const auto& [prof, prob] : dist) {
            if (prof.parts.front().first == TypeConfig{1})
                CHECK(prob == Catch::Approx(1 - p));
            else
                CHECK(prob == Catch::Approx(p));
        }
    }
    SECTION("N = 3 singletons have probability (1-p)^3") {
        double kappa_val = 1.2;
        Kernel k{{kappa_val}};
        double p = kappa_val / 3.0;
        auto dist = exact_micro_distribution(3, TypeConfig{3}, k);
        for (const auto& [prof, prob] : dist)
            if (prof.parts.size() == 1 && prof.parts.front().first == TypeConfig{1} &&
                prof.parts.front().second == 3)
                CHECK(prob == Catch::Approx(std::pow(1 - p, 3.0)));
    }
    SECTION("sums to one and matches exhaustive enumeration") {
        auto rng = make_rng(53);
        for (int trial = 0; trial < 4; ++trial) {
            Kernel k = random_symmetric_kernel(2, rng, 0.4, 3.5);
            TypeConfig counts{2, 2};
            auto dist = exact_micro_distribution(4, counts, k);
            double total = 0;
            for (const auto& [prof, prob] : dist) total += prob;
            CHECK(total == Catch::Approx(1.0).margin(1e-12));

            auto oracle = irg_test::brute_force_profile_law(4, counts, k);
            double tv = 0;
            for (const auto& [prof, prob] : dist) {
                auto it = oracle.find(prof);
                double ref = it == oracle.end() ? 0.0 : it->second;
                tv += std::abs(prob - ref);
            }
            CHECK(tv / 2 <= 1e-12);
        }
    }
    SECTION("kappa above N is rejected") {
        Kernel k{{9.0}};
        CHECK_THROWS_AS(exact_micro_distribution(4, TypeConfig{4}, k), std::invalid_argument);
    }
    SECTION("N = 5 cross-checks, single type and mixed counts") {
        auto rng = make_rng(59);
        for (const TypeConfig& counts : {TypeConfig{5, 0}, TypeConfig{3, 2}}) {
            Kernel k = random_symmetric_kernel(2, rng, 0.4, 4.0);
            auto dist = exact_micro_distribution(5, counts, k);
            auto oracle = irg_test::brute_force_profile_law(5, counts, k);
            double total = 0, tv = 0;
            for (const auto& [prof, prob] : dist) {
                total += prob;
                auto it = oracle.find(prof);
                tv += std::abs(prob - (it == oracle.end() ? 0.0 : it->second));
            }
            CHECK(total == Catch::Approx(1.0).margin(1e-12));
            CHECK(tv / 2 <= 1e-12);
        }
    }
}
