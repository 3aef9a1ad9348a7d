#include <catch2/catch_amalgamated.hpp>

#include <irg/measures.hpp>
#include <irg/numeric.hpp>
#include <irg/trees.hpp>

using namespace irg;

namespace {

Kernel random_symmetric_kernel(std::size_t n, std::mt19937_64& rng, double lo = 0.3, double hi = 3.0) {
    Kernel k(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r; s < n; ++s) k(r, s) = k(s, r) = lo + (hi - lo) * uniform01(rng);
    return k;
}

}  // namespace

TEST_CASE("tau of the zero config is zero") {
    Kernel k{{1.0}};
    CHECK(tau_enumerate(TypeConfig{0}, k).value == 0.0);
    CHECK(tau_matrix_tree(TypeConfig{0}, k).value == 0.0);
}

TEST_CASE("tau of a singleton is one") {
    Kernel k{{0.0}};  // no edges needed for a single vertex
    CHECK(tau_enumerate(TypeConfig{1}, k).value == Catch::Approx(1.0));
    CHECK(tau_matrix_tree(TypeConfig{1}, k).value == Catch::Approx(1.0));
    CHECK(tau_closed_form(TypeConfig{1}, k, 0).value == Catch::Approx(1.0));
}

TEST_CASE("Cayley count for three unweighted vertices") {
    Kernel k{{1.0}};
    CHECK(tau_enumerate(TypeConfig{3}, k).value == Catch::Approx(3.0));
}

TEST_CASE("two-type worked example") {
    // k = 2 e_r + e_s with kappa(r,r)=1, kappa(r,s)=2: trees are
    // r-r-s (2), r-r-s via the other r (2), r-s-r (4), total 8
    Kernel k{{1.0, 2.0}, {2.0, 0.0}};
    TypeConfig cfg{2, 1};
    CHECK(tau_enumerate(cfg, k).value == Catch::Approx(8.0));
    CHECK(tau_matrix_tree(cfg, k).value == Catch::Approx(8.0));
    CHECK(tau_closed_form(cfg, k, 0).value == Catch::Approx(8.0));
    CHECK(tau_closed_form(cfg, k, 1).value == Catch::Approx(8.0));
}

TEST_CASE("delta_r directed-tree sums") {
    Kernel k{{1.0, 2.0}, {2.0, 0.0}};
    SECTION("single-type support") {
        CHECK(delta_r(TypeConfig{3, 0}, k, 0) == Catch::Approx(1.0));
    }
    SECTION("two-type support, one directed edge") {
        TypeConfig cfg{2, 1};
        CHECK(delta_r(cfg, k, 0) == Catch::Approx(k(0, 1) * 2.0));
        CHECK(delta_r(cfg, k, 1) == Catch::Approx(k(1, 0) * 1.0));
    }
    SECTION("root outside the support") {
        CHECK(delta_r(TypeConfig{2, 0}, k, 1) == 0.0);
    }
}

TEST_CASE("scalar Cayley closed form") {
    double a = 1.7;
    Kernel k{{a}};
    for (std::int64_t n = 1; n <= 7; ++n) {
        double expected = std::pow(a, static_cast<double>(n - 1)) *
                          std::pow(static_cast<double>(n), static_cast<double>(n - 2));
        CHECK(tau_closed_form(TypeConfig{n}, k, 0).value == Catch::Approx(expected).epsilon(1e-12));
        CHECK(tau_matrix_tree(TypeConfig{n}, k).value == Catch::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("matrix tree vanishes on disconnected support") {
    Kernel k{{1.0, 0.0}, {0.0, 1.0}};
    TypeConfig cfg{1, 1};
    CHECK(tau_matrix_tree(cfg, k).value == 0.0);
    CHECK(tau_enumerate(cfg, k).value == 0.0);
    CHECK(tau_closed_form(cfg, k, 0).value == 0.0);
}

TEST_CASE("method agreement on random two-type configs") {
    auto rng = make_rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        Kernel k = random_symmetric_kernel(2, rng);
        TypeConfig cfg{static_cast<std::int64_t>(rng() % 5), static_cast<std::int64_t>(rng() % 4)};
        if (cfg.total() == 0 || cfg.total() > 7) continue;
        double te = tau_enumerate(cfg, k).value;
        double tm = tau_matrix_tree(cfg, k).value;
        REQUIRE(te > 0);
        CHECK(std::abs(tm / te - 1.0) < 1e-9);
        for (std::size_t r : cfg.support()) {
            double tc = tau_closed_form(cfg, k, r).value;
            CHECK(std::abs(tc / te - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("homogeneity in the kernel") {
    auto rng = make_rng(5);
    Kernel k = random_symmetric_kernel(2, rng);
    TypeConfig cfg{3, 2};
    double base = tau_closed_form(cfg, k, 0).value;
    for (double t : {0.5, 2.0, 3.7}) {
        double scaled = tau_closed_form(cfg, t * k, 0).value;
        CHECK(scaled == Catch::Approx(std::pow(t, static_cast<double>(cfg.total() - 1)) * base).epsilon(1e-10));
    }
}

TEST_CASE("tau vanishes across irreducible classes") {
    Kernel k{{2.0, 0.0}, {0.0, 3.0}};
    CHECK(tau_closed_form(TypeConfig{2, 1}, k, 0).value == 0.0);
    CHECK(tau_matrix_tree(TypeConfig{2, 1}, k).value == 0.0);
}

TEST_CASE("permutation equivariance of tau") {
    auto rng = make_rng(11);
    Kernel k = random_symmetric_kernel(3, rng);
    TypeConfig cfg{2, 1, 3};
    std::vector<std::size_t> perm{2, 0, 1};
    Kernel kp(3);
    TypeConfig cfgp{0, 0, 0};
    for (std::size_t r = 0; r < 3; ++r) {
        cfgp[perm[r]] = cfg[r];
        for (std::size_t s = 0; s < 3; ++s) kp(perm[r], perm[s]) = k(r, s);
    }
    CHECK(tau_closed_form(cfgp, kp, perm[0]).value ==
          Catch::Approx(tau_closed_form(cfg, k, 0).value).epsilon(1e-12));
}

TEST_CASE("recursion identity") {
    SECTION("singleton has an empty split sum") {
        Kernel k{{1.0}};
        auto chk = check_recursion(TypeConfig{1}, k);
        CHECK(chk.lhs == 0.0);
        CHECK(chk.rhs == 0.0);
    }
    SECTION("pair splits into two singletons") {
        double a = 1.3;
        Kernel k{{a}};
        auto chk = check_recursion(TypeConfig{2}, k);
        CHECK(chk.lhs == Catch::Approx(2.0 * a));
        CHECK(chk.rhs == Catch::Approx(2.0 * a));
    }
    SECTION("random two-type configs") {
        auto rng = make_rng(77);
        for (int trial = 0; trial < 40; ++trial) {
            Kernel k = random_symmetric_kernel(2, rng);
            TypeConfig cfg{1 + static_cast<std::int64_t>(rng() % 3), static_cast<std::int64_t>(rng() % 4)};
            if (cfg.total() > 6) continue;
            auto chk = check_recursion(cfg, k);
            CHECK(chk.residual <= 1e-9 * std::max(1.0, chk.rhs));
        }
    }
}

TEST_CASE("directed identity") {
    SECTION("one edge") {
        Kernel k{{0.0, 1.7}, {1.7, 0.0}};
        auto chk = check_directed_identity(TypeConfig{1, 1}, k, 0);
        CHECK(chk.lhs == Catch::Approx(1.7));
        CHECK(chk.rhs == Catch::Approx(1.7));
    }
    SECTION("rooted labeled trees on three vertices") {
        Kernel k{{1.0}};
        auto chk = check_directed_identity(TypeConfig{3}, k, 0);
        CHECK(chk.rhs == Catch::Approx(9.0));  // n^(n-1)
        CHECK(chk.residual <= 1e-9 * std::max(1.0, chk.rhs));
    }
    SECTION("random mixed config") {
        auto rng = make_rng(31);
        Kernel k = random_symmetric_kernel(2, rng);
        TypeConfig cfg{3, 2};
        for (std::size_t r : cfg.support()) {
            auto chk = check_directed_identity(cfg, k, r);
            CHECK(chk.residual <= 1e-9 * std::max(1.0, chk.rhs));
        }
    }
}

TEST_CASE("budget guards") {
    Kernel k{{1.0}};
    CHECK_THROWS_AS(tau_enumerate(TypeConfig{10}, k), std::invalid_argument);
    CHECK_THROWS_AS(check_recursion(TypeConfig{9}, k), std::invalid_argument);
    CHECK_THROWS_AS(check_directed_identity(TypeConfig{8}, k, 0), std::invalid_argument);
}

TEST_CASE("log-domain agreement at sizes far beyond double range") {
    // values overflow double around |k| ~ 150; the log values must still agree
    SECTION("single type against the scalar closed form") {
        double a = 1.3;
        Kernel k{{a}};
        for (std::int64_t n : {60, 150, 200}) {
            double expect = static_cast<double>(n - 1) * std::log(a) +
                            static_cast<double>(n - 2) * std::log(static_cast<double>(n));
            CHECK(tau_matrix_tree(TypeConfig{n}, k).log_value ==
                  Catch::Approx(expect).epsilon(1e-11));
            CHECK(tau_closed_form(TypeConfig{n}, k, 0).log_value ==
                  Catch::Approx(expect).epsilon(1e-12));
        }
    }
    SECTION("two types: determinant route vs directed-tree closed form") {
        Kernel k{{0.9, 2.1}, {2.1, 0.4}};
        for (auto [a, b] : std::vector<std::pair<std::int64_t, std::int64_t>>{{70, 50}, {130, 10}}) {
            TypeConfig cfg{a, b};
            double mt = tau_matrix_tree(cfg, k).log_value;
            double cf = tau_closed_form(cfg, k, 0).log_value;
            CHECK(mt == Catch::Approx(cf).epsilon(1e-10));
        }
    }
}

TEST_CASE("tau table caches and matches direct evaluation") {
    auto rng = make_rng(99);
    Kernel k = random_symmetric_kernel(2, rng);
    TauTable table(k);
    TypeConfig cfg{2, 2};
    double via_table = table.tau(cfg);
    CHECK(via_table == Catch::Approx(tau_enumerate(cfg, k).value).epsilon(1e-10));
    CHECK(table.tau(cfg) == via_table);  // cached read
}
