#include <catch2/catch_amalgamated.hpp>

#include <irg/model_io.hpp>

using namespace irg;
using nlohmann::json;

namespace {

json valid_model() {
    return json{{"schema", 1},
                {"types", {"a", "b"}},
                {"mu", {0.5, 0.5}},
                {"kappa", {{1.0, 2.0}, {2.0, 0.5}}}};
}

}  // namespace

TEST_CASE("model parsing") {
    SECTION("valid model round-trips") {
        ModelConfig m = parse_model(valid_model());
        CHECK(m.types.size() == 2);
        CHECK(m.mu[0] == 0.5);
        CHECK(m.kappa(0, 1) == 2.0);
        CHECK(&m.effective_kappa_n() == &m.kappa);
    }
    SECTION("kappa_N override") {
        json j = valid_model();
        j["kappa_N"] = {{1.5, 2.0}, {2.0, 0.5}};
        ModelConfig m = parse_model(j);
        CHECK(m.effective_kappa_n()(0, 0) == 1.5);
    }
    SECTION("asymmetric kappa rejected") {
        json j = valid_model();
        j["kappa"] = {{1.0, 2.0}, {2.5, 0.5}};
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("negative kappa entry rejected") {
        json j = valid_model();
        j["kappa"] = {{1.0, -2.0}, {-2.0, 0.5}};
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("mu must sum to one") {
        json j = valid_model();
        j["mu"] = {0.5, 0.6};
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("ambiguous tiny mu entry rejected") {
        json j = valid_model();
        j["mu"] = {1e-16, 1.0};
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("exact zero mu entry allowed") {
        json j = valid_model();
        j["mu"] = {0.0, 1.0};
        CHECK_NOTHROW(parse_model(j));
    }
    SECTION("duplicate labels rejected") {
        json j = valid_model();
        j["types"] = {"a", "a"};
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("unsupported schema rejected") {
        json j = valid_model();
        j["schema"] = 2;
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("missing keys rejected") {
        json j = valid_model();
        j.erase("kappa");
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
    SECTION("ragged kappa rejected") {
        json j = valid_model();
        j["kappa"] = {{1.0, 2.0}, {2.0}};
        CHECK_THROWS_AS(parse_model(j), std::invalid_argument);
    }
}
