#include <doctest.h>

#include <json.hpp>

#include "dirflow/generators.hpp"
#include "dirflow/spec_io.hpp"

using namespace dirflow;

TEST_CASE("spec json round trip") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        GeneratorConfig config;
        config.seed = seed;
        config.horizon = 2;
        config.partition = {"sp", "r", "q"};
        SystemSpec spec = random_system(config);

        nlohmann::json j = spec_to_json(spec);
        SystemSpec back = spec_from_json(j);
        CHECK(spec_to_json(back).dump() == j.dump());
        CHECK(validate(back).empty());
        CHECK(spec_hash(back) == spec_hash(spec));
    }
}

TEST_CASE("unknown fields are rejected at every level") {
    nlohmann::json j = spec_to_json(canned_example("xor-loop"));

    nlohmann::json top = j;
    top["comment"] = "oops";
    CHECK_THROWS_WITH_AS(spec_from_json(top), doctest::Contains("comment"), Error);

    nlohmann::json sig = j;
    sig["signals"]["w"] = {2, 2};
    CHECK_THROWS_AS(spec_from_json(sig), Error);

    nlohmann::json del = j;
    del["delays"]["s5"] = 1;
    CHECK_THROWS_AS(spec_from_json(del), Error);

    nlohmann::json exo = j;
    exo["exogenous"]["mode"] = "dense";
    CHECK_THROWS_AS(spec_from_json(exo), Error);
}

TEST_CASE("missing fields and malformed rows are reported") {
    nlohmann::json j = spec_to_json(canned_example("xor-loop"));

    nlohmann::json missing = j;
    missing.erase("blocks");
    CHECK_THROWS_WITH_AS(spec_from_json(missing), doctest::Contains("blocks"), Error);

    nlohmann::json bad_row = j;
    bad_row["blocks"]["s1"][0] = nlohmann::json::array({1, 2});
    CHECK_THROWS_AS(spec_from_json(bad_row), Error);

    nlohmann::json dup = j;
    dup["blocks"]["s1"].push_back(dup["blocks"]["s1"][0]);
    CHECK_THROWS_WITH_AS(spec_from_json(dup), doctest::Contains("duplicate"), Error);

    nlohmann::json bad_weights = j;
    bad_weights["exogenous"]["groups"][0] = nlohmann::json::array({1, 2, 3});
    CHECK_THROWS_AS(spec_from_json(bad_weights), Error);
}

TEST_CASE("constant delays may be written as a single integer") {
    nlohmann::json j = spec_to_json(canned_example("xor-loop"));
    j["delays"]["s1"] = 1;
    SystemSpec spec = spec_from_json(j);
    CHECK(spec.delays[0] == DelaySchedule::constant(1, 2));
}

TEST_CASE("weights accept decimal strings") {
    nlohmann::json j = spec_to_json(canned_example("xor-loop"));
    auto& weights = j["exogenous"]["groups"][0];
    weights[0] = "3";
    SystemSpec spec = spec_from_json(j);
    CHECK(validate(spec).empty());

    weights[0] = "3.5";
    CHECK_THROWS_AS(spec_from_json(j), Error);
}
