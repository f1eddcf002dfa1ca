#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gafill/config.hpp"
#include "gafill/errors.hpp"

using namespace gafill;

TEST_CASE("an empty config is the reference configuration") {
    auto config = parse_config("{}", "test");
    CHECK(config.variant == "ANNGA");
    CHECK(config.hidden_count == -1);
    CHECK(config.max_cycles == 1000);
    CHECK(config.patience == 50);
    CHECK(config.pca_k == -1);
    CHECK(config.ga_population == 50);
    CHECK(config.ga_generations == 50);
    CHECK(config.seed == 1);
    CHECK(config.train_fraction == 0.60);
    CHECK(config.validation_fraction == 0.15);
    CHECK(config.test_fraction == 0.25);
    CHECK(config.runs == 3);
    CHECK(config.records_per_run == 1000);
    CHECK(config.svr_subsample == 3000);
    REQUIRE(config.target_variables.size() == 5);
    CHECK(config.target_variables[0] == "HIV Status");
    CHECK(config.target_variables[4] == "Parity");
    CHECK(config.tolerances.at("Education") == 1.0);
    CHECK(config.tolerances.at("Age Group") == 1.0);
    CHECK(config.tolerances.count("HIV Status") == 0);
    CHECK(config.workers == 0);
    CHECK_FALSE(config.verbose);
    config.validate();
}

TEST_CASE("overrides land in the right fields") {
    auto config = parse_config(R"({
        "variant": "PCANNGA-11",
        "max_cycles": 250,
        "seed": 99,
        "ga_population": 20,
        "svr_width_high": 500.0,
        "records_per_run": 200,
        "target_variables": ["Parity", "Gravidity"],
        "tolerances": {"Parity": 1.0},
        "out_dir": "/tmp/somewhere",
        "workers": 3,
        "verbose": true
    })", "test");
    CHECK(config.variant == "PCANNGA-11");
    CHECK(config.max_cycles == 250);
    CHECK(config.seed == 99);
    CHECK(config.ga_population == 20);
    CHECK(config.svr_width_high == 500.0);
    CHECK(config.records_per_run == 200);
    CHECK(config.target_variables == std::vector<std::string>{"Parity", "Gravidity"});
    CHECK(config.tolerances.size() == 1);
    CHECK(config.tolerances.at("Parity") == 1.0);
    CHECK(config.out_dir == "/tmp/somewhere");
    CHECK(config.workers == 3);
    CHECK(config.verbose);
    config.validate();
}

TEST_CASE("unknown keys are named in the error") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"max_cycle": 10})", "test"),
                         doctest::Contains("max_cycle"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"": 1})", "test"), ConfigError);
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config("{", "test"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2]", "test"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"max_cycles": "many"})", "test"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"target_variables": "Parity"})", "test"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tolerances": ["Education"]})", "test"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"seed": -4})", "test"), ConfigError);
}

TEST_CASE("hidden count and component count resolve per variant") {
    auto config = parse_config("{}", "test");

    config.variant = "ANNGA";
    CHECK(config.resolved_hidden_count() == 10);
    CHECK(config.resolved_pca_k() == -1);

    config.variant = "PCANNGA-11";
    CHECK(config.resolved_hidden_count() == 10);
    CHECK(config.resolved_pca_k() == 11);

    config.variant = "PCANNGA-10";
    CHECK(config.resolved_hidden_count() == 9);
    CHECK(config.resolved_pca_k() == 10);

    config.variant = "SVRGA";
    CHECK(config.resolved_pca_k() == -1);

    // explicit settings always win
    config.variant = "PCANNGA-11";
    config.hidden_count = 7;
    config.pca_k = 9;
    CHECK(config.resolved_hidden_count() == 7);
    CHECK(config.resolved_pca_k() == 9);
}

TEST_CASE("validate rejects inconsistent settings") {
    auto base = parse_config("{}", "test");

    auto bad = base;
    bad.variant = "PCANNGA";
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.train_fraction = 0.8; // fractions no longer sum to 1
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.ga_population = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.ga_generations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.ga_selection_q = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.svr_width_low = 1e3; // inverted bounds
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.max_cycles = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.target_variables = {};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.target_variables = {"Parity", "Parity"};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.runs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = base;
    bad.workers = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("the config digest tracks results, not process settings") {
    auto base = parse_config("{}", "test");
    auto digest = config_hash(base);
    CHECK(digest.size() == 16);
    CHECK(digest.find_first_not_of("0123456789abcdef") == std::string::npos);

    // stable across calls
    CHECK(config_hash(base) == digest);

    // process-level knobs leave it unchanged
    auto tweaked = base;
    tweaked.out_dir = "/somewhere/else";
    tweaked.workers = 7;
    tweaked.verbose = true;
    CHECK(config_hash(tweaked) == digest);

    // result-affecting fields all move it
    auto count_changed = [&](auto mutate) {
        auto c = base;
        mutate(c);
        return config_hash(c) != digest;
    };
    CHECK(count_changed([](RunConfig& c) { c.variant = "SVRGA"; }));
    CHECK(count_changed([](RunConfig& c) { c.seed = 2; }));
    CHECK(count_changed([](RunConfig& c) { c.max_cycles = 999; }));
    CHECK(count_changed([](RunConfig& c) { c.hidden_count = 4; }));
    CHECK(count_changed([](RunConfig& c) { c.ga_generations = 49; }));
    CHECK(count_changed([](RunConfig& c) { c.records_per_run = 999; }));
    CHECK(count_changed([](RunConfig& c) { c.target_variables = {"Parity"}; }));
    CHECK(count_changed([](RunConfig& c) { c.tolerances["Parity"] = 1.0; }));
    CHECK(count_changed([](RunConfig& c) { c.svr_subsample = 100; }));
    CHECK(count_changed([](RunConfig& c) { c.train_fraction = 0.70;
                                           c.test_fraction = 0.15; }));
}

TEST_CASE("key order in the file does not change the digest") {
    auto a = parse_config(R"({"seed": 5, "variant": "SVRGA"})", "test");
    auto b = parse_config(R"({"variant": "SVRGA", "seed": 5})", "test");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_json(a) == config_json(b));
}

TEST_CASE("config files load like inline text") {
    const char* path = "/tmp/gafill_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"seed": 123, "variant": "PCANNGA-10"})";
    }
    auto config = load_config(path);
    CHECK(config.seed == 123);
    CHECK(config.variant == "PCANNGA-10");
    std::remove(path);

    CHECK_THROWS_AS(load_config("/tmp/gafill_no_such_config.json"), ConfigError);
}
