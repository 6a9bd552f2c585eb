#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lrcone/io.hpp"
#include "lrcone/rng.hpp"

using namespace lrcone;

TEST_CASE("splitmix64 matches the published stream") {
    std::uint64_t s = 0;
    REQUIRE(splitmix64(s) == 0xe220a8397b1dcdafULL);
    REQUIRE(splitmix64(s) == 0x6e789e6aa1b965f4ULL);
    REQUIRE(splitmix64(s) == 0x06c45d188009454fULL);

    s = 1234567890ULL;
    REQUIRE(splitmix64(s) == 0x476948b80f74962fULL);
    REQUIRE(splitmix64(s) == 0x852368bd7f08928bULL);
    REQUIRE(splitmix64(s) == 0x1688d3ec6fd448cdULL);
}

TEST_CASE("Rng stream is pinned after burn-in") {
    Rng rng(42);
    REQUIRE(rng.next_u64() == 0x47526757130f9f52ULL);
    REQUIRE(rng.next_u64() == 0x581ce1ff0e4ae394ULL);

    Rng rng2(42);
    REQUIRE(rng2.uniform01() == 0.27860113025513866);
}

TEST_CASE("Rng distributions stay in range and look sane") {
    Rng rng(7);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng.uniform_pm1();
        REQUIRE(v >= -1.0);
        REQUIRE(v <= 1.0);
        const double g = rng.gaussian();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.05);
    REQUIRE(var > 0.9);
    REQUIRE(var < 1.1);
}

TEST_CASE("split_seed is pinned and tag-sensitive") {
    REQUIRE(split_seed(7, 3) == 0xd2f0ab6d48b16faeULL);
    REQUIRE(split_seed(7, 4) == 0x23a5a0ae44349e44ULL);
    REQUIRE(split_seed(7, 3, 4) == 0xa3b9da8730f7b5c9ULL);
    REQUIRE(split_seed(7, 3) != split_seed(3, 7));
    REQUIRE(split_seed(7, 3, 4) != split_seed(7, 4, 3));
}

TEST_CASE("parse_grid covers linear, log, and degenerate counts") {
    const auto lin = parse_grid("1:5:5");
    REQUIRE(lin == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});

    const auto one = parse_grid("2.5:9:1");
    REQUIRE(one == std::vector<double>{2.5});

    const auto lg = parse_grid("log:0.1:10:5");
    REQUIRE(lg.size() == 5);
    REQUIRE(lg.front() == 0.1); // endpoints forced exact
    REQUIRE(lg.back() == 10.0);
    for (size_t i = 1; i < lg.size(); ++i) REQUIRE(lg[i] > lg[i - 1]);
    // log spacing: consecutive ratios agree
    const double ratio = lg[1] / lg[0];
    for (size_t i = 2; i < lg.size(); ++i)
        REQUIRE(std::abs(lg[i] / lg[i - 1] - ratio) < 1e-12 * ratio);

    const auto lin2 = parse_grid("0.1:10:7");
    REQUIRE(lin2.front() == 0.1);
    REQUIRE(lin2.back() == 10.0);

    REQUIRE_THROWS_AS(parse_grid("1:5"), ConfigError);
    REQUIRE_THROWS_AS(parse_grid("1:5:0"), ConfigError);
    REQUIRE_THROWS_AS(parse_grid("a:5:3"), ConfigError);
    REQUIRE_THROWS_AS(parse_grid("1:b:3"), ConfigError);
    REQUIRE_THROWS_AS(parse_grid("log:0:5:3"), ConfigError);
    REQUIRE_THROWS_AS(parse_grid(""), ConfigError);
}

TEST_CASE("refine_grid doubles density and keeps every original point") {
    const std::vector<double> g = {1.0, 2.0, 4.0};
    const auto lin = refine_grid(g, false);
    REQUIRE(lin == std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0});

    const auto lg = refine_grid(g, true);
    REQUIRE(lg.size() == 5);
    for (size_t i = 0; i < g.size(); ++i) REQUIRE(lg[2 * i] == g[i]); // originals at even slots
    REQUIRE(std::abs(lg[1] - std::sqrt(2.0)) < 1e-15);
    REQUIRE(std::abs(lg[3] - std::sqrt(8.0)) < 1e-15);

    // nested: refining twice still contains the original grid
    const auto lg2 = refine_grid(lg, true);
    for (size_t i = 0; i < g.size(); ++i) REQUIRE(lg2[4 * i] == g[i]);

    REQUIRE(refine_grid({3.0}, false) == std::vector<double>{3.0});
}

TEST_CASE("fnv1a64 matches reference vectors") {
    REQUIRE(fnv1a64("") == 0xcbf29ce484222325ULL);
    REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    REQUIRE(fnv1a64("hello") == 0xa430d84680aabd0bULL);
}

TEST_CASE("config_hash is 16 hex chars and key-order canonical") {
    const json a = json::parse(R"({"a": 1, "b": 2})");
    const json b = json::parse(R"({"b": 2, "a": 1})");
    const std::string ha = config_hash(a);
    REQUIRE(ha.size() == 16);
    for (char c : ha) REQUIRE(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
    REQUIRE(ha == config_hash(b));
    REQUIRE(ha != config_hash(json::parse(R"({"a": 1, "b": 3})")));
}

TEST_CASE("format17 round-trips doubles exactly") {
    for (double x : {1.0 / 3.0, 0.1, 2.718281828459045, 1e300, 5e-324, -0.0, 12345.6789,
                     0.16626858707934594}) {
        const std::string s = format17(x);
        const double back = std::strtod(s.c_str(), nullptr);
        REQUIRE(back == x);
    }
}

TEST_CASE("validate_keys rejects unknown keys by name") {
    const json j = json::parse(R"({"alpha": 2.5, "tyop": 1})");
    try {
        validate_keys(j, {"alpha"}, "test");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("tyop") != std::string::npos);
    }
    validate_keys(json::parse(R"({"alpha": 2.5})"), {"alpha", "beta"}, "test");
    REQUIRE_THROWS_AS(validate_keys(json::parse("[1]"), {"a"}, "test"), ConfigError);
}

TEST_CASE("sweep_csv emits the fixed schema with 17-digit values") {
    std::vector<SweepRow> rows;
    rows.push_back({0, 1.0, 0.25, 0.5, "operator", 7, 2.5, "ising_zz"});
    rows.push_back({2, 3.0, 1.0, 1.0 / 3.0, "frobenius", 8, 2.9, "xy"});
    const std::string csv = sweep_csv(rows);
    const std::string expected =
        "center,r,t,value,norm_kind,seed,alpha,ensemble\n"
        "0,1,0.25,0.5,operator,7,2.5,ising_zz\n"
        "2,3,1,0.33333333333333331,frobenius,8,2.8999999999999999,xy\n";
    REQUIRE(csv == expected);
}

TEST_CASE("read_json_file and write_text_file round-trip; errors are ConfigError") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "lrcone_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "x.json").string();
    write_text_file(path, "{\"k\": [1, 2]}\n");
    const json j = read_json_file(path);
    REQUIRE(j.at("k").size() == 2);

    REQUIRE_THROWS_AS(read_json_file((dir / "missing.json").string()), ConfigError);
    write_text_file(path, "{not json");
    REQUIRE_THROWS_AS(read_json_file(path), ConfigError);
    fs::remove_all(dir);
}
