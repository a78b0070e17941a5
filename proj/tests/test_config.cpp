#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "mvent/config.hpp"

using namespace mvent;

namespace {

const std::string full_text =
    "# demo system\n"
    "space w0 w1 w2 w3\n"
    "weights 1/4 0.25 1/4 1/4\n"
    "map 1 2 3 0\n"
    "log_base 2\n"
    "numeric float\n"
    "tolerance 1e-7\n"
    "\n"
    "partition pairs\n"
    "1 1 0 0\n"
    "0 0 1 1\n"
    "end\n"
    "\n"
    "partition soft\n"
    "1/2 0.5 1/2 1/2\n"
    "1/2 0.5 1/2 1/2\n"
    "end\n";

bool mentions(const ConfigError& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("full config round-trips every section") {
    ParsedConfig cfg = parse_config_text(full_text, "demo");

    REQUIRE(cfg.point_ids.size() == 4);
    CHECK(cfg.point_ids[0] == "w0");
    CHECK(cfg.point_ids[3] == "w3");
    for (const Rat& w : cfg.weights) CHECK(w == make_rat(1, 4));
    CHECK(cfg.point_map == std::vector<std::size_t>({1, 2, 3, 0}));
    REQUIRE(cfg.log_base.has_value());
    CHECK(*cfg.log_base == LogBase::two);
    REQUIRE(cfg.numeric.has_value());
    CHECK(*cfg.numeric == NumericMode::Kind::float64);
    REQUIRE(cfg.tolerance.has_value());
    CHECK(*cfg.tolerance == doctest::Approx(1e-7));

    REQUIRE(cfg.partitions.size() == 2);
    CHECK(cfg.partition("pairs").rows.size() == 2);
    CHECK(cfg.partition("pairs").rows[0][1] == make_rat(1, 1));
    CHECK(cfg.partition("soft").rows[1][1] == make_rat(1, 2));
    CHECK_THROWS_AS(cfg.partition("missing"), ConfigError);
}

TEST_CASE("omitted sections fall back to defaults") {
    ParsedConfig cfg = parse_config_text(
        "space a b\nweights 1/2 1/2\npartition u\n1 1\nend\n");
    CHECK(cfg.point_map.empty());
    CHECK_FALSE(cfg.log_base.has_value());
    CHECK_FALSE(cfg.numeric.has_value());
    CHECK_FALSE(cfg.tolerance.has_value());

    auto sys = system_from_config<Rat>(cfg);
    CHECK(sys.tau.point_map() == std::vector<std::size_t>({0, 1}));
}

TEST_CASE("parser errors carry the origin and line number") {
    try {
        parse_config_text("space a b\nweights 1/2 1/2\nnonsense 1\n", "file.cfg");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "file.cfg:3:"));
        CHECK(mentions(e, "unknown directive 'nonsense'"));
    }

    try {
        parse_config_text("space a b\nweights 1/2 1/2\npartition p\n1 1 1\n0 0\nend\n", "r.cfg");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "r.cfg:5:"));
        CHECK(mentions(e, "ragged row"));
    }
}

TEST_CASE("structural validation happens at end of parse") {
    CHECK_THROWS_AS(parse_config_text("weights 1/2 1/2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2 1/2\nmap 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2 1/2\nmap 0 5\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("space a b\nweights 1/2 1/2\npartition p\n1 1\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("space a b\nweights 1/2 1/2\npartition p\n1 1 1\nend\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2 1/2\npartition p\n1 1\nend\n"
                                      "partition p\n1 1\nend\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2 1/2\nlog_base 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2 1/2\nnumeric complex\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("space a b\nweights 1/2 x\n"), ConfigError);
}

TEST_CASE("configs materialize into systems and partitions") {
    ParsedConfig cfg = parse_config_text(full_text, "demo");

    auto sys = system_from_config<Rat>(cfg);
    CHECK(sys.space->size() == 4);
    CHECK(sys.space->id(2) == "w2");
    CHECK(sys.space->weight(1) == make_rat(1, 4));
    CHECK(sys.tau.point_map() == std::vector<std::size_t>({1, 2, 3, 0}));

    auto pairs = partition_from_config<Rat>(cfg, "pairs", sys.space);
    CHECK(pairs.is_crisp());
    CHECK(pairs[0][0] == make_rat(1, 1));
    CHECK(pairs[1][3] == make_rat(1, 1));

    auto fsys = system_from_config<double>(cfg, 1e-7);
    CHECK(fsys.space->weight(0) == doctest::Approx(0.25));
    auto soft = partition_from_config<double>(cfg, "soft", fsys.space);
    CHECK(soft[0][2] == doctest::Approx(0.5));

    // weights that do not sum to one surface when the space is built
    ParsedConfig bad = parse_config_text("space a b\nweights 1/2 1/3\n");
    CHECK_THROWS_AS(system_from_config<Rat>(bad), InvariantViolationError);
}

TEST_CASE("loading a missing file names the path") {
    try {
        load_config_file("/nonexistent/nowhere.cfg");
        FAIL("expected a load error");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "/nonexistent/nowhere.cfg"));
    }
}
