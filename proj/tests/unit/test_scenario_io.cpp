#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "pevnet/generate.hpp"
#include "pevnet/scenario_io.hpp"

using namespace pevnet;
using fixtures::id;

namespace {

const char* kSmall = R"({
  "name": "small",
  "quality_levels": ["0", "1"],
  "requester_neighbors": [1],
  "agents": [
    {"id": 1, "cost": "0.1", "pmf": [["1", "1"]], "neighbors": [2]},
    {"id": 2, "cost": "1/5", "pmf": [["0", "1/2"], ["1", "1/2"]], "neighbors": [1]}
  ]
})";

ParseError parse_error(const std::string& text) {
    try {
        parse_scenario_text(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error");
    return ParseError("", 0, "");
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("scenario_io") {
    TEST_CASE("parses a small scenario") {
        const auto f = parse_scenario_text(kSmall);
        CHECK(f.name == "small");
        CHECK(f.scenario.size() == 2);
        CHECK(f.scenario.agent(id(2)).type.pmf.expectation() == Rational(1, 2));
        CHECK(f.scenario.agent(id(1)).type.cost == Rational(1, 10));
        CHECK_FALSE(f.has_reports);
        CHECK(f.reports == truthful_profile(f.scenario));
    }

    TEST_CASE("serialisation round-trips bundled and generated scenarios") {
        for (const auto& b : bundled_scenarios()) {
            const auto f = load_scenario(b.name);
            const auto again = parse_scenario_text(serialize_scenario(f));
            CHECK(serialize_scenario(again) == serialize_scenario(f));
            CHECK(again.reports == f.reports);
            CHECK_FALSE(check_reconstruction(f).has_value());
        }
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            GenOptions o;
            o.seed = seed;
            const auto f = generate_scenario(o);
            CHECK(serialize_scenario(parse_scenario_text(serialize_scenario(f))) == serialize_scenario(f));
        }
    }

    TEST_CASE("errors name the field and line") {
        const auto bad_cost = parse_error(replace(kSmall, "\"1/5\"", "\"x\""));
        CHECK(bad_cost.line() == 7);
        CHECK(bad_cost.field() == "agents[1].cost");

        const auto nine_tenths = parse_error(replace(kSmall, "[[\"1\", \"1\"]]", "[[\"1\", \"9/10\"]]"));
        CHECK(nine_tenths.line() == 6);
        CHECK(nine_tenths.field() == "agents[0].pmf");
        CHECK(std::string(nine_tenths.what()).find("agent 1") != std::string::npos);

        const auto unknown = parse_error(replace(kSmall, "\"neighbors\": [2]", "\"neighbors\": [7]"));
        CHECK(std::string(unknown.what()).find("7") != std::string::npos);
    }

    TEST_CASE("floats are rejected in favour of rational strings") {
        const auto e = parse_error(replace(kSmall, "\"0.1\"", "0.1"));
        CHECK(e.field() == "agents[0].cost");
        CHECK(e.line() == 6);
    }

    TEST_CASE("unknown fields and malformed json are reported") {
        CHECK(parse_error(replace(kSmall, "\"name\"", "\"nmae\"")).line() == 2);
        CHECK(parse_error("{\"name\": ").line() >= 1);
        const auto numeric_name = parse_error(replace(kSmall, "\"small\"", "7"));
        CHECK(numeric_name.field() == "name");
        CHECK(numeric_name.line() == 2);
    }

    TEST_CASE("a nil report shrinks the participant set") {
        std::string text = kSmall;
        text.insert(text.rfind('}'), R"(,
  "reports": {"1": "nil"}
)");
        const auto f = parse_scenario_text(text);
        CHECK(f.has_reports);
        CHECK(f.reports[0].is_nil());
        CHECK(participants(build_graph(f.scenario, f.reports)) == std::vector<AgentId>{id(1)});
        CHECK(participants(build_graph(f.scenario, truthful_profile(f.scenario))).size() == 2);
    }

    TEST_CASE("reports may not invite strangers") {
        std::string text = kSmall;
        text.insert(text.rfind('}'), R"(,
  "reports": {"2": {"invited": [2]}}
)");
        CHECK_THROWS_AS(parse_scenario_text(text), ParseError);
    }

    TEST_CASE("bundled names resolve with or without the extension") {
        CHECK(load_scenario("figure5.json").name == load_scenario("figure5").name);
        CHECK_THROWS(load_scenario("no-such-scenario"));
    }
}
