#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pevnet/cli.hpp"
#include "pevnet/report.hpp"
#include "pevnet/scenario_io.hpp"

using namespace pevnet;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("exit codes") {
        CHECK(cli({"run", "example2", "pev", "--quality", "8"}).code == 0);
        CHECK(cli({"run", "example2", "idm"}).code == 2);
        CHECK(cli({"run", "no-such-scenario"}).code == 2);
        CHECK(cli({"run", "example2", "auction"}).code == 2);
        CHECK(cli({"bogus"}).code == 2);
        CHECK(cli({"audit", "qaidm_failure", "qaidm", "--ic"}).code == 3);
        CHECK(cli({"audit", "figure1", "vcg", "--wbb"}).code == 3);
        CHECK(cli({"audit", "figure5", "pev", "--all"}).code == 0);
        for (const char* demo : {"example1", "example2", "prop1", "idm-vs-pev"}) CHECK(cli({"demo", demo}).code == 0);
    }

    TEST_CASE("run prints the example 2 numbers") {
        const auto r = cli({"run", "example2", "pev", "--quality", "8"});
        CHECK(r.out.find("3.5") != std::string::npos);
        CHECK(r.out.find("(s, 2, 6, 9)") != std::string::npos);
        const auto v = cli({"run", "figure1", "vcg"});
        CHECK(v.out.find("-0.1") != std::string::npos);
    }

    TEST_CASE("gen is deterministic and parses back") {
        const auto a = cli({"gen", "8", "--seed", "7"});
        const auto b = cli({"gen", "8", "--seed", "7"});
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(cli({"gen", "8", "--seed", "8"}).out != a.out);
        const auto f = parse_scenario_text(a.out);
        CHECK(f.scenario.size() == 8);
    }

    TEST_CASE("run report json round-trips") {
        const auto dir = std::filesystem::temp_directory_path() / "pevnet_cli_test";
        std::filesystem::create_directories(dir);
        const auto path = (dir / "run.json").string();
        REQUIRE(cli({"run", "example2", "pev", "--trials", "2000", "--seed", "5", "--json-out", path}).code == 0);
        const std::string text = slurp(path);
        const RunReport report = run_report_from_json(text);
        CHECK(report.selected == AgentId{9});
        CHECK(report.requester_utility == Rational(4));
        REQUIRE(report.simulation.has_value());
        CHECK(report.simulation->trials == 2000);
        CHECK(to_json(report) == text);
        CHECK(run_report_from_json(to_json(report)) == report);

        const auto audit_path = (dir / "audit.json").string();
        CHECK(cli({"audit", "qaidm_failure", "qaidm", "--ic", "--json-out", audit_path}).code == 3);
        CHECK(slurp(audit_path).find("violated") != std::string::npos);
    }

    TEST_CASE("run modes") {
        CHECK(cli({"run", "example2", "--expected"}).out.find("expected") != std::string::npos);
        CHECK(cli({"run", "example2", "--seed", "3"}).code == 0);
        CHECK(cli({"run", "example2", "--seed", "3"}).out == cli({"run", "example2", "--seed", "3"}).out);
        CHECK(cli({"run", "example2", "--quality", "8", "--expected"}).code == 2);
    }
}
