#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pevnet/audit.hpp"
#include "pevnet/scenario_io.hpp"

using namespace pevnet;
using fixtures::id;
using fixtures::r;

TEST_SUITE("audit") {
    TEST_CASE("quality-aware idm witness replays exactly") {
        const auto file = load_scenario("qaidm_failure");
        const auto report = check_ic(file.scenario, MechanismKind::Qaidm, DeviationGrid::standard(file.scenario, r("1/10")));
        REQUIRE_FALSE(report.holds());
        REQUIRE(report.witness.has_value());
        const Witness& w = *report.witness;
        CHECK(w.delta().sign() > 0);
        CHECK(replay_delta(file.scenario, MechanismKind::Qaidm, w) == w.delta());
        CHECK(w.baseline == file.reports);
        REQUIRE(w.deviation.has_value());
        CHECK(w.deviated_utility == expected_utility_oracle(file.scenario, w.profile, MechanismKind::Qaidm, w.agent));
        CHECK_FALSE(w.description.empty());
    }

    TEST_CASE("quality-aware idm is individually rational under truth") {
        const auto file = load_scenario("qaidm_failure");
        CHECK(check_ir(file.scenario, MechanismKind::Qaidm).holds());
    }

    TEST_CASE("pev holds every property on example 2") {
        const auto file = load_scenario("example2");
        CHECK(check_ir(file.scenario, MechanismKind::Pev).holds());
        CHECK(check_wbb(file.scenario, MechanismKind::Pev).holds());
        const auto ic = check_ic(file.scenario, MechanismKind::Pev, DeviationGrid::standard(file.scenario, r("1/2")));
        CHECK(ic.holds());
        CHECK(ic.cases_checked > 1000);
        for (const auto& lemma : check_lemmas(file.scenario)) CHECK(lemma.holds());
    }

    TEST_CASE("pev is truthful on small scenarios against random contexts") {
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const Scenario sc = fixtures::random_scenario(seed, 4);
            auto grid = DeviationGrid::full_type_space(sc, r("1/2"));
            grid.random_contexts = 3;
            grid.seed = seed;
            const auto ic = check_ic(sc, MechanismKind::Pev, grid);
            CHECK_MESSAGE(ic.holds(), (ic.witness ? ic.witness->description : ""));
        }
    }

    TEST_CASE("vcg breaks the budget on example 1") {
        const auto file = load_scenario("figure1");
        const auto wbb = check_wbb(file.scenario, MechanismKind::Vcg);
        REQUIRE_FALSE(wbb.holds());
        REQUIRE(wbb.witness.has_value());
        CHECK(wbb.witness->agent == kRequester);
        CHECK(wbb.witness->deviated_utility == r("-0.1"));
        CHECK(check_wbb(file.scenario, MechanismKind::Idm).holds());
    }

    TEST_CASE("efficiency gap on the two-agent line") {
        const auto file = load_scenario("figure5");
        const auto gap = check_efficiency_gap(file.scenario, MechanismKind::Pev);
        REQUIRE(gap.certificate.size() == 3);
        CHECK(gap.certificate[2].second == r("3/10"));
        CHECK(gap.certificate[0].second - gap.certificate[1].second == r("3/10"));
    }

    TEST_CASE("deviation grid contents") {
        const auto file = load_scenario("figure5");
        const auto& sc = file.scenario;
        const auto grid = DeviationGrid::standard(sc, r("1/2"));
        const auto costs = grid.cost_candidates(sc.at(0).type.cost);
        CHECK(costs.front() == sc.at(0).type.cost);
        CHECK(std::find(costs.begin(), costs.end(), Rational(0)) != costs.end());
        std::mt19937_64 rng(0);
        const std::vector<AgentId> nb{id(1), id(2), id(3)};
        CHECK(grid.invitation_subsets(nb, rng).size() == 8);
        const auto devs = grid.deviations(sc, MechanismKind::Pev, 0, rng);
        CHECK(devs.back().is_nil());

        const auto two_levels = Scenario({Rational(0), Rational(1)}, {id(1)},
                                         {{id(1), {Pmf::point_mass(Rational(1)), Rational(0), {}}}});
        const auto full = DeviationGrid::full_type_space(two_levels, r("1/4"));
        CHECK(full.pmf_candidates(two_levels, two_levels.at(0).type.pmf).size() == 5);
        CHECK(full.cost_candidates(Rational(0)).size() == 6);
    }
}
