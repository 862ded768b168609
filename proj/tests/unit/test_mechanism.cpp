#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pevnet/audit.hpp"
#include "pevnet/scenario_io.hpp"

using namespace pevnet;
using fixtures::id;
using fixtures::r;

namespace {

std::vector<AgentId> both_figure5_agents() { return {id(1), id(2)}; }

Scenario two_agent_line(const Rational& c1, const Rational& c2) {
    const Pmf one = Pmf::point_mass(Rational(1));
    return Scenario({Rational(1)}, {id(1)}, {{id(1), {one, c1, {id(2)}}}, {id(2), {one, c2, {id(1)}}}});
}

}  // namespace

TEST_SUITE("mechanism") {
    TEST_CASE("pev matches the brute-force oracle on random profiles") {
        std::mt19937_64 rng(5);
        std::size_t non_null = 0;
        for (std::uint64_t seed = 0; seed < 400; ++seed) {
            const Scenario sc = fixtures::random_scenario(seed);
            const ReportProfile reports = seed % 3 == 0 ? truthful_profile(sc) : fixtures::random_profile(sc, rng);
            const auto expected = oracle::pev(sc, reports);
            const auto got = pev_allocate(sc, reports);
            REQUIRE(got.champion == expected.champion);
            CHECK(got.sequence == expected.sequence);
            CHECK(got.w == expected.w);
            CHECK(got.selected_index == expected.selected);
            if (!expected.selected) {
                CHECK(got.is_null());
                continue;
            }
            ++non_null;
            for (const Rational& q : sc.quality_levels()) {
                const auto pay = pev_payoffs(got, q);
                const auto want = oracle::pev_payoffs(expected, q);
                for (const auto& agent : sc.agents()) {
                    const auto it = want.find(agent.id);
                    CHECK(pay.at(agent.id) == (it == want.end() ? Rational(0) : it->second));
                }
                CHECK(pay.requester_utility == got.w.front());
                CHECK(pay.total() + pay.requester_utility == q);
            }
        }
        CHECK(non_null > 200);
    }

    TEST_CASE("example 2 at realized quality 8") {
        const auto file = load_scenario("example2");
        const auto o = pev_allocate(file.scenario, file.reports);
        CHECK(o.champion == id(9));
        CHECK(o.sequence == std::vector<AgentId>{id(2), id(6), id(9)});
        CHECK(o.w == std::vector<Rational>{Rational(4), Rational(4), r("4.5")});
        CHECK(o.selected() == id(9));
        const auto pay = pev_payoffs(o, Rational(8));
        CHECK(pay.at(id(2)) == Rational(0));
        CHECK(pay.at(id(6)) == r("0.5"));
        CHECK(pay.at(id(9)) == r("3.5"));
        CHECK(pay.requester_utility == Rational(4));
        CHECK(agent_utility(file.scenario, o, pay, id(9)) == r("2.5"));
    }

    TEST_CASE("two-agent line selects the earlier agent on the equality test") {
        const Scenario sc = two_agent_line(r("2/5"), r("1/10"));
        const auto o = pev_allocate(sc, truthful_profile(sc));
        CHECK(o.champion == id(2));
        CHECK(o.sequence == both_figure5_agents());
        CHECK(o.w == std::vector<Rational>{Rational(0), r("3/5")});
        CHECK(o.selected() == id(1));
        CHECK(efficient_allocation(sc, truthful_profile(sc)).selected == id(2));
    }

    TEST_CASE("null option wins when every welfare is negative") {
        const Scenario sc = two_agent_line(Rational(2), Rational(3));
        const auto o = pev_allocate(sc, truthful_profile(sc));
        CHECK(o.is_null());
        const auto pay = payoffs(o, Rational(1));
        CHECK(pay.entries.empty());
        CHECK(pay.requester_utility == Rational(0));
        CHECK_FALSE(realized_quality_distribution(sc, o).has_value());
        const auto alloc = efficient_allocation(sc, truthful_profile(sc));
        CHECK_FALSE(alloc.selected.has_value());
        CHECK(alloc.expected_welfare == Rational(0));
    }

    TEST_CASE("ties go to the smallest id unless seeded") {
        const Pmf one = Pmf::point_mass(Rational(1));
        const Scenario sc({Rational(1)}, {id(1), id(2), id(3)},
                          {{id(1), {one, r("0.5"), {}}}, {id(2), {one, r("0.2"), {}}}, {id(3), {one, r("0.2"), {}}}});
        CHECK(efficient_allocation(sc, truthful_profile(sc)).selected == id(2));
        std::set<AgentId> seen;
        for (std::uint64_t s = 0; s < 32; ++s) {
            const auto a = efficient_allocation(sc, truthful_profile(sc), TieBreak::seeded(s));
            CHECK(a.selected == efficient_allocation(sc, truthful_profile(sc), TieBreak::seeded(s)).selected);
            seen.insert(*a.selected);
        }
        CHECK(seen == std::set<AgentId>{id(2), id(3)});
    }

    TEST_CASE("pev reduces to idm on degenerate scenarios") {
        std::mt19937_64 rng(17);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Scenario sc = fixtures::random_scenario(seed, 8, true);
            const ReportProfile reports = fixtures::random_profile(sc, rng, true);
            const Rational q = *uniform_quality(sc, reports);
            const auto pev = pev_allocate(sc, reports);
            const auto idm = idm_run(sc, reports, q);
            CHECK(pev.sequence == idm.sequence);
            CHECK(pev.w == idm.w);
            CHECK(pev.selected_index == idm.selected_index);
            CHECK(payoffs(pev, q).entries == payoffs(idm, q).entries);
            CHECK(payoffs(pev, q).requester_utility == payoffs(idm, q).requester_utility);
        }
    }

    TEST_CASE("idm and vcg refuse non-degenerate pmfs") {
        const auto file = load_scenario("example2");
        CHECK_THROWS_AS(idm_run(file.scenario, file.reports), PreconditionError);
        CHECK_THROWS_AS(vcg_run(file.scenario, file.reports), PreconditionError);
        CHECK_NOTHROW(qaidm_run(file.scenario, file.reports));
    }

    TEST_CASE("example 1 vcg runs a deficit") {
        const auto file = load_scenario("figure1");
        const auto o = vcg_run(file.scenario, file.reports);
        CHECK(o.selected() == id(4));
        CHECK(o.champion_welfare == r("0.9"));
        const auto pay = payoffs(o, Rational(1));
        CHECK(pay.at(id(1)) == r("0.5"));
        CHECK(pay.at(id(4)) == r("0.6"));
        CHECK(pay.requester_utility == r("-0.1"));
        const auto idm = payoffs(idm_run(file.scenario, file.reports), Rational(1));
        CHECK(idm.requester_utility.sign() >= 0);
    }

    TEST_CASE("quality-aware idm pays from the reported expectation") {
        const auto file = load_scenario("qaidm_failure");
        ReportProfile reports = file.reports;
        reports[0] = Report::bid(Pmf::point_mass(Rational(10)), Rational(0), {});
        const auto o = qaidm_run(file.scenario, reports);
        REQUIRE(o.selected() == id(1));
        CHECK(o.reported_expectation == Rational(10));
        const auto low = payoffs(o, Rational(1));
        const auto high = payoffs(o, Rational(10));
        CHECK(low.at(id(1)) == high.at(id(1)));
        CHECK(low.requester_utility.sign() < 0);
    }

    TEST_CASE("closed-form expected utilities match a hand-written expectation") {
        std::mt19937_64 rng(23);
        for (std::uint64_t seed = 0; seed < 150; ++seed) {
            const Scenario sc = fixtures::random_scenario(seed);
            const ReportProfile reports = fixtures::random_profile(sc, rng);
            const auto o = pev_allocate(sc, reports);
            const auto eu = expected_utilities(sc, reports, o);
            const auto ref = oracle::pev(sc, reports);
            if (!ref.selected) {
                CHECK(eu.requester == Rational(0));
                continue;
            }
            const AgentId chosen = ref.sequence[*ref.selected];
            const auto& truth = sc.agent(chosen).type;
            const Rational mean = truth.pmf.expectation();
            const auto pay = oracle::pev_payoffs(ref, mean);
            for (const auto& agent : sc.agents()) {
                const auto it = pay.find(agent.id);
                Rational want = it == pay.end() ? Rational(0) : it->second;
                if (agent.id == chosen) want -= truth.cost;
                CHECK(eu.agents.at(agent.id) == want);
                CHECK(expected_utility_oracle(sc, reports, MechanismKind::Pev, agent.id) == want);
            }
            CHECK(eu.requester == ref.w.front());
        }
    }

    TEST_CASE("mechanism names round-trip") {
        for (auto kind : {MechanismKind::Pev, MechanismKind::Idm, MechanismKind::Qaidm, MechanismKind::Vcg}) {
            CHECK(parse_mechanism(to_string(kind)) == kind);
        }
        CHECK_THROWS_AS(parse_mechanism("auction"), std::invalid_argument);
    }
}
