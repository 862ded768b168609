#include "pevnet/audit.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mechanism_detail.hpp"

namespace pevnet {

std::string to_string(Property property) {
    switch (property) {
        case Property::IR: return "IR";
        case Property::IC: return "IC";
        case Property::WBB: return "WBB";
        case Property::Lemma1: return "Lemma1";
        case Property::Lemma2: return "Lemma2";
        case Property::Efficiency: return "Efficiency";
    }
    return "?";
}

std::string to_string(Verdict verdict) {
    return verdict == Verdict::HoldsOnGrid ? "holds-on-grid" : "violated";
}

namespace {

std::string describe(const Report& report) {
    if (report.is_withdrawn()) return "withdrawn";
    if (report.is_nil()) return "nil";
    std::string out = "pmf " + to_string(report.pmf()) + ", cost " + report.cost().to_string() + ", invites {";
    bool first = true;
    for (AgentId id : report.invited()) {
        out += (first ? "" : ", ") + to_string(id);
        first = false;
    }
    return out + "}";
}

// Sum of u_agent over the realized-quality distribution of one outcome.
Rational utility_over_realizations(const Scenario& scenario, const MechanismOutcome& outcome, AgentId agent) {
    auto dist = realized_quality_distribution(scenario, outcome);
    if (!dist) return Rational(0);
    Rational total;
    for (const auto& point : dist->support()) {
        const PayoffVector pay = payoffs(outcome, point.quality);
        const Rational u = agent == kRequester ? pay.requester_utility : agent_utility(scenario, outcome, pay, agent);
        total += point.probability * u;
    }
    return total;
}

Rational oracle(const Scenario& scenario, const ReportProfile& reports, MechanismKind kind, AgentId agent) {
    return utility_over_realizations(scenario, run_mechanism(kind, scenario, reports), agent);
}

void append_unique(std::vector<Pmf>& out, Pmf pmf) {
    if (std::find(out.begin(), out.end(), pmf) == out.end()) out.push_back(std::move(pmf));
}

}  // namespace

DeviationGrid DeviationGrid::standard(const Scenario& scenario, const Rational& cost_step) {
    if (cost_step.sign() <= 0) throw std::invalid_argument("grid step must be positive");
    DeviationGrid grid;
    const Rational top = scenario.quality_levels().back() + cost_step;
    for (Rational c; c <= top; c += cost_step) grid.absolute_costs.push_back(c);
    return grid;
}

DeviationGrid DeviationGrid::full_type_space(const Scenario& scenario, const Rational& step) {
    DeviationGrid grid = standard(scenario, step);
    grid.cost_scalings.clear();
    grid.mass_step = step;
    grid.full_simplex = true;
    return grid;
}

std::vector<Pmf> DeviationGrid::pmf_candidates(const Scenario& scenario, const Pmf& truth) const {
    std::vector<Pmf> out{truth};
    const auto levels = scenario.quality_levels();
    if (full_simplex) {
        if (mass_step.num() != 1) throw std::invalid_argument("full simplex needs a unit-fraction mass step");
        const std::int64_t units = mass_step.den();
        std::vector<std::int64_t> counts(levels.size(), 0);
        auto emit = [&]() {
            std::vector<QualityPoint> points;
            for (std::size_t i = 0; i < levels.size(); ++i) {
                if (counts[i] > 0) points.push_back({levels[i], Rational(counts[i], units)});
            }
            append_unique(out, Pmf(std::move(points)));
        };
        auto recurse = [&](auto&& self, std::size_t position, std::int64_t remaining) -> void {
            if (position + 1 == levels.size()) {
                counts[position] = remaining;
                emit();
                return;
            }
            for (std::int64_t c = remaining; c >= 0; --c) {
                counts[position] = c;
                self(self, position + 1, remaining - c);
            }
        };
        recurse(recurse, 0, units);
        return out;
    }
    append_unique(out, Pmf::point_mass(levels.back()));
    append_unique(out, Pmf::point_mass(levels.front()));
    const auto support = truth.support();
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (const Rational& target : levels) {
            if (target == support[a].quality) continue;
            for (Rational moved = mass_step; moved <= support[a].probability; moved += mass_step) {
                std::vector<QualityPoint> points(support.begin(), support.end());
                points[a].probability -= moved;
                auto it = std::find_if(points.begin(), points.end(),
                                       [&](const QualityPoint& p) { return p.quality == target; });
                if (it == points.end()) {
                    points.push_back({target, moved});
                } else {
                    it->probability += moved;
                }
                append_unique(out, Pmf(std::move(points)));
            }
        }
    }
    return out;
}

std::vector<Rational> DeviationGrid::cost_candidates(const Rational& truth) const {
    std::vector<Rational> out{truth};
    auto add = [&](const Rational& c) {
        if (c.sign() >= 0 && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    };
    for (const auto& c : absolute_costs) add(c);
    for (const auto& s : cost_scalings) add(truth * s);
    return out;
}

std::vector<std::vector<AgentId>> DeviationGrid::invitation_subsets(std::span<const AgentId> neighbors,
                                                                     std::mt19937_64& rng) const {
    std::vector<std::vector<AgentId>> out;
    const std::size_t k = neighbors.size();
    auto subset = [&](auto&& contains) {
        std::vector<AgentId> s;
        for (std::size_t b = 0; b < k; ++b) {
            if (contains(b)) s.push_back(neighbors[b]);
        }
        return s;
    };
    if (k <= max_enumerated_neighbors) {
        const std::uint64_t full = (std::uint64_t{1} << k) - 1;
        for (std::uint64_t mask = full + 1; mask-- > 0;) {
            out.push_back(subset([&](std::size_t b) { return (mask >> b) & 1u; }));
        }
        return out;
    }
    std::set<std::vector<AgentId>> seen;
    auto push = [&](std::vector<AgentId> s) {
        if (seen.insert(s).second) out.push_back(std::move(s));
    };
    push(std::vector<AgentId>(neighbors.begin(), neighbors.end()));
    push({});
    for (std::size_t draw = 0; draw < sampled_subsets; ++draw) {
        push(subset([&](std::size_t) { return (rng() >> 63) != 0; }));
    }
    return out;
}

std::vector<Report> DeviationGrid::deviations(const Scenario& scenario, MechanismKind kind, std::size_t index,
                                              std::mt19937_64& rng) const {
    const auto& truth = scenario.at(index).type;
    const bool fixed_pmf = kind == MechanismKind::Idm || kind == MechanismKind::Vcg;
    const auto pmfs = fixed_pmf ? std::vector<Pmf>{truth.pmf} : pmf_candidates(scenario, truth.pmf);
    const auto costs = cost_candidates(truth.cost);
    const auto subsets = invitation_subsets(truth.neighbors, rng);
    std::vector<Report> out;
    out.reserve(pmfs.size() * costs.size() * subsets.size() + 1);
    for (const auto& pmf : pmfs) {
        for (const auto& cost : costs) {
            for (const auto& invited : subsets) out.push_back(Report::bid(pmf, cost, invited));
        }
    }
    if (include_nil) out.push_back(Report::nil());
    return out;
}

Rational outcome_expected_utility(const Scenario& scenario, const MechanismOutcome& outcome, AgentId agent) {
    return utility_over_realizations(scenario, outcome, agent);
}

Rational expected_utility_oracle(const Scenario& scenario, const ReportProfile& reports, MechanismKind kind,
                                 AgentId agent, TieBreak tie) {
    return utility_over_realizations(scenario, run_mechanism(kind, scenario, reports, tie), agent);
}

Rational expected_requester_utility_oracle(const Scenario& scenario, const ReportProfile& reports,
                                           MechanismKind kind, TieBreak tie) {
    return utility_over_realizations(scenario, run_mechanism(kind, scenario, reports, tie), kRequester);
}

Rational replay_delta(const Scenario& scenario, MechanismKind kind, const Witness& witness) {
    const Rational deviated = oracle(scenario, witness.profile, kind, witness.agent);
    const Rational baseline = witness.baseline.size() == 0 ? Rational(0)
                                                           : oracle(scenario, witness.baseline, kind, witness.agent);
    return deviated - baseline;
}

AuditReport check_ir(const Scenario& scenario, MechanismKind kind) {
    AuditReport report;
    report.property = Property::IR;
    const auto truthful = truthful_profile(scenario);
    const auto outcome = run_mechanism(kind, scenario, truthful);
    for (const auto& agent : scenario.agents()) {
        const Rational u = utility_over_realizations(scenario, outcome, agent.id);
        ++report.cases_checked;
        const bool in_sequence =
            std::find(outcome.sequence.begin(), outcome.sequence.end(), agent.id) != outcome.sequence.end();
        if (in_sequence || !u.is_zero()) report.certificate.emplace_back("u_" + to_string(agent.id), u);
        if (u.sign() < 0 && report.holds()) {
            report.verdict = Verdict::Violated;
            report.witness = Witness{agent.id, {}, truthful, std::nullopt, Rational(0), u,
                                     "truthful expected utility of agent " + to_string(agent.id) + " is " +
                                         u.to_string()};
        }
    }
    if (outcome.is_null()) report.detail = "null allocation";
    return report;
}

AuditReport check_ic(const Scenario& scenario, MechanismKind kind, const DeviationGrid& grid) {
    AuditReport report;
    report.property = Property::IC;
    std::mt19937_64 rng(grid.seed);

    std::vector<std::vector<Report>> deviations;
    deviations.reserve(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i) deviations.push_back(grid.deviations(scenario, kind, i, rng));

    std::vector<ReportProfile> contexts{truthful_profile(scenario)};
    for (std::size_t c = 0; c < grid.random_contexts; ++c) {
        ReportProfile ctx = contexts.front();
        for (std::size_t j = 0; j < scenario.size(); ++j) {
            const auto& pool = deviations[j];
            ctx[j] = pool[detail::bounded(rng, pool.size())];
        }
        contexts.push_back(std::move(ctx));
    }
    report.scenarios_checked = contexts.size();

    for (std::size_t c = 0; c < contexts.size(); ++c) {
        for (std::size_t i = 0; i < scenario.size(); ++i) {
            const AgentId agent = scenario.at(i).id;
            ReportProfile profile = contexts[c];
            profile[i] = Report::truthful(scenario.at(i).type);
            const Rational base = oracle(scenario, profile, kind, agent);
            for (auto& deviation : deviations[i]) {
                std::swap(profile[i], deviation);
                const Rational u = oracle(scenario, profile, kind, agent);
                ++report.cases_checked;
                if (u > base) {
                    ReportProfile baseline = profile;
                    baseline[i] = Report::truthful(scenario.at(i).type);
                    std::ostringstream msg;
                    msg << "agent " << to_string(agent) << " gains " << (u - base).to_string() << " by reporting "
                        << describe(profile[i]) << (c == 0 ? "" : " (non-truthful context)");
                    report.verdict = Verdict::Violated;
                    report.witness = Witness{agent, baseline, profile, profile[i], base, u, msg.str()};
                    std::swap(profile[i], deviation);
                    return report;
                }
                std::swap(profile[i], deviation);
            }
        }
    }
    return report;
}

AuditReport check_wbb(const Scenario& scenario, MechanismKind kind) {
    AuditReport report;
    report.property = Property::WBB;
    const auto truthful = truthful_profile(scenario);
    const auto outcome = run_mechanism(kind, scenario, truthful);
    auto fail = [&](const Rational& value, std::string why) {
        if (!report.holds()) return;
        report.verdict = Verdict::Violated;
        report.witness = Witness{kRequester, {}, truthful, std::nullopt, Rational(0), value, std::move(why)};
    };
    const auto dist = realized_quality_distribution(scenario, outcome);
    if (!dist) {
        report.certificate.emplace_back("u_s", Rational(0));
        report.detail = "null allocation";
        return report;
    }
    Rational expected;
    for (const auto& point : dist->support()) {
        const auto pay = payoffs(outcome, point.quality);
        ++report.cases_checked;
        report.certificate.emplace_back("u_s@q=" + point.quality.to_string(), pay.requester_utility);
        expected += point.probability * pay.requester_utility;
        if (kind == MechanismKind::Pev || kind == MechanismKind::Idm) {
            if (pay.requester_utility != outcome.w.front()) {
                fail(pay.requester_utility, "requester utility at q=" + point.quality.to_string() +
                                                " differs from w_i1 = " + outcome.w.front().to_string());
            }
        }
    }
    report.certificate.emplace_back("E[u_s]", expected);
    if (kind == MechanismKind::Pev || kind == MechanismKind::Idm) {
        report.certificate.emplace_back("w_i1", outcome.w.front());
        if (outcome.w.front().sign() < 0) fail(outcome.w.front(), "w_i1 is negative");
    }
    if (expected.sign() < 0) fail(expected, "expected requester utility " + expected.to_string() + " < 0");
    return report;
}

AuditReport check_efficiency_gap(const Scenario& scenario, MechanismKind kind) {
    AuditReport report;
    report.property = Property::Efficiency;
    const auto truthful = truthful_profile(scenario);
    const Allocation efficient = efficient_allocation(scenario, truthful);
    const auto outcome = run_mechanism(kind, scenario, truthful);
    const Allocation achieved = outcome.allocation(scenario);
    const Rational gap = efficient.expected_welfare - achieved.expected_welfare;
    report.cases_checked = 1;
    report.certificate.emplace_back("efficient_welfare", efficient.expected_welfare);
    report.certificate.emplace_back("mechanism_welfare", achieved.expected_welfare);
    report.certificate.emplace_back("gap", gap);
    if (!gap.is_zero()) {
        report.verdict = Verdict::Violated;
        report.witness = Witness{achieved.selected.value_or(kRequester), {}, truthful, std::nullopt, Rational(0), gap,
                                 "mechanism selects " + (achieved.selected ? to_string(*achieved.selected) : "nobody") +
                                     " while " + (efficient.selected ? to_string(*efficient.selected) : "nobody") +
                                     " is efficient; gap " + gap.to_string()};
    }
    return report;
}

std::vector<AuditReport> check_lemmas(const Scenario& scenario, const Rational& perturbation_step) {
    const auto truthful = truthful_profile(scenario);
    const auto outcome = pev_allocate(scenario, truthful);

    AuditReport lemma1;
    lemma1.property = Property::Lemma1;
    for (std::size_t k = 0; k < outcome.sequence.size(); ++k) {
        lemma1.certificate.emplace_back("w_" + to_string(outcome.sequence[k]), outcome.w[k]);
        ++lemma1.cases_checked;
        if (k > 0 && outcome.w[k - 1] > outcome.w[k] && lemma1.holds()) {
            lemma1.verdict = Verdict::Violated;
            lemma1.witness = Witness{outcome.sequence[k], {}, truthful, std::nullopt, outcome.w[k - 1], outcome.w[k],
                                     "w decreases along the critical sequence"};
        }
    }

    AuditReport lemma2;
    lemma2.property = Property::Lemma2;
    const auto levels = scenario.quality_levels();
    auto perturbations = [&](const Report& r) {
        std::vector<Report> out;
        auto invited = std::vector<AgentId>(r.invited().begin(), r.invited().end());
        out.push_back(Report::bid(r.pmf(), r.cost() + perturbation_step, invited));
        if (r.cost() >= perturbation_step) out.push_back(Report::bid(r.pmf(), r.cost() - perturbation_step, invited));
        out.push_back(Report::bid(r.pmf(), r.cost() * Rational(2), invited));
        out.push_back(Report::bid(Pmf::point_mass(levels.back()), r.cost(), invited));
        out.push_back(Report::bid(Pmf::point_mass(levels.front()), r.cost(), invited));
        out.push_back(Report::bid(Pmf::point_mass(levels.back()), Rational(0), invited));
        return out;
    };
    const auto dist = realized_quality_distribution(scenario, outcome);
    for (std::size_t i = 0; i < scenario.size() && !outcome.is_null(); ++i) {
        const AgentId agent = scenario.at(i).id;
        for (auto& alt : perturbations(truthful[i])) {
            ReportProfile profile = truthful;
            profile[i] = alt;
            const auto perturbed = pev_allocate(scenario, profile);
            if (perturbed.selected() != outcome.selected() || perturbed.sequence != outcome.sequence) continue;
            for (const auto& point : dist->support()) {
                ++lemma2.cases_checked;
                const Rational before = pev_payoffs(outcome, point.quality).at(agent);
                const Rational after = pev_payoffs(perturbed, point.quality).at(agent);
                if (before != after && lemma2.holds()) {
                    lemma2.verdict = Verdict::Violated;
                    lemma2.witness = Witness{agent, truthful, profile, alt, before, after,
                                             "payoff of agent " + to_string(agent) + " moves with her own report"};
                }
            }
        }
    }
    // w_i from (nil, theta'_-i) must not see i's own report.
    for (std::size_t k = 0; k < outcome.sequence.size(); ++k) {
        const AgentId member = outcome.sequence[k];
        const std::size_t idx = scenario.require_index(member);
        for (auto& alt : perturbations(truthful[idx])) {
            ReportProfile profile = truthful;
            profile[idx] = alt;
            const Rational recomputed = efficient_allocation(scenario, without_agent(scenario, profile, member)).expected_welfare;
            ++lemma2.cases_checked;
            if (recomputed != outcome.w[k] && lemma2.holds()) {
                lemma2.verdict = Verdict::Violated;
                lemma2.witness = Witness{member, truthful, profile, alt, outcome.w[k], recomputed,
                                         "w_" + to_string(member) + " depends on the agent's own report"};
            }
        }
        lemma2.certificate.emplace_back("w_" + to_string(member), outcome.w[k]);
    }
    return {lemma1, lemma2};
}

}  // namespace pevnet
