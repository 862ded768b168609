// Information Diffusion Mechanism and network VCG for the setting without
// execution uncertainty: every agent performs at the same quality q, so an
// agent's reported welfare is q - c'.
#include <algorithm>

#include "mechanism_detail.hpp"
#include "pevnet/mechanism.hpp"

namespace pevnet {
namespace {

using detail::Candidate;

Rational require_uniform(const Scenario& scenario, const ReportProfile& reports, const std::optional<Rational>& q,
                         std::string_view mechanism) {
    auto common = uniform_quality(scenario, reports);
    if (!common || (q && *common != *q)) {
        throw PreconditionError(std::string(mechanism) +
                                " requires every true and reported pmf to be the same point mass");
    }
    return *common;
}

std::vector<Candidate> cost_candidates(const DiffusionGraph& graph, const ReportProfile& reports,
                                       const std::vector<std::uint8_t>& seen, const Rational& q) {
    std::vector<Candidate> out;
    for (std::size_t v = 1; v < graph.node_count(); ++v) {
        const auto& report = reports[v - 1];
        if (seen[v] && !report.is_nil()) out.push_back({v, q - report.cost()});
    }
    return out;
}

// Best q - c' once `blocked` is removed; the dummy agent (c_d = q) floors it at 0.
Rational least_cost_welfare_without(const DiffusionGraph& graph, const ReportProfile& reports, std::size_t blocked,
                                    const Rational& q) {
    Rational best;
    for (const auto& c : cost_candidates(graph, reports, graph.reachable(blocked), q)) best = max(best, c.welfare);
    return best;
}

}  // namespace

MechanismOutcome idm_run(const Scenario& scenario, const ReportProfile& reports, const Rational& q, TieBreak tie) {
    MechanismOutcome out;
    out.kind = MechanismKind::Idm;
    out.uniform_quality = require_uniform(scenario, reports, q, "idm");

    const auto graph = build_graph(scenario, reports);
    const auto candidates = cost_candidates(graph, reports, graph.reachable(), q);
    auto best = detail::pick_best(candidates, tie);
    if (!best || candidates[*best].welfare.sign() < 0) return out;

    const AgentId champion = graph.id_of(candidates[*best].node);
    out.champion = champion;
    out.champion_welfare = candidates[*best].welfare;
    out.sequence = critical_sequence_by_dominators(graph, champion).order;
    for (AgentId member : out.sequence) {
        out.w.push_back(least_cost_welfare_without(graph, reports, *graph.node_of(member), q));
    }
    const std::size_t m = out.sequence.size();
    out.selected_index = m - 1;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (q - reports[scenario.require_index(out.sequence[k])].cost() == out.w[k + 1]) {
            out.selected_index = k;
            break;
        }
    }
    return out;
}

MechanismOutcome idm_run(const Scenario& scenario, const ReportProfile& reports, TieBreak tie) {
    const Rational q = require_uniform(scenario, reports, std::nullopt, "idm");
    return idm_run(scenario, reports, q, tie);
}

MechanismOutcome vcg_run(const Scenario& scenario, const ReportProfile& reports, const Rational& q, TieBreak tie) {
    MechanismOutcome out;
    out.kind = MechanismKind::Vcg;
    out.uniform_quality = require_uniform(scenario, reports, q, "vcg");

    const auto graph = build_graph(scenario, reports);
    const auto seen = graph.reachable();
    const auto candidates = cost_candidates(graph, reports, seen, q);
    auto best = detail::pick_best(candidates, tie);
    if (!best || candidates[*best].welfare.sign() < 0) return out;

    const std::size_t winner = candidates[*best].node;
    const Rational welfare = candidates[*best].welfare;
    out.champion = graph.id_of(winner);
    out.champion_welfare = welfare;

    // Pivot payment: welfare of the chosen allocation without the payee's own
    // cost, minus the best welfare once the payee is removed.
    for (const auto& c : candidates) {
        const Rational without = least_cost_welfare_without(graph, reports, c.node, q);
        const Rational with = c.node == winner ? q : welfare;
        const Rational pay = with - without;
        if (!pay.is_zero()) out.fixed_payoffs.emplace_back(graph.id_of(c.node), pay);
    }

    out.sequence = critical_sequence_by_dominators(graph, *out.champion).order;
    for (AgentId member : out.sequence) {
        out.w.push_back(least_cost_welfare_without(graph, reports, *graph.node_of(member), q));
    }
    out.selected_index = out.sequence.size() - 1;
    return out;
}

MechanismOutcome vcg_run(const Scenario& scenario, const ReportProfile& reports, TieBreak tie) {
    const Rational q = require_uniform(scenario, reports, std::nullopt, "vcg");
    return vcg_run(scenario, reports, q, tie);
}

}  // namespace pevnet
