#include "pevnet/mechanism.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "mechanism_detail.hpp"

namespace pevnet {

std::string to_string(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::Pev: return "pev";
        case MechanismKind::Idm: return "idm";
        case MechanismKind::Qaidm: return "qaidm";
        case MechanismKind::Vcg: return "vcg";
    }
    return "?";
}

MechanismKind parse_mechanism(std::string_view name) {
    if (name == "pev") return MechanismKind::Pev;
    if (name == "idm") return MechanismKind::Idm;
    if (name == "qaidm") return MechanismKind::Qaidm;
    if (name == "vcg") return MechanismKind::Vcg;
    throw std::invalid_argument("unknown mechanism '" + std::string(name) + "' (expected pev, idm, qaidm or vcg)");
}

namespace detail {

std::optional<std::size_t> pick_best(const std::vector<Candidate>& candidates, TieBreak tie) {
    if (candidates.empty()) return std::nullopt;
    Rational best = candidates.front().welfare;
    for (const auto& c : candidates) best = max(best, c.welfare);
    std::vector<std::size_t> tied;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (candidates[k].welfare == best) tied.push_back(k);
    }
    // candidates arrive in id order, so the first tied entry has the smallest id
    if (tie.mode == TieBreak::Mode::SmallestId || tied.size() == 1) return tied.front();
    std::mt19937_64 rng(tie.seed);
    return tied[bounded(rng, tied.size())];
}

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return static_cast<std::size_t>(x % range);
}

}  // namespace detail

namespace {

using detail::Candidate;

std::vector<Candidate> pev_candidates(const DiffusionGraph& graph, const ReportProfile& reports,
                                      const std::vector<std::uint8_t>& seen) {
    std::vector<Candidate> out;
    out.reserve(graph.node_count());
    for (std::size_t v = 1; v < graph.node_count(); ++v) {
        const auto& report = reports[v - 1];
        if (seen[v] && !report.is_nil()) out.push_back({v, report.welfare()});
    }
    return out;
}

// Highest reported expected welfare reachable when `blocked` is deleted,
// floored at zero by the null option.
Rational best_welfare_without(const DiffusionGraph& graph, const ReportProfile& reports, std::size_t blocked) {
    thread_local std::vector<std::uint8_t> seen;
    thread_local std::vector<std::uint32_t> stack;
    graph.reachable_into(blocked, seen, stack);
    Rational best;
    for (std::size_t v = 1; v < graph.node_count(); ++v) {
        const auto& report = reports[v - 1];
        if (seen[v] && !report.is_nil() && best < report.welfare()) best = report.welfare();
    }
    return best;
}

}  // namespace

std::optional<AgentId> MechanismOutcome::selected() const {
    if (!selected_index) return std::nullopt;
    return sequence[*selected_index];
}

Allocation MechanismOutcome::allocation(const Scenario& scenario) const {
    Allocation out;
    out.selected = selected();
    out.indicator.assign(scenario.size(), 0);
    if (out.selected) {
        const auto& agent = scenario.agent(*out.selected);
        out.indicator[scenario.require_index(*out.selected)] = 1;
        out.expected_welfare = agent.type.pmf.expectation() - agent.type.cost;
    }
    return out;
}

Rational PayoffVector::at(AgentId id) const {
    for (const auto& [agent, amount] : entries) {
        if (agent == id) return amount;
    }
    return Rational(0);
}

Rational PayoffVector::total() const {
    Rational sum;
    for (const auto& entry : entries) sum += entry.second;
    return sum;
}

Allocation efficient_allocation(const Scenario& scenario, const ReportProfile& reports, TieBreak tie) {
    const auto graph = build_graph(scenario, reports);
    const auto seen = graph.reachable();
    const auto candidates = pev_candidates(graph, reports, seen);
    Allocation out;
    out.indicator.assign(scenario.size(), 0);
    auto best = detail::pick_best(candidates, tie);
    if (!best || candidates[*best].welfare.sign() < 0) return out;
    const std::size_t node = candidates[*best].node;
    out.selected = graph.id_of(node);
    out.expected_welfare = candidates[*best].welfare;
    out.indicator[node - 1] = 1;
    return out;
}

MechanismOutcome pev_allocate(const Scenario& scenario, const ReportProfile& reports, TieBreak tie) {
    MechanismOutcome out;
    out.kind = MechanismKind::Pev;
    const auto graph = build_graph(scenario, reports);
    const auto seen = graph.reachable();
    const auto candidates = pev_candidates(graph, reports, seen);

    // The welfare champion j over I(theta').
    auto best = detail::pick_best(candidates, tie);
    if (!best || candidates[*best].welfare.sign() < 0) return out;
    const AgentId champion = graph.id_of(candidates[*best].node);
    out.champion = champion;
    out.champion_welfare = candidates[*best].welfare;

    // Steps 2-3: the critical sequence of j and each member's w.
    out.sequence = critical_sequence_by_dominators(graph, champion).order;
    out.w.reserve(out.sequence.size());
    for (AgentId member : out.sequence) {
        out.w.push_back(best_welfare_without(graph, reports, *graph.node_of(member)));
    }

    // First member whose own welfare equals the next member's w.
    const std::size_t m = out.sequence.size();
    out.selected_index = m - 1;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const auto& report = reports[scenario.require_index(out.sequence[k])];
        if (report.welfare() == out.w[k + 1]) {
            out.selected_index = k;
            break;
        }
    }
    return out;
}

PayoffVector pev_payoffs(const MechanismOutcome& outcome, const Rational& realized_quality) {
    PayoffVector pay;
    pay.realized_quality = realized_quality;
    if (outcome.is_null()) return pay;
    const std::size_t t = *outcome.selected_index;
    for (std::size_t k = 0; k < t; ++k) {
        pay.entries.emplace_back(outcome.sequence[k], outcome.w[k + 1] - outcome.w[k]);
    }
    pay.entries.emplace_back(outcome.sequence[t], realized_quality - outcome.w[t]);
    pay.requester_utility = realized_quality - pay.total();
    return pay;
}

MechanismOutcome qaidm_run(const Scenario& scenario, const ReportProfile& reports, TieBreak tie) {
    MechanismOutcome out = pev_allocate(scenario, reports, tie);
    out.kind = MechanismKind::Qaidm;
    if (auto sel = out.selected()) {
        out.reported_expectation = reports[scenario.require_index(*sel)].pmf().expectation();
    }
    return out;
}

std::optional<Rational> uniform_quality(const Scenario& scenario, const ReportProfile& reports) {
    std::optional<Rational> q;
    auto check = [&](const Pmf& pmf) {
        if (!pmf.is_point_mass()) return false;
        if (!q) q = pmf.min_quality();
        return *q == pmf.min_quality();
    };
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        if (!check(scenario.at(i).type.pmf)) return std::nullopt;
        if (i < reports.size() && !reports[i].is_nil() && !check(reports[i].pmf())) return std::nullopt;
    }
    return q;
}

MechanismOutcome run_mechanism(MechanismKind kind, const Scenario& scenario, const ReportProfile& reports,
                               TieBreak tie) {
    switch (kind) {
        case MechanismKind::Pev: return pev_allocate(scenario, reports, tie);
        case MechanismKind::Idm: return idm_run(scenario, reports, tie);
        case MechanismKind::Qaidm: return qaidm_run(scenario, reports, tie);
        case MechanismKind::Vcg: return vcg_run(scenario, reports, tie);
    }
    throw std::logic_error("unhandled mechanism");
}

PayoffVector payoffs(const MechanismOutcome& outcome, const Rational& realized_quality) {
    switch (outcome.kind) {
        case MechanismKind::Pev:
        case MechanismKind::Idm:
            return pev_payoffs(outcome, realized_quality);
        case MechanismKind::Qaidm: {
            PayoffVector pay = pev_payoffs(outcome, realized_quality);
            if (outcome.is_null()) return pay;
            const std::size_t t = *outcome.selected_index;
            pay.entries.back().second = outcome.reported_expectation - outcome.w[t];
            pay.requester_utility = realized_quality - pay.total();
            return pay;
        }
        case MechanismKind::Vcg: {
            PayoffVector pay;
            pay.realized_quality = realized_quality;
            if (outcome.is_null()) return pay;
            pay.entries = outcome.fixed_payoffs;
            pay.requester_utility = realized_quality - pay.total();
            return pay;
        }
    }
    throw std::logic_error("unhandled mechanism");
}

Rational agent_utility(const Scenario& scenario, const MechanismOutcome& outcome, const PayoffVector& pay,
                       AgentId id) {
    Rational u = pay.at(id);
    if (outcome.selected() == id) u -= scenario.agent(id).type.cost;
    return u;
}

std::optional<Pmf> realized_quality_distribution(const Scenario& scenario, const MechanismOutcome& outcome) {
    auto sel = outcome.selected();
    if (!sel) return std::nullopt;
    if (outcome.kind == MechanismKind::Idm || outcome.kind == MechanismKind::Vcg) {
        return Pmf::point_mass(outcome.uniform_quality);
    }
    return scenario.agent(*sel).type.pmf;
}

ExpectedUtilities expected_utilities(const Scenario& scenario, const ReportProfile& reports,
                                     const MechanismOutcome& outcome) {
    (void)reports;
    ExpectedUtilities out;
    for (const auto& agent : scenario.agents()) out.agents[agent.id] = Rational(0);
    if (outcome.is_null()) return out;

    const AgentId sel = *outcome.selected();
    const auto& truth = scenario.agent(sel).type;
    const Rational true_mean =
        (outcome.kind == MechanismKind::Idm || outcome.kind == MechanismKind::Vcg) ? outcome.uniform_quality
                                                                                   : truth.pmf.expectation();
    if (outcome.kind == MechanismKind::Vcg) {
        Rational paid;
        for (const auto& [id, amount] : outcome.fixed_payoffs) {
            out.agents[id] += amount;
            paid += amount;
        }
        out.agents[sel] -= truth.cost;
        out.requester = true_mean - paid;
        return out;
    }

    const std::size_t t = *outcome.selected_index;
    for (std::size_t k = 0; k < t; ++k) out.agents[outcome.sequence[k]] = outcome.w[k + 1] - outcome.w[k];
    if (outcome.kind == MechanismKind::Qaidm) {
        out.agents[sel] = outcome.reported_expectation - outcome.w[t] - truth.cost;
        // requester keeps E[Q] minus the conduit payments (which telescope to
        // w_t - w_1) and the report-based payment
        out.requester = true_mean - (outcome.w[t] - outcome.w.front()) - (outcome.reported_expectation - outcome.w[t]);
    } else {
        out.agents[sel] = true_mean - outcome.w[t] - truth.cost;
        out.requester = outcome.w.front();
    }
    return out;
}

}  // namespace pevnet
