#include "pevnet/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace pevnet {

using json = nlohmann::ordered_json;

namespace {

Rational lookup(const std::vector<std::pair<AgentId, Rational>>& entries, AgentId id) {
    for (const auto& [agent, value] : entries) {
        if (agent == id) return value;
    }
    return Rational(0);
}

RunReport skeleton(const std::string& scenario_name, const MechanismOutcome& outcome) {
    RunReport r;
    r.scenario = scenario_name;
    r.mechanism = to_string(outcome.kind);
    r.champion = outcome.champion;
    r.champion_welfare = outcome.champion_welfare;
    r.sequence = outcome.sequence;
    r.w = outcome.w;
    r.selected = outcome.selected();
    return r;
}

std::string agent_key(AgentId id) { return id == kRequester ? "s" : std::to_string(id.value); }

AgentId parse_agent_key(const std::string& key) {
    if (key == "s") return kRequester;
    return AgentId{static_cast<std::uint32_t>(std::stoul(key))};
}

json entries_json(const std::vector<std::pair<AgentId, Rational>>& entries) {
    json out = json::object();
    for (const auto& [id, value] : entries) out[agent_key(id)] = value.to_string();
    return out;
}

std::vector<std::pair<AgentId, Rational>> entries_from(const json& obj) {
    std::vector<std::pair<AgentId, Rational>> out;
    for (const auto& [key, value] : obj.items()) out.emplace_back(parse_agent_key(key), Rational::parse(value.get<std::string>()));
    return out;
}

std::string entries_text(const char* prefix, const std::vector<std::pair<AgentId, Rational>>& entries) {
    std::string out;
    for (const auto& [id, value] : entries) out += std::string(out.empty() ? "" : " ") + prefix + to_string(id) + "=" + value.to_string();
    return out.empty() ? "(none)" : out;
}

}  // namespace

Rational RunReport::payoff(AgentId id) const { return lookup(payoffs, id); }
Rational RunReport::utility(AgentId id) const { return lookup(utilities, id); }
Rational RunReport::w_of(AgentId id) const {
    for (std::size_t k = 0; k < sequence.size(); ++k) {
        if (sequence[k] == id) return w[k];
    }
    return Rational(0);
}

RunReport make_run_report(const std::string& scenario_name, const Scenario& scenario, const MechanismOutcome& outcome,
                          const Rational& realized_quality) {
    RunReport r = skeleton(scenario_name, outcome);
    r.mode = "quality";
    r.realized_quality = realized_quality;
    const PayoffVector pay = payoffs(outcome, realized_quality);
    r.payoffs = pay.entries;
    for (const auto& agent : scenario.agents()) r.utilities.emplace_back(agent.id, agent_utility(scenario, outcome, pay, agent.id));
    r.requester_utility = pay.requester_utility;
    return r;
}

RunReport make_expected_report(const std::string& scenario_name, const Scenario& scenario,
                               const MechanismOutcome& outcome) {
    RunReport r = skeleton(scenario_name, outcome);
    r.mode = "expected";
    for (const auto& agent : scenario.agents()) r.utilities.emplace_back(agent.id, Rational(0));
    const auto dist = realized_quality_distribution(scenario, outcome);
    if (!dist) return r;
    bool first = true;
    for (const auto& point : dist->support()) {
        const PayoffVector pay = payoffs(outcome, point.quality);
        if (first) {
            for (const auto& [id, amount] : pay.entries) r.payoffs.emplace_back(id, Rational(0));
            first = false;
        }
        for (auto& [id, amount] : r.payoffs) amount += point.probability * pay.at(id);
        for (auto& [id, u] : r.utilities) u += point.probability * agent_utility(scenario, outcome, pay, id);
        r.requester_utility += point.probability * pay.requester_utility;
    }
    return r;
}

SimulationSummary summarize(const TrialStats& stats, const Comparison& comparison) {
    SimulationSummary s;
    s.trials = stats.trials;
    s.seed = stats.seed;
    for (const auto& [q, count] : stats.quality_counts) s.quality_counts.emplace_back(q, count);
    for (const auto& row : comparison.rows) {
        const Moments& m = row.agent == kRequester ? stats.requester : stats.agents.at(row.agent);
        s.rows.push_back({row.agent, row.empirical, row.analytic, m.variance, row.z, row.pass});
    }
    s.pass = comparison.pass;
    return s;
}

std::string render_text(const RunReport& r) {
    std::ostringstream out;
    out << "scenario: " << r.scenario << "\n";
    out << "mechanism: " << r.mechanism << "\n";
    if (!r.champion) {
        out << "allocation: null (no participant with non-negative expected welfare)\n";
    } else {
        out << "welfare champion: " << to_string(*r.champion) << " (expected welfare " << r.champion_welfare.to_string()
            << ")\n";
        out << "critical sequence: (s";
        for (AgentId id : r.sequence) out << ", " << to_string(id);
        out << ")\n";
        std::vector<std::pair<AgentId, Rational>> ws;
        for (std::size_t k = 0; k < r.sequence.size(); ++k) ws.emplace_back(r.sequence[k], r.w[k]);
        out << "w: " << entries_text("w_", ws) << "\n";
        out << "selected: " << to_string(*r.selected) << "\n";
    }
    if (r.mode == "expected") {
        out << "mode: expected over the selected agent's true pmf\n";
    } else {
        out << "realized quality: " << (r.realized_quality ? r.realized_quality->to_string() : "none");
        if (r.seed) out << " (sampled with seed " << *r.seed << ")";
        out << "\n";
    }
    out << (r.mode == "expected" ? "expected payoffs: " : "payoffs: ") << entries_text("p_", r.payoffs) << "\n";
    out << (r.mode == "expected" ? "expected utilities: " : "utilities: ") << entries_text("u_", r.utilities) << "\n";
    out << "requester utility: " << r.requester_utility.to_string() << "\n";
    if (r.simulation) {
        const auto& s = *r.simulation;
        out << "simulation: " << s.trials << " trials, seed " << s.seed << ", " << (s.pass ? "consistent" : "INCONSISTENT")
            << "\n";
        for (const auto& row : s.rows) {
            out << "  " << (row.agent == kRequester ? std::string("s") : to_string(row.agent)) << ": empirical "
                << row.empirical.to_double() << " analytic " << row.analytic.to_string() << " z " << row.z
                << (row.pass ? "" : "  FAIL") << "\n";
        }
    }
    return out.str();
}

std::string to_json(const RunReport& r) {
    json j;
    j["scenario"] = r.scenario;
    j["mechanism"] = r.mechanism;
    j["mode"] = r.mode;
    j["realized_quality"] = r.realized_quality ? json(r.realized_quality->to_string()) : json(nullptr);
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["champion"] = r.champion ? json(r.champion->value) : json(nullptr);
    j["champion_welfare"] = r.champion_welfare.to_string();
    j["sequence"] = json::array();
    for (AgentId id : r.sequence) j["sequence"].push_back(id.value);
    j["w"] = json::array();
    for (const auto& w : r.w) j["w"].push_back(w.to_string());
    j["selected"] = r.selected ? json(r.selected->value) : json(nullptr);
    j["payoffs"] = entries_json(r.payoffs);
    j["utilities"] = entries_json(r.utilities);
    j["requester_utility"] = r.requester_utility.to_string();
    if (r.simulation) {
        const auto& s = *r.simulation;
        json sim;
        sim["trials"] = s.trials;
        sim["seed"] = s.seed;
        sim["quality_counts"] = json::array();
        for (const auto& [q, n] : s.quality_counts) sim["quality_counts"].push_back(json::array({q.to_string(), n}));
        sim["rows"] = json::array();
        for (const auto& row : s.rows) {
            sim["rows"].push_back({{"agent", agent_key(row.agent)},
                                   {"empirical", row.empirical.to_string()},
                                   {"analytic", row.analytic.to_string()},
                                   {"variance", row.variance.to_string()},
                                   {"z", std::isfinite(row.z) ? json(row.z) : json(nullptr)},
                                   {"pass", row.pass}});
        }
        sim["pass"] = s.pass;
        j["simulation"] = sim;
    }
    return j.dump(2) + "\n";
}

RunReport run_report_from_json(const std::string& text) {
    const json j = json::parse(text);
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.mechanism = j.at("mechanism").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    if (!j.at("realized_quality").is_null()) r.realized_quality = Rational::parse(j.at("realized_quality").get<std::string>());
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("champion").is_null()) r.champion = AgentId{j.at("champion").get<std::uint32_t>()};
    r.champion_welfare = Rational::parse(j.at("champion_welfare").get<std::string>());
    for (const auto& id : j.at("sequence")) r.sequence.push_back(AgentId{id.get<std::uint32_t>()});
    for (const auto& w : j.at("w")) r.w.push_back(Rational::parse(w.get<std::string>()));
    if (!j.at("selected").is_null()) r.selected = AgentId{j.at("selected").get<std::uint32_t>()};
    r.payoffs = entries_from(j.at("payoffs"));
    r.utilities = entries_from(j.at("utilities"));
    r.requester_utility = Rational::parse(j.at("requester_utility").get<std::string>());
    if (j.contains("simulation")) {
        const json& sim = j.at("simulation");
        SimulationSummary s;
        s.trials = sim.at("trials").get<std::size_t>();
        s.seed = sim.at("seed").get<std::uint64_t>();
        for (const auto& qc : sim.at("quality_counts")) {
            s.quality_counts.emplace_back(Rational::parse(qc.at(0).get<std::string>()), qc.at(1).get<std::size_t>());
        }
        for (const auto& row : sim.at("rows")) {
            s.rows.push_back({parse_agent_key(row.at("agent").get<std::string>()),
                              Rational::parse(row.at("empirical").get<std::string>()),
                              Rational::parse(row.at("analytic").get<std::string>()),
                              Rational::parse(row.at("variance").get<std::string>()),
                              row.at("z").is_null() ? INFINITY : row.at("z").get<double>(), row.at("pass").get<bool>()});
        }
        s.pass = sim.at("pass").get<bool>();
        r.simulation = s;
    }
    return r;
}

std::string render_text(const AuditReport& report) {
    std::ostringstream out;
    out << to_string(report.property) << ": " << to_string(report.verdict) << " (" << report.cases_checked << " cases";
    if (report.scenarios_checked > 1) out << ", " << report.scenarios_checked << " contexts";
    out << ")\n";
    if (!report.detail.empty()) out << "  " << report.detail << "\n";
    for (const auto& [name, value] : report.certificate) out << "  " << name << " = " << value.to_string() << "\n";
    if (report.witness) {
        const auto& w = *report.witness;
        out << "  witness: " << w.description << "\n";
        out << "  utility " << w.baseline_utility.to_string() << " -> " << w.deviated_utility.to_string() << " (delta "
            << w.delta().to_string() << ")\n";
    }
    return out.str();
}

std::string to_json(const std::vector<AuditReport>& reports, const std::string& scenario, const std::string& mechanism) {
    json j;
    j["scenario"] = scenario;
    j["mechanism"] = mechanism;
    j["properties"] = json::array();
    bool all = true;
    for (const auto& r : reports) {
        json p;
        p["property"] = to_string(r.property);
        p["verdict"] = to_string(r.verdict);
        p["cases_checked"] = r.cases_checked;
        p["contexts"] = r.scenarios_checked;
        if (!r.detail.empty()) p["detail"] = r.detail;
        json cert = json::object();
        for (const auto& [name, value] : r.certificate) cert[name] = value.to_string();
        p["certificate"] = cert;
        if (r.witness) {
            const auto& w = *r.witness;
            json wj;
            wj["agent"] = agent_key(w.agent);
            wj["description"] = w.description;
            wj["baseline_utility"] = w.baseline_utility.to_string();
            wj["deviated_utility"] = w.deviated_utility.to_string();
            wj["delta"] = w.delta().to_string();
            p["witness"] = wj;
        }
        all = all && r.holds();
        j["properties"].push_back(p);
    }
    j["all_hold"] = all;
    return j.dump(2) + "\n";
}

}  // namespace pevnet
