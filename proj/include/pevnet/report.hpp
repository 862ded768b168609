#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pevnet/audit.hpp"
#include "pevnet/mechanism.hpp"
#include "pevnet/sim.hpp"

namespace pevnet {

struct SimulationRow {
    AgentId agent;  // kRequester for the requester
    Rational empirical;
    Rational analytic;
    Rational variance;
    double z = 0;
    bool pass = false;

    friend bool operator==(const SimulationRow&, const SimulationRow&) = default;
};

struct SimulationSummary {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<Rational, std::size_t>> quality_counts;
    std::vector<SimulationRow> rows;
    bool pass = true;

    friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

/// Everything `run` prints. In expected mode payoffs and utilities are
/// expectations over the selected agent's true pmf.
struct RunReport {
    std::string scenario;
    std::string mechanism;
    std::string mode;  // "expected", "quality" or "sample"
    std::optional<Rational> realized_quality;
    std::optional<std::uint64_t> seed;
    std::optional<AgentId> champion;
    Rational champion_welfare;
    std::vector<AgentId> sequence;
    std::vector<Rational> w;
    std::optional<AgentId> selected;
    std::vector<std::pair<AgentId, Rational>> payoffs;    // agents the payoff rule names, in rule order
    std::vector<std::pair<AgentId, Rational>> utilities;  // every agent in id order
    Rational requester_utility;
    std::optional<SimulationSummary> simulation;

    Rational payoff(AgentId id) const;
    Rational utility(AgentId id) const;
    Rational w_of(AgentId id) const;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Evaluates an outcome at a fixed realized quality.
RunReport make_run_report(const std::string& scenario_name, const Scenario& scenario, const MechanismOutcome& outcome,
                          const Rational& realized_quality);
/// Evaluates an outcome in expectation over the selected agent's true pmf.
RunReport make_expected_report(const std::string& scenario_name, const Scenario& scenario,
                               const MechanismOutcome& outcome);

SimulationSummary summarize(const TrialStats& stats, const Comparison& comparison);

std::string render_text(const RunReport& report);
std::string to_json(const RunReport& report);
RunReport run_report_from_json(const std::string& text);

std::string render_text(const AuditReport& report);
std::string to_json(const std::vector<AuditReport>& reports, const std::string& scenario, const std::string& mechanism);

}  // namespace pevnet
