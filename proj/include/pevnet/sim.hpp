#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pevnet/mechanism.hpp"

namespace pevnet {

/// Exact sample mean and (n - 1)-normalised sample variance.
struct Moments {
    Rational mean;
    Rational variance;

    friend bool operator==(const Moments&, const Moments&) = default;
};

struct TrialStats {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    MechanismKind mechanism = MechanismKind::Pev;
    std::optional<AgentId> selected;
    std::map<Rational, std::size_t> quality_counts;  // realized quality -> trials
    std::map<AgentId, Moments> agents;
    Moments requester;

    friend bool operator==(const TrialStats&, const TrialStats&) = default;
};

/// Seed of the rng stream owned by trial `index`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

/// Runs the mechanism once, then draws `trials` realized qualities from the
/// selected agent's true pmf. A null allocation yields all-zero statistics.
TrialStats run_trials(const Scenario& scenario, const ReportProfile& reports, MechanismKind kind, std::size_t trials,
                      std::uint64_t seed, std::size_t workers = 0);

struct ComparisonRow {
    AgentId agent;  // kRequester for the requester row
    Rational empirical;
    Rational analytic;
    double standard_error = 0;
    double z = 0;
    bool exact = false;  // zero empirical variance: exact equality required
    bool pass = false;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    double max_z = 0;
    bool pass = true;
};

Comparison compare(const TrialStats& stats, const ExpectedUtilities& analytic, double band = 4.0);

}  // namespace pevnet
