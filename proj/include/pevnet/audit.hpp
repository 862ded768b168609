#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pevnet/mechanism.hpp"

namespace pevnet {

enum class Property { IR, IC, WBB, Lemma1, Lemma2, Efficiency };
enum class Verdict { HoldsOnGrid, Violated };

std::string to_string(Property property);
std::string to_string(Verdict verdict);

/// A replayable counterexample: the full profile that was run, the profile it
/// is compared against, and the exact utilities of `agent` under both.
struct Witness {
    AgentId agent;                   // kRequester for budget witnesses
    ReportProfile baseline;          // agent truthful
    ReportProfile profile;           // the deviation (equal to baseline when none)
    std::optional<Report> deviation;
    Rational baseline_utility;
    Rational deviated_utility;
    std::string description;

    Rational delta() const { return deviated_utility - baseline_utility; }
};

struct AuditReport {
    Property property = Property::IR;
    Verdict verdict = Verdict::HoldsOnGrid;
    std::optional<Witness> witness;
    std::vector<std::pair<std::string, Rational>> certificate;
    std::size_t scenarios_checked = 1;
    std::size_t cases_checked = 0;
    std::string detail;

    bool holds() const { return verdict == Verdict::HoldsOnGrid; }
};

/// Finite discretisation of one agent's report space.
///
/// Costs: the true cost, every entry of `absolute_costs`, and the true cost
/// times each entry of `cost_scalings`. Pmfs: the truth, point masses at the
/// lowest and highest scenario quality, and every shift of k * mass_step from
/// a support point to any other quality level. With `full_simplex` the pmf set
/// is instead every distribution over the quality levels whose masses are
/// multiples of mass_step. Invitations: every subset of the true neighbours
/// up to `max_enumerated_neighbors`, otherwise `sampled_subsets` seeded draws
/// plus the full and empty sets. Idm and vcg keep the pmf fixed.
struct DeviationGrid {
    std::vector<Rational> absolute_costs;
    std::vector<Rational> cost_scalings{Rational(0), Rational(1, 2), Rational(3, 2), Rational(2)};
    Rational mass_step{1, 10};
    bool full_simplex = false;
    bool include_nil = true;
    std::size_t max_enumerated_neighbors = 12;
    std::size_t sampled_subsets = 2048;
    std::size_t random_contexts = 0;  // extra non-truthful profiles for the other agents
    std::uint64_t seed = 0;

    /// Absolute costs at multiples of `cost_step` on [0, max quality + cost_step].
    static DeviationGrid standard(const Scenario& scenario, const Rational& cost_step);
    /// Every pmf on the quality levels and every cost on the `step` grid over
    /// [0, max quality + step].
    static DeviationGrid full_type_space(const Scenario& scenario, const Rational& step);

    std::vector<Pmf> pmf_candidates(const Scenario& scenario, const Pmf& truth) const;
    std::vector<Rational> cost_candidates(const Rational& truth) const;
    std::vector<std::vector<AgentId>> invitation_subsets(std::span<const AgentId> neighbors,
                                                         std::mt19937_64& rng) const;
    /// Every report of the grid for the agent at dense index `index`.
    std::vector<Report> deviations(const Scenario& scenario, MechanismKind kind, std::size_t index,
                                   std::mt19937_64& rng) const;
};

/// E_{f_sel}[u_agent] for an outcome that has already been computed; the
/// agent may be kRequester.
Rational outcome_expected_utility(const Scenario& scenario, const MechanismOutcome& outcome, AgentId agent);

/// Brute-force E_{f_sel}[u_agent]: one mechanism run, then the utility at
/// every support point of the selected agent's true pmf, weighted exactly.
Rational expected_utility_oracle(const Scenario& scenario, const ReportProfile& reports, MechanismKind kind,
                                 AgentId agent, TieBreak tie = {});
Rational expected_requester_utility_oracle(const Scenario& scenario, const ReportProfile& reports,
                                           MechanismKind kind, TieBreak tie = {});

AuditReport check_ir(const Scenario& scenario, MechanismKind kind);
AuditReport check_ic(const Scenario& scenario, MechanismKind kind, const DeviationGrid& grid);
AuditReport check_wbb(const Scenario& scenario, MechanismKind kind);
AuditReport check_efficiency_gap(const Scenario& scenario, MechanismKind kind);
/// The w chain is nondecreasing, and payoffs ignore own-report changes that
/// keep the selected agent and the sequence (PEV only).
std::vector<AuditReport> check_lemmas(const Scenario& scenario, const Rational& perturbation_step = Rational(1, 10));

/// Recomputes both utilities of a witness from scratch.
Rational replay_delta(const Scenario& scenario, MechanismKind kind, const Witness& witness);

}  // namespace pevnet
