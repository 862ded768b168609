#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pevnet/network.hpp"

namespace pevnet {

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class MechanismKind { Pev, Idm, Qaidm, Vcg };

std::string to_string(MechanismKind kind);
MechanismKind parse_mechanism(std::string_view name);  // throws std::invalid_argument

/// Tie rule when several candidates share the best reported welfare.
struct TieBreak {
    enum class Mode { SmallestId, Seeded };
    Mode mode = Mode::SmallestId;
    std::uint64_t seed = 0;

    static TieBreak seeded(std::uint64_t seed) { return {Mode::Seeded, seed}; }
};

struct Allocation {
    std::optional<AgentId> selected;
    Rational expected_welfare;         // of the selected agent, 0 for the null allocation
    std::vector<std::uint8_t> indicator;  // aligned with Scenario::agents()
};

/// pi*: argmax over participants of reported E[Q] - c, with a welfare-0 null
/// option that wins whenever every candidate is strictly negative.
Allocation efficient_allocation(const Scenario& scenario, const ReportProfile& reports, TieBreak tie = {});

struct MechanismOutcome {
    MechanismKind kind = MechanismKind::Pev;
    std::optional<AgentId> champion;      // j, the welfare champion
    Rational champion_welfare;
    std::vector<AgentId> sequence;        // (i_1, ..., i_m), i_m = j; s omitted
    std::vector<Rational> w;              // w_{i_k}, aligned with sequence
    std::optional<std::size_t> selected_index;  // zero-based t - 1

    Rational reported_expectation;        // qaidm: selected agent's reported E[Q]
    Rational uniform_quality;             // idm / vcg: the common quality q
    std::vector<std::pair<AgentId, Rational>> fixed_payoffs;  // vcg: nonzero pivot payments

    bool is_null() const { return !selected_index.has_value(); }
    std::optional<AgentId> selected() const;
    Allocation allocation(const Scenario& scenario) const;
};

/// Payoffs p_i for one realized quality. Agents not listed are paid zero.
struct PayoffVector {
    std::vector<std::pair<AgentId, Rational>> entries;
    Rational realized_quality;
    Rational requester_utility;

    Rational at(AgentId id) const;
    Rational total() const;
};

/// PEV allocation: champion, critical sequence, w values and the selected agent.
MechanismOutcome pev_allocate(const Scenario& scenario, const ReportProfile& reports, TieBreak tie = {});

/// PEV payoffs for the realized quality q_pi.
PayoffVector pev_payoffs(const MechanismOutcome& outcome, const Rational& realized_quality);

/// Information Diffusion Mechanism for the setting where every agent performs
/// at the common quality q. Throws PreconditionError when some true or
/// reported pmf is not the point mass at q.
MechanismOutcome idm_run(const Scenario& scenario, const ReportProfile& reports, const Rational& q, TieBreak tie = {});
MechanismOutcome idm_run(const Scenario& scenario, const ReportProfile& reports, TieBreak tie = {});

/// Quality-aware IDM: PEV allocation, but the selected agent is paid from her
/// reported expectation instead of the realized quality. Not truthful.
MechanismOutcome qaidm_run(const Scenario& scenario, const ReportProfile& reports, TieBreak tie = {});

/// VCG over the diffusion graph with pivot payments. Same precondition as IDM.
MechanismOutcome vcg_run(const Scenario& scenario, const ReportProfile& reports, const Rational& q, TieBreak tie = {});
MechanismOutcome vcg_run(const Scenario& scenario, const ReportProfile& reports, TieBreak tie = {});

MechanismOutcome run_mechanism(MechanismKind kind, const Scenario& scenario, const ReportProfile& reports,
                               TieBreak tie = {});

/// Common quality shared by every true and reported pmf, if any.
std::optional<Rational> uniform_quality(const Scenario& scenario, const ReportProfile& reports);

/// Payoff rule of any mechanism at a realized quality. A null outcome pays
/// nobody and leaves the requester at zero.
PayoffVector payoffs(const MechanismOutcome& outcome, const Rational& realized_quality);

/// u_i = p_i - pi_i * c_i with the agent's true cost.
Rational agent_utility(const Scenario& scenario, const MechanismOutcome& outcome, const PayoffVector& pay,
                       AgentId id);

/// Distribution the realized quality is drawn from: the selected agent's true
/// pmf (point mass at q for idm/vcg); nullopt for a null outcome.
std::optional<Pmf> realized_quality_distribution(const Scenario& scenario, const MechanismOutcome& outcome);

struct ExpectedUtilities {
    std::map<AgentId, Rational> agents;  // every agent of the scenario
    Rational requester;
};

/// Closed-form expected utilities over the selected agent's true pmf.
ExpectedUtilities expected_utilities(const Scenario& scenario, const ReportProfile& reports,
                                     const MechanismOutcome& outcome);

}  // namespace pevnet
