#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pevnet/pmf.hpp"
#include "pevnet/rational.hpp"

namespace pevnet {

class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AgentId {
    std::uint32_t value = 0;

    friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

/// The task requester `s`; never a worker id.
inline constexpr AgentId kRequester{0xFFFFFFFFu};

std::string to_string(AgentId id);

struct AgentType {
    Pmf pmf;
    Rational cost;
    std::vector<AgentId> neighbors;  // sorted, never contains the agent itself
};

struct Agent {
    AgentId id;
    AgentType type;
};

/// Ground truth: the requester's neighbours, every worker's true type and
/// the finite set of quality levels. Agents are stored sorted by id; the
/// position of an agent in agents() is its dense index everywhere else.
class Scenario {
public:
    Scenario(std::vector<Rational> quality_levels, std::vector<AgentId> requester_neighbors,
             std::vector<Agent> agents);

    std::span<const Rational> quality_levels() const { return quality_levels_; }
    std::span<const AgentId> requester_neighbors() const { return requester_neighbors_; }
    std::span<const Agent> agents() const { return agents_; }
    std::size_t size() const { return agents_.size(); }

    std::optional<std::size_t> index_of(AgentId id) const;
    std::size_t require_index(AgentId id) const;  // throws StructuralError
    const Agent& agent(AgentId id) const { return agents_[require_index(id)]; }
    const Agent& at(std::size_t index) const { return agents_[index]; }

private:
    std::vector<Rational> quality_levels_;
    std::vector<AgentId> requester_neighbors_;
    std::vector<Agent> agents_;
    bool dense_ = false;  // ids are exactly 1..n
};

/// One agent's declaration. `nil` means the agent declines: she neither bids
/// nor forwards the invitation. `withdrawn` is the node-deletion state used
/// when the agent is removed from the network altogether.
class Report {
public:
    static Report nil();
    static Report withdrawn();
    static Report bid(Pmf pmf, Rational cost, std::vector<AgentId> invited);
    static Report truthful(const AgentType& type);

    bool is_nil() const { return state_ != State::Bid; }
    bool is_withdrawn() const { return state_ == State::Withdrawn; }

    const Pmf& pmf() const;
    const Rational& cost() const { return cost_; }
    std::span<const AgentId> invited() const { return invited_; }
    /// E_{f'}[Q] - c'; zero for nil reports.
    const Rational& welfare() const { return welfare_; }

    friend bool operator==(const Report& a, const Report& b);

private:
    enum class State : std::uint8_t { Bid, Nil, Withdrawn };
    State state_ = State::Nil;
    std::optional<Pmf> pmf_;
    Rational cost_;
    Rational welfare_;
    std::vector<AgentId> invited_;
};

/// Reports aligned with Scenario::agents().
class ReportProfile {
public:
    ReportProfile() = default;
    explicit ReportProfile(std::vector<Report> reports) : reports_(std::move(reports)) {}

    std::size_t size() const { return reports_.size(); }
    const Report& operator[](std::size_t index) const { return reports_[index]; }
    Report& operator[](std::size_t index) { return reports_[index]; }
    std::span<const Report> reports() const { return reports_; }

    friend bool operator==(const ReportProfile&, const ReportProfile&) = default;

private:
    std::vector<Report> reports_;
};

ReportProfile truthful_profile(const Scenario& scenario);

/// Checks a profile against the ground truth: sizes match, every invited id is
/// a true neighbour (r'_i subset of r_i) and every reported cost is >= 0.
std::optional<std::string> validate_profile(const Scenario& scenario, const ReportProfile& reports);

/// Directed diffusion graph. Node 0 is the requester, node k + 1 is the agent
/// at dense index k.
class DiffusionGraph {
public:
    DiffusionGraph(std::vector<AgentId> ids, std::vector<std::uint32_t> offsets,
                   std::vector<std::uint32_t> targets, std::vector<std::uint8_t> removed);

    std::size_t node_count() const { return ids_.size() + 1; }
    std::span<const std::uint32_t> out(std::size_t node) const {
        return {targets_.data() + offsets_[node], targets_.data() + offsets_[node + 1]};
    }
    bool removed(std::size_t node) const { return node != 0 && removed_[node - 1] != 0; }
    AgentId id_of(std::size_t node) const { return node == 0 ? kRequester : ids_[node - 1]; }
    std::optional<std::size_t> node_of(AgentId id) const;
    bool has_edge(AgentId from, AgentId to) const;

    /// Reachability from s, skipping `blocked` (a node id, 0 for none) and
    /// every removed node. Result is indexed by node.
    std::vector<std::uint8_t> reachable(std::size_t blocked = 0) const;
    /// Same, reusing caller-owned buffers.
    void reachable_into(std::size_t blocked, std::vector<std::uint8_t>& seen, std::vector<std::uint32_t>& stack) const;

private:
    std::vector<AgentId> ids_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> targets_;
    std::vector<std::uint8_t> removed_;
};

DiffusionGraph build_graph(const Scenario& scenario, const ReportProfile& reports);

/// I(theta'): agents reachable from s, in id order. Never contains s.
std::vector<AgentId> participants(const DiffusionGraph& graph);

/// Same profile with agent `id` deleted from the network.
ReportProfile without_agent(const Scenario& scenario, const ReportProfile& reports, AgentId id);

/// Critical agents of `target` ordered by nested dominance; `order` omits the
/// requester, which implicitly heads every sequence, and ends with target.
struct CriticalSequence {
    AgentId target;
    std::vector<AgentId> order;
};

/// Reference computation: one reachability pass per candidate node deletion.
CriticalSequence critical_sequence(const DiffusionGraph& graph, AgentId target);

/// Immediate dominators from s (Cooper-Harvey-Kennedy iteration), indexed by
/// node; nullopt for s and for unreachable nodes.
std::vector<std::optional<std::size_t>> immediate_dominators(const DiffusionGraph& graph);

/// Fast path via the dominator tree. Must agree with critical_sequence().
CriticalSequence critical_sequence_by_dominators(const DiffusionGraph& graph, AgentId target);

std::string to_string(const CriticalSequence& sequence);

}  // namespace pevnet
