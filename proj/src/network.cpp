#include "pevnet/network.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace pevnet {

std::string to_string(AgentId id) { return id == kRequester ? std::string("s") : std::to_string(id.value); }

Scenario::Scenario(std::vector<Rational> quality_levels, std::vector<AgentId> requester_neighbors,
                   std::vector<Agent> agents)
    : quality_levels_(std::move(quality_levels)),
      requester_neighbors_(std::move(requester_neighbors)),
      agents_(std::move(agents)) {
    std::sort(quality_levels_.begin(), quality_levels_.end());
    quality_levels_.erase(std::unique(quality_levels_.begin(), quality_levels_.end()), quality_levels_.end());
    if (quality_levels_.empty()) throw StructuralError("scenario has no quality levels");
    if (quality_levels_.front().sign() < 0) throw StructuralError("quality levels must be >= 0");

    std::sort(agents_.begin(), agents_.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        if (agents_[i].id == kRequester) throw StructuralError("worker id collides with the requester");
        if (i > 0 && agents_[i - 1].id == agents_[i].id) {
            throw StructuralError("duplicate agent id " + to_string(agents_[i].id));
        }
    }
    dense_ = true;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        if (agents_[i].id.value != i + 1) dense_ = false;
    }

    auto known = [&](AgentId id) { return id == kRequester || index_of(id).has_value(); };
    std::sort(requester_neighbors_.begin(), requester_neighbors_.end());
    requester_neighbors_.erase(std::unique(requester_neighbors_.begin(), requester_neighbors_.end()),
                               requester_neighbors_.end());
    for (AgentId id : requester_neighbors_) {
        if (id == kRequester || !known(id)) {
            throw StructuralError("requester neighbour " + to_string(id) + " is not an agent");
        }
    }
    for (auto& agent : agents_) {
        auto& type = agent.type;
        if (type.cost.sign() < 0) throw StructuralError("agent " + to_string(agent.id) + " has negative cost");
        std::sort(type.neighbors.begin(), type.neighbors.end());
        type.neighbors.erase(std::unique(type.neighbors.begin(), type.neighbors.end()), type.neighbors.end());
        for (AgentId n : type.neighbors) {
            if (n == agent.id) throw StructuralError("agent " + to_string(agent.id) + " lists itself as neighbour");
            if (!known(n)) {
                throw StructuralError("agent " + to_string(agent.id) + " references unknown agent " + to_string(n));
            }
        }
        for (const auto& p : type.pmf.support()) {
            if (!std::binary_search(quality_levels_.begin(), quality_levels_.end(), p.quality)) {
                throw StructuralError("agent " + to_string(agent.id) + " has quality " + p.quality.to_string() +
                                      " outside the scenario's quality levels");
            }
        }
    }
}

std::optional<std::size_t> Scenario::index_of(AgentId id) const {
    if (dense_) {
        if (id.value >= 1 && id.value <= agents_.size()) return id.value - 1;
        return std::nullopt;
    }
    auto it = std::lower_bound(agents_.begin(), agents_.end(), id,
                               [](const Agent& a, AgentId v) { return a.id < v; });
    if (it == agents_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - agents_.begin());
}

std::size_t Scenario::require_index(AgentId id) const {
    if (auto idx = index_of(id)) return *idx;
    throw StructuralError("unknown agent id " + to_string(id));
}

Report Report::nil() { return Report{}; }

Report Report::withdrawn() {
    Report r;
    r.state_ = State::Withdrawn;
    return r;
}

Report Report::bid(Pmf pmf, Rational cost, std::vector<AgentId> invited) {
    Report r;
    r.state_ = State::Bid;
    r.welfare_ = pmf.expectation() - cost;
    r.pmf_ = std::move(pmf);
    r.cost_ = cost;
    std::sort(invited.begin(), invited.end());
    invited.erase(std::unique(invited.begin(), invited.end()), invited.end());
    r.invited_ = std::move(invited);
    return r;
}

Report Report::truthful(const AgentType& type) { return bid(type.pmf, type.cost, type.neighbors); }

const Pmf& Report::pmf() const {
    if (!pmf_) throw std::logic_error("nil report has no pmf");
    return *pmf_;
}

bool operator==(const Report& a, const Report& b) {
    if (a.state_ != b.state_) return false;
    if (a.state_ != Report::State::Bid) return true;
    return *a.pmf_ == *b.pmf_ && a.cost_ == b.cost_ && a.invited_ == b.invited_;
}

ReportProfile truthful_profile(const Scenario& scenario) {
    std::vector<Report> reports;
    reports.reserve(scenario.size());
    for (const auto& agent : scenario.agents()) reports.push_back(Report::truthful(agent.type));
    return ReportProfile(std::move(reports));
}

std::optional<std::string> validate_profile(const Scenario& scenario, const ReportProfile& reports) {
    if (reports.size() != scenario.size()) return "profile size does not match the scenario";
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        const auto& report = reports[i];
        if (report.is_nil()) continue;
        const auto& agent = scenario.at(i);
        if (report.cost().sign() < 0) return "agent " + to_string(agent.id) + " reports a negative cost";
        for (AgentId invited : report.invited()) {
            if (!std::binary_search(agent.type.neighbors.begin(), agent.type.neighbors.end(), invited)) {
                return "agent " + to_string(agent.id) + " invites " + to_string(invited) +
                       ", who is not a neighbour";
            }
        }
    }
    return std::nullopt;
}

DiffusionGraph::DiffusionGraph(std::vector<AgentId> ids, std::vector<std::uint32_t> offsets,
                               std::vector<std::uint32_t> targets, std::vector<std::uint8_t> removed)
    : ids_(std::move(ids)), offsets_(std::move(offsets)), targets_(std::move(targets)), removed_(std::move(removed)) {}

std::optional<std::size_t> DiffusionGraph::node_of(AgentId id) const {
    if (id == kRequester) return 0;
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin()) + 1;
}

bool DiffusionGraph::has_edge(AgentId from, AgentId to) const {
    auto a = node_of(from);
    auto b = node_of(to);
    if (!a || !b) return false;
    auto targets = out(*a);
    return std::find(targets.begin(), targets.end(), static_cast<std::uint32_t>(*b)) != targets.end();
}

std::vector<std::uint8_t> DiffusionGraph::reachable(std::size_t blocked) const {
    std::vector<std::uint8_t> seen;
    std::vector<std::uint32_t> stack;
    reachable_into(blocked, seen, stack);
    return seen;
}

void DiffusionGraph::reachable_into(std::size_t blocked, std::vector<std::uint8_t>& seen,
                                    std::vector<std::uint32_t>& stack) const {
    seen.assign(node_count(), 0);
    stack.clear();
    seen[0] = 1;
    stack.push_back(0);
    while (!stack.empty()) {
        const std::uint32_t v = stack.back();
        stack.pop_back();
        for (std::uint32_t w : out(v)) {
            if (seen[w] || w == blocked || removed(w)) continue;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
}

DiffusionGraph build_graph(const Scenario& scenario, const ReportProfile& reports) {
    if (reports.size() != scenario.size()) throw StructuralError("profile size does not match the scenario");
    const std::size_t n = scenario.size();
    std::vector<AgentId> ids;
    ids.reserve(n);
    for (const auto& a : scenario.agents()) ids.push_back(a.id);

    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> targets;
    offsets.reserve(n + 2);
    std::size_t edge_bound = scenario.requester_neighbors().size();
    for (std::size_t i = 0; i < n; ++i) edge_bound += reports[i].is_nil() ? 0 : reports[i].invited().size();
    targets.reserve(edge_bound);
    offsets.push_back(0);
    for (AgentId id : scenario.requester_neighbors()) {
        targets.push_back(static_cast<std::uint32_t>(scenario.require_index(id) + 1));
    }
    offsets.push_back(static_cast<std::uint32_t>(targets.size()));
    std::vector<std::uint8_t> removed(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& report = reports[i];
        removed[i] = report.is_withdrawn() ? 1 : 0;
        if (!report.is_nil()) {
            for (AgentId invited : report.invited()) {
                if (invited == kRequester) continue;
                auto idx = scenario.index_of(invited);
                if (!idx) {
                    throw StructuralError("agent " + to_string(scenario.at(i).id) + " invites unknown agent " +
                                          to_string(invited));
                }
                targets.push_back(static_cast<std::uint32_t>(*idx + 1));
            }
        }
        offsets.push_back(static_cast<std::uint32_t>(targets.size()));
    }
    return DiffusionGraph(std::move(ids), std::move(offsets), std::move(targets), std::move(removed));
}

std::vector<AgentId> participants(const DiffusionGraph& graph) {
    const auto seen = graph.reachable();
    std::vector<AgentId> out;
    for (std::size_t v = 1; v < graph.node_count(); ++v) {
        if (seen[v]) out.push_back(graph.id_of(v));
    }
    return out;
}

ReportProfile without_agent(const Scenario& scenario, const ReportProfile& reports, AgentId id) {
    if (id == kRequester) throw StructuralError("cannot remove the requester");
    ReportProfile out = reports;
    out[scenario.require_index(id)] = Report::withdrawn();
    return out;
}

namespace {

std::vector<std::uint32_t> bfs_depths(const DiffusionGraph& graph) {
    constexpr std::uint32_t kUnseen = 0xFFFFFFFFu;
    std::vector<std::uint32_t> depth(graph.node_count(), kUnseen);
    std::deque<std::uint32_t> queue{0};
    depth[0] = 0;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto w : graph.out(v)) {
            if (depth[w] != kUnseen || graph.removed(w)) continue;
            depth[w] = depth[v] + 1;
            queue.push_back(w);
        }
    }
    return depth;
}

std::size_t require_reachable(const DiffusionGraph& graph, AgentId target, const std::vector<std::uint8_t>& seen) {
    auto node = graph.node_of(target);
    if (!node || *node == 0) throw StructuralError("critical sequence target must be a worker");
    if (!seen[*node]) throw StructuralError("agent " + to_string(target) + " is not reachable from s");
    return *node;
}

}  // namespace

CriticalSequence critical_sequence(const DiffusionGraph& graph, AgentId target) {
    const auto seen = graph.reachable();
    const std::size_t t = require_reachable(graph, target, seen);
    std::vector<std::size_t> members;
    for (std::size_t v = 1; v < graph.node_count(); ++v) {
        if (v == t || !seen[v]) continue;
        if (!graph.reachable(v)[t]) members.push_back(v);
    }
    const auto depth = bfs_depths(graph);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });
    CriticalSequence seq{target, {}};
    seq.order.reserve(members.size() + 1);
    for (auto v : members) seq.order.push_back(graph.id_of(v));
    seq.order.push_back(target);
    return seq;
}

std::vector<std::optional<std::size_t>> immediate_dominators(const DiffusionGraph& graph) {
    const std::size_t n = graph.node_count();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    // Iterative DFS postorder over live nodes.
    thread_local std::vector<std::size_t> post_index, order, pred_offset, preds, fill, idom;
    thread_local std::vector<std::uint8_t> visited;
    thread_local std::vector<std::pair<std::size_t, std::size_t>> stack;
    post_index.assign(n, kNone);
    order.clear();
    visited.assign(n, 0);
    stack.clear();
    stack.emplace_back(0, 0);
    visited[0] = 1;
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        auto targets = graph.out(v);
        if (next < targets.size()) {
            const std::size_t w = targets[next++];
            if (!visited[w] && !graph.removed(w)) {
                visited[w] = 1;
                stack.emplace_back(w, 0);
            }
        } else {
            post_index[v] = order.size();
            order.push_back(v);
            stack.pop_back();
        }
    }

    // predecessors among reached nodes, as a flat CSR keyed by target
    pred_offset.assign(n + 1, 0);
    for (std::size_t v : order) {
        for (auto w : graph.out(v)) {
            if (visited[w] && !graph.removed(w)) ++pred_offset[w + 1];
        }
    }
    for (std::size_t v = 0; v < n; ++v) pred_offset[v + 1] += pred_offset[v];
    preds.resize(pred_offset[n]);
    fill.assign(pred_offset.begin(), pred_offset.end() - 1);
    for (std::size_t v : order) {
        for (auto w : graph.out(v)) {
            if (visited[w] && !graph.removed(w)) preds[fill[w]++] = v;
        }
    }

    idom.assign(n, kNone);
    idom[0] = 0;
    auto intersect = [&](std::size_t a, std::size_t b) {
        while (a != b) {
            while (post_index[a] < post_index[b]) a = idom[a];
            while (post_index[b] < post_index[a]) b = idom[b];
        }
        return a;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t v = *it;
            if (v == 0) continue;
            std::size_t candidate = kNone;
            for (std::size_t k = pred_offset[v]; k < pred_offset[v + 1]; ++k) {
                const std::size_t p = preds[k];
                if (idom[p] == kNone) continue;
                candidate = candidate == kNone ? p : intersect(p, candidate);
            }
            if (candidate != idom[v]) {
                idom[v] = candidate;
                changed = true;
            }
        }
    }

    std::vector<std::optional<std::size_t>> out(n);
    for (std::size_t v = 1; v < n; ++v) {
        if (idom[v] != kNone) out[v] = idom[v];
    }
    return out;
}

CriticalSequence critical_sequence_by_dominators(const DiffusionGraph& graph, AgentId target) {
    const auto idom = immediate_dominators(graph);
    auto node = graph.node_of(target);
    if (!node || *node == 0) throw StructuralError("critical sequence target must be a worker");
    if (!idom[*node]) throw StructuralError("agent " + to_string(target) + " is not reachable from s");
    const std::size_t t = *node;
    CriticalSequence seq{target, {}};
    for (std::size_t v = t; v != 0; v = *idom[v]) seq.order.push_back(graph.id_of(v));
    std::reverse(seq.order.begin(), seq.order.end());
    return seq;
}

std::string to_string(const CriticalSequence& sequence) {
    std::string out = "(s";
    for (AgentId id : sequence.order) out += ", " + to_string(id);
    return out + ")";
}

}  // namespace pevnet
