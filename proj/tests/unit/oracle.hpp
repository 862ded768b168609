#pragma once

// Brute-force reference implementations used only by the tests. They share no
// code with the library beyond the data types.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pevnet/mechanism.hpp"

namespace oracle {

using namespace pevnet;

/// Directed adjacency over node ids: 0 is s, k + 1 the agent at index k.
/// Withdrawn agents are absent; nil agents are present but forward nothing.
struct Graph {
    std::size_t nodes = 0;
    std::vector<std::set<std::size_t>> out;
    std::vector<bool> present;
};

inline Graph graph_of(const Scenario& sc, const ReportProfile& reports) {
    Graph g;
    g.nodes = sc.size() + 1;
    g.out.resize(g.nodes);
    g.present.assign(g.nodes, true);
    for (std::size_t k = 0; k < sc.size(); ++k) g.present[k + 1] = !reports[k].is_withdrawn();
    auto node = [&](AgentId id) { return *sc.index_of(id) + 1; };
    for (AgentId id : sc.requester_neighbors()) {
        if (g.present[node(id)]) g.out[0].insert(node(id));
    }
    for (std::size_t k = 0; k < sc.size(); ++k) {
        if (reports[k].is_nil()) continue;
        for (AgentId id : reports[k].invited()) {
            if (g.present[node(id)]) g.out[k + 1].insert(node(id));
        }
    }
    return g;
}

inline void all_paths(const Graph& g, std::size_t at, std::size_t target, std::vector<std::size_t>& path,
                      std::vector<bool>& on, std::vector<std::vector<std::size_t>>& found) {
    if (at == target) {
        found.push_back(path);
        return;
    }
    for (std::size_t next : g.out[at]) {
        if (on[next]) continue;
        on[next] = true;
        path.push_back(next);
        all_paths(g, next, target, path, on, found);
        path.pop_back();
        on[next] = false;
    }
}

/// Every simple path from s to `target`, as node lists excluding s.
inline std::vector<std::vector<std::size_t>> simple_paths(const Graph& g, std::size_t target) {
    std::vector<std::vector<std::size_t>> found;
    std::vector<std::size_t> path;
    std::vector<bool> on(g.nodes, false);
    on[0] = true;
    all_paths(g, 0, target, path, on, found);
    return found;
}

/// Vertices on every simple path from s to `target`, in path order.
inline std::vector<std::size_t> critical_nodes(const Graph& g, std::size_t target) {
    const auto paths = simple_paths(g, target);
    if (paths.empty()) return {};
    std::vector<std::size_t> out;
    for (std::size_t v : paths.front()) {
        bool everywhere = std::all_of(paths.begin(), paths.end(), [&](const auto& p) {
            return std::find(p.begin(), p.end(), v) != p.end();
        });
        if (everywhere) out.push_back(v);
    }
    return out;
}

inline std::vector<bool> reachable(const Graph& g) {
    std::vector<bool> seen(g.nodes, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : g.out[v]) {
            if (!seen[w]) seen[w] = true, stack.push_back(w);
        }
    }
    return seen;
}

struct Pev {
    std::optional<AgentId> champion;
    std::vector<AgentId> sequence;
    std::vector<Rational> w;
    std::optional<std::size_t> selected;
};

/// Best reported welfare over reachable bidders, smallest id on ties; the
/// null option (welfare 0) wins when every bidder is strictly negative.
inline std::pair<std::optional<std::size_t>, Rational> best(const Scenario& sc, const ReportProfile& reports) {
    const auto seen = reachable(graph_of(sc, reports));
    std::optional<std::size_t> arg;
    Rational top;
    for (std::size_t k = 0; k < sc.size(); ++k) {
        if (!seen[k + 1] || reports[k].is_nil()) continue;
        const Rational welfare = reports[k].pmf().expectation() - reports[k].cost();
        if (!arg || welfare > top) arg = k, top = welfare;
    }
    if (!arg || top.sign() < 0) return {std::nullopt, Rational(0)};
    return {arg, top};
}

inline Pev pev(const Scenario& sc, const ReportProfile& reports) {
    Pev out;
    const auto [champ, welfare] = best(sc, reports);
    if (!champ) return out;
    out.champion = sc.at(*champ).id;
    for (std::size_t node : critical_nodes(graph_of(sc, reports), *champ + 1)) {
        out.sequence.push_back(sc.at(node - 1).id);
        ReportProfile removed = reports;
        removed[node - 1] = Report::withdrawn();
        out.w.push_back(best(sc, removed).second);
    }
    const std::size_t m = out.sequence.size();
    out.selected = m - 1;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const auto& r = reports[*sc.index_of(out.sequence[k])];
        if (r.pmf().expectation() - r.cost() == out.w[k + 1]) {
            out.selected = k;
            break;
        }
    }
    return out;
}

/// Payoff of every sequence member at realized quality q.
inline std::map<AgentId, Rational> pev_payoffs(const Pev& o, const Rational& q) {
    std::map<AgentId, Rational> pay;
    if (!o.selected) return pay;
    const std::size_t t = *o.selected;
    for (std::size_t k = 0; k < t; ++k) pay[o.sequence[k]] = o.w[k + 1] - o.w[k];
    pay[o.sequence[t]] = q - o.w[t];
    return pay;
}

}  // namespace oracle
