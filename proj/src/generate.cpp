#include "pevnet/generate.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "mechanism_detail.hpp"

namespace pevnet {

ScenarioFile generate_scenario(const GenOptions& options) {
    if (options.agents == 0) throw std::invalid_argument("need at least one agent");
    if (options.levels == 0) throw std::invalid_argument("need at least one quality level");
    if (options.density < 0 || options.density > 1) throw std::invalid_argument("density must lie in [0, 1]");

    std::mt19937_64 rng(options.seed);
    auto pick = [&](std::size_t n) { return detail::bounded(rng, n); };
    auto coin = [&](double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; };

    const std::size_t n = options.agents;
    const std::size_t L = options.levels;
    std::vector<Rational> levels;
    for (std::size_t q = 1; q <= L; ++q) levels.push_back(Rational(static_cast<std::int64_t>(q)));

    // node 0 is s, node k is agent k
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t k = 1; k <= n; ++k) edges.emplace(pick(k), k);
    for (std::size_t a = 0; a <= n; ++a) {
        for (std::size_t b = a + 1; b <= n; ++b) {
            if (!edges.count({a, b}) && coin(options.density)) edges.emplace(a, b);
        }
    }
    std::vector<std::vector<AgentId>> neighbors(n + 1);
    for (const auto& [a, b] : edges) {
        if (a != 0) neighbors[b].push_back(AgentId{static_cast<std::uint32_t>(a)});
        neighbors[a].push_back(AgentId{static_cast<std::uint32_t>(b)});
    }

    const std::size_t common = pick(L);
    std::vector<Agent> agents;
    for (std::size_t k = 1; k <= n; ++k) {
        Pmf pmf = Pmf::point_mass(levels[common]);
        if (!options.degenerate_quality) {
            std::vector<std::int64_t> units(L, 0);
            for (int u = 0; u < 10; ++u) ++units[pick(L)];
            std::vector<QualityPoint> points;
            for (std::size_t q = 0; q < L; ++q) {
                if (units[q] > 0) points.push_back({levels[q], Rational(units[q], 10)});
            }
            pmf = Pmf(std::move(points));
        }
        const auto top = static_cast<std::size_t>(pmf.max_quality().num()) * 10;
        const Rational cost(static_cast<std::int64_t>(pick(top + 1)), 10);
        std::sort(neighbors[k].begin(), neighbors[k].end());
        agents.push_back({AgentId{static_cast<std::uint32_t>(k)}, {std::move(pmf), cost, neighbors[k]}});
    }
    std::sort(neighbors[0].begin(), neighbors[0].end());

    Scenario scenario(levels, neighbors[0], std::move(agents));
    ReportProfile reports = truthful_profile(scenario);
    return ScenarioFile{"gen-" + std::to_string(n) + "-" + std::to_string(options.seed),
                        "generated with " + std::to_string(n) + " agents, " + std::to_string(L) + " levels",
                        std::move(scenario), std::move(reports), false};
}

}  // namespace pevnet
