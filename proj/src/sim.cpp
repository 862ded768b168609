#include "pevnet/sim.hpp"

#include <cmath>
#include <random>

#include "pevnet/parallel.hpp"

namespace pevnet {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Moments moments(const std::map<Rational, std::size_t>& counts, std::size_t n, auto&& value_at) {
    Moments m;
    for (const auto& [q, count] : counts) m.mean += value_at(q) * Rational(static_cast<std::int64_t>(count));
    m.mean = m.mean / Rational(static_cast<std::int64_t>(n));
    if (n < 2) return m;
    for (const auto& [q, count] : counts) {
        const Rational d = value_at(q) - m.mean;
        m.variance += d * d * Rational(static_cast<std::int64_t>(count));
    }
    m.variance = m.variance / Rational(static_cast<std::int64_t>(n - 1));
    return m;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix(splitmix(master_seed) ^ index);
}

TrialStats run_trials(const Scenario& scenario, const ReportProfile& reports, MechanismKind kind, std::size_t trials,
                      std::uint64_t seed, std::size_t workers) {
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    TrialStats stats;
    stats.trials = trials;
    stats.seed = seed;
    stats.mechanism = kind;
    for (const auto& agent : scenario.agents()) stats.agents[agent.id] = {};

    const auto outcome = run_mechanism(kind, scenario, reports);
    stats.selected = outcome.selected();
    const auto dist = realized_quality_distribution(scenario, outcome);
    if (!dist) return stats;

    if (workers == 0) workers = worker_count(trials / 4096 + 1);
    std::vector<std::vector<std::size_t>> partial(workers, std::vector<std::size_t>(dist->size(), 0));
    const auto support = dist->support();
    parallel_chunks(trials, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& counts = partial[chunk];
        for (std::size_t i = begin; i < end; ++i) {
            std::mt19937_64 rng(trial_seed(seed, i));
            const Rational q = quality_at(*dist, rng());
            for (std::size_t k = 0; k < support.size(); ++k) {
                if (support[k].quality == q) {
                    ++counts[k];
                    break;
                }
            }
        }
    });
    for (std::size_t k = 0; k < support.size(); ++k) {
        std::size_t total = 0;
        for (const auto& counts : partial) total += counts[k];
        if (total > 0) stats.quality_counts[support[k].quality] = total;
    }

    std::map<Rational, PayoffVector> pay_at;
    for (const auto& [q, count] : stats.quality_counts) pay_at.emplace(q, payoffs(outcome, q));
    for (auto& [id, m] : stats.agents) {
        m = moments(stats.quality_counts, trials,
                    [&](const Rational& q) { return agent_utility(scenario, outcome, pay_at.at(q), id); });
    }
    stats.requester =
        moments(stats.quality_counts, trials, [&](const Rational& q) { return pay_at.at(q).requester_utility; });
    return stats;
}

Comparison compare(const TrialStats& stats, const ExpectedUtilities& analytic, double band) {
    if (stats.trials == 0) throw std::invalid_argument("comparison needs at least one trial");
    Comparison out;
    auto row = [&](AgentId id, const Moments& m, const Rational& expected) {
        ComparisonRow r{id, m.mean, expected};
        r.exact = m.variance.is_zero();
        if (r.exact) {
            r.pass = m.mean == expected;
            r.z = r.pass ? 0.0 : INFINITY;
        } else {
            r.standard_error = std::sqrt(m.variance.to_double() / static_cast<double>(stats.trials));
            r.z = std::abs((m.mean - expected).to_double()) / r.standard_error;
            r.pass = r.z <= band;
        }
        out.max_z = std::max(out.max_z, r.z);
        out.pass = out.pass && r.pass;
        out.rows.push_back(r);
    };
    for (const auto& [id, m] : stats.agents) {
        auto it = analytic.agents.find(id);
        row(id, m, it == analytic.agents.end() ? Rational(0) : it->second);
    }
    row(kRequester, stats.requester, analytic.requester);
    return out;
}

}  // namespace pevnet
