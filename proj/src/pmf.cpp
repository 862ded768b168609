#include "pevnet/pmf.hpp"

#include <algorithm>

namespace pevnet {

std::optional<std::string> Pmf::validate(std::span<const QualityPoint> points) {
    if (points.empty()) return "empty support";
    for (const auto& p : points) {
        if (p.quality.sign() < 0) return "negative quality " + p.quality.to_string();
        if (p.probability.sign() < 0 || p.probability > Rational(1)) {
            return "probability " + p.probability.to_string() + " at quality " + p.quality.to_string() +
                   " outside [0, 1]";
        }
    }
    std::vector<Rational> qualities;
    qualities.reserve(points.size());
    for (const auto& p : points) qualities.push_back(p.quality);
    std::sort(qualities.begin(), qualities.end());
    if (auto dup = std::adjacent_find(qualities.begin(), qualities.end()); dup != qualities.end()) {
        return "duplicate quality " + dup->to_string();
    }
    Rational total;
    for (const auto& p : points) total += p.probability;
    if (total != Rational(1)) return "total mass " + total.to_string() + " != 1";
    return std::nullopt;
}

Pmf::Pmf(std::vector<QualityPoint> points) {
    if (auto violation = validate(points)) throw InvalidPmf(*violation);
    std::erase_if(points, [](const QualityPoint& p) { return p.probability.is_zero(); });
    std::sort(points.begin(), points.end(),
              [](const QualityPoint& a, const QualityPoint& b) { return a.quality < b.quality; });
    for (const auto& p : points) mean_ += p.quality * p.probability;
    points_ = std::make_shared<const std::vector<QualityPoint>>(std::move(points));
}

Pmf Pmf::point_mass(const Rational& quality) { return Pmf({{quality, Rational(1)}}); }

Rational Pmf::probability_of(const Rational& quality) const {
    for (const auto& p : *points_) {
        if (p.quality == quality) return p.probability;
    }
    return Rational(0);
}

Rational expectation(const Pmf& pmf) { return pmf.expectation(); }

Rational expected_welfare(const Pmf& pmf, const Rational& cost) { return pmf.expectation() - cost; }

Rational quality_at(const Pmf& pmf, std::uint64_t word) {
    using u128 = unsigned __int128;
    const auto support = pmf.support();
    Rational cumulative;
    for (std::size_t i = 0; i + 1 < support.size(); ++i) {
        cumulative += support[i].probability;
        // word / 2^64 < num / den  <=>  word * den < num * 2^64
        const u128 lhs = static_cast<u128>(word) * static_cast<u128>(cumulative.den());
        const u128 rhs = static_cast<u128>(cumulative.num()) << 64;
        if (lhs < rhs) return support[i].quality;
    }
    return support.back().quality;
}

Rational sample(const Pmf& pmf, std::mt19937_64& rng) { return quality_at(pmf, rng()); }

std::string to_string(const Pmf& pmf) {
    std::string out = "{";
    bool first = true;
    for (const auto& p : pmf.support()) {
        if (!first) out += ", ";
        first = false;
        out += p.quality.to_string() + ": " + p.probability.to_string();
    }
    return out + "}";
}

}  // namespace pevnet
