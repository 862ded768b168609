#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pevnet/rational.hpp"

namespace pevnet {

struct QualityPoint {
    Rational quality;
    Rational probability;

    friend bool operator==(const QualityPoint&, const QualityPoint&) = default;
};

class InvalidPmf : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Discrete probability-of-quality distribution with exact masses.
///
/// The support is kept sorted by quality with strictly positive masses that
/// sum to exactly one. Copies share the underlying storage.
class Pmf {
public:
    /// Sorts the points and drops zero-mass entries; throws InvalidPmf when
    /// validate() reports a violation.
    explicit Pmf(std::vector<QualityPoint> points);

    static Pmf point_mass(const Rational& quality);

    /// First violated invariant of a raw point list, or nullopt when the list
    /// describes a valid distribution.
    static std::optional<std::string> validate(std::span<const QualityPoint> points);

    std::span<const QualityPoint> support() const { return *points_; }
    std::size_t size() const { return points_->size(); }
    const Rational& expectation() const { return mean_; }
    const Rational& min_quality() const { return points_->front().quality; }
    const Rational& max_quality() const { return points_->back().quality; }
    Rational probability_of(const Rational& quality) const;
    bool is_point_mass() const { return points_->size() == 1; }

    friend bool operator==(const Pmf& a, const Pmf& b) {
        return a.points_ == b.points_ || *a.points_ == *b.points_;
    }

private:
    std::shared_ptr<const std::vector<QualityPoint>> points_;
    Rational mean_;
};

Rational expectation(const Pmf& pmf);
Rational expected_welfare(const Pmf& pmf, const Rational& cost);

/// Inverse-CDF draw using exactly one 64-bit output of `rng`: the draw u is
/// read as u / 2^64 and compared exactly against the cumulative masses.
Rational sample(const Pmf& pmf, std::mt19937_64& rng);

/// Same mapping with an explicit 64-bit word.
Rational quality_at(const Pmf& pmf, std::uint64_t word);

std::string to_string(const Pmf& pmf);

}  // namespace pevnet
