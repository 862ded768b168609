#pragma once

#include <optional>
#include <random>
#include <vector>

#include "pevnet/mechanism.hpp"

namespace pevnet::detail {

struct Candidate {
    std::size_t node;  // graph node, agents start at 1
    Rational welfare;
};

// Index of the best candidate under `tie`; candidates must be in id order.
std::optional<std::size_t> pick_best(const std::vector<Candidate>& candidates, TieBreak tie);

// Uniform draw from [0, n) by rejection.
std::size_t bounded(std::mt19937_64& rng, std::size_t n);

}  // namespace pevnet::detail
