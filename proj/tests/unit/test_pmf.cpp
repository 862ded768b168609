#include <map>
#include <random>

#include "doctest.h"
#include "pevnet/pmf.hpp"

using namespace pevnet;

TEST_SUITE("pmf") {
    TEST_CASE("sorts the support, drops zero masses and computes the mean") {
        Pmf p({{Rational(10), Rational(1, 4)}, {Rational(2), Rational(3, 4)}, {Rational(5), Rational(0)}});
        REQUIRE(p.size() == 2);
        CHECK(p.min_quality() == Rational(2));
        CHECK(p.max_quality() == Rational(10));
        CHECK(p.expectation() == Rational(4));
        CHECK(p.probability_of(Rational(5)) == Rational(0));
        CHECK(expected_welfare(p, Rational(3, 2)) == Rational(5, 2));
    }

    TEST_CASE("rejects masses that do not sum to one") {
        std::vector<QualityPoint> nine_tenths{{Rational(1), Rational(9, 10)}};
        CHECK(Pmf::validate(nine_tenths).has_value());
        CHECK_THROWS_AS(Pmf{nine_tenths}, InvalidPmf);
        std::vector<QualityPoint> negative{{Rational(1), Rational(3, 2)}, {Rational(2), Rational(-1, 2)}};
        CHECK_THROWS_AS(Pmf{negative}, InvalidPmf);
        std::vector<QualityPoint> duplicate{{Rational(1), Rational(1, 2)}, {Rational(1), Rational(1, 2)}};
        CHECK_THROWS_AS(Pmf{duplicate}, InvalidPmf);
        CHECK_THROWS_AS(Pmf(std::vector<QualityPoint>{}), InvalidPmf);
    }

    TEST_CASE("inverse-cdf mapping is exact at the boundaries") {
        Pmf p({{Rational(1), Rational(1, 2)}, {Rational(3), Rational(1, 2)}});
        CHECK(quality_at(p, 0) == Rational(1));
        CHECK(quality_at(p, (std::uint64_t{1} << 63) - 1) == Rational(1));
        CHECK(quality_at(p, std::uint64_t{1} << 63) == Rational(3));
        CHECK(quality_at(p, ~std::uint64_t{0}) == Rational(3));
        CHECK(quality_at(Pmf::point_mass(Rational(7)), 12345) == Rational(7));
    }

    TEST_CASE("sampling frequencies pass a chi-square test") {
        Pmf p({{Rational(1), Rational(1, 10)}, {Rational(2), Rational(2, 10)}, {Rational(3), Rational(3, 10)},
               {Rational(4), Rational(4, 10)}});
        std::mt19937_64 rng(2024);
        const int n = 200000;
        std::map<Rational, int> counts;
        for (int k = 0; k < n; ++k) ++counts[sample(p, rng)];
        double chi2 = 0;
        for (const auto& point : p.support()) {
            const double expected = n * point.probability.to_double();
            const double diff = counts[point.quality] - expected;
            chi2 += diff * diff / expected;
        }
        // 3 degrees of freedom, 0.999 quantile
        CHECK(chi2 < 16.27);
    }

    TEST_CASE("copies compare equal and render their support") {
        Pmf p({{Rational(8), Rational(1, 2)}, {Rational(9), Rational(1, 2)}});
        Pmf q = p;
        CHECK(p == q);
        CHECK(p == Pmf({{Rational(9), Rational(1, 2)}, {Rational(8), Rational(1, 2)}}));
        CHECK_FALSE(p == Pmf::point_mass(Rational(8)));
        CHECK_FALSE(to_string(p).empty());
    }
}
