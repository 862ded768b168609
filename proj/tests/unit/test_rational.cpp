#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "pevnet/rational.hpp"

using pevnet::Rational;

TEST_SUITE("rational") {
    TEST_CASE("normalises to lowest terms with a positive denominator") {
        Rational r(6, -4);
        CHECK(r.num() == -3);
        CHECK(r.den() == 2);
        CHECK(Rational(0, -5) == Rational(0));
        CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    }

    TEST_CASE("parses fractions, integers and decimals") {
        CHECK(Rational::parse("3/10") == Rational(3, 10));
        CHECK(Rational::parse("0.3") == Rational(3, 10));
        CHECK(Rational::parse(".3") == Rational(3, 10));
        CHECK(Rational::parse("-2.25") == Rational(-9, 4));
        CHECK(Rational::parse("7") == Rational(7));
        CHECK(Rational::parse("-1/4") == Rational(-1, 4));
        CHECK_THROWS(Rational::parse("abc"));
        CHECK_THROWS(Rational::parse("1/0"));
        CHECK_THROWS(Rational::parse(""));
    }

    TEST_CASE("prints decimals when the expansion terminates") {
        CHECK(Rational(47, 10).to_string() == "4.7");
        CHECK(Rational(-1, 10).to_string() == "-0.1");
        CHECK(Rational(4).to_string() == "4");
        CHECK(Rational(1, 3).to_string() == "1/3");
        CHECK(Rational(1, 2).to_fraction_string() == "1/2");
        CHECK(Rational(9, 2).has_exact_decimal());
        CHECK_FALSE(Rational(2, 7).has_exact_decimal());
    }

    TEST_CASE("field operations agree with long long arithmetic on small values") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> pick(-30, 30);
        for (int k = 0; k < 2000; ++k) {
            long long a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
            if (b == 0 || d == 0) continue;
            const Rational x(a, b), y(c, d);
            CHECK((x + y) == Rational(a * d + c * b, b * d));
            CHECK((x - y) == Rational(a * d - c * b, b * d));
            CHECK((x * y) == Rational(a * c, b * d));
            if (c != 0) CHECK((x / y) == Rational(a * d, b * c));
            CHECK((x < y) == (static_cast<double>(a) / b < static_cast<double>(c) / d));
        }
    }

    TEST_CASE("overflow is reported instead of wrapping") {
        const Rational big(std::numeric_limits<std::int64_t>::max());
        CHECK_THROWS_AS(big + Rational(1), std::overflow_error);
        CHECK_THROWS_AS(big * Rational(2), std::overflow_error);
        CHECK(big * Rational(1, 7) == Rational(std::numeric_limits<std::int64_t>::max(), 7));
    }

    TEST_CASE("ordering and helpers") {
        CHECK(Rational(1, 3) < Rational(1, 2));
        CHECK(Rational(-1, 2) < Rational(-1, 3));
        CHECK(pevnet::abs(Rational(-3, 4)) == Rational(3, 4));
        CHECK(pevnet::min(Rational(1), Rational(2)) == Rational(1));
        CHECK(pevnet::max(Rational(1), Rational(2)) == Rational(2));
        CHECK(Rational(-3, 4).sign() == -1);
    }
}
