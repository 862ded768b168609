#include "pevnet/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace pevnet {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr i128 kMax64 = std::numeric_limits<std::int64_t>::max();

u128 magnitude(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

u128 gcd_wide(u128 a, u128 b) {
    if (a <= std::numeric_limits<std::uint64_t>::max() && b <= std::numeric_limits<std::uint64_t>::max()) {
        return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    }
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

[[noreturn]] void overflow() { throw std::overflow_error("rational arithmetic overflow"); }

std::int64_t parse_integer(std::string_view digits, std::string_view original) {
    if (digits.empty()) {
        throw std::invalid_argument("malformed rational '" + std::string(original) + "'");
    }
    i128 value = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("malformed rational '" + std::string(original) + "'");
        }
        value = value * 10 + (c - '0');
        if (value > kMax64) overflow();
    }
    return static_cast<std::int64_t>(value);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(i128 num, i128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    u128 g = gcd_wide(magnitude(num), static_cast<u128>(den));
    if (g > 1) {
        num /= static_cast<i128>(g);
        den /= static_cast<i128>(g);
    }
    if (num > kMax64 || num < -kMax64 || den > kMax64) overflow();
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational Rational::parse(std::string_view text) {
    const std::string_view original = text;
    text = trim(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto head = trim(text.substr(0, slash));
        auto tail = trim(text.substr(slash + 1));
        bool negative = false;
        if (!head.empty() && (head.front() == '-' || head.front() == '+')) {
            negative = head.front() == '-';
            head.remove_prefix(1);
        }
        std::int64_t n = parse_integer(head, original);
        std::int64_t d = parse_integer(tail, original);
        if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(original) + "'");
        return Rational(negative ? -n : n, d);
    }
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) {
        throw std::invalid_argument("malformed rational '" + std::string(original) + "'");
    }
    if (dot != std::string_view::npos && frac.empty()) {
        throw std::invalid_argument("malformed rational '" + std::string(original) + "'");
    }
    i128 num = whole.empty() ? 0 : parse_integer(whole, original);
    i128 den = 1;
    for (char c : frac) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("malformed rational '" + std::string(original) + "'");
        }
        num = num * 10 + (c - '0');
        den *= 10;
        if (num > kMax64 || den > kMax64) overflow();
    }
    return from_wide(negative ? -num : num, den);
}

bool Rational::has_exact_decimal() const {
    std::int64_t d = den_;
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    return d == 1;
}

std::string Rational::to_fraction_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    if (!has_exact_decimal()) return to_fraction_string();
    int twos = 0;
    int fives = 0;
    for (std::int64_t d = den_; d % 2 == 0; d /= 2) ++twos;
    for (std::int64_t d = den_; d % 5 == 0; d /= 5) ++fives;
    const int digits = std::max(twos, fives);
    u128 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const u128 scaled = magnitude(num_) * (scale / static_cast<u128>(den_));
    const u128 integral = scaled / scale;
    u128 fractional = scaled % scale;
    std::string frac(static_cast<std::size_t>(digits), '0');
    for (int i = digits - 1; i >= 0; --i) {
        frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(fractional % 10));
        fractional /= 10;
    }
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = num_ < 0 ? "-" : "";
    out += std::to_string(static_cast<std::uint64_t>(integral));
    out += '.';
    out += frac;
    return out;
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (den_ == rhs.den_) {
        *this = from_wide(static_cast<i128>(num_) + rhs.num_, den_);
    } else {
        *this = from_wide(static_cast<i128>(num_) * rhs.den_ + static_cast<i128>(rhs.num_) * den_,
                          static_cast<i128>(den_) * rhs.den_);
    }
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    *this = from_wide(static_cast<i128>(num_) * rhs.num_, static_cast<i128>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw std::domain_error("rational division by zero");
    *this = from_wide(static_cast<i128>(num_) * rhs.den_, static_cast<i128>(den_) * rhs.num_);
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    const i128 lhs = static_cast<i128>(a.num_) * b.den_;
    const i128 rhs = static_cast<i128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace pevnet
