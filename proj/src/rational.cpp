#include "p2f/rational.hpp"

#include <numeric>

#include "p2f/errors.hpp"

namespace p2f {

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw ContractError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num_ = n / g;
    den_ = d / g;
}

std::int64_t Rational::to_int() const {
    if (den_ != 1) throw ContractError("expected an integer, got " + str());
    return num_;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ContractError("division by zero rational");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& s) {
    try {
        std::size_t slash = s.find('/');
        std::size_t used = 0;
        if (slash == std::string::npos) {
            long long n = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return Rational(n);
        }
        std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        long long n = std::stoll(a, &used);
        if (used != a.size()) throw std::invalid_argument(s);
        long long d = std::stoll(b, &used);
        if (used != b.size()) throw std::invalid_argument(s);
        return Rational(n, d);
    } catch (const std::logic_error&) {
        throw ValidationError("cannot parse rational '" + s + "'");
    }
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace p2f
