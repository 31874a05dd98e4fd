#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace p2f {

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) {}  // NOLINT: implicit on purpose
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }

    // floor for integers, throws otherwise
    std::int64_t to_int() const;
    std::int64_t floor() const;
    Rational frac() const { return *this - Rational(floor()); }

    Rational operator-() const { return Rational(-num_, den_); }
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::string str() const;
    static Rational parse(const std::string& s);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

using Grading = Rational;

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace p2f
