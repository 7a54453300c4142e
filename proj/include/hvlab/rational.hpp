#pragma once

#include <cstdint>
#include <numeric>

#include "hvlab/errors.hpp"

namespace hvlab {

/// Minimal exact rational on int64, enough for the critical-exponent
/// arithmetic (2N/(N-2) and friends stay tiny).
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw ArgumentError("Rational: zero denominator");
        normalize();
    }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    friend Rational operator+(Rational a, Rational b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend Rational operator-(Rational a, Rational b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num == 0) throw ArgumentError("Rational: division by zero");
        return {a.num * b.den, a.den * b.num};
    }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
};

} // namespace hvlab
