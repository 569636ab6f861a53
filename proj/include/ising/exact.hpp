#pragma once

// Exact arithmetic in ℤ[√2]. Every contour weight α^k with α = √2 − 1 lives
// here, so partition-function identities can be checked without rounding.

#include <ising/types.hpp>

#include <cmath>
#include <compare>
#include <string>

namespace ising {

/// a + b√2 with 128-bit integer parts; arithmetic throws NumericalError on overflow.
class ZSqrt2 {
public:
    using Int = __int128;

    constexpr ZSqrt2() = default;
    constexpr ZSqrt2(Int a, Int b = 0) : a_(a), b_(b) {}

    constexpr Int rational() const { return a_; }
    constexpr Int radical() const { return b_; }

    /// α^k for k ≥ 0, and α^{-1} = √2 + 1 for k = -1.
    static ZSqrt2 alpha_pow(int k);

    ZSqrt2 operator+(const ZSqrt2& o) const;
    ZSqrt2 operator-(const ZSqrt2& o) const;
    ZSqrt2 operator-() const { return ZSqrt2(-a_, -b_); }
    ZSqrt2 operator*(const ZSqrt2& o) const;
    ZSqrt2& operator+=(const ZSqrt2& o) { return *this = *this + o; }
    ZSqrt2& operator-=(const ZSqrt2& o) { return *this = *this - o; }
    ZSqrt2& operator*=(const ZSqrt2& o) { return *this = *this * o; }

    constexpr bool operator==(const ZSqrt2&) const = default;

    /// Exact sign of a + b√2.
    int sign() const;
    std::strong_ordering operator<=>(const ZSqrt2& o) const {
        const int s = (*this - o).sign();
        return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    double to_double() const { return static_cast<double>(a_) + static_cast<double>(b_) * std::sqrt(2.0); }
    std::string to_string() const;

private:
    Int a_ = 0;
    Int b_ = 0;
};

}  // namespace ising
