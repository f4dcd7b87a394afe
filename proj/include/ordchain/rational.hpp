#pragma once

// Exact rationals in reduced form, denominator > 0.

#include <string>

#include "ordchain/bigint.hpp"

namespace ordchain {

class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rat(BigInt num, BigInt den);
    Rat(std::int64_t n, std::int64_t d) : Rat(BigInt(n), BigInt(d)) {}

    // Accepts "n", "-n", "n/d"; throws ParseError otherwise.
    static Rat from_string(const std::string& s);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_ == BigInt(1); }
    bool is_negative() const { return num_.is_negative(); }

    Rat operator-() const;
    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;

    int compare(const Rat& o) const;
    bool operator==(const Rat& o) const { return compare(o) == 0; }
    bool operator!=(const Rat& o) const { return compare(o) != 0; }
    bool operator<(const Rat& o) const { return compare(o) < 0; }
    bool operator<=(const Rat& o) const { return compare(o) <= 0; }
    bool operator>(const Rat& o) const { return compare(o) > 0; }
    bool operator>=(const Rat& o) const { return compare(o) >= 0; }

    BigInt floor() const;

    // "n" for integers, "n/d" otherwise; parse/print are mutually inverse.
    std::string to_string() const;

private:
    BigInt num_;
    BigInt den_;
    void reduce();
};

inline Rat midpoint(const Rat& a, const Rat& b) { return (a + b) / Rat(2); }

} // namespace ordchain
