#pragma once

// Arbitrary-precision signed integer, sign-magnitude over base 2^32.
// Only what exact rational arithmetic needs: ring ops, divmod, gcd,
// shifts, comparisons, decimal I/O.

#include <cstdint>
#include <string>
#include <vector>

namespace ordchain {

class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v);  // NOLINT: implicit by design, mirrors int usage

    static BigInt from_string(const std::string& s);

    bool is_zero() const { return mag_.empty(); }
    bool is_negative() const { return negative_; }
    bool is_odd() const { return !mag_.empty() && (mag_[0] & 1u); }

    BigInt operator-() const;
    BigInt abs() const;

    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;

    // Truncated division (C semantics): quotient rounds toward zero.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    BigInt operator/(const BigInt& o) const;
    BigInt operator%(const BigInt& o) const;

    // Floor division: largest q with q*b <= a.
    static BigInt floor_div(const BigInt& a, const BigInt& b);

    BigInt shifted_left(std::size_t bits) const;
    BigInt shifted_right(std::size_t bits) const;

    static BigInt gcd(BigInt a, BigInt b);

    int compare(const BigInt& o) const;  // -1, 0, 1
    bool operator==(const BigInt& o) const { return compare(o) == 0; }
    bool operator!=(const BigInt& o) const { return compare(o) != 0; }
    bool operator<(const BigInt& o) const { return compare(o) < 0; }
    bool operator<=(const BigInt& o) const { return compare(o) <= 0; }
    bool operator>(const BigInt& o) const { return compare(o) > 0; }
    bool operator>=(const BigInt& o) const { return compare(o) >= 0; }

    std::string to_string() const;

    // Value as int64 when it fits; throws ResourceLimitError otherwise.
    std::int64_t to_int64() const;
    bool fits_int64() const;

    std::size_t bit_length() const;

private:
    bool negative_ = false;
    std::vector<std::uint32_t> mag_;  // little-endian, no leading zero words

    void trim();
    static int compare_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b);
    // Requires |a| >= |b|.
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b);
};

} // namespace ordchain
