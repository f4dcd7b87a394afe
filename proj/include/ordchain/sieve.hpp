#pragma once

// The binary sieve: a real number carries a subset of Q in the odd digits
// of its fractional binary expansion. Digit at position 2n+1 is 0 exactly
// when the n-th rational (per qindex) belongs to the set; even positions
// are 0. Encodings of finite sets are exact rationals; infinite sets get
// a lazily queried digit stream backed by the set's membership queries.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "ordchain/rational.hpp"
#include "ordchain/symbolic_real.hpp"

namespace ordchain {

class BinaryExpansion {
public:
    // Encoding of the set described by z.
    static BinaryExpansion from_set(const SymbolicReal& z);
    // Encoding of all of Q: every digit 0, value exactly 0.
    static BinaryExpansion full_rationals();
    // Arbitrary digit stream (positions are 1-based); nullopt digits raise
    // UnresolvableDigitError when queried.
    static BinaryExpansion from_digit_fn(std::function<std::optional<int>(std::uint64_t)> fn);

    bool is_exact() const;
    const Rat& exact_value() const;  // requires is_exact()

    // Digit of the canonical expansion at 1-based fractional position.
    int digit(std::uint64_t position) const;

    // Trichotomous comparison of the denoted real against a rational:
    // -1, 0, +1. Digit-streamed with a hard budget for inexact encodings.
    int compare(const Rat& b) const;

    // The set this expansion was built from, when it was.
    const SymbolicReal* source_set() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

BinaryExpansion encode_real(const SymbolicReal& z);
BinaryExpansion encode_full_rationals();

// r belongs to the sieve section of x.
bool decode_sieve(const BinaryExpansion& x, const Rat& r);
// SymbolicReal route: read straight off the description.
bool decode_sieve(const SymbolicReal& z, const Rat& r);

} // namespace ordchain
