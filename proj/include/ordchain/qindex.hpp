#pragma once

// The fixed bijection between indices and rationals: 0 first, then a
// deterministic zig-zag over reduced fractions by ascending numerator+
// denominator, positives at odd indices, negatives at even ones.
// Every downstream artifact depends on these positions; the scheme is
// part of the serialization format (docs/format.md).

#include <cstdint>

#include "ordchain/rational.hpp"

namespace ordchain {

Rat rat_of_index(std::uint64_t n);
std::uint64_t index_of(const Rat& q);

} // namespace ordchain
