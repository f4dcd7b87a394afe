#pragma once

// The order-preserving rational bijection (u,v) -> R used by the vertical
// shift, centered so the midpoint maps to 0. Both directions are exact on
// rationals and mutually inverse.

#include "ordchain/errors.hpp"
#include "ordchain/rational.hpp"

namespace ordchain {

inline Rat h_map(const Rat& u, const Rat& v, const Rat& y) {
    if (!(u < v)) throw DomainError("h_map needs u < v");
    if (!(u < y && y < v)) throw DomainError("h_map argument outside (u,v)");
    Rat c = midpoint(u, v);
    if (y >= c) return (y - c) / (v - y);
    return (y - c) / (y - u);
}

inline Rat h_inv(const Rat& u, const Rat& v, const Rat& t) {
    if (!(u < v)) throw DomainError("h_inv needs u < v");
    Rat c = midpoint(u, v);
    if (t >= Rat(0)) return (c + t * v) / (Rat(1) + t);
    return (c - t * u) / (Rat(1) - t);
}

} // namespace ordchain
