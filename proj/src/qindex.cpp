#include "ordchain/qindex.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "ordchain/errors.hpp"

namespace ordchain {

namespace {

constexpr std::uint64_t kSumCap = 2000000;  // num+den bound for index queries

// Euler phi for all values up to n, sieve-computed, grown geometrically.
const std::vector<std::uint64_t>& phi_table(std::uint64_t n) {
    thread_local std::vector<std::uint64_t> phi;
    if (phi.size() <= n) {
        std::size_t target = std::max<std::size_t>(static_cast<std::size_t>(n) + 1, 1024);
        target = std::max(target, phi.size() * 2);
        phi.assign(target, 0);
        for (std::size_t i = 1; i < target; ++i) phi[i] = i;
        for (std::size_t i = 2; i < target; ++i) {
            if (phi[i] == i) {  // i prime
                for (std::size_t j = i; j < target; j += i) phi[j] -= phi[j] / i;
            }
        }
    }
    return phi;
}

// k-th positive rational, k >= 1, in the (num+den ascending, num ascending)
// order over reduced fractions.
Rat positive_at(std::uint64_t k) {
    std::uint64_t s = 2;
    std::uint64_t remaining = k;
    for (;;) {
        if (s > kSumCap) throw ResourceLimitError("rational enumeration index beyond desk scale");
        std::uint64_t in_class = phi_table(s)[s];
        if (remaining <= in_class) break;
        remaining -= in_class;
        ++s;
    }
    std::uint64_t seen = 0;
    for (std::uint64_t p = 1; p < s; ++p) {
        if (std::gcd(p, s) == 1) {
            ++seen;
            if (seen == remaining)
                return Rat(static_cast<std::int64_t>(p), static_cast<std::int64_t>(s - p));
        }
    }
    throw Error("internal: positive_at ran out of candidates");
}

// Rank of reduced p/q among positive rationals (1-based).
std::uint64_t positive_rank(std::uint64_t p, std::uint64_t q) {
    std::uint64_t s = p + q;
    if (s > kSumCap) throw ResourceLimitError("rational too large for index query (num+den > cap)");
    const auto& tbl = phi_table(s);
    std::uint64_t base = 0;
    for (std::uint64_t t = 2; t < s; ++t) base += tbl[t];
    std::uint64_t within = 0;
    for (std::uint64_t pp = 1; pp <= p; ++pp)
        if (std::gcd(pp, s) == 1) ++within;
    return base + within;
}

} // namespace

Rat rat_of_index(std::uint64_t n) {
    if (n == 0) return Rat(0);
    std::uint64_t k = (n + 1) / 2;
    Rat q = positive_at(k);
    return (n % 2 == 1) ? q : -q;
}

std::uint64_t index_of(const Rat& q) {
    if (q.is_zero()) return 0;
    Rat a = q.is_negative() ? -q : q;
    if (!a.num().fits_int64() || !a.den().fits_int64())
        throw ResourceLimitError("rational too large for index query: " + q.to_string());
    std::uint64_t p = static_cast<std::uint64_t>(a.num().to_int64());
    std::uint64_t d = static_cast<std::uint64_t>(a.den().to_int64());
    std::uint64_t k = positive_rank(p, d);
    return q.is_negative() ? 2 * k : 2 * k - 1;
}

} // namespace ordchain
