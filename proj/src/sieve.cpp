#include "ordchain/sieve.hpp"

#include <map>
#include <mutex>

#include "ordchain/errors.hpp"
#include "ordchain/qindex.hpp"

namespace ordchain {

namespace {
constexpr std::uint64_t kDigitPositionCap = 4000000000000ull;
constexpr std::uint64_t kCompareBudget = 8192;

// sum over n >= N of 2^-(2n+1) = (2/3) * 4^-N
Rat tail_sum(std::uint64_t from) {
    Rat scale(BigInt(1), BigInt(1).shifted_left(2 * from));
    return Rat(2, 3) * scale;
}

// 2^exp mod m
BigInt pow2_mod(std::uint64_t exp, const BigInt& m) {
    BigInt result(1);
    BigInt base = BigInt(2) % m;
    while (exp > 0) {
        if (exp & 1) result = (result * base) % m;
        base = (base * base) % m;
        exp >>= 1;
    }
    return result;
}
} // namespace

struct BinaryExpansion::Impl {
    std::optional<Rat> exact;
    std::optional<SymbolicReal> source;
    std::function<std::optional<int>(std::uint64_t)> digits;  // for streams

    mutable std::mutex memo_mu;
    mutable std::map<std::uint64_t, int> memo;
};

BinaryExpansion BinaryExpansion::from_set(const SymbolicReal& z) {
    auto impl = std::make_shared<Impl>();
    impl->source = z;
    if (z.denotes_finite_set()) {
        // finite index set: exact value with an all-ones (odd positions) tail
        std::vector<std::uint64_t> idx;
        for (const auto& q : z.finite_elements()) idx.push_back(index_of(q));
        std::sort(idx.begin(), idx.end());
        std::uint64_t n_end = idx.empty() ? 0 : idx.back() + 1;
        Rat v = tail_sum(n_end);
        std::size_t at = 0;
        for (std::uint64_t n = 0; n < n_end; ++n) {
            bool member = at < idx.size() && idx[at] == n;
            if (member)
                ++at;
            else
                v = v + Rat(BigInt(1), BigInt(1).shifted_left(2 * n + 1));
        }
        impl->exact = v;
    } else {
        SymbolicReal set = z;
        impl->digits = [set](std::uint64_t pos) -> std::optional<int> {
            if (pos % 2 == 0) return 0;
            std::uint64_t n = (pos - 1) / 2;
            return set.contains(rat_of_index(n)) ? 0 : 1;
        };
    }
    BinaryExpansion e;
    e.impl_ = std::move(impl);
    return e;
}

BinaryExpansion BinaryExpansion::full_rationals() {
    auto impl = std::make_shared<Impl>();
    impl->exact = Rat(0);
    BinaryExpansion e;
    e.impl_ = std::move(impl);
    return e;
}

BinaryExpansion BinaryExpansion::from_digit_fn(std::function<std::optional<int>(std::uint64_t)> fn) {
    auto impl = std::make_shared<Impl>();
    impl->digits = std::move(fn);
    BinaryExpansion e;
    e.impl_ = std::move(impl);
    return e;
}

bool BinaryExpansion::is_exact() const { return impl_->exact.has_value(); }

const Rat& BinaryExpansion::exact_value() const {
    if (!impl_->exact) throw InvalidInputError("expansion has no exact rational value");
    return *impl_->exact;
}

const SymbolicReal* BinaryExpansion::source_set() const {
    return impl_->source ? &*impl_->source : nullptr;
}

int BinaryExpansion::digit(std::uint64_t position) const {
    if (position == 0 || position > kDigitPositionCap)
        throw ResourceLimitError("digit position beyond desk scale");
    {
        std::lock_guard<std::mutex> g(impl_->memo_mu);
        auto it = impl_->memo.find(position);
        if (it != impl_->memo.end()) return it->second;
    }
    int result;
    if (impl_->exact) {
        // canonical expansion digit: parity of floor(frac * 2^pos), read off
        // num * 2^pos mod 2*den so the position can be astronomically large
        const Rat& x = *impl_->exact;
        BigInt fl = x.floor();
        Rat frac = x - Rat(fl, BigInt(1));
        BigInt den2 = frac.den() + frac.den();
        BigInt m = (frac.num() * pow2_mod(position, den2)) % den2;
        result = m >= frac.den() ? 1 : 0;
    } else {
        auto d = impl_->digits(position);
        if (!d)
            throw UnresolvableDigitError("digit at position " + std::to_string(position) +
                                         " cannot be resolved");
        result = *d;
    }
    std::lock_guard<std::mutex> g(impl_->memo_mu);
    impl_->memo.emplace(position, result);
    return result;
}

int BinaryExpansion::compare(const Rat& b) const {
    if (impl_->exact) return impl_->exact->compare(b);
    if (impl_->source) {
        // A set-backed stream denotes a real in (0, 2/3): even positions are
        // zero, infinitely many odd ones are 0 (the set is infinite) and
        // infinitely many are 1 (no symbolic set covers all of Q).
        if (b <= Rat(0)) return 1;
        if (b >= Rat(2, 3)) return -1;
    } else {
        if (b < Rat(0)) return 1;
        if (b >= Rat(1)) return -1;  // canonical expansions stay below 1
        if (b.is_zero()) {
            // positive iff some digit is 1; bounded search
            for (std::uint64_t pos = 1; pos <= kCompareBudget; ++pos)
                if (digit(pos) == 1) return 1;
            throw UnresolvableDigitError("comparison with 0 undecided within the digit budget");
        }
    }
    // stream against the canonical digits of b by long division
    BigInt rem = b.num();  // b in (0,1): fractional part is b itself
    const BigInt& den = b.den();
    for (std::uint64_t pos = 1; pos <= kCompareBudget; ++pos) {
        rem = rem.shifted_left(1);
        int eb = 0;
        if (rem >= den) {
            eb = 1;
            rem = rem - den;
        }
        int dx = digit(pos);
        if (dx != eb) return dx < eb ? -1 : 1;
    }
    throw UnresolvableDigitError("comparison with " + b.to_string() +
                                 " undecided within the digit budget");
}

BinaryExpansion encode_real(const SymbolicReal& z) { return BinaryExpansion::from_set(z); }

BinaryExpansion encode_full_rationals() { return BinaryExpansion::full_rationals(); }

bool decode_sieve(const BinaryExpansion& x, const Rat& r) {
    std::uint64_t n = index_of(r);
    return x.digit(2 * n + 1) == 0;
}

bool decode_sieve(const SymbolicReal& z, const Rat& r) { return z.contains(r); }

} // namespace ordchain
