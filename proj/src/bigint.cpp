#include "ordchain/bigint.hpp"

#include <algorithm>
#include <cstdlib>

#include "ordchain/errors.hpp"

namespace ordchain {

namespace {
constexpr std::uint64_t kBase = 1ull << 32;
}

BigInt::BigInt(std::int64_t v) {
    negative_ = v < 0;
    std::uint64_t u = negative_ ? (~static_cast<std::uint64_t>(v) + 1ull) : static_cast<std::uint64_t>(v);
    while (u > 0) {
        mag_.push_back(static_cast<std::uint32_t>(u & 0xFFFFFFFFull));
        u >>= 32;
    }
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) negative_ = false;
}

int BigInt::compare_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<std::uint32_t> BigInt::add_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.resize(std::max(a.size(), b.size()) + 1, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t s = carry;
        if (i < a.size()) s += a[i];
        if (i < b.size()) s += b[i];
        out[i] = static_cast<std::uint32_t>(s & 0xFFFFFFFFull);
        carry = s >> 32;
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

std::vector<std::uint32_t> BigInt::sub_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out = a;
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
        if (d < 0) {
            d += static_cast<std::int64_t>(kBase);
            borrow = 1;
        } else {
            borrow = 0;
        }
        out[i] = static_cast<std::uint32_t>(d);
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.mag_.empty()) r.negative_ = !r.negative_;
    return r;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    r.negative_ = false;
    return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
    BigInt r;
    if (negative_ == o.negative_) {
        r.mag_ = add_mag(mag_, o.mag_);
        r.negative_ = negative_;
    } else {
        int c = compare_mag(mag_, o.mag_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.mag_ = sub_mag(mag_, o.mag_);
            r.negative_ = negative_;
        } else {
            r.mag_ = sub_mag(o.mag_, mag_);
            r.negative_ = o.negative_;
        }
    }
    r.trim();
    return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
    if (is_zero() || o.is_zero()) return BigInt();
    BigInt r;
    r.mag_.assign(mag_.size() + o.mag_.size(), 0);
    for (std::size_t i = 0; i < mag_.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < o.mag_.size(); ++j) {
            std::uint64_t cur = static_cast<std::uint64_t>(mag_[i]) * o.mag_[j] +
                                r.mag_[i + j] + carry;
            r.mag_[i + j] = static_cast<std::uint32_t>(cur & 0xFFFFFFFFull);
            carry = cur >> 32;
        }
        std::size_t k = i + o.mag_.size();
        while (carry > 0) {
            std::uint64_t cur = r.mag_[k] + carry;
            r.mag_[k] = static_cast<std::uint32_t>(cur & 0xFFFFFFFFull);
            carry = cur >> 32;
            ++k;
        }
    }
    r.negative_ = negative_ != o.negative_;
    r.trim();
    return r;
}

std::size_t BigInt::bit_length() const {
    if (mag_.empty()) return 0;
    std::uint32_t top = mag_.back();
    std::size_t bits = (mag_.size() - 1) * 32;
    while (top > 0) {
        ++bits;
        top >>= 1;
    }
    return bits;
}

BigInt BigInt::shifted_left(std::size_t bits) const {
    if (is_zero() || bits == 0) return *this;
    BigInt r;
    std::size_t words = bits / 32, rem = bits % 32;
    r.mag_.assign(mag_.size() + words + 1, 0);
    for (std::size_t i = 0; i < mag_.size(); ++i) {
        std::uint64_t v = static_cast<std::uint64_t>(mag_[i]) << rem;
        r.mag_[i + words] |= static_cast<std::uint32_t>(v & 0xFFFFFFFFull);
        r.mag_[i + words + 1] |= static_cast<std::uint32_t>(v >> 32);
    }
    r.negative_ = negative_;
    r.trim();
    return r;
}

BigInt BigInt::shifted_right(std::size_t bits) const {
    std::size_t words = bits / 32, rem = bits % 32;
    if (words >= mag_.size()) return BigInt();
    BigInt r;
    r.mag_.assign(mag_.size() - words, 0);
    for (std::size_t i = 0; i < r.mag_.size(); ++i) {
        std::uint64_t v = mag_[i + words] >> rem;
        if (rem > 0 && i + words + 1 < mag_.size())
            v |= static_cast<std::uint64_t>(mag_[i + words + 1]) << (32 - rem);
        r.mag_[i] = static_cast<std::uint32_t>(v & 0xFFFFFFFFull);
    }
    r.negative_ = negative_;
    r.trim();
    return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw InvalidInputError("division by zero");
    int c = compare_mag(a.mag_, b.mag_);
    if (c < 0) {
        q = BigInt();
        r = a;
        return;
    }
    // Bitwise long division on magnitudes.
    BigInt rem;
    BigInt quot;
    quot.mag_.assign(a.mag_.size(), 0);
    BigInt babs = b.abs();
    for (std::size_t i = a.bit_length(); i-- > 0;) {
        rem = rem.shifted_left(1);
        if (a.mag_[i / 32] & (1u << (i % 32))) {
            if (rem.mag_.empty())
                rem.mag_.push_back(1);
            else
                rem.mag_[0] |= 1u;
        }
        if (compare_mag(rem.mag_, babs.mag_) >= 0) {
            rem.mag_ = sub_mag(rem.mag_, babs.mag_);
            quot.mag_[i / 32] |= (1u << (i % 32));
        }
    }
    quot.negative_ = a.negative_ != b.negative_;
    quot.trim();
    rem.negative_ = a.negative_;
    rem.trim();
    q = quot;
    r = rem;
}

BigInt BigInt::operator/(const BigInt& o) const {
    BigInt q, r;
    divmod(*this, o, q, r);
    return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
    BigInt q, r;
    divmod(*this, o, q, r);
    return r;
}

BigInt BigInt::floor_div(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    if (!r.is_zero() && (a.is_negative() != b.is_negative())) q = q - BigInt(1);
    return q;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.negative_ = false;
    b.negative_ = false;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    // Binary gcd.
    std::size_t shift = 0;
    while (!a.is_odd() && !b.is_odd()) {
        a = a.shifted_right(1);
        b = b.shifted_right(1);
        ++shift;
    }
    while (!a.is_odd()) a = a.shifted_right(1);
    while (!b.is_zero()) {
        while (!b.is_odd()) b = b.shifted_right(1);
        if (compare_mag(a.mag_, b.mag_) > 0) std::swap(a, b);
        b = b - a;
    }
    return a.shifted_left(shift);
}

int BigInt::compare(const BigInt& o) const {
    if (negative_ != o.negative_) return negative_ ? -1 : 1;
    int c = compare_mag(mag_, o.mag_);
    return negative_ ? -c : c;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    std::vector<std::uint32_t> chunks;  // base 10^9, little-endian
    BigInt cur = abs();
    const BigInt billion(1000000000);
    while (!cur.is_zero()) {
        BigInt q, r;
        divmod(cur, billion, q, r);
        chunks.push_back(r.mag_.empty() ? 0 : r.mag_[0]);
        cur = q;
    }
    std::string s = negative_ ? "-" : "";
    s += std::to_string(chunks.back());
    for (std::size_t i = chunks.size() - 1; i-- > 0;) {
        std::string part = std::to_string(chunks[i]);
        s += std::string(9 - part.size(), '0') + part;
    }
    return s;
}

BigInt BigInt::from_string(const std::string& s) {
    if (s.empty()) throw ParseError("empty integer literal", 0);
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw ParseError("integer literal has no digits", i);
    BigInt r;
    const BigInt ten(10);
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ParseError("invalid digit in integer literal", i);
        r = r * ten + BigInt(s[i] - '0');
    }
    if (neg) r = -r;
    return r;
}

bool BigInt::fits_int64() const {
    if (mag_.size() > 2) return false;
    std::uint64_t u = 0;
    if (mag_.size() >= 1) u = mag_[0];
    if (mag_.size() == 2) u |= static_cast<std::uint64_t>(mag_[1]) << 32;
    if (negative_) return u <= 0x8000000000000000ull;
    return u <= 0x7FFFFFFFFFFFFFFFull;
}

std::int64_t BigInt::to_int64() const {
    if (!fits_int64()) throw ResourceLimitError("integer exceeds 64-bit range: " + to_string());
    std::uint64_t u = 0;
    if (mag_.size() >= 1) u = mag_[0];
    if (mag_.size() == 2) u |= static_cast<std::uint64_t>(mag_[1]) << 32;
    return negative_ ? -static_cast<std::int64_t>(u) : static_cast<std::int64_t>(u);
}

} // namespace ordchain
