#include "ordchain/rational.hpp"

#include "ordchain/errors.hpp"

namespace ordchain {

Rat::Rat(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw InvalidInputError("rational with zero denominator");
    reduce();
}

void Rat::reduce() {
    if (den_.is_negative()) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (g != BigInt(1)) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

Rat Rat::operator-() const {
    Rat r = *this;
    r.num_ = -r.num_;
    return r;
}

Rat Rat::operator+(const Rat& o) const { return Rat(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
Rat Rat::operator-(const Rat& o) const { return Rat(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
Rat Rat::operator*(const Rat& o) const { return Rat(num_ * o.num_, den_ * o.den_); }

Rat Rat::operator/(const Rat& o) const {
    if (o.is_zero()) throw InvalidInputError("division of rational by zero");
    return Rat(num_ * o.den_, den_ * o.num_);
}

int Rat::compare(const Rat& o) const { return (num_ * o.den_).compare(o.num_ * den_); }

BigInt Rat::floor() const { return BigInt::floor_div(num_, den_); }

std::string Rat::to_string() const {
    if (is_integer()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

Rat Rat::from_string(const std::string& s) {
    std::size_t slash = s.find('/');
    if (slash == std::string::npos) return Rat(BigInt::from_string(s), BigInt(1));
    BigInt n = BigInt::from_string(s.substr(0, slash));
    BigInt d = BigInt::from_string(s.substr(slash + 1));
    if (d.is_zero() || d.is_negative())
        throw ParseError("rational literal needs a positive denominator: " + s, slash + 1);
    return Rat(n, d);
}

} // namespace ordchain
