#include "ordchain/ordinal.hpp"

#include <algorithm>
#include <cctype>

#include "ordchain/errors.hpp"

namespace ordchain {

namespace {
constexpr std::size_t kUnitCap = 100000;
}

Ordinal Ordinal::from_int(std::uint64_t n) {
    Ordinal r;
    if (n > 0) r.terms_.push_back(Term{Ordinal(), n});
    return r;
}

Ordinal Ordinal::omega() { return omega_power(from_int(1), 1); }

Ordinal Ordinal::omega_power(const Ordinal& exponent, std::uint64_t coeff) {
    Ordinal r;
    if (coeff > 0) r.terms_.push_back(Term{exponent, coeff});
    return r;
}

bool Ordinal::is_finite() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

std::uint64_t Ordinal::finite_value() const {
    if (terms_.empty()) return 0;
    if (!is_finite()) throw InvalidInputError("finite_value of infinite notation " + to_string());
    return terms_[0].coeff;
}

bool Ordinal::is_successor() const { return !terms_.empty() && terms_.back().exponent.is_zero(); }

bool Ordinal::is_limit() const { return !terms_.empty() && !terms_.back().exponent.is_zero(); }

Ordinal Ordinal::successor() const { return add(*this, from_int(1)); }

Ordinal Ordinal::predecessor() const {
    if (!is_successor()) throw InvalidInputError("predecessor of non-successor " + to_string());
    Ordinal r = *this;
    if (r.terms_.back().coeff > 1)
        r.terms_.back().coeff -= 1;
    else
        r.terms_.pop_back();
    return r;
}

std::pair<Ordinal, std::uint64_t> Ordinal::split_limit_finite() const {
    if (!is_successor()) return {*this, 0};
    Ordinal head = *this;
    std::uint64_t n = head.terms_.back().coeff;
    head.terms_.pop_back();
    return {head, n};
}

const Ordinal& Ordinal::leading_exponent() const {
    if (terms_.empty()) throw InvalidInputError("leading exponent of 0");
    return terms_[0].exponent;
}

Cmp Ordinal::compare(const Ordinal& a, const Ordinal& b) {
    std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        Cmp e = compare(a.terms_[i].exponent, b.terms_[i].exponent);
        if (e != Cmp::EQ) return e;
        if (a.terms_[i].coeff != b.terms_[i].coeff)
            return a.terms_[i].coeff < b.terms_[i].coeff ? Cmp::LT : Cmp::GT;
    }
    if (a.terms_.size() == b.terms_.size()) return Cmp::EQ;
    return a.terms_.size() < b.terms_.size() ? Cmp::LT : Cmp::GT;
}

Ordinal Ordinal::add(const Ordinal& a, const Ordinal& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return b;
    const Ordinal& lead = b.terms_[0].exponent;
    Ordinal r;
    std::size_t i = 0;
    while (i < a.terms_.size() && compare(a.terms_[i].exponent, lead) == Cmp::GT) {
        r.terms_.push_back(a.terms_[i]);
        ++i;
    }
    std::uint64_t c = b.terms_[0].coeff;
    if (i < a.terms_.size() && compare(a.terms_[i].exponent, lead) == Cmp::EQ) c += a.terms_[i].coeff;
    r.terms_.push_back(Term{lead, c});
    for (std::size_t j = 1; j < b.terms_.size(); ++j) r.terms_.push_back(b.terms_[j]);
    return r;
}

Ordinal Ordinal::subtract_left(const Ordinal& a, const Ordinal& b) {
    std::size_t i = 0;
    while (i < a.terms_.size() && i < b.terms_.size()) {
        if (compare(a.terms_[i].exponent, b.terms_[i].exponent) != Cmp::EQ ||
            a.terms_[i].coeff != b.terms_[i].coeff)
            break;
        ++i;
    }
    if (i == a.terms_.size() && i == b.terms_.size()) return Ordinal();
    if (i == a.terms_.size()) {
        Ordinal r;
        r.terms_.assign(b.terms_.begin() + static_cast<std::ptrdiff_t>(i), b.terms_.end());
        return r;
    }
    if (i == b.terms_.size())
        throw InvalidInputError("subtract_left: " + a.to_string() + " > " + b.to_string());
    Cmp e = compare(a.terms_[i].exponent, b.terms_[i].exponent);
    if (e == Cmp::GT)
        throw InvalidInputError("subtract_left: " + a.to_string() + " > " + b.to_string());
    if (e == Cmp::LT) {
        Ordinal r;
        r.terms_.assign(b.terms_.begin() + static_cast<std::ptrdiff_t>(i), b.terms_.end());
        return r;
    }
    if (a.terms_[i].coeff > b.terms_[i].coeff)
        throw InvalidInputError("subtract_left: " + a.to_string() + " > " + b.to_string());
    Ordinal r;
    r.terms_.push_back(Term{b.terms_[i].exponent, b.terms_[i].coeff - a.terms_[i].coeff});
    r.terms_.insert(r.terms_.end(), b.terms_.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                    b.terms_.end());
    return r;
}

Ordinal Ordinal::fundamental(std::uint64_t k) const {
    if (!is_limit()) throw InvalidInputError("fundamental sequence of non-limit " + to_string());
    Ordinal base = *this;
    Term last = base.terms_.back();
    base.terms_.pop_back();
    if (last.coeff > 1) {
        base.terms_.push_back(Term{last.exponent, last.coeff - 1});
    }
    const Ordinal& g = last.exponent;  // >= 1 since *this is a limit
    if (g.is_successor()) {
        return add(base, omega_power(g.predecessor(), k));
    }
    if (k == 0) return base;  // keeps the sequence total; strictly increasing from k >= 1
    return add(base, omega_power(g.fundamental(k), 1));
}

std::string Ordinal::to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i > 0) s += "+";
        const Term& t = terms_[i];
        if (t.exponent.is_zero()) {
            s += std::to_string(t.coeff);
            continue;
        }
        s += "w";
        if (!(t.exponent.is_finite() && t.exponent.finite_value() == 1)) {
            if (t.exponent.is_finite())
                s += "^" + std::to_string(t.exponent.finite_value());
            else
                s += "^{" + t.exponent.to_string() + "}";
        }
        if (t.coeff != 1) s += "*" + std::to_string(t.coeff);
    }
    return s;
}

namespace {

struct OrdParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit OrdParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::uint64_t number() {
        skip_ws();
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("expected a number in ordinal literal", pos);
        std::uint64_t v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            std::uint64_t d = static_cast<std::uint64_t>(text[pos] - '0');
            if (v > (UINT64_MAX - d) / 10) throw ParseError("ordinal coefficient overflow", pos);
            v = v * 10 + d;
            ++pos;
        }
        return v;
    }

    Ordinal expr() {
        std::vector<std::pair<Ordinal, std::int64_t>> raw;
        for (;;) {
            raw.push_back(term());
            if (!eat('+')) break;
        }
        return normalize(raw);
    }

    std::pair<Ordinal, std::int64_t> term() {
        skip_ws();
        if (pos < text.size() && text[pos] == 'w') {
            ++pos;
            Ordinal exp = Ordinal::from_int(1);
            if (eat('^')) {
                skip_ws();
                if (pos < text.size() && text[pos] == '{') {
                    ++pos;
                    exp = expr();
                    if (!eat('}')) throw ParseError("unclosed '{' in ordinal exponent", pos);
                } else {
                    exp = Ordinal::from_int(number());
                }
            }
            std::uint64_t coeff = 1;
            if (eat('*')) coeff = number();
            if (coeff > static_cast<std::uint64_t>(INT64_MAX))
                throw ParseError("ordinal coefficient overflow", pos);
            return {exp, static_cast<std::int64_t>(coeff)};
        }
        std::uint64_t v = number();
        if (v > static_cast<std::uint64_t>(INT64_MAX)) throw ParseError("ordinal coefficient overflow", pos);
        return {Ordinal(), static_cast<std::int64_t>(v)};
    }
};

} // namespace

Ordinal Ordinal::parse(const std::string& text) {
    OrdParser p(text);
    Ordinal r = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing characters in ordinal literal", p.pos);
    return r;
}

Ordinal normalize(const std::vector<std::pair<Ordinal, std::int64_t>>& raw_terms) {
    Ordinal acc;
    for (const auto& [exp, coeff] : raw_terms) {
        if (coeff < 0) throw InvalidInputError("negative coefficient in ordinal term list");
        if (coeff == 0) continue;
        acc = Ordinal::add(acc, Ordinal::omega_power(exp, static_cast<std::uint64_t>(coeff)));
    }
    return acc;
}

Ordinal normalize_sorted(const std::vector<std::pair<Ordinal, std::int64_t>>& raw_terms) {
    std::vector<std::pair<Ordinal, std::int64_t>> sorted = raw_terms;
    for (const auto& [exp, coeff] : sorted)
        if (coeff < 0) throw InvalidInputError("negative coefficient in ordinal term list");
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return Ordinal::compare(a.first, b.first) == Cmp::GT;
    });
    return normalize(sorted);
}

// ---------------------------------------------------------------------------
// Enumeration of {v : v < mu}.
//
// mu expands into its unit terms w^{f_1} >= w^{f_2} >= ... ; the domains
// [P_j, P_j + w^{f_j}) are enumerated round-robin. Each Below(w^f) domain
// emits 0 first and then dovetails the disjoint slices
// {w^d * k + rho : rho < w^d} over pairs (d, k), d ranging over the
// enumeration of {d : d < f} and k >= 1, activating one slice per polling
// cycle in anti-diagonal order.
// ---------------------------------------------------------------------------

namespace {

struct Stream {
    virtual ~Stream() = default;
    virtual std::optional<Ordinal> next() = 0;
};

using StreamPtr = std::unique_ptr<Stream>;

StreamPtr make_unit_stream(const Ordinal& f);

struct SingletonStream final : Stream {
    std::optional<Ordinal> value;
    explicit SingletonStream(Ordinal v) : value(std::move(v)) {}
    std::optional<Ordinal> next() override {
        auto v = value;
        value.reset();
        return v;
    }
};

struct OffsetStream final : Stream {
    Ordinal offset;
    StreamPtr inner;
    OffsetStream(Ordinal off, StreamPtr in) : offset(std::move(off)), inner(std::move(in)) {}
    std::optional<Ordinal> next() override {
        auto v = inner->next();
        if (!v) return std::nullopt;
        return Ordinal::add(offset, *v);
    }
};

struct RoundRobinStream final : Stream {
    struct Member {
        StreamPtr stream;
        bool dead = false;
    };
    std::vector<Member> members;
    std::size_t cursor = 0;

    std::optional<Ordinal> next() override {
        std::size_t checked = 0;
        while (checked < members.size()) {
            Member& m = members[cursor];
            cursor = (cursor + 1) % members.size();
            ++checked;
            if (m.dead) continue;
            auto v = m.stream->next();
            if (v) return v;
            m.dead = true;
        }
        return std::nullopt;
    }
};

// Enumerates {v : v < w^f} for f >= 1.
struct PowBelowStream final : Stream {
    Ordinal f;
    bool emitted_zero = false;

    StreamPtr exponent_enum;          // enumeration of {d : d < f}
    std::vector<Ordinal> exponents;   // memoized prefix of it
    bool exponents_done = false;

    struct Slice {
        StreamPtr stream;
        bool dead = false;
    };
    std::vector<Slice> active;
    std::size_t cursor = 0;
    std::uint64_t diag = 1;   // current anti-diagonal i + k
    std::uint64_t diag_i = 0; // position within it

    explicit PowBelowStream(Ordinal f_in);

    bool ensure_exponent(std::size_t i) {
        while (exponents.size() <= i && !exponents_done) {
            auto v = exponent_enum->next();
            if (v)
                exponents.push_back(*v);
            else
                exponents_done = true;
        }
        return i < exponents.size();
    }

    void activate_one() {
        for (;;) {
            if (diag_i >= diag) {
                ++diag;
                diag_i = 0;
            }
            std::size_t i = diag_i;
            std::uint64_t k = diag - diag_i;
            ++diag_i;
            if (!ensure_exponent(i)) continue;  // slice row does not exist
            const Ordinal& d = exponents[i];
            Ordinal base = Ordinal::omega_power(d, k);
            active.push_back(Slice{std::make_unique<OffsetStream>(base, make_unit_stream(d))});
            return;
        }
    }

    std::optional<Ordinal> next() override {
        if (!emitted_zero) {
            emitted_zero = true;
            return Ordinal();
        }
        for (;;) {
            if (cursor >= active.size()) {
                activate_one();
                cursor = 0;
            }
            Slice& s = active[cursor++];
            if (s.dead) continue;
            auto v = s.stream->next();
            if (v) return v;
            s.dead = true;
        }
    }
};

StreamPtr make_unit_stream(const Ordinal& f) {
    if (f.is_zero()) return std::make_unique<SingletonStream>(Ordinal());
    return std::make_unique<PowBelowStream>(f);
}

StreamPtr make_below_stream(const Ordinal& mu) {
    auto rr = std::make_unique<RoundRobinStream>();
    Ordinal offset;
    std::size_t units = 0;
    for (const auto& t : mu.terms()) {
        if (t.coeff > kUnitCap) throw ResourceLimitError("ordinal coefficient beyond desk scale");
        for (std::uint64_t c = 0; c < t.coeff; ++c) {
            if (++units > kUnitCap) throw ResourceLimitError("ordinal unit expansion beyond desk scale");
            rr->members.push_back(RoundRobinStream::Member{
                std::make_unique<OffsetStream>(offset, make_unit_stream(t.exponent))});
            offset = Ordinal::add(offset, Ordinal::omega_power(t.exponent, 1));
        }
    }
    return rr;
}

PowBelowStream::PowBelowStream(Ordinal f_in) : f(std::move(f_in)) {
    exponent_enum = make_below_stream(f);
}

} // namespace

struct OrdinalEnumerator::Impl {
    StreamPtr stream;
};

OrdinalEnumerator::OrdinalEnumerator(const Ordinal& mu) : impl_(std::make_unique<Impl>()) {
    if (mu.is_zero()) throw EmptyDomainError("no ordinals below 0");
    impl_->stream = make_below_stream(mu);
}

OrdinalEnumerator::~OrdinalEnumerator() = default;
OrdinalEnumerator::OrdinalEnumerator(OrdinalEnumerator&&) noexcept = default;
OrdinalEnumerator& OrdinalEnumerator::operator=(OrdinalEnumerator&&) noexcept = default;

std::optional<Ordinal> OrdinalEnumerator::next() { return impl_->stream->next(); }

EnumerationPrefix enumerate_below(const Ordinal& mu, std::size_t n) {
    OrdinalEnumerator en(mu);
    EnumerationPrefix out;
    for (std::size_t i = 0; i < n; ++i) {
        auto v = en.next();
        if (!v) {
            out.exhausted = true;
            return out;
        }
        out.values.push_back(*v);
    }
    if (!en.next())
        out.exhausted = true;
    return out;
}

// ---------------------------------------------------------------------------
// LengthAudit
// ---------------------------------------------------------------------------

LengthAudit::LengthAudit(std::vector<Ordinal> nus, Ordinal cut)
    : nus_(std::move(nus)), cut_(std::move(cut)) {
    partial_sums_.push_back(Ordinal());
    for (const auto& nu : nus_) {
        Ordinal step = Ordinal::add(Ordinal::from_int(1), nu);
        partial_sums_.push_back(Ordinal::add(partial_sums_.back(), step));
    }
    if (cut_ > partial_sums_.back())
        throw InsufficientEnumerationError("cut " + cut_.to_string() +
                                           " unreachable with the supplied enumeration prefix (total " +
                                           partial_sums_.back().to_string() + ")");
}

LengthAudit::Source LengthAudit::locate(const Ordinal& position) const {
    if (position >= cut_)
        throw InvalidInputError("position " + position.to_string() + " is beyond the cut " +
                                cut_.to_string());
    std::size_t step = 0;
    for (std::size_t i = 1; i < partial_sums_.size(); ++i) {
        if (partial_sums_[i] <= position)
            step = i;
        else
            break;
    }
    Ordinal delta = Ordinal::subtract_left(partial_sums_[step], position);
    Source s;
    s.step = step;
    if (delta.is_zero()) {
        s.is_base_element = true;
        return s;
    }
    s.is_base_element = false;
    // alpha is the unique solution of 1 + alpha = delta.
    s.insertion_index = delta.is_finite() ? Ordinal::from_int(delta.finite_value() - 1) : delta;
    return s;
}

Ordinal LengthAudit::position_of(const Source& s) const {
    if (s.step >= nus_.size())
        throw InvalidInputError("audit step out of range");
    if (s.is_base_element) return partial_sums_[s.step];
    if (s.insertion_index >= nus_[s.step])
        throw InvalidInputError("insertion index beyond the step's domain");
    return Ordinal::add(partial_sums_[s.step],
                        Ordinal::add(Ordinal::from_int(1), s.insertion_index));
}

LengthAudit interleaved_length(const std::vector<Ordinal>& nus, const Ordinal& cut) {
    return LengthAudit(nus, cut);
}

} // namespace ordchain
