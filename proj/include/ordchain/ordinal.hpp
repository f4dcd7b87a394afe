#pragma once

// Ordinal notations below epsilon_0 in Cantor normal form, with the exact
// arithmetic, canonical enumerations and length bookkeeping the chain
// assembly needs. All values immutable; all operations pure.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ordchain {

enum class Cmp { LT, EQ, GT };

class Ordinal {
public:
    struct Term;

    // Zero.
    Ordinal() = default;

    static Ordinal from_int(std::uint64_t n);
    static Ordinal omega();
    // w^exponent * coeff; coeff must be positive.
    static Ordinal omega_power(const Ordinal& exponent, std::uint64_t coeff = 1);

    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const;
    // Value of a finite notation; throws for infinite ones.
    std::uint64_t finite_value() const;

    // A successor notation has a trailing w^0 term.
    bool is_successor() const;
    bool is_limit() const;  // nonzero and not a successor

    Ordinal successor() const;
    // Predecessor of a successor notation; throws otherwise.
    Ordinal predecessor() const;

    // Splits into (limit part, finite tail): *this = limit + finite.
    std::pair<Ordinal, std::uint64_t> split_limit_finite() const;

    const std::vector<Term>& terms() const { return terms_; }
    const Ordinal& leading_exponent() const;  // requires nonzero

    static Cmp compare(const Ordinal& a, const Ordinal& b);
    bool operator==(const Ordinal& o) const { return compare(*this, o) == Cmp::EQ; }
    bool operator!=(const Ordinal& o) const { return compare(*this, o) != Cmp::EQ; }
    bool operator<(const Ordinal& o) const { return compare(*this, o) == Cmp::LT; }
    bool operator<=(const Ordinal& o) const { return compare(*this, o) != Cmp::GT; }
    bool operator>(const Ordinal& o) const { return compare(*this, o) == Cmp::GT; }
    bool operator>=(const Ordinal& o) const { return compare(*this, o) != Cmp::LT; }

    static Ordinal add(const Ordinal& a, const Ordinal& b);
    // The unique c with a + c = b, for a <= b; throws InvalidInputError otherwise.
    static Ordinal subtract_left(const Ordinal& a, const Ordinal& b);

    // k-th member of the canonical fundamental sequence of a limit notation;
    // strictly increasing from k >= 1 with supremum *this.
    Ordinal fundamental(std::uint64_t k) const;

    // Text syntax: "0", "7", "w", "w*3", "w^2*3+w+5", "w^{w+1}*2+4".
    // parse/print are mutually inverse on normal forms.
    std::string to_string() const;
    static Ordinal parse(const std::string& text);

private:
    std::vector<Term> terms_;  // strictly decreasing exponents, positive coeffs
};

struct Ordinal::Term {
    Ordinal exponent;
    std::uint64_t coeff = 0;
};

// Left-fold ordinal sum of w^exp * coeff over the given order; merges and
// absorbs per the addition rules. Negative coefficients are rejected,
// zero coefficients dropped.
Ordinal normalize(const std::vector<std::pair<Ordinal, std::int64_t>>& raw_terms);

// Canonical-order variant: terms are first sorted by descending exponent
// (merging equal ones), then summed; invariant under permutations.
Ordinal normalize_sorted(const std::vector<std::pair<Ordinal, std::int64_t>>& raw_terms);

struct EnumerationPrefix {
    std::vector<Ordinal> values;
    bool exhausted = false;  // the whole domain fit in the prefix
};

// First n terms of the fixed deterministic enumeration of {v : v < mu}.
// The same mu always yields the same sequence; injective; surjective in the
// limit (bijective onto the domain when mu is finite). Throws
// EmptyDomainError for mu = 0.
EnumerationPrefix enumerate_below(const Ordinal& mu, std::size_t n);

// Incremental form of the same enumeration.
class OrdinalEnumerator {
public:
    explicit OrdinalEnumerator(const Ordinal& mu);
    ~OrdinalEnumerator();
    OrdinalEnumerator(OrdinalEnumerator&&) noexcept;
    OrdinalEnumerator& operator=(OrdinalEnumerator&&) noexcept;
    std::optional<Ordinal> next();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Position bookkeeping for the interleaved assembly: partial sums of
// (1 + nu_xi) over a prefix of the enumeration, with a bijective map from
// ordinal positions below the cut to their source.
class LengthAudit {
public:
    struct Source {
        std::size_t step = 0;           // xi: which enumeration step
        bool is_base_element = true;    // the step's own element, vs an insertion
        Ordinal insertion_index;        // alpha, meaningful when !is_base_element
    };

    LengthAudit(std::vector<Ordinal> nus, Ordinal cut);

    const Ordinal& cut() const { return cut_; }
    const std::vector<Ordinal>& nus() const { return nus_; }
    // partial_sums()[i] = sum over xi < i of (1 + nu_xi); strictly increasing.
    const std::vector<Ordinal>& partial_sums() const { return partial_sums_; }

    // Position -> source, for positions < cut.
    Source locate(const Ordinal& position) const;
    // Source -> position; inverse of locate on its range.
    Ordinal position_of(const Source& s) const;

private:
    std::vector<Ordinal> nus_;
    std::vector<Ordinal> partial_sums_;
    Ordinal cut_;
};

// Builds the audit from a supplied enumeration prefix; throws
// InsufficientEnumerationError when the prefix cannot cover the cut.
LengthAudit interleaved_length(const std::vector<Ordinal>& nus, const Ordinal& cut);

} // namespace ordchain
