#pragma once

// Finite descriptions of subsets of Q with fully decidable queries:
// membership, interval emptiness, min-above/max-below, and the exact
// order type of the well-ordered initial segment. A SymbolicReal stands
// for the real number whose sieve section is the described set.
//
// Four block kinds form a closed class: finite point sets, ascending
// ladders (order type w, accumulating at their limit from below),
// descending ladders (reverse w, the non-well-ordered spoilers), and
// canonical well-ordered sets of any notated type inside an interval.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ordchain/ordinal.hpp"
#include "ordchain/rational.hpp"

namespace ordchain {

struct FinitePointsBlock {
    std::vector<Rat> points;  // sorted, distinct
};

// {limit - (limit-start)/(k+1) : k >= 0}; start is a member, limit is not.
struct AscendingLadderBlock {
    Rat start;
    Rat limit;
};

// {limit + (start-limit)/(k+1) : k >= 0}; start is a member, limit is not.
struct DescendingLadderBlock {
    Rat limit;
    Rat start;
};

// The canonical well-ordered subset of type `type` inside (lo, hi).
struct WoSetBlock {
    Ordinal type;
    Rat lo;
    Rat hi;
};

using Block = std::variant<FinitePointsBlock, AscendingLadderBlock, DescendingLadderBlock, WoSetBlock>;

// Result of a least-above / greatest-below query: either no elements on
// that side, a witnessing element, or elements accumulating at `bound`
// without a witness (only possible across ladder tails).
struct SideQuery {
    enum Kind { Empty, Element, Accumulates } kind = Empty;
    Rat value;  // the element, or the accumulation bound
};

class InitialSegmentReport;

class SymbolicReal {
public:
    SymbolicReal();  // empty set
    explicit SymbolicReal(std::vector<Block> blocks);

    const std::vector<Block>& blocks() const;
    bool denotes_empty() const;

    // Denotation is finite iff no ladder occurs and every wo block is finite.
    bool denotes_finite_set() const;
    std::vector<Rat> finite_elements() const;  // requires denotes_finite_set()

    bool contains(const Rat& q) const;
    // Z ∩ (lo, hi) != ∅, open interval.
    bool intersects(const Rat& lo, const Rat& hi) const;
    // Z ∩ (-inf, hi) != ∅.
    bool has_element_below(const Rat& hi) const;
    SideQuery min_above(const Rat& q) const;
    SideQuery max_below(const Rat& q) const;
    // Strict upper bound below which every member lies in the well-ordered
    // initial segment: no descending-ladder limit < r.
    bool well_ordered_below(const Rat& r) const;
    bool well_ordered_everywhere() const;

    // Exact analysis of the well-ordered initial segment
    // W = {q in Z : {p in Z : p <= q} is well-ordered}.
    InitialSegmentReport initial_segment() const;
    // Same for Z ∩ (-inf, r).
    InitialSegmentReport initial_segment_below(const Rat& r) const;

    // Stable identity for caching and display.
    const std::string& key() const;

    nlohmann::json to_json() const;
    static SymbolicReal from_json(const nlohmann::json& j);

    // Expression grammar: fin{...} | asc(a,b) | desc(a,b) | wo(mu,(a,b)),
    // joined with '+'. desc takes (limit, start).
    static SymbolicReal parse(const std::string& text);

    bool operator==(const SymbolicReal& o) const { return key() == o.key(); }

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

class InitialSegmentReport {
public:
    // Exact order type of the analyzed segment (always computable, < eps_0).
    const Ordinal& order_type() const { return type_; }
    bool exceeds(const Ordinal& budget) const { return type_ >= budget; }
    // The xi-th element of the segment in increasing order, 0-based;
    // defined iff xi < order_type().
    std::optional<Rat> element_at(const Ordinal& xi) const;

private:
    friend class SymbolicReal;
    struct Data;
    std::shared_ptr<const Data> data_;
    Ordinal type_;
};

// Budgeted entry point: exact type plus an exceeds-budget marker.
struct InitialSegmentOutcome {
    InitialSegmentReport report;
    bool exceeds_budget = false;
};
InitialSegmentOutcome initial_segment(const SymbolicReal& z, const Ordinal& budget);

// Deterministic well-ordered witness of type mu inside (lo, hi). mu = 0
// yields the empty descriptor; empty intervals with mu > 0 are rejected.
SymbolicReal canonical_wo_set(const Ordinal& mu, const Rat& lo, const Rat& hi);

} // namespace ordchain
