#pragma once

// Uniform subsets of R x Q: each vertical section holds at most one
// rational. A set pairs a structural multicode with a semantic evaluator
// and a projection descriptor (its projection is always one of the nested
// domains D_xi, so projection comparability is an ordinal comparison).
// Chains are ordinal-indexed families ordered by the below-relation:
// comparable projections plus strictly increasing section values on the
// shared domain.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ordchain/borel_code.hpp"
#include "ordchain/hmap.hpp"
#include "ordchain/ordinal.hpp"
#include "ordchain/symbolic_real.hpp"

namespace ordchain {

struct ProjectionDescriptor {
    Ordinal level;  // the projection equals the domain D_level

    // pr(this) is a subset of pr(other) iff this->level >= other.level.
    bool subset_of(const ProjectionDescriptor& o) const { return level >= o.level; }
};

class UniformSet {
public:
    enum class SemanticTag { U, Restricted, Shifted, Trimmed };

    SemanticTag tag() const;
    const Ordinal& level() const;  // U: the selector level; Restricted: the cut; Shifted: the band
    std::optional<UniformSet> base() const;
    const BorelMultiCode& multicode() const;
    const ProjectionDescriptor& proj() const;

    // Semantic evaluator: the unique ordinate at x, or absent.
    std::optional<Rat> value_at(const SymbolicReal& x) const;

    static UniformSet trimmed(const UniformSet& base);

    nlohmann::json to_json() const;
    static UniformSet from_json(const nlohmann::json& j);
    bool operator==(const UniformSet& o) const;

    // A short display name ("U(w+1)", "S(w,2)"...).
    std::string describe() const;

    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// The xi-th selector: maps x to the xi-th element of the well-ordered
// initial segment of its sieve section, when that segment is long enough.
UniformSet build_u(const Ordinal& xi);

// Linear code for the domain D_xi (the projection of the xi-th selector).
BorelCode build_d(const Ordinal& xi);

// Members of D_xi that are not in D_{xi+1}: nonempty, pairwise disjoint bands.
BorelCode derived_e(const Ordinal& xi);

// Semantic section value.
std::optional<Rat> section_value(const UniformSet& p, const SymbolicReal& x);
// Same, cross-checked against the multicode on the window; a second
// structural witness raises UniformityViolationError.
std::optional<Rat> section_value_checked(const UniformSet& p, const SymbolicReal& x,
                                         const std::vector<Rat>& window);

enum class BelowVerdict { Holds, Fails, Vacuous };

struct BelowResult {
    BelowVerdict verdict = BelowVerdict::Vacuous;
    std::string witness;  // set on Fails
};

// The below-relation, checked exactly on descriptors (condition one) and
// pointwise over the probes on the shared domain (condition two).
BelowResult below(const UniformSet& p, const UniformSet& q,
                  const std::vector<SymbolicReal>& probes);

// Transitivity shortcut: given p below u below q already certified, the
// descriptor facts alone certify p below q.
bool below_via_middle(const UniformSet& p, const UniformSet& u, const UniformSet& q);

// Sections intersected with D_cut; the projection tightens accordingly.
UniformSet restrict_to_d(const UniformSet& f, const Ordinal& cut);

// Vertical shift of q (whose projection must sit inside D_{xi+1}) into the
// open band between the xi-th and (xi+1)-th selectors.
UniformSet shift_between(const UniformSet& q, const Ordinal& xi);

enum class ChainStrategy { Direct, Interleaved };

class Chain {
public:
    const Ordinal& length() const;
    ChainStrategy strategy() const;

    // Element at an ordinal position below length(); materialized on demand.
    UniformSet at(const Ordinal& position) const;

    // Interleaved bookkeeping (positions -> sources); trivial for Direct.
    struct Placement {
        std::size_t step = 0;
        bool is_base_element = true;
        Ordinal insertion_index;
    };
    Placement locate(const Ordinal& position) const;
    Ordinal position_of(const Placement& p) const;
    // Enumeration prefix materialized so far and its partial sums.
    std::vector<Ordinal> nus() const;
    std::vector<Ordinal> partial_sums() const;
    // Extends the prefix until the position is covered.
    void ensure_covers(const Ordinal& position) const;

    nlohmann::json to_json() const;
    static Chain from_json(const nlohmann::json& j);
    bool operator==(const Chain& o) const;

private:
    friend Chain build_chain(const Ordinal&, ChainStrategy);
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

Chain build_chain(const Ordinal& mu, ChainStrategy strategy);

// Deterministic position sample below mu (ascending, distinct).
std::vector<Ordinal> sample_positions(const Ordinal& mu, std::size_t count);

} // namespace ordchain
