#pragma once

// Borel codes as finite symbolic trees. Every node denotes the complement
// of the union of its children's denotations; a leaf denotes R minus a
// finite set of open rational intervals. Family nodes stand for countable
// unions indexed by one of three decidable families (rationals below a
// bound, ordinals below a notation, constrained rational triples); each
// family node carries a decision procedure tag that makes the evaluator
// total on symbolic-real inputs. Trees are well-founded: rank strictly
// decreases from a node to each (materialized) child.
//
// Multicodes are rational-indexed systems of codes given by a closed-form
// constructor plus a cache of materialized sections; they denote subsets
// of R x Q section by section.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ordchain/ordinal.hpp"
#include "ordchain/rational.hpp"
#include "ordchain/sieve.hpp"
#include "ordchain/symbolic_real.hpp"

namespace ordchain {

// Rational-valued expression with family-index placeholders (de Bruijn:
// idx 0 is the innermost enclosing family).
class RExpr {
public:
    enum class Kind { Lit, Idx, AlignDown, AlignDownPlus };

    static RExpr lit(Rat r);
    static RExpr idx(std::size_t level);
    static RExpr align_down(RExpr base, std::uint64_t pos);
    static RExpr align_down_plus(RExpr base, std::uint64_t pos);

    Kind kind() const { return kind_; }
    // Evaluate a closed expression; Idx throws InvalidCodeError.
    Rat evaluate() const;
    // Substitute `value` for idx level `depth`, shifting deeper indices down.
    RExpr substituted(const Rat& value, std::size_t depth) const;

    nlohmann::json to_json() const;
    static RExpr from_json(const nlohmann::json& j);

private:
    Kind kind_ = Kind::Lit;
    Rat lit_;
    std::size_t idx_ = 0;
    std::shared_ptr<const RExpr> base_;
    std::uint64_t pos_ = 0;
};

enum class FamilyKindTag { RationalsBelow, OrdinalsBelow, RationalTriples };

// Decision procedures attached to family nodes; each decides membership in
// the union over the family, totally, for symbolic-real inputs.
enum class DecideTag {
    Ray,               // union of left-complement leaves: a half-open interval
    DigitCell,         // union of dyadic digit cells: one binary digit test
    SieveRange,        // union of sieve sections over an interval of indices
    PredStep,          // successor step: immediate predecessor + gap check
    LevelsGe,          // limit step, part one: segment type reaches the bound
    SieveClassifiedLe, // limit step, part two: everything below is classified
    UsecBelow,         // no section of the given level occurs below the bound
    UsecAt,            // no section of a smaller level occurs at a coordinate
    Proj,              // projection: some section contains the point
    Triples            // shifted-section assembly over constrained triples
};

class BorelMultiCode;

class BorelCode {
public:
    struct FamilyParams {
        FamilyKindTag kind = FamilyKindTag::RationalsBelow;
        DecideTag decide = DecideTag::Ray;
        std::optional<RExpr> bound;          // rationals-below upper bound; absent = all of Q
        std::optional<RExpr> strictly_above; // optional lower guard
        std::optional<Ordinal> obound;       // ordinals-below bound / level parameter
        std::uint64_t pos = 0;               // digit position (DigitCell)
        std::optional<Rat> at;               // section coordinate parameter
    };

    enum class GenTag { None, GSection, USection, PredChild, LevelMiss, ClassChild, TripleChild };

    static BorelCode leaf(std::vector<std::pair<RExpr, RExpr>> intervals);
    static BorelCode union_of(std::vector<BorelCode> children);
    static BorelCode family(FamilyParams params, BorelCode structural_child);
    static BorelCode family_generated(FamilyParams params, GenTag gen, Ordinal gen_level,
                                      std::shared_ptr<const BorelMultiCode> gen_base = nullptr);

    // R minus nothing / minus everything.
    static BorelCode full_line();
    static BorelCode empty_set();
    static BorelCode complement(const BorelCode& c);
    static BorelCode intersection(std::vector<BorelCode> parts);

    bool is_leaf() const;
    bool is_union() const;
    bool is_family() const;
    const std::vector<std::pair<RExpr, RExpr>>& intervals() const;
    const std::vector<BorelCode>& children() const;
    const FamilyParams& params() const;
    GenTag gen_tag() const;
    const Ordinal& gen_level() const;
    std::shared_ptr<const BorelMultiCode> triple_base() const;

    // Child materialization for family nodes (audit and recursion).
    BorelCode materialize_rational(const Rat& index) const;
    BorelCode materialize_ordinal(const Ordinal& index) const;

    // Replace family nodes by finite unions of sampled children, to the
    // given depth. Audit view only: denotations shrink to the samples.
    BorelCode unfold(std::size_t depth, std::size_t breadth) const;

    nlohmann::json to_json() const;
    static BorelCode from_json(const nlohmann::json& j);

    bool operator==(const BorelCode& o) const;

private:
    struct Node;
    std::shared_ptr<const Node> node_;
};

// True iff the real encoded by x belongs to the denoted set.
bool eval_code(const BorelCode& code, const SymbolicReal& x);
bool eval_code(const BorelCode& code, const BinaryExpansion& x);

// Well-foundedness witness: 0 on leaves, a strict upper bound of child
// ranks plus one elsewhere (computed symbolically for generated families).
Ordinal rank(const BorelCode& code);

// Section builders of the effective construction.
BorelCode g_section_code(const Rat& r);
BorelCode u_section_code(const Ordinal& xi, const Rat& r);
BorelCode d_code(const Ordinal& xi);
BorelCode e_code(const Ordinal& xi);  // members of D_xi not in D_{xi+1}

class BorelMultiCode {
public:
    static BorelMultiCode g();
    static BorelMultiCode u(const Ordinal& xi);
    // Sections intersected with D_cut.
    static BorelMultiCode restricted(const BorelMultiCode& base, const Ordinal& cut);
    // Vertical shift of `q_base` into the band between levels xi and xi+1.
    static BorelMultiCode shifted(const BorelMultiCode& q_base, const Ordinal& xi);

    BorelCode section(const Rat& r) const;
    bool eval(const SymbolicReal& x, const Rat& r) const;
    bool eval(const BinaryExpansion& x, const Rat& r) const;

    nlohmann::json to_json() const;
    static BorelMultiCode from_json(const nlohmann::json& j);
    bool operator==(const BorelMultiCode& o) const;

    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

bool eval_multicode(const BorelMultiCode& mc, const SymbolicReal& x, const Rat& r);

// Canonical byte-deterministic serialization.
std::string serialize(const BorelCode& code);
std::string serialize(const BorelMultiCode& mc);
BorelCode deserialize_code(const std::string& bytes);
BorelMultiCode deserialize_multicode(const std::string& bytes);

} // namespace ordchain
