#include "ordchain/borel_code.hpp"

#include <map>
#include <mutex>

#include "ordchain/errors.hpp"
#include "ordchain/hmap.hpp"
#include "ordchain/qindex.hpp"

namespace ordchain {

namespace {
constexpr int kEvalDepthCap = 4096;
constexpr std::uint64_t kFiniteSupCap = 5000;

Rat align_down(const Rat& q, std::uint64_t pos) {
    // largest multiple of 2^(1-pos) that is <= q
    if (pos > (1u << 20))
        throw ResourceLimitError("grid alignment at a digit position beyond desk scale");
    BigInt scale = BigInt(1).shifted_left(pos - 1);
    Rat t = q * Rat(scale, BigInt(1));
    return Rat(t.floor(), scale);
}

Rat cell_width(std::uint64_t pos) { return Rat(BigInt(1), BigInt(1).shifted_left(pos)); }
} // namespace

// ---------------------------------------------------------------------------
// RExpr
// ---------------------------------------------------------------------------

RExpr RExpr::lit(Rat r) {
    RExpr e;
    e.kind_ = Kind::Lit;
    e.lit_ = std::move(r);
    return e;
}

RExpr RExpr::idx(std::size_t level) {
    RExpr e;
    e.kind_ = Kind::Idx;
    e.idx_ = level;
    return e;
}

RExpr RExpr::align_down(RExpr base, std::uint64_t pos) {
    RExpr e;
    e.kind_ = Kind::AlignDown;
    e.base_ = std::make_shared<RExpr>(std::move(base));
    e.pos_ = pos;
    return e;
}

RExpr RExpr::align_down_plus(RExpr base, std::uint64_t pos) {
    RExpr e;
    e.kind_ = Kind::AlignDownPlus;
    e.base_ = std::make_shared<RExpr>(std::move(base));
    e.pos_ = pos;
    return e;
}

Rat RExpr::evaluate() const {
    switch (kind_) {
        case Kind::Lit: return lit_;
        case Kind::Idx: throw InvalidCodeError("unbound family index in code expression");
        case Kind::AlignDown: return ordchain::align_down(base_->evaluate(), pos_);
        case Kind::AlignDownPlus:
            return ordchain::align_down(base_->evaluate(), pos_) + cell_width(pos_);
    }
    throw InvalidCodeError("corrupt code expression");
}

RExpr RExpr::substituted(const Rat& value, std::size_t depth) const {
    switch (kind_) {
        case Kind::Lit: return *this;
        case Kind::Idx:
            if (idx_ == depth) return lit(value);
            if (idx_ > depth) return idx(idx_ - 1);
            return *this;
        case Kind::AlignDown: return align_down(base_->substituted(value, depth), pos_);
        case Kind::AlignDownPlus: return align_down_plus(base_->substituted(value, depth), pos_);
    }
    throw InvalidCodeError("corrupt code expression");
}

nlohmann::json RExpr::to_json() const {
    switch (kind_) {
        case Kind::Lit: return {{"lit", lit_.to_string()}};
        case Kind::Idx: return {{"idx", idx_}};
        case Kind::AlignDown: return {{"align", {base_->to_json(), pos_}}};
        case Kind::AlignDownPlus: return {{"align1", {base_->to_json(), pos_}}};
    }
    throw InvalidCodeError("corrupt code expression");
}

RExpr RExpr::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("code expression must be an object: " + j.dump());
    if (j.contains("lit")) return lit(Rat::from_string(j["lit"].get<std::string>()));
    if (j.contains("idx")) return idx(j["idx"].get<std::size_t>());
    if (j.contains("align"))
        return align_down(from_json(j["align"][0]), j["align"][1].get<std::uint64_t>());
    if (j.contains("align1"))
        return align_down_plus(from_json(j["align1"][0]), j["align1"][1].get<std::uint64_t>());
    throw ParseError("unknown code expression: " + j.dump());
}

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

struct BorelCode::Node {
    enum class Tag { Leaf, Union, Family } tag = Tag::Leaf;
    std::vector<std::pair<RExpr, RExpr>> intervals;
    std::vector<BorelCode> children;
    FamilyParams params;
    GenTag gen = GenTag::None;
    Ordinal gen_level;
    std::shared_ptr<const BorelMultiCode> gen_base;
    std::optional<BorelCode> structural;  // template child
};

BorelCode BorelCode::leaf(std::vector<std::pair<RExpr, RExpr>> intervals) {
    auto n = std::make_shared<Node>();
    n->tag = Node::Tag::Leaf;
    n->intervals = std::move(intervals);
    BorelCode c;
    c.node_ = std::move(n);
    return c;
}

BorelCode BorelCode::union_of(std::vector<BorelCode> children) {
    auto n = std::make_shared<Node>();
    n->tag = Node::Tag::Union;
    n->children = std::move(children);
    BorelCode c;
    c.node_ = std::move(n);
    return c;
}

BorelCode BorelCode::family(FamilyParams params, BorelCode structural_child) {
    auto n = std::make_shared<Node>();
    n->tag = Node::Tag::Family;
    n->params = std::move(params);
    n->structural = std::move(structural_child);
    BorelCode c;
    c.node_ = std::move(n);
    return c;
}

BorelCode BorelCode::family_generated(FamilyParams params, GenTag gen, Ordinal gen_level,
                                      std::shared_ptr<const BorelMultiCode> gen_base) {
    auto n = std::make_shared<Node>();
    n->tag = Node::Tag::Family;
    n->params = std::move(params);
    n->gen = gen;
    n->gen_level = std::move(gen_level);
    n->gen_base = std::move(gen_base);
    BorelCode c;
    c.node_ = std::move(n);
    return c;
}

BorelCode BorelCode::full_line() { return leaf({}); }
BorelCode BorelCode::empty_set() { return union_of({full_line()}); }
BorelCode BorelCode::complement(const BorelCode& c) { return union_of({c}); }

BorelCode BorelCode::intersection(std::vector<BorelCode> parts) {
    std::vector<BorelCode> complements;
    complements.reserve(parts.size());
    for (auto& p : parts) complements.push_back(complement(p));
    return union_of(std::move(complements));
}

bool BorelCode::is_leaf() const { return node_->tag == Node::Tag::Leaf; }
bool BorelCode::is_union() const { return node_->tag == Node::Tag::Union; }
bool BorelCode::is_family() const { return node_->tag == Node::Tag::Family; }

const std::vector<std::pair<RExpr, RExpr>>& BorelCode::intervals() const {
    return node_->intervals;
}
const std::vector<BorelCode>& BorelCode::children() const { return node_->children; }
const BorelCode::FamilyParams& BorelCode::params() const { return node_->params; }
BorelCode::GenTag BorelCode::gen_tag() const { return node_->gen; }
const Ordinal& BorelCode::gen_level() const { return node_->gen_level; }
std::shared_ptr<const BorelMultiCode> BorelCode::triple_base() const { return node_->gen_base; }

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

namespace {

// Section trees are rebuilt constantly during family decisions; they are
// immutable, so share them process-wide.
struct SectionCache {
    std::mutex mu;
    std::map<std::string, BorelCode> g;
    std::map<std::string, BorelCode> u;
};

SectionCache& section_cache() {
    static SectionCache c;
    return c;
}

} // namespace

BorelCode g_section_code(const Rat& r) {
    {
        std::lock_guard<std::mutex> g(section_cache().mu);
        auto it = section_cache().g.find(r.to_string());
        if (it != section_cache().g.end()) return it->second;
    }
    std::uint64_t pos = 2 * index_of(r) + 1;
    // cell(q') = [align(q'), align(q') + 2^-pos), one cell per grid point
    BorelCode ray_leaf = BorelCode::leaf(
        {{RExpr::idx(0), RExpr::align_down_plus(RExpr::idx(1), pos)}});
    BorelCode::FamilyParams ray;
    ray.kind = FamilyKindTag::RationalsBelow;
    ray.decide = DecideTag::Ray;
    ray.bound = RExpr::align_down(RExpr::idx(0), pos);
    BorelCode cell = BorelCode::family(ray, ray_leaf);

    BorelCode::FamilyParams grid;
    grid.kind = FamilyKindTag::RationalsBelow;
    grid.decide = DecideTag::DigitCell;
    grid.pos = pos;
    BorelCode cells = BorelCode::family(grid, cell);
    BorelCode result = BorelCode::complement(cells);
    std::lock_guard<std::mutex> g(section_cache().mu);
    section_cache().g.emplace(r.to_string(), result);
    return result;
}

namespace {

BorelCode sieve_range_node(const std::optional<Rat>& above, const Rat& bound) {
    BorelCode::FamilyParams p;
    p.kind = FamilyKindTag::RationalsBelow;
    p.decide = DecideTag::SieveRange;
    p.bound = RExpr::lit(bound);
    if (above) p.strictly_above = RExpr::lit(*above);
    return BorelCode::family_generated(p, BorelCode::GenTag::GSection, Ordinal());
}

BorelCode usec_below_node(const Ordinal& eta, const Rat& r) {
    BorelCode::FamilyParams p;
    p.kind = FamilyKindTag::RationalsBelow;
    p.decide = DecideTag::UsecBelow;
    p.bound = RExpr::lit(r);
    p.obound = eta;
    return BorelCode::family_generated(p, BorelCode::GenTag::USection, eta);
}

BorelCode usec_at_node(const Ordinal& xi, const Rat& q) {
    BorelCode::FamilyParams p;
    p.kind = FamilyKindTag::OrdinalsBelow;
    p.decide = DecideTag::UsecAt;
    p.obound = xi;
    p.at = q;
    return BorelCode::family_generated(p, BorelCode::GenTag::USection, xi);
}

} // namespace

BorelCode u_section_code(const Ordinal& xi, const Rat& r) {
    std::string key = xi.to_string() + "@" + r.to_string();
    {
        std::lock_guard<std::mutex> g(section_cache().mu);
        auto it = section_cache().u.find(key);
        if (it != section_cache().u.end()) return it->second;
    }
    BorelCode result = [&]() {
        if (xi.is_zero()) {
            return BorelCode::intersection({g_section_code(r), sieve_range_node(std::nullopt, r)});
        }
        if (xi.is_successor()) {
            BorelCode::FamilyParams p;
            p.kind = FamilyKindTag::RationalsBelow;
            p.decide = DecideTag::PredStep;
            p.bound = RExpr::lit(r);
            p.obound = xi.predecessor();
            p.at = r;
            BorelCode fam =
                BorelCode::family_generated(p, BorelCode::GenTag::PredChild, xi.predecessor());
            return BorelCode::intersection({g_section_code(r), BorelCode::complement(fam)});
        }
        // limit stage
        BorelCode::FamilyParams a;
        a.kind = FamilyKindTag::OrdinalsBelow;
        a.decide = DecideTag::LevelsGe;
        a.obound = xi;
        a.at = r;
        BorelCode fam_a = BorelCode::family_generated(a, BorelCode::GenTag::LevelMiss, xi);

        BorelCode::FamilyParams b;
        b.kind = FamilyKindTag::RationalsBelow;
        b.decide = DecideTag::SieveClassifiedLe;
        b.bound = RExpr::lit(r);
        b.obound = xi;
        b.at = r;
        BorelCode fam_b = BorelCode::family_generated(b, BorelCode::GenTag::ClassChild, xi);

        return BorelCode::intersection({g_section_code(r), fam_a, fam_b});
    }();
    std::lock_guard<std::mutex> g(section_cache().mu);
    section_cache().u.emplace(std::move(key), result);
    return result;
}

BorelCode d_code(const Ordinal& xi) {
    BorelCode::FamilyParams p;
    p.kind = FamilyKindTag::RationalsBelow;  // unbounded: all of Q
    p.decide = DecideTag::Proj;
    p.obound = xi;
    BorelCode fam = BorelCode::family_generated(p, BorelCode::GenTag::USection, xi);
    return BorelCode::complement(fam);
}

BorelCode e_code(const Ordinal& xi) {
    return BorelCode::intersection({d_code(xi), BorelCode::complement(d_code(xi.successor()))});
}

namespace {

BorelCode shift_section_code(const Ordinal& xi, const Rat& r,
                             const std::shared_ptr<const BorelMultiCode>& q_base) {
    BorelCode::FamilyParams p;
    p.kind = FamilyKindTag::RationalTriples;
    p.decide = DecideTag::Triples;
    p.obound = xi;
    p.at = r;
    BorelCode fam = BorelCode::family_generated(p, BorelCode::GenTag::TripleChild, xi, q_base);
    return BorelCode::complement(fam);
}

} // namespace

// ---------------------------------------------------------------------------
// Child materialization
// ---------------------------------------------------------------------------

BorelCode BorelCode::materialize_rational(const Rat& index) const {
    const Node& n = *node_;
    if (n.tag != Node::Tag::Family) throw InvalidCodeError("materialize on a non-family node");
    switch (n.gen) {
        case GenTag::None: {
            // structural template: substitute the index
            const BorelCode& t = *n.structural;
            // walk and substitute at depth 0
            struct Subst {
                static BorelCode apply(const BorelCode& c, const Rat& v, std::size_t depth) {
                    const Node& nn = *c.node_;
                    if (nn.tag == Node::Tag::Leaf) {
                        std::vector<std::pair<RExpr, RExpr>> iv;
                        for (const auto& [a, b] : nn.intervals)
                            iv.push_back({a.substituted(v, depth), b.substituted(v, depth)});
                        return BorelCode::leaf(std::move(iv));
                    }
                    if (nn.tag == Node::Tag::Union) {
                        std::vector<BorelCode> ch;
                        for (const auto& c2 : nn.children) ch.push_back(apply(c2, v, depth));
                        return BorelCode::union_of(std::move(ch));
                    }
                    FamilyParams p = nn.params;
                    if (p.bound) p.bound = p.bound->substituted(v, depth);
                    if (p.strictly_above) p.strictly_above = p.strictly_above->substituted(v, depth);
                    if (nn.gen != GenTag::None)
                        return BorelCode::family_generated(p, nn.gen, nn.gen_level, nn.gen_base);
                    return BorelCode::family(p, apply(*nn.structural, v, depth + 1));
                }
            };
            return Subst::apply(t, index, 0);
        }
        case GenTag::GSection: return g_section_code(index);
        case GenTag::USection: return u_section_code(n.gen_level, index);
        case GenTag::PredChild: {
            if (!n.params.at) throw InvalidCodeError("pred-step family lacks its coordinate");
            return intersection({u_section_code(n.gen_level, index),
                                 sieve_range_node(index, *n.params.at)});
        }
        case GenTag::ClassChild: {
            if (!n.params.obound) throw InvalidCodeError("classified family lacks its level");
            return intersection({g_section_code(index), usec_at_node(*n.params.obound, index)});
        }
        default: throw InvalidCodeError("family is not indexed by rationals");
    }
}

BorelCode BorelCode::materialize_ordinal(const Ordinal& index) const {
    const Node& n = *node_;
    if (n.tag != Node::Tag::Family) throw InvalidCodeError("materialize on a non-family node");
    switch (n.gen) {
        case GenTag::LevelMiss: {
            if (!n.params.at) throw InvalidCodeError("levels family lacks its coordinate");
            return usec_below_node(index, *n.params.at);
        }
        case GenTag::USection: {
            if (!n.params.at) throw InvalidCodeError("section family lacks its coordinate");
            return u_section_code(index, *n.params.at);
        }
        default: throw InvalidCodeError("family is not indexed by ordinals");
    }
}

namespace {

// Sample child of a triples family, for audit unfolding.
BorelCode materialize_triple_sample(const BorelCode& fam);

} // namespace

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

struct EvalCtx {
    const SymbolicReal* z = nullptr;
    const BinaryExpansion* x = nullptr;
    int depth = 0;
};

bool eval_node(const BorelCode& code, EvalCtx& ctx);

const SymbolicReal& need_set(const EvalCtx& ctx) {
    if (!ctx.z)
        throw InvalidCodeError("family decision needs a set-backed real");
    return *ctx.z;
}

bool decide_family(const BorelCode& code, EvalCtx& ctx) {
    const auto& p = code.params();
    switch (p.decide) {
        case DecideTag::Ray: {
            if (!p.bound) throw InvalidCodeError("ray family lacks a bound");
            // the node denotes [a, b): the union exists-test is its complement
            Rat a = p.bound->evaluate();
            const BorelCode* child = nullptr;
            BorelCode tmp = BorelCode::full_line();
            if (code.gen_tag() != BorelCode::GenTag::None)
                throw InvalidCodeError("ray family must have a structural leaf child");
            tmp = code.materialize_rational(a);  // any index: endpoint b is index-free
            child = &tmp;
            if (!child->is_leaf() || child->intervals().size() != 1)
                throw InvalidCodeError("ray family child must be a single-interval leaf");
            Rat b = child->intervals()[0].second.evaluate();
            return ctx.x->compare(a) < 0 || ctx.x->compare(b) >= 0;
        }
        case DecideTag::DigitCell: {
            if (p.pos == 0) throw InvalidCodeError("digit family lacks a position");
            return ctx.x->digit(p.pos) == 0;
        }
        case DecideTag::SieveRange: {
            if (!p.bound) throw InvalidCodeError("sieve family lacks a bound");
            const SymbolicReal& z = need_set(ctx);
            Rat hi = p.bound->evaluate();
            if (p.strictly_above) return z.intersects(p.strictly_above->evaluate(), hi);
            return z.has_element_below(hi);
        }
        case DecideTag::PredStep: {
            if (!p.at || !p.obound) throw InvalidCodeError("pred-step family lacks parameters");
            const SymbolicReal& z = need_set(ctx);
            SideQuery m = z.max_below(*p.at);
            if (m.kind != SideQuery::Element) return false;
            BorelCode child = code.materialize_rational(m.value);
            return eval_node(child, ctx);
        }
        case DecideTag::LevelsGe: {
            if (!p.at || !p.obound) throw InvalidCodeError("levels family lacks parameters");
            const SymbolicReal& z = need_set(ctx);
            Ordinal tau = z.initial_segment_below(*p.at).order_type();
            return tau < *p.obound;  // some level below the bound is missed
        }
        case DecideTag::SieveClassifiedLe: {
            if (!p.at || !p.obound) throw InvalidCodeError("classified family lacks parameters");
            const SymbolicReal& z = need_set(ctx);
            if (!z.well_ordered_below(*p.at)) return true;
            Ordinal tau = z.initial_segment_below(*p.at).order_type();
            return tau > *p.obound;
        }
        case DecideTag::UsecBelow: {
            if (!p.bound || !p.obound) throw InvalidCodeError("section family lacks parameters");
            const SymbolicReal& z = need_set(ctx);
            Ordinal tau = z.initial_segment_below(p.bound->evaluate()).order_type();
            return tau > *p.obound;
        }
        case DecideTag::UsecAt: {
            if (!p.at || !p.obound) throw InvalidCodeError("section family lacks parameters");
            const SymbolicReal& z = need_set(ctx);
            const Rat& q = *p.at;
            if (!z.contains(q) || !z.well_ordered_below(q)) return false;
            Ordinal tau = z.initial_segment_below(q).order_type();
            return tau < *p.obound;
        }
        case DecideTag::Proj: {
            if (!p.obound) throw InvalidCodeError("projection family lacks its level");
            const SymbolicReal& z = need_set(ctx);
            return z.initial_segment().order_type() > *p.obound;
        }
        case DecideTag::Triples: {
            if (!p.at || !p.obound) throw InvalidCodeError("triples family lacks parameters");
            const SymbolicReal& z = need_set(ctx);
            const Ordinal& xi = *p.obound;
            auto rep = z.initial_segment();
            if (!(rep.order_type() > xi.successor())) return false;
            Rat u = *rep.element_at(xi);
            Rat v = *rep.element_at(xi.successor());
            if (!(u < *p.at && *p.at < v)) return false;
            Rat w = h_map(u, v, *p.at);
            auto base = code.triple_base();
            if (!base) throw InvalidCodeError("triples family lacks its base multicode");
            if (!eval_node(u_section_code(xi, u), ctx)) return false;
            if (!eval_node(u_section_code(xi.successor(), v), ctx)) return false;
            return eval_node(base->section(w), ctx);
        }
    }
    throw InvalidCodeError("unknown family decision");
}

bool eval_node(const BorelCode& code, EvalCtx& ctx) {
    if (++ctx.depth > kEvalDepthCap)
        throw InvalidCodeError("evaluation exceeded the recursion budget");
    struct DepthGuard {
        EvalCtx& c;
        ~DepthGuard() { --c.depth; }
    } guard{ctx};
    if (code.is_leaf()) {
        for (const auto& [pe, qe] : code.intervals()) {
            Rat pv = pe.evaluate();
            Rat qv = qe.evaluate();
            if (!(pv < qv)) continue;  // empty interval
            if (ctx.x->compare(pv) > 0 && ctx.x->compare(qv) < 0) return false;
        }
        return true;
    }
    if (code.is_union()) {
        for (const auto& c : code.children())
            if (eval_node(c, ctx)) return false;
        return true;
    }
    return !decide_family(code, ctx);
}

} // namespace

bool eval_code(const BorelCode& code, const SymbolicReal& x) {
    BinaryExpansion enc = encode_real(x);
    EvalCtx ctx{&x, &enc, 0};
    return eval_node(code, ctx);
}

bool eval_code(const BorelCode& code, const BinaryExpansion& x) {
    EvalCtx ctx{x.source_set(), &x, 0};
    return eval_node(code, ctx);
}

// ---------------------------------------------------------------------------
// Rank
// ---------------------------------------------------------------------------

namespace {

struct RankCache {
    std::mutex mu;
    std::map<std::string, Ordinal> u_rank;
    std::optional<Ordinal> g_rank;
};

RankCache& rank_cache() {
    static RankCache c;
    return c;
}

Ordinal rank_of(const BorelCode& code);

Ordinal u_rank(const Ordinal& xi) {
    {
        std::lock_guard<std::mutex> g(rank_cache().mu);
        auto it = rank_cache().u_rank.find(xi.to_string());
        if (it != rank_cache().u_rank.end()) return it->second;
    }
    Ordinal r = rank_of(u_section_code(xi, Rat(0)));
    std::lock_guard<std::mutex> g(rank_cache().mu);
    rank_cache().u_rank.emplace(xi.to_string(), r);
    return r;
}

Ordinal g_rank() {
    {
        std::lock_guard<std::mutex> g(rank_cache().mu);
        if (rank_cache().g_rank) return *rank_cache().g_rank;
    }
    Ordinal r = rank_of(g_section_code(Rat(0)));
    std::lock_guard<std::mutex> g(rank_cache().mu);
    rank_cache().g_rank = r;
    return r;
}

// sup over {fn(eta) : eta < bound}, exact under the standing invariant that
// fn(eta) = eta + (finite), which holds for section ranks.
Ordinal sup_below(const Ordinal& bound, const std::function<Ordinal(const Ordinal&)>& fn) {
    if (bound.is_zero()) return Ordinal();
    if (bound.is_finite()) {
        std::uint64_t n = bound.finite_value();
        if (n > kFiniteSupCap) throw ResourceLimitError("rank sup over a huge finite bound");
        Ordinal best;
        for (std::uint64_t k = 0; k < n; ++k) {
            Ordinal v = fn(Ordinal::from_int(k));
            if (v > best) best = v;
        }
        return best;
    }
    auto [limit_part, tail] = bound.split_limit_finite();
    Ordinal best = limit_part;
    for (std::uint64_t k = 0; k < tail; ++k) {
        Ordinal v = fn(Ordinal::add(limit_part, Ordinal::from_int(k)));
        if (v > best) best = v;
    }
    return best;
}

Ordinal family_child_sup(const BorelCode& code) {
    const auto& p = code.params();
    switch (code.gen_tag()) {
        case BorelCode::GenTag::None: {
            // structure is index-independent
            return rank_of(code.materialize_rational(Rat(0)));
        }
        case BorelCode::GenTag::GSection: return g_rank();
        case BorelCode::GenTag::USection:
            if (p.kind == FamilyKindTag::OrdinalsBelow) {
                if (!p.obound) throw InvalidCodeError("ordinal family lacks a bound");
                return sup_below(*p.obound, [](const Ordinal& e) { return u_rank(e); });
            }
            return u_rank(code.gen_level());
        case BorelCode::GenTag::PredChild:
            return rank_of(code.materialize_rational(Rat(0)));
        case BorelCode::GenTag::LevelMiss: {
            if (!p.obound) throw InvalidCodeError("levels family lacks a bound");
            return sup_below(*p.obound, [](const Ordinal& e) {
                return Ordinal::add(u_rank(e), Ordinal::from_int(1));
            });
        }
        case BorelCode::GenTag::ClassChild:
            return rank_of(code.materialize_rational(Rat(0)));
        case BorelCode::GenTag::TripleChild:
            return rank_of(materialize_triple_sample(code));
    }
    throw InvalidCodeError("unknown family generator");
}

Ordinal rank_of(const BorelCode& code) {
    if (code.is_leaf()) return Ordinal();
    if (code.is_union()) {
        Ordinal best;
        for (const auto& c : code.children()) {
            Ordinal r = rank_of(c);
            if (r > best) best = r;
        }
        return best.successor();
    }
    return family_child_sup(code).successor();
}

} // namespace

Ordinal rank(const BorelCode& code) { return rank_of(code); }

// ---------------------------------------------------------------------------
// Unfold (audit view)
// ---------------------------------------------------------------------------

BorelCode BorelCode::unfold(std::size_t depth, std::size_t breadth) const {
    if (depth == 0) return *this;
    if (is_leaf()) return *this;
    if (is_union()) {
        std::vector<BorelCode> ch;
        for (const auto& c : children()) ch.push_back(c.unfold(depth - 1, breadth));
        return union_of(std::move(ch));
    }
    const auto& p = params();
    std::vector<BorelCode> ch;
    if (p.kind == FamilyKindTag::OrdinalsBelow) {
        if (!p.obound) throw InvalidCodeError("ordinal family lacks a bound");
        if (!p.obound->is_zero()) {
            auto pre = enumerate_below(*p.obound, breadth);
            for (const auto& e : pre.values)
                ch.push_back(materialize_ordinal(e).unfold(depth - 1, breadth));
        }
    } else if (p.kind == FamilyKindTag::RationalTriples) {
        ch.push_back(materialize_triple_sample(*this).unfold(depth - 1, breadth));
    } else {
        std::vector<Rat> samples;
        if (p.bound) {
            Rat b = p.bound->evaluate();
            if (p.strictly_above) {
                Rat a = p.strictly_above->evaluate();
                Rat step = (b - a) / Rat(2);
                Rat cur = a + step;
                for (std::size_t i = 0; i < breadth; ++i) {
                    samples.push_back(cur);
                    step = step / Rat(2);
                    cur = cur + step;
                }
            } else {
                for (std::size_t i = 0; i < breadth; ++i)
                    samples.push_back(b - Rat(1) - Rat(static_cast<std::int64_t>(i)));
            }
        } else {
            for (std::size_t i = 0; i < breadth; ++i) {
                std::int64_t v = static_cast<std::int64_t>((i + 1) / 2);
                samples.push_back(Rat(i % 2 == 0 ? v : -v));
            }
        }
        for (const auto& s : samples) ch.push_back(materialize_rational(s).unfold(depth - 1, breadth));
    }
    return union_of(std::move(ch));
}

// ---------------------------------------------------------------------------
// Multicode
// ---------------------------------------------------------------------------

struct BorelMultiCode::Impl {
    enum class Ctor { G, U, Restrict, Shift } ctor = Ctor::G;
    Ordinal xi;    // U level / shift band
    Ordinal cut;   // restriction level
    std::shared_ptr<const Impl> base;

    mutable std::mutex mu;
    mutable std::map<std::string, BorelCode> cache;
};

namespace {
BorelMultiCode wrap(std::shared_ptr<const BorelMultiCode::Impl> impl) {
    BorelMultiCode mc;
    mc.impl_ = std::move(impl);
    return mc;
}
} // namespace

BorelMultiCode BorelMultiCode::g() {
    auto impl = std::make_shared<Impl>();
    impl->ctor = Impl::Ctor::G;
    return wrap(impl);
}

BorelMultiCode BorelMultiCode::u(const Ordinal& xi) {
    auto impl = std::make_shared<Impl>();
    impl->ctor = Impl::Ctor::U;
    impl->xi = xi;
    return wrap(impl);
}

BorelMultiCode BorelMultiCode::restricted(const BorelMultiCode& base, const Ordinal& cut) {
    auto impl = std::make_shared<Impl>();
    impl->ctor = Impl::Ctor::Restrict;
    impl->cut = cut;
    impl->base = base.impl_;
    return wrap(impl);
}

BorelMultiCode BorelMultiCode::shifted(const BorelMultiCode& q_base, const Ordinal& xi) {
    auto impl = std::make_shared<Impl>();
    impl->ctor = Impl::Ctor::Shift;
    impl->xi = xi;
    impl->base = q_base.impl_;
    return wrap(impl);
}

BorelCode BorelMultiCode::section(const Rat& r) const {
    std::string key = r.to_string();
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        auto it = impl_->cache.find(key);
        if (it != impl_->cache.end()) return it->second;
    }
    BorelCode sec = BorelCode::full_line();
    switch (impl_->ctor) {
        case Impl::Ctor::G: sec = g_section_code(r); break;
        case Impl::Ctor::U: sec = u_section_code(impl_->xi, r); break;
        case Impl::Ctor::Restrict:
            sec = BorelCode::intersection({wrap(impl_->base).section(r), d_code(impl_->cut)});
            break;
        case Impl::Ctor::Shift: {
            auto qmc = std::make_shared<const BorelMultiCode>(wrap(impl_->base));
            sec = shift_section_code(impl_->xi, r, qmc);
            break;
        }
    }
    std::lock_guard<std::mutex> g(impl_->mu);
    impl_->cache.emplace(std::move(key), sec);
    return sec;
}

bool BorelMultiCode::eval(const SymbolicReal& x, const Rat& r) const {
    return eval_code(section(r), x);
}

bool BorelMultiCode::eval(const BinaryExpansion& x, const Rat& r) const {
    return eval_code(section(r), x);
}

bool eval_multicode(const BorelMultiCode& mc, const SymbolicReal& x, const Rat& r) {
    return mc.eval(x, r);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

const char* kind_str(FamilyKindTag k) {
    switch (k) {
        case FamilyKindTag::RationalsBelow: return "rationals-below";
        case FamilyKindTag::OrdinalsBelow: return "ordinals-below";
        case FamilyKindTag::RationalTriples: return "rational-triples";
    }
    return "?";
}

FamilyKindTag kind_from(const std::string& s) {
    if (s == "rationals-below") return FamilyKindTag::RationalsBelow;
    if (s == "ordinals-below") return FamilyKindTag::OrdinalsBelow;
    if (s == "rational-triples") return FamilyKindTag::RationalTriples;
    throw ParseError("unknown family kind: " + s);
}

const char* decide_str(DecideTag d) {
    switch (d) {
        case DecideTag::Ray: return "ray";
        case DecideTag::DigitCell: return "digit-cell";
        case DecideTag::SieveRange: return "sieve-range";
        case DecideTag::PredStep: return "pred-step";
        case DecideTag::LevelsGe: return "levels-ge";
        case DecideTag::SieveClassifiedLe: return "sieve-classified-le";
        case DecideTag::UsecBelow: return "usec-below";
        case DecideTag::UsecAt: return "usec-at";
        case DecideTag::Proj: return "proj";
        case DecideTag::Triples: return "triples";
    }
    return "?";
}

DecideTag decide_from(const std::string& s) {
    if (s == "ray") return DecideTag::Ray;
    if (s == "digit-cell") return DecideTag::DigitCell;
    if (s == "sieve-range") return DecideTag::SieveRange;
    if (s == "pred-step") return DecideTag::PredStep;
    if (s == "levels-ge") return DecideTag::LevelsGe;
    if (s == "sieve-classified-le") return DecideTag::SieveClassifiedLe;
    if (s == "usec-below") return DecideTag::UsecBelow;
    if (s == "usec-at") return DecideTag::UsecAt;
    if (s == "proj") return DecideTag::Proj;
    if (s == "triples") return DecideTag::Triples;
    throw ParseError("unknown decide tag: " + s);
}

const char* gen_str(BorelCode::GenTag g) {
    switch (g) {
        case BorelCode::GenTag::None: return "none";
        case BorelCode::GenTag::GSection: return "g-section";
        case BorelCode::GenTag::USection: return "u-section";
        case BorelCode::GenTag::PredChild: return "pred-child";
        case BorelCode::GenTag::LevelMiss: return "level-miss";
        case BorelCode::GenTag::ClassChild: return "class-child";
        case BorelCode::GenTag::TripleChild: return "triple-child";
    }
    return "?";
}

BorelCode::GenTag gen_from(const std::string& s) {
    if (s == "g-section") return BorelCode::GenTag::GSection;
    if (s == "u-section") return BorelCode::GenTag::USection;
    if (s == "pred-child") return BorelCode::GenTag::PredChild;
    if (s == "level-miss") return BorelCode::GenTag::LevelMiss;
    if (s == "class-child") return BorelCode::GenTag::ClassChild;
    if (s == "triple-child") return BorelCode::GenTag::TripleChild;
    throw ParseError("unknown generator tag: " + s);
}

} // namespace

nlohmann::json BorelCode::to_json() const {
    const Node& n = *node_;
    if (n.tag == Node::Tag::Leaf) {
        nlohmann::json iv = nlohmann::json::array();
        for (const auto& [a, b] : n.intervals) iv.push_back({a.to_json(), b.to_json()});
        return {{"leaf", iv}};
    }
    if (n.tag == Node::Tag::Union) {
        nlohmann::json ch = nlohmann::json::array();
        for (const auto& c : n.children) ch.push_back(c.to_json());
        return {{"union", ch}};
    }
    nlohmann::json params;
    params["decide"] = decide_str(n.params.decide);
    if (n.params.bound) params["bound"] = n.params.bound->to_json();
    if (n.params.strictly_above) params["above"] = n.params.strictly_above->to_json();
    if (n.params.obound) params["obound"] = n.params.obound->to_string();
    if (n.params.pos != 0) params["pos"] = n.params.pos;
    if (n.params.at) params["at"] = n.params.at->to_string();
    nlohmann::json child;
    if (n.gen == GenTag::None) {
        child = n.structural->to_json();
    } else {
        child["gen"] = gen_str(n.gen);
        if (!n.gen_level.is_zero() || n.gen == GenTag::USection || n.gen == GenTag::PredChild)
            child["level"] = n.gen_level.to_string();
        if (n.gen_base) child["base"] = n.gen_base->to_json();
    }
    return {{"family", {{"kind", kind_str(n.params.kind)}, {"params", params}, {"child", child}}}};
}

BorelCode BorelCode::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("code node must be an object: " + j.dump());
    if (j.contains("leaf")) {
        std::vector<std::pair<RExpr, RExpr>> iv;
        for (const auto& pair : j["leaf"])
            iv.push_back({RExpr::from_json(pair[0]), RExpr::from_json(pair[1])});
        return leaf(std::move(iv));
    }
    if (j.contains("union")) {
        std::vector<BorelCode> ch;
        for (const auto& c : j["union"]) ch.push_back(from_json(c));
        return union_of(std::move(ch));
    }
    if (!j.contains("family")) throw ParseError("unknown code node: " + j.dump());
    const auto& f = j["family"];
    FamilyParams p;
    p.kind = kind_from(f.at("kind").get<std::string>());
    const auto& pj = f.at("params");
    p.decide = decide_from(pj.at("decide").get<std::string>());
    if (pj.contains("bound")) p.bound = RExpr::from_json(pj["bound"]);
    if (pj.contains("above")) p.strictly_above = RExpr::from_json(pj["above"]);
    if (pj.contains("obound")) p.obound = Ordinal::parse(pj["obound"].get<std::string>());
    if (pj.contains("pos")) p.pos = pj["pos"].get<std::uint64_t>();
    if (pj.contains("at")) p.at = Rat::from_string(pj["at"].get<std::string>());
    const auto& cj = f.at("child");
    if (cj.contains("gen")) {
        GenTag g = gen_from(cj["gen"].get<std::string>());
        Ordinal level;
        if (cj.contains("level")) level = Ordinal::parse(cj["level"].get<std::string>());
        std::shared_ptr<const BorelMultiCode> base;
        if (cj.contains("base"))
            base = std::make_shared<const BorelMultiCode>(BorelMultiCode::from_json(cj["base"]));
        return family_generated(std::move(p), g, std::move(level), std::move(base));
    }
    return family(std::move(p), from_json(cj));
}

bool BorelCode::operator==(const BorelCode& o) const { return to_json() == o.to_json(); }

nlohmann::json BorelMultiCode::to_json() const {
    nlohmann::json mc;
    switch (impl_->ctor) {
        case Impl::Ctor::G: mc["ctor"] = "g"; break;
        case Impl::Ctor::U:
            mc["ctor"] = "u";
            mc["xi"] = impl_->xi.to_string();
            break;
        case Impl::Ctor::Restrict:
            mc["ctor"] = "restrict";
            mc["cut"] = impl_->cut.to_string();
            mc["base"] = wrap(impl_->base).to_json();
            break;
        case Impl::Ctor::Shift:
            mc["ctor"] = "shift";
            mc["xi"] = impl_->xi.to_string();
            mc["base"] = wrap(impl_->base).to_json();
            break;
    }
    // the runtime section cache is acceleration state, serialized cold
    return {{"mc", mc}, {"cache", nlohmann::json::object()}};
}

BorelMultiCode BorelMultiCode::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("mc"))
        throw ParseError("multicode must be {\"mc\": {...}, \"cache\": {...}}");
    const auto& mc = j["mc"];
    std::string ctor = mc.at("ctor").get<std::string>();
    if (ctor == "g") return g();
    if (ctor == "u") return u(Ordinal::parse(mc.at("xi").get<std::string>()));
    if (ctor == "restrict")
        return restricted(from_json(mc.at("base")), Ordinal::parse(mc.at("cut").get<std::string>()));
    if (ctor == "shift")
        return shifted(from_json(mc.at("base")), Ordinal::parse(mc.at("xi").get<std::string>()));
    throw ParseError("unknown multicode constructor: " + ctor);
}

bool BorelMultiCode::operator==(const BorelMultiCode& o) const { return to_json() == o.to_json(); }

std::string serialize(const BorelCode& code) { return code.to_json().dump(); }
std::string serialize(const BorelMultiCode& mc) { return mc.to_json().dump(); }

BorelCode deserialize_code(const std::string& bytes) {
    try {
        return BorelCode::from_json(nlohmann::json::parse(bytes));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("code bytes: ") + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("code bytes: ") + e.what());
    }
}

BorelMultiCode deserialize_multicode(const std::string& bytes) {
    try {
        return BorelMultiCode::from_json(nlohmann::json::parse(bytes));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("multicode bytes: ") + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("multicode bytes: ") + e.what());
    }
}

namespace {

BorelCode materialize_triple_sample(const BorelCode& fam) {
    const auto& p = fam.params();
    if (!p.at || !p.obound) throw InvalidCodeError("triples family lacks parameters");
    Rat u = *p.at - Rat(1);
    Rat v = *p.at + Rat(1);
    Rat w = h_map(u, v, *p.at);
    auto base = fam.triple_base();
    if (!base) throw InvalidCodeError("triples family lacks its base multicode");
    return BorelCode::intersection({u_section_code(*p.obound, u),
                                    u_section_code(p.obound->successor(), v),
                                    base->section(w)});
}

} // namespace

} // namespace ordchain
