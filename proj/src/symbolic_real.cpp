#include "ordchain/symbolic_real.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>

#include "ordchain/errors.hpp"

namespace ordchain {

namespace {

constexpr std::uint64_t kIndexCap = 10000000;   // sequence index bound
constexpr std::uint64_t kMaterializeCap = 200000;  // points materialized by a clip

// seq_point(lo, hi, k) = hi - (hi-lo)/(k+1): strictly increasing from lo
// toward hi. Ladder points and canonical cell cuts both use it.
Rat seq_point(const Rat& lo, const Rat& hi, std::uint64_t k) {
    return hi - (hi - lo) / Rat(static_cast<std::int64_t>(k + 1));
}

std::uint64_t checked_index(const BigInt& v, const char* what) {
    if (v.is_negative()) return 0;
    if (!v.fits_int64() || static_cast<std::uint64_t>(v.to_int64()) > kIndexCap)
        throw ResourceLimitError(std::string(what) + ": sequence index beyond desk scale");
    return static_cast<std::uint64_t>(v.to_int64());
}

// #{k >= 0 : seq_point(lo,hi,k) <= q}, for q < hi.
std::uint64_t count_le_boundary(const Rat& lo, const Rat& hi, const Rat& q) {
    Rat ratio = (hi - lo) / (hi - q);
    return checked_index(ratio.floor(), "count_le_boundary");
}

// #{k >= 0 : seq_point(lo,hi,k) < q}, for q < hi.
std::uint64_t count_lt_boundary(const Rat& lo, const Rat& hi, const Rat& q) {
    Rat ratio = (hi - lo) / (hi - q);
    BigInt fl = ratio.floor();
    if (ratio.is_integer()) fl = fl - BigInt(1);
    return checked_index(fl, "count_lt_boundary");
}

// ---------------------------------------------------------------------------
// Pieces: structured well-ordered subsets of Q.
//   Points: finite sorted set.
//   Ladder: {seq_point(lo,hi,k) : k >= k0}, type w, sup hi (not attained).
//   Pow:    the canonical set of type w^f laid out in cells
//           (cut(k), cut(k+1)) with cut(k) = seq_point(lo,hi,k), k >= k0;
//           cell k holds the canonical set of type w^{d_k}, where d_k is
//           f-1 for successor f and the (k+1)-th fundamental-sequence term
//           for limit f. Both sequences sum to w^f.
// ---------------------------------------------------------------------------

struct Piece {
    enum class Kind { Points, Ladder, Pow };
    Kind kind = Kind::Points;
    std::vector<Rat> pts;
    Rat lo, hi;
    Ordinal f;
    std::uint64_t k0 = 0;

    static Piece points(std::vector<Rat> p) {
        Piece x;
        x.kind = Kind::Points;
        x.pts = std::move(p);
        return x;
    }
    static Piece ladder(Rat lo, Rat hi, std::uint64_t k0 = 0) {
        Piece x;
        x.kind = Kind::Ladder;
        x.lo = std::move(lo);
        x.hi = std::move(hi);
        x.k0 = k0;
        return x;
    }
    static Piece pow(Ordinal f, Rat lo, Rat hi, std::uint64_t k0 = 0) {
        Piece x;
        x.kind = Kind::Pow;
        x.f = std::move(f);
        x.lo = std::move(lo);
        x.hi = std::move(hi);
        x.k0 = k0;
        return x;
    }
};

Ordinal cell_exponent(const Ordinal& f, std::uint64_t k) {
    if (f.is_successor()) return f.predecessor();
    return f.fundamental(k + 1);
}

// Content of cell k of a Pow piece: a Piece of strictly smaller exponent.
Piece pow_cell_content(const Piece& p, std::uint64_t k) {
    Rat a = seq_point(p.lo, p.hi, k);
    Rat b = seq_point(p.lo, p.hi, k + 1);
    Ordinal d = cell_exponent(p.f, k);
    if (d.is_zero()) return Piece::points({midpoint(a, b)});
    return Piece::pow(d, a, b);
}

bool piece_empty(const Piece& p) { return p.kind == Piece::Kind::Points && p.pts.empty(); }

Rat piece_min(const Piece& p) {
    switch (p.kind) {
        case Piece::Kind::Points: return p.pts.front();
        case Piece::Kind::Ladder: return seq_point(p.lo, p.hi, p.k0);
        case Piece::Kind::Pow: return piece_min(pow_cell_content(p, p.k0));
    }
    throw Error("internal: piece_min");
}

Rat piece_sup(const Piece& p) {
    if (p.kind == Piece::Kind::Points) return p.pts.back();
    return p.hi;
}

Ordinal piece_exponent(const Piece& p) {
    if (p.kind == Piece::Kind::Ladder) return Ordinal::from_int(1);
    return p.f;  // Pow
}

bool piece_contains(const Piece& p, const Rat& q) {
    switch (p.kind) {
        case Piece::Kind::Points:
            return std::binary_search(p.pts.begin(), p.pts.end(), q);
        case Piece::Kind::Ladder: {
            if (q >= p.hi || q < p.lo) return false;
            Rat ratio = (p.hi - p.lo) / (p.hi - q);
            if (!ratio.is_integer()) return false;
            std::uint64_t k1 = checked_index(ratio.num(), "ladder membership");
            return k1 >= p.k0 + 1;
        }
        case Piece::Kind::Pow: {
            if (q >= p.hi) return false;
            if (q <= seq_point(p.lo, p.hi, p.k0)) return false;
            std::uint64_t cnt = count_le_boundary(p.lo, p.hi, q);
            std::uint64_t ks = cnt - 1;  // cut(ks) <= q < cut(ks+1)
            if (ks < p.k0) return false;
            if (seq_point(p.lo, p.hi, ks) == q) return false;  // cuts are not members
            return piece_contains(pow_cell_content(p, ks), q);
        }
    }
    return false;
}

// piece ∩ (-inf, q], or (-inf, q) when strict; result: complete pieces.
void clip_upper(const Piece& p, const Rat& q, bool strict, std::vector<Piece>& out) {
    switch (p.kind) {
        case Piece::Kind::Points: {
            std::vector<Rat> kept;
            for (const auto& r : p.pts)
                if (strict ? r < q : r <= q) kept.push_back(r);
            if (!kept.empty()) out.push_back(Piece::points(std::move(kept)));
            return;
        }
        case Piece::Kind::Ladder: {
            if (q >= p.hi) {
                out.push_back(p);
                return;
            }
            std::uint64_t cnt = strict ? count_lt_boundary(p.lo, p.hi, q) : count_le_boundary(p.lo, p.hi, q);
            if (cnt <= p.k0) return;
            if (cnt - p.k0 > kMaterializeCap) throw ResourceLimitError("ladder clip beyond desk scale");
            std::vector<Rat> kept;
            for (std::uint64_t k = p.k0; k < cnt; ++k) kept.push_back(seq_point(p.lo, p.hi, k));
            out.push_back(Piece::points(std::move(kept)));
            return;
        }
        case Piece::Kind::Pow: {
            if (q >= p.hi) {
                out.push_back(p);
                return;
            }
            if (q <= seq_point(p.lo, p.hi, p.k0)) return;
            std::uint64_t cnt = count_le_boundary(p.lo, p.hi, q);  // cut(k) <= q for k < cnt
            std::uint64_t ks = cnt - 1;
            if (ks < p.k0) return;
            if (ks - p.k0 > kMaterializeCap) throw ResourceLimitError("pow clip beyond desk scale");
            for (std::uint64_t k = p.k0; k < ks; ++k) out.push_back(pow_cell_content(p, k));
            clip_upper(pow_cell_content(p, ks), q, strict, out);
            return;
        }
    }
}

// piece ∩ (q, +inf), or [q, +inf) when inclusive; result: complete pieces.
void clip_lower(const Piece& p, const Rat& q, bool inclusive, std::vector<Piece>& out) {
    switch (p.kind) {
        case Piece::Kind::Points: {
            std::vector<Rat> kept;
            for (const auto& r : p.pts)
                if (inclusive ? r >= q : r > q) kept.push_back(r);
            if (!kept.empty()) out.push_back(Piece::points(std::move(kept)));
            return;
        }
        case Piece::Kind::Ladder: {
            if (q >= p.hi) return;
            std::uint64_t first =
                inclusive ? count_lt_boundary(p.lo, p.hi, q) : count_le_boundary(p.lo, p.hi, q);
            out.push_back(Piece::ladder(p.lo, p.hi, std::max(first, p.k0)));
            return;
        }
        case Piece::Kind::Pow: {
            if (q >= p.hi) return;
            // the base cut is not a member, so both modes keep the whole piece
            if (q <= seq_point(p.lo, p.hi, p.k0)) {
                out.push_back(p);
                return;
            }
            std::uint64_t cnt = count_le_boundary(p.lo, p.hi, q);
            std::uint64_t ks = cnt - 1;  // cut(ks) <= q < cut(ks+1)
            clip_lower(pow_cell_content(p, ks), q, inclusive, out);
            out.push_back(Piece::pow(p.f, p.lo, p.hi, ks + 1));
            return;
        }
    }
}

SideQuery piece_min_above(const Piece& p, const Rat& q) {
    SideQuery r;
    switch (p.kind) {
        case Piece::Kind::Points: {
            auto it = std::upper_bound(p.pts.begin(), p.pts.end(), q);
            if (it == p.pts.end()) return r;
            r.kind = SideQuery::Element;
            r.value = *it;
            return r;
        }
        case Piece::Kind::Ladder: {
            if (q >= p.hi) return r;
            std::uint64_t k = std::max(p.k0, count_le_boundary(p.lo, p.hi, q));
            r.kind = SideQuery::Element;
            r.value = seq_point(p.lo, p.hi, k);
            return r;
        }
        case Piece::Kind::Pow: {
            if (q >= p.hi) return r;
            if (q < seq_point(p.lo, p.hi, p.k0)) {
                r.kind = SideQuery::Element;
                r.value = piece_min(p);
                return r;
            }
            std::uint64_t cnt = count_le_boundary(p.lo, p.hi, q);
            std::uint64_t ks = std::max(cnt - 1, p.k0);
            SideQuery inner = piece_min_above(pow_cell_content(p, ks), q);
            if (inner.kind == SideQuery::Element) return inner;
            r.kind = SideQuery::Element;
            r.value = piece_min(pow_cell_content(p, ks + 1));
            return r;
        }
    }
    return r;
}

SideQuery piece_max_below(const Piece& p, const Rat& q) {
    SideQuery r;
    switch (p.kind) {
        case Piece::Kind::Points: {
            auto it = std::lower_bound(p.pts.begin(), p.pts.end(), q);
            if (it == p.pts.begin()) return r;
            r.kind = SideQuery::Element;
            r.value = *(it - 1);
            return r;
        }
        case Piece::Kind::Ladder: {
            if (q >= p.hi) {
                r.kind = SideQuery::Accumulates;
                r.value = p.hi;
                return r;
            }
            std::uint64_t cnt = count_lt_boundary(p.lo, p.hi, q);
            if (cnt <= p.k0) return r;
            r.kind = SideQuery::Element;
            r.value = seq_point(p.lo, p.hi, cnt - 1);
            return r;
        }
        case Piece::Kind::Pow: {
            if (q >= p.hi) {
                r.kind = SideQuery::Accumulates;
                r.value = p.hi;
                return r;
            }
            if (q <= seq_point(p.lo, p.hi, p.k0)) return r;
            std::uint64_t cnt = count_le_boundary(p.lo, p.hi, q);
            std::uint64_t ks = cnt - 1;
            if (ks >= p.k0) {
                SideQuery inner = piece_max_below(pow_cell_content(p, ks), q);
                if (inner.kind != SideQuery::Empty) return inner;
            }
            if (ks == 0 || ks - 1 < p.k0) return r;
            // everything below lives in earlier cells; the previous cell is
            // either a single point or accumulates at its right cut
            Piece prev = pow_cell_content(p, ks - 1);
            if (prev.kind == Piece::Kind::Points) {
                r.kind = SideQuery::Element;
                r.value = prev.pts.back();
                return r;
            }
            r.kind = SideQuery::Accumulates;
            r.value = prev.hi;
            return r;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Order type of a finite union of pieces, by recursion on the topmost
// accumulation point. The merged tails cofinal at the top accumulation
// point contribute exactly w^E, E the largest exponent among them;
// absorption makes the rule insensitive to interleaving and duplicates.
// ---------------------------------------------------------------------------

struct PieceSet {
    std::vector<Rat> pts;      // merged, sorted, distinct
    std::vector<Piece> inf;    // ladders and pows
};

PieceSet normalize_pieces(const std::vector<Piece>& pieces) {
    PieceSet s;
    for (const auto& p : pieces) {
        if (piece_empty(p)) continue;
        if (p.kind == Piece::Kind::Points)
            s.pts.insert(s.pts.end(), p.pts.begin(), p.pts.end());
        else
            s.inf.push_back(p);
    }
    std::sort(s.pts.begin(), s.pts.end());
    s.pts.erase(std::unique(s.pts.begin(), s.pts.end()), s.pts.end());
    // points that coincide with a structured member must not be counted twice
    if (!s.inf.empty()) {
        std::vector<Rat> kept;
        for (const auto& q : s.pts) {
            bool dup = false;
            for (const auto& p : s.inf)
                if (piece_contains(p, q)) {
                    dup = true;
                    break;
                }
            if (!dup) kept.push_back(q);
        }
        s.pts = std::move(kept);
    }
    return s;
}

struct SplitPlan {
    Rat top;          // V: topmost accumulation point
    Ordinal tail_exp; // E
    Rat cut;          // m: below/tail split point, < top
    std::vector<Piece> below;
    std::vector<const Piece*> cluster;
    std::vector<Rat> above_pts;  // points >= top
};

Ordinal ot_union(const std::vector<Piece>& pieces);

SplitPlan make_split(const PieceSet& s) {
    SplitPlan plan;
    plan.top = piece_sup(s.inf.front());
    for (const auto& p : s.inf) {
        Rat sup = piece_sup(p);
        if (sup > plan.top) plan.top = sup;
    }
    Ordinal e = Ordinal::from_int(1);
    bool have_cut = false;
    for (const auto& p : s.inf) {
        if (piece_sup(p) == plan.top) {
            plan.cluster.push_back(&p);
            Ordinal pe = piece_exponent(p);
            if (pe > e) e = pe;
            Rat base = seq_point(p.lo, p.hi, p.k0);
            if (!have_cut || base > plan.cut) {
                plan.cut = base;
                have_cut = true;
            }
        }
    }
    plan.tail_exp = e;
    for (const auto& p : s.inf) {
        if (piece_sup(p) != plan.top) {
            Rat sup = piece_sup(p);
            if (!have_cut || sup > plan.cut) {
                plan.cut = sup;
                have_cut = true;
            }
        }
    }
    for (const auto& q : s.pts) {
        if (q >= plan.top) {
            plan.above_pts.push_back(q);
        } else if (!have_cut || q > plan.cut) {
            plan.cut = q;
            have_cut = true;
        }
    }
    // below part: everything clipped to (-inf, cut]
    std::vector<Rat> below_pts;
    for (const auto& q : s.pts)
        if (q <= plan.cut) below_pts.push_back(q);
    if (!below_pts.empty()) plan.below.push_back(Piece::points(std::move(below_pts)));
    for (const auto& p : s.inf) clip_upper(p, plan.cut, /*strict=*/false, plan.below);
    return plan;
}

Ordinal ot_union(const std::vector<Piece>& pieces) {
    PieceSet s = normalize_pieces(pieces);
    if (s.inf.empty()) return Ordinal::from_int(s.pts.size());
    SplitPlan plan = make_split(s);
    Ordinal below = ot_union(plan.below);
    Ordinal tail = Ordinal::omega_power(plan.tail_exp, 1);
    return Ordinal::add(Ordinal::add(below, tail), Ordinal::from_int(plan.above_pts.size()));
}

// Next boundary of a cluster piece strictly above `after`: ladder points and
// pow cuts; both increase toward the shared accumulation point.
Rat next_boundary(const Piece& p, const Rat& after) {
    std::uint64_t k = std::max(p.k0, count_le_boundary(p.lo, p.hi, after));
    return seq_point(p.lo, p.hi, k);
}

Rat element_at_union(const std::vector<Piece>& pieces, const Ordinal& xi);

Rat element_in_cluster(const SplitPlan& plan, Ordinal delta) {
    Rat prev = plan.cut;
    Ordinal gamma;
    for (;;) {
        Rat c = next_boundary(*plan.cluster.front(), prev);
        for (const Piece* p : plan.cluster) {
            Rat b = next_boundary(*p, prev);
            if (b < c) c = b;
        }
        std::vector<Piece> cell;
        for (const Piece* p : plan.cluster) {
            std::vector<Piece> tail;
            clip_lower(*p, prev, /*inclusive=*/false, tail);
            for (const auto& t : tail) clip_upper(t, c, /*strict=*/false, cell);
        }
        PieceSet cs = normalize_pieces(cell);
        if (!(cs.pts.empty() && cs.inf.empty())) {
            Ordinal alpha = ot_union(cell);
            Ordinal next = Ordinal::add(gamma, alpha);
            if (delta < next) return element_at_union(cell, Ordinal::subtract_left(gamma, delta));
            gamma = next;
        }
        prev = c;
    }
}

Rat element_at_union(const std::vector<Piece>& pieces, const Ordinal& xi) {
    PieceSet s = normalize_pieces(pieces);
    if (s.inf.empty()) {
        std::uint64_t idx = xi.finite_value();
        if (idx >= s.pts.size()) throw Error("internal: element index out of range");
        return s.pts[idx];
    }
    SplitPlan plan = make_split(s);
    Ordinal below = ot_union(plan.below);
    if (xi < below) return element_at_union(plan.below, xi);
    Ordinal delta = Ordinal::subtract_left(below, xi);
    Ordinal tail = Ordinal::omega_power(plan.tail_exp, 1);
    if (delta < tail) return element_in_cluster(plan, delta);
    Ordinal rest = Ordinal::subtract_left(tail, delta);
    std::uint64_t idx = rest.finite_value();
    if (idx >= plan.above_pts.size()) throw Error("internal: element index out of range");
    return plan.above_pts[idx];
}

// ---------------------------------------------------------------------------
// Block-level helpers
// ---------------------------------------------------------------------------

Rat desc_point(const DescendingLadderBlock& d, std::uint64_t k) {
    return d.limit + (d.start - d.limit) / Rat(static_cast<std::int64_t>(k + 1));
}

bool desc_contains(const DescendingLadderBlock& d, const Rat& q) {
    if (q <= d.limit || q > d.start) return false;
    Rat ratio = (d.start - d.limit) / (q - d.limit);
    return ratio.is_integer();
}

SideQuery desc_min_above(const DescendingLadderBlock& d, const Rat& q) {
    SideQuery r;
    if (q >= d.start) return r;
    if (q < d.limit) {
        r.kind = SideQuery::Accumulates;
        r.value = d.limit;
        return r;
    }
    if (q == d.limit) {
        r.kind = SideQuery::Accumulates;
        r.value = d.limit;
        return r;
    }
    // finitely many points above q; the least is the last of them
    Rat ratio = (d.start - d.limit) / (q - d.limit);
    BigInt fl = ratio.floor();
    if (ratio.is_integer()) fl = fl - BigInt(1);
    std::uint64_t cnt = checked_index(fl, "descending ladder");  // #points strictly above q
    r.kind = SideQuery::Element;
    r.value = desc_point(d, cnt - 1);
    return r;
}

SideQuery desc_max_below(const DescendingLadderBlock& d, const Rat& q) {
    SideQuery r;
    if (q <= d.limit) return r;
    if (q > d.start) {
        r.kind = SideQuery::Element;
        r.value = d.start;
        return r;
    }
    // limit < q <= start: the largest point below q
    Rat ratio = (d.start - d.limit) / (q - d.limit);
    std::uint64_t kmin = checked_index(ratio.floor(), "descending ladder");  // k+1 > ratio
    r.kind = SideQuery::Element;
    r.value = desc_point(d, kmin);
    return r;
}

std::vector<Piece> expand_wo_block(const Ordinal& type, const Rat& lo, const Rat& hi) {
    std::vector<Piece> out;
    if (type.is_zero()) return out;
    std::uint64_t units = 0;
    for (const auto& t : type.terms()) {
        units += t.coeff;
        if (units > 10000) throw ResourceLimitError("well-ordered block beyond desk scale");
    }
    Rat width = (hi - lo) / Rat(static_cast<std::int64_t>(units));
    std::uint64_t j = 0;
    for (const auto& t : type.terms()) {
        for (std::uint64_t c = 0; c < t.coeff; ++c, ++j) {
            Rat a = lo + width * Rat(static_cast<std::int64_t>(j));
            Rat b = lo + width * Rat(static_cast<std::int64_t>(j + 1));
            if (t.exponent.is_zero())
                out.push_back(Piece::points({midpoint(a, b)}));
            else
                out.push_back(Piece::pow(t.exponent, a, b));
        }
    }
    return out;
}

std::string rat_str(const Rat& r) { return r.to_string(); }

} // namespace

// ---------------------------------------------------------------------------
// InitialSegmentReport
// ---------------------------------------------------------------------------

struct InitialSegmentReport::Data {
    std::vector<Piece> pieces;
};

std::optional<Rat> InitialSegmentReport::element_at(const Ordinal& xi) const {
    if (!(xi < type_)) return std::nullopt;
    return element_at_union(data_->pieces, xi);
}

// ---------------------------------------------------------------------------
// SymbolicReal
// ---------------------------------------------------------------------------

struct SymbolicReal::Impl {
    std::vector<Block> blocks;
    std::vector<Piece> wo_pieces;   // expanded non-descending structure
    std::vector<Rat> desc_limits;   // ascending
    std::string key;

    mutable std::mutex mu;
    mutable std::optional<InitialSegmentReport> full;
    mutable std::map<std::string, InitialSegmentReport> below;
};

SymbolicReal::SymbolicReal() : SymbolicReal(std::vector<Block>{}) {}

SymbolicReal::SymbolicReal(std::vector<Block> blocks) : impl_(std::make_shared<Impl>()) {
    for (auto& b : blocks) {
        if (auto* f = std::get_if<FinitePointsBlock>(&b)) {
            std::sort(f->points.begin(), f->points.end());
            f->points.erase(std::unique(f->points.begin(), f->points.end()), f->points.end());
            if (f->points.empty()) continue;
            impl_->wo_pieces.push_back(Piece::points(f->points));
        } else if (auto* a = std::get_if<AscendingLadderBlock>(&b)) {
            if (!(a->start < a->limit))
                throw InvalidInputError("ascending ladder needs start < limit");
            impl_->wo_pieces.push_back(Piece::ladder(a->start, a->limit));
        } else if (auto* d = std::get_if<DescendingLadderBlock>(&b)) {
            if (!(d->limit < d->start))
                throw InvalidInputError("descending ladder needs limit < start");
            impl_->desc_limits.push_back(d->limit);
        } else if (auto* w = std::get_if<WoSetBlock>(&b)) {
            if (w->type.is_zero()) continue;
            if (!(w->lo < w->hi))
                throw InvalidIntervalError("well-ordered block needs a nonempty interval");
            auto ps = expand_wo_block(w->type, w->lo, w->hi);
            impl_->wo_pieces.insert(impl_->wo_pieces.end(), ps.begin(), ps.end());
        }
        impl_->blocks.push_back(b);
    }
    std::sort(impl_->desc_limits.begin(), impl_->desc_limits.end());
    impl_->key = to_json().dump();
}

const std::vector<Block>& SymbolicReal::blocks() const { return impl_->blocks; }

bool SymbolicReal::denotes_empty() const {
    return impl_->wo_pieces.empty() && impl_->desc_limits.empty();
}

bool SymbolicReal::denotes_finite_set() const {
    if (!impl_->desc_limits.empty()) return false;
    for (const auto& p : impl_->wo_pieces)
        if (p.kind != Piece::Kind::Points) return false;
    return true;
}

std::vector<Rat> SymbolicReal::finite_elements() const {
    if (!denotes_finite_set()) throw InvalidInputError("finite_elements of an infinite set");
    std::vector<Rat> out;
    for (const auto& p : impl_->wo_pieces) out.insert(out.end(), p.pts.begin(), p.pts.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool SymbolicReal::contains(const Rat& q) const {
    for (const auto& p : impl_->wo_pieces)
        if (piece_contains(p, q)) return true;
    for (const auto& b : impl_->blocks)
        if (const auto* d = std::get_if<DescendingLadderBlock>(&b))
            if (desc_contains(*d, q)) return true;
    return false;
}

SideQuery SymbolicReal::min_above(const Rat& q) const {
    bool have_elem = false, have_acc = false;
    Rat elem, acc;
    auto feed = [&](const SideQuery& r) {
        if (r.kind == SideQuery::Element) {
            if (!have_elem || r.value < elem) elem = r.value;
            have_elem = true;
        } else if (r.kind == SideQuery::Accumulates) {
            if (!have_acc || r.value < acc) acc = r.value;
            have_acc = true;
        }
    };
    for (const auto& p : impl_->wo_pieces) feed(piece_min_above(p, q));
    for (const auto& b : impl_->blocks)
        if (const auto* d = std::get_if<DescendingLadderBlock>(&b)) feed(desc_min_above(*d, q));
    SideQuery r;
    if (have_acc && (!have_elem || elem > acc)) {
        r.kind = SideQuery::Accumulates;
        r.value = acc;
        return r;
    }
    if (have_elem) {
        r.kind = SideQuery::Element;
        r.value = elem;
    }
    return r;
}

SideQuery SymbolicReal::max_below(const Rat& q) const {
    bool have_elem = false, have_acc = false;
    Rat elem, acc;
    auto feed = [&](const SideQuery& r) {
        if (r.kind == SideQuery::Element) {
            if (!have_elem || r.value > elem) elem = r.value;
            have_elem = true;
        } else if (r.kind == SideQuery::Accumulates) {
            if (!have_acc || r.value > acc) acc = r.value;
            have_acc = true;
        }
    };
    for (const auto& p : impl_->wo_pieces) feed(piece_max_below(p, q));
    for (const auto& b : impl_->blocks)
        if (const auto* d = std::get_if<DescendingLadderBlock>(&b)) feed(desc_max_below(*d, q));
    SideQuery r;
    if (have_acc && (!have_elem || elem < acc)) {
        r.kind = SideQuery::Accumulates;
        r.value = acc;
        return r;
    }
    if (have_elem) {
        r.kind = SideQuery::Element;
        r.value = elem;
    }
    return r;
}

bool SymbolicReal::intersects(const Rat& lo, const Rat& hi) const {
    if (!(lo < hi)) return false;
    SideQuery r = min_above(lo);
    if (r.kind == SideQuery::Element) return r.value < hi;
    if (r.kind == SideQuery::Accumulates) return r.value < hi;
    return false;
}

bool SymbolicReal::has_element_below(const Rat& hi) const {
    for (const auto& p : impl_->wo_pieces)
        if (piece_min(p) < hi) return true;
    for (const auto& lim : impl_->desc_limits)
        if (lim < hi) return true;  // the tail piles up just above the limit
    return false;
}

bool SymbolicReal::well_ordered_below(const Rat& r) const {
    return impl_->desc_limits.empty() || impl_->desc_limits.front() >= r;
}

bool SymbolicReal::well_ordered_everywhere() const { return impl_->desc_limits.empty(); }

InitialSegmentReport SymbolicReal::initial_segment() const {
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        if (impl_->full) return *impl_->full;
    }
    std::vector<Piece> pieces;
    if (impl_->desc_limits.empty()) {
        pieces = impl_->wo_pieces;
    } else {
        const Rat& c = impl_->desc_limits.front();
        for (const auto& p : impl_->wo_pieces) clip_upper(p, c, /*strict=*/false, pieces);
    }
    InitialSegmentReport rep;
    auto data = std::make_shared<InitialSegmentReport::Data>();
    data->pieces = std::move(pieces);
    rep.type_ = ot_union(data->pieces);
    rep.data_ = std::move(data);
    std::lock_guard<std::mutex> g(impl_->mu);
    impl_->full = rep;
    return rep;
}

InitialSegmentReport SymbolicReal::initial_segment_below(const Rat& r) const {
    std::string k = r.to_string();
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        auto it = impl_->below.find(k);
        if (it != impl_->below.end()) return it->second;
    }
    std::vector<Piece> pieces;
    bool cut_applies = !impl_->desc_limits.empty() && impl_->desc_limits.front() < r;
    if (cut_applies) {
        const Rat& c = impl_->desc_limits.front();
        for (const auto& p : impl_->wo_pieces) clip_upper(p, c, /*strict=*/false, pieces);
    } else {
        for (const auto& p : impl_->wo_pieces) clip_upper(p, r, /*strict=*/true, pieces);
    }
    InitialSegmentReport rep;
    auto data = std::make_shared<InitialSegmentReport::Data>();
    data->pieces = std::move(pieces);
    rep.type_ = ot_union(data->pieces);
    rep.data_ = std::move(data);
    std::lock_guard<std::mutex> g(impl_->mu);
    impl_->below.emplace(std::move(k), rep);
    return rep;
}

const std::string& SymbolicReal::key() const { return impl_->key; }

nlohmann::json SymbolicReal::to_json() const {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : impl_->blocks) {
        if (const auto* f = std::get_if<FinitePointsBlock>(&b)) {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& p : f->points) pts.push_back(rat_str(p));
            blocks.push_back({{"fin", pts}});
        } else if (const auto* a = std::get_if<AscendingLadderBlock>(&b)) {
            blocks.push_back({{"asc", {rat_str(a->start), rat_str(a->limit)}}});
        } else if (const auto* d = std::get_if<DescendingLadderBlock>(&b)) {
            blocks.push_back({{"desc", {rat_str(d->limit), rat_str(d->start)}}});
        } else if (const auto* w = std::get_if<WoSetBlock>(&b)) {
            blocks.push_back({{"wo",
                               {{"type", w->type.to_string()},
                                {"lo", rat_str(w->lo)},
                                {"hi", rat_str(w->hi)}}}});
        }
    }
    return {{"blocks", blocks}};
}

SymbolicReal SymbolicReal::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
        throw ParseError("symbolic real: expected {\"blocks\": [...]}");
    std::vector<Block> blocks;
    for (const auto& b : j["blocks"]) {
        if (b.contains("fin")) {
            FinitePointsBlock f;
            for (const auto& p : b["fin"]) f.points.push_back(Rat::from_string(p.get<std::string>()));
            blocks.push_back(f);
        } else if (b.contains("asc")) {
            AscendingLadderBlock a{Rat::from_string(b["asc"][0].get<std::string>()),
                                   Rat::from_string(b["asc"][1].get<std::string>())};
            blocks.push_back(a);
        } else if (b.contains("desc")) {
            DescendingLadderBlock d{Rat::from_string(b["desc"][0].get<std::string>()),
                                    Rat::from_string(b["desc"][1].get<std::string>())};
            blocks.push_back(d);
        } else if (b.contains("wo")) {
            WoSetBlock w{Ordinal::parse(b["wo"]["type"].get<std::string>()),
                         Rat::from_string(b["wo"]["lo"].get<std::string>()),
                         Rat::from_string(b["wo"]["hi"].get<std::string>())};
            blocks.push_back(w);
        } else {
            throw ParseError("symbolic real: unknown block kind " + b.dump());
        }
    }
    return SymbolicReal(std::move(blocks));
}

namespace {

struct RealParser {
    const std::string& text;
    std::size_t pos = 0;
    explicit RealParser(const std::string& t) : text(t) {}

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
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "' in set expression", pos);
    }
    bool lookahead_word(const char* w) {
        skip_ws();
        std::size_t len = std::string(w).size();
        return text.compare(pos, len, w) == 0;
    }
    void expect_word(const char* w) {
        if (!lookahead_word(w)) throw ParseError(std::string("expected '") + w + "'", pos);
        pos += std::string(w).size();
    }

    Rat rat() {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
            ++pos;
        if (start == pos) throw ParseError("expected a rational in set expression", pos);
        return Rat::from_string(text.substr(start, pos - start));
    }

    Ordinal ordinal_until(char stop) {
        skip_ws();
        std::size_t start = pos;
        int depth = 0;
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '{') ++depth;
            if (c == '}') --depth;
            if (c == stop && depth == 0) break;
            ++pos;
        }
        return Ordinal::parse(text.substr(start, pos - start));
    }

    Block atom() {
        skip_ws();
        if (lookahead_word("fin")) {
            expect_word("fin");
            expect('{');
            FinitePointsBlock f;
            skip_ws();
            if (!eat('}')) {
                for (;;) {
                    f.points.push_back(rat());
                    if (!eat(',')) break;
                }
                expect('}');
            }
            return f;
        }
        if (lookahead_word("asc")) {
            expect_word("asc");
            expect('(');
            Rat a = rat();
            expect(',');
            Rat b = rat();
            expect(')');
            return AscendingLadderBlock{a, b};
        }
        if (lookahead_word("desc")) {
            expect_word("desc");
            expect('(');
            Rat a = rat();
            expect(',');
            Rat b = rat();
            expect(')');
            return DescendingLadderBlock{a, b};
        }
        if (lookahead_word("wo")) {
            expect_word("wo");
            expect('(');
            Ordinal mu = ordinal_until(',');
            expect(',');
            expect('(');
            Rat a = rat();
            expect(',');
            Rat b = rat();
            expect(')');
            expect(')');
            if (!mu.is_zero() && !(a < b))
                throw InvalidIntervalError("wo(...) needs a nonempty interval");
            return WoSetBlock{mu, a, b};
        }
        throw ParseError("expected fin{...}, asc(...), desc(...) or wo(...)", pos);
    }

    SymbolicReal parse() {
        std::vector<Block> blocks;
        for (;;) {
            blocks.push_back(atom());
            if (!eat('+')) break;
        }
        skip_ws();
        if (pos != text.size()) throw ParseError("trailing characters in set expression", pos);
        return SymbolicReal(std::move(blocks));
    }
};

} // namespace

SymbolicReal SymbolicReal::parse(const std::string& text) { return RealParser(text).parse(); }

InitialSegmentOutcome initial_segment(const SymbolicReal& z, const Ordinal& budget) {
    InitialSegmentOutcome out{z.initial_segment(), false};
    out.exceeds_budget = out.report.order_type() >= budget;
    return out;
}

SymbolicReal canonical_wo_set(const Ordinal& mu, const Rat& lo, const Rat& hi) {
    if (mu.is_zero()) return SymbolicReal();
    if (!(lo < hi)) throw InvalidIntervalError("canonical_wo_set needs a nonempty interval");
    return SymbolicReal({WoSetBlock{mu, lo, hi}});
}

} // namespace ordchain
