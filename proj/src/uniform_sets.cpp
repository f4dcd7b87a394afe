#include "ordchain/uniform_sets.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "ordchain/errors.hpp"

namespace ordchain {

// ---------------------------------------------------------------------------
// UniformSet
// ---------------------------------------------------------------------------

struct UniformSet::Impl {
    SemanticTag tag = SemanticTag::U;
    Ordinal level;
    std::shared_ptr<const Impl> base;
    BorelMultiCode mc;
    ProjectionDescriptor proj;
};

namespace {

UniformSet wrap_set(std::shared_ptr<const UniformSet::Impl> impl);

std::optional<Rat> impl_value_at(const UniformSet::Impl& impl, const SymbolicReal& x) {
    switch (impl.tag) {
        case UniformSet::SemanticTag::U: {
            auto rep = x.initial_segment();
            if (!(rep.order_type() > impl.level)) return std::nullopt;
            return rep.element_at(impl.level);
        }
        case UniformSet::SemanticTag::Restricted: {
            if (!(x.initial_segment().order_type() > impl.level)) return std::nullopt;
            return impl_value_at(*impl.base, x);
        }
        case UniformSet::SemanticTag::Shifted: {
            auto t = impl_value_at(*impl.base, x);
            if (!t) return std::nullopt;
            auto rep = x.initial_segment();
            if (!(rep.order_type() > impl.level.successor()))
                throw UniformityViolationError(
                    "shifted set has a section outside the band domain");
            Rat u = *rep.element_at(impl.level);
            Rat v = *rep.element_at(impl.level.successor());
            return h_inv(u, v, *t);
        }
        case UniformSet::SemanticTag::Trimmed: return impl_value_at(*impl.base, x);
    }
    throw Error("internal: corrupt semantic tag");
}

} // namespace

UniformSet::SemanticTag UniformSet::tag() const { return impl_->tag; }
const Ordinal& UniformSet::level() const { return impl_->level; }

std::optional<UniformSet> UniformSet::base() const {
    if (!impl_->base) return std::nullopt;
    return wrap_set(impl_->base);
}

const BorelMultiCode& UniformSet::multicode() const { return impl_->mc; }
const ProjectionDescriptor& UniformSet::proj() const { return impl_->proj; }

std::optional<Rat> UniformSet::value_at(const SymbolicReal& x) const {
    return impl_value_at(*impl_, x);
}

namespace {
UniformSet wrap_set(std::shared_ptr<const UniformSet::Impl> impl) {
    UniformSet s;
    s.impl_ = std::move(impl);
    return s;
}
} // namespace

UniformSet build_u(const Ordinal& xi) {
    auto impl = std::make_shared<UniformSet::Impl>();
    impl->tag = UniformSet::SemanticTag::U;
    impl->level = xi;
    impl->mc = BorelMultiCode::u(xi);
    impl->proj = ProjectionDescriptor{xi};
    return wrap_set(impl);
}

BorelCode build_d(const Ordinal& xi) { return d_code(xi); }
BorelCode derived_e(const Ordinal& xi) { return e_code(xi); }

UniformSet restrict_to_d(const UniformSet& f, const Ordinal& cut) {
    auto impl = std::make_shared<UniformSet::Impl>();
    impl->tag = UniformSet::SemanticTag::Restricted;
    impl->level = cut;
    impl->base = f.impl_;
    impl->mc = BorelMultiCode::restricted(f.multicode(), cut);
    Ordinal lvl = f.proj().level;
    if (cut > lvl) lvl = cut;
    impl->proj = ProjectionDescriptor{lvl};
    return wrap_set(impl);
}

UniformSet shift_between(const UniformSet& q, const Ordinal& xi) {
    if (!(q.proj().level >= xi.successor()))
        throw ProjectionMismatchError("shift needs the projection inside D_" +
                                      xi.successor().to_string() + ", got D_" +
                                      q.proj().level.to_string());
    auto impl = std::make_shared<UniformSet::Impl>();
    impl->tag = UniformSet::SemanticTag::Shifted;
    impl->level = xi;
    impl->base = q.impl_;
    impl->mc = BorelMultiCode::shifted(q.multicode(), xi);
    impl->proj = q.proj();
    return wrap_set(impl);
}

UniformSet UniformSet::trimmed(const UniformSet& base) {
    auto impl = std::make_shared<UniformSet::Impl>();
    impl->tag = SemanticTag::Trimmed;
    impl->level = base.level();
    impl->base = base.impl_;
    impl->mc = base.multicode();
    impl->proj = base.proj();
    return wrap_set(impl);
}

std::optional<Rat> section_value(const UniformSet& p, const SymbolicReal& x) {
    return p.value_at(x);
}

std::optional<Rat> section_value_checked(const UniformSet& p, const SymbolicReal& x,
                                         const std::vector<Rat>& window) {
    std::optional<Rat> v = p.value_at(x);
    std::vector<Rat> probe = window;
    if (v) probe.push_back(*v);
    for (const auto& r : probe) {
        bool structural = p.multicode().eval(x, r);
        bool semantic = v && *v == r;
        if (structural && !semantic)
            throw UniformityViolationError("second witness at ordinate " + r.to_string() +
                                           " (semantic value " + (v ? v->to_string() : "absent") +
                                           ")");
        if (!structural && semantic)
            throw UniformityViolationError("structural section misses the semantic value " +
                                           r.to_string());
    }
    return v;
}

BelowResult below(const UniformSet& p, const UniformSet& q,
                  const std::vector<SymbolicReal>& probes) {
    BelowResult res;
    // condition one is decided exactly on descriptors
    if (!p.proj().subset_of(q.proj()) && !q.proj().subset_of(p.proj()))
        throw Error("internal: domain descriptors are always comparable");
    std::size_t shared = 0;
    for (const auto& x : probes) {
        auto vp = p.value_at(x);
        auto vq = q.value_at(x);
        if (!vp || !vq) continue;
        ++shared;
        if (!(*vp < *vq)) {
            res.verdict = BelowVerdict::Fails;
            res.witness = "probe " + x.key() + ": " + vp->to_string() + " !< " + vq->to_string();
            return res;
        }
    }
    res.verdict = shared == 0 ? BelowVerdict::Vacuous : BelowVerdict::Holds;
    return res;
}

bool below_via_middle(const UniformSet& p, const UniformSet& u, const UniformSet& q) {
    bool cond1 = p.proj().subset_of(q.proj()) || q.proj().subset_of(p.proj());
    bool cond3 = p.proj().subset_of(u.proj()) || q.proj().subset_of(u.proj());
    return cond1 && cond3;
}

// ---------------------------------------------------------------------------
// Serialization of uniform sets
// ---------------------------------------------------------------------------

nlohmann::json UniformSet::to_json() const {
    nlohmann::json sem;
    switch (impl_->tag) {
        case SemanticTag::U: sem = {{"u", impl_->level.to_string()}}; break;
        case SemanticTag::Restricted:
            sem = {{"restricted",
                    {{"cut", impl_->level.to_string()}, {"base", wrap_set(impl_->base).to_json()}}}};
            break;
        case SemanticTag::Shifted:
            sem = {{"shifted",
                    {{"xi", impl_->level.to_string()}, {"base", wrap_set(impl_->base).to_json()}}}};
            break;
        case SemanticTag::Trimmed:
            sem = {{"trimmed", wrap_set(impl_->base).to_json()}};
            break;
    }
    return {{"mc", impl_->mc.to_json()},
            {"semantic", sem},
            {"proj", impl_->proj.level.to_string()}};
}

UniformSet UniformSet::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("semantic"))
        throw ParseError("uniform set document needs a semantic tag");
    const auto& sem = j["semantic"];
    UniformSet result = build_u(Ordinal());
    if (sem.contains("u")) {
        result = build_u(Ordinal::parse(sem["u"].get<std::string>()));
    } else if (sem.contains("restricted")) {
        result = restrict_to_d(from_json(sem["restricted"]["base"]),
                               Ordinal::parse(sem["restricted"]["cut"].get<std::string>()));
    } else if (sem.contains("shifted")) {
        result = shift_between(from_json(sem["shifted"]["base"]),
                               Ordinal::parse(sem["shifted"]["xi"].get<std::string>()));
    } else if (sem.contains("trimmed")) {
        result = trimmed(from_json(sem["trimmed"]));
    } else {
        throw ParseError("unknown semantic tag: " + sem.dump());
    }
    // cross-validate the declared projection when present
    if (j.contains("proj") && !j["proj"].is_null()) {
        Ordinal declared = Ordinal::parse(j["proj"].get<std::string>());
        if (declared != result.proj().level)
            throw ParseError("uniform set document declares projection D_" + declared.to_string() +
                             " but reconstructs to D_" + result.proj().level.to_string());
    }
    return result;
}

bool UniformSet::operator==(const UniformSet& o) const { return to_json() == o.to_json(); }

std::string UniformSet::describe() const {
    switch (impl_->tag) {
        case SemanticTag::U: return "U(" + impl_->level.to_string() + ")";
        case SemanticTag::Restricted:
            return wrap_set(impl_->base).describe() + "|D(" + impl_->level.to_string() + ")";
        case SemanticTag::Shifted:
            return "S(" + impl_->level.to_string() + ";" + wrap_set(impl_->base).describe() + ")";
        case SemanticTag::Trimmed: return wrap_set(impl_->base).describe();
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

struct Chain::Impl {
    Ordinal length;
    ChainStrategy strategy = ChainStrategy::Direct;

    std::mutex mu;
    std::optional<OrdinalEnumerator> source;  // Interleaved only
    std::vector<Ordinal> nus;
    std::vector<Ordinal> partial;  // partial[0] = 0
    std::map<std::string, UniformSet> elements;
    std::map<std::size_t, Chain> subchains;
};

const Ordinal& Chain::length() const { return impl_->length; }
ChainStrategy Chain::strategy() const { return impl_->strategy; }

Chain build_chain(const Ordinal& mu, ChainStrategy strategy) {
    if (mu.is_zero()) throw InvalidInputError("a chain needs positive length");
    Chain c;
    c.impl_ = std::make_shared<Chain::Impl>();
    c.impl_->length = mu;
    c.impl_->strategy = strategy;
    if (strategy == ChainStrategy::Interleaved) {
        c.impl_->source.emplace(mu);
        c.impl_->partial.push_back(Ordinal());
    }
    return c;
}

void Chain::ensure_covers(const Ordinal& position) const {
    if (impl_->strategy == ChainStrategy::Direct) return;
    std::lock_guard<std::mutex> g(impl_->mu);
    while (!(impl_->partial.back() > position)) {
        auto nu = impl_->source->next();
        if (!nu)
            throw InsufficientEnumerationError(
                "enumeration exhausted before covering position " + position.to_string());
        impl_->nus.push_back(*nu);
        impl_->partial.push_back(
            Ordinal::add(impl_->partial.back(), Ordinal::add(Ordinal::from_int(1), *nu)));
    }
}

Chain::Placement Chain::locate(const Ordinal& position) const {
    if (!(position < impl_->length))
        throw InvalidInputError("position " + position.to_string() + " is beyond the chain length");
    if (impl_->strategy == ChainStrategy::Direct)
        throw InvalidInputError("direct chains have no interleaving placements");
    ensure_covers(position);
    std::lock_guard<std::mutex> g(impl_->mu);
    std::size_t step = 0;
    for (std::size_t i = 1; i < impl_->partial.size(); ++i) {
        if (impl_->partial[i] <= position)
            step = i;
        else
            break;
    }
    Ordinal delta = Ordinal::subtract_left(impl_->partial[step], position);
    Placement p;
    p.step = step;
    if (delta.is_zero()) return p;
    p.is_base_element = false;
    p.insertion_index = delta.is_finite() ? Ordinal::from_int(delta.finite_value() - 1) : delta;
    return p;
}

Ordinal Chain::position_of(const Placement& p) const {
    if (impl_->strategy == ChainStrategy::Direct)
        throw InvalidInputError("direct chains have no interleaving placements");
    std::lock_guard<std::mutex> g(impl_->mu);
    if (p.step >= impl_->nus.size()) throw InvalidInputError("placement step not materialized");
    if (p.is_base_element) return impl_->partial[p.step];
    if (!(p.insertion_index < impl_->nus[p.step]))
        throw InvalidInputError("insertion index beyond the step's domain");
    return Ordinal::add(impl_->partial[p.step],
                        Ordinal::add(Ordinal::from_int(1), p.insertion_index));
}

std::vector<Ordinal> Chain::nus() const {
    std::lock_guard<std::mutex> g(impl_->mu);
    return impl_->nus;
}

std::vector<Ordinal> Chain::partial_sums() const {
    std::lock_guard<std::mutex> g(impl_->mu);
    return impl_->partial;
}

UniformSet Chain::at(const Ordinal& position) const {
    if (!(position < impl_->length))
        throw InvalidInputError("position " + position.to_string() + " is beyond the chain length");
    if (impl_->strategy == ChainStrategy::Direct) return build_u(position);

    std::string key = position.to_string();
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        auto it = impl_->elements.find(key);
        if (it != impl_->elements.end()) return it->second;
    }
    Placement p = locate(position);
    UniformSet elem = build_u(Ordinal());
    if (p.is_base_element) {
        Ordinal xi = Ordinal::from_int(p.step);
        elem = UniformSet::trimmed(build_u(xi));
    } else {
        Ordinal xi = Ordinal::from_int(p.step);
        Ordinal nu;
        {
            std::lock_guard<std::mutex> g(impl_->mu);
            nu = impl_->nus[p.step];
        }
        Chain sub;
        {
            std::lock_guard<std::mutex> g(impl_->mu);
            auto it = impl_->subchains.find(p.step);
            if (it != impl_->subchains.end()) sub = it->second;
        }
        if (!sub.impl_) {
            ChainStrategy strat =
                nu.is_finite() ? ChainStrategy::Direct : ChainStrategy::Interleaved;
            sub = build_chain(nu, strat);
            std::lock_guard<std::mutex> g(impl_->mu);
            impl_->subchains.emplace(p.step, sub);
        }
        UniformSet f = sub.at(p.insertion_index);
        UniformSet q = restrict_to_d(f, xi.successor());
        elem = UniformSet::trimmed(shift_between(q, xi));
    }
    std::lock_guard<std::mutex> g(impl_->mu);
    impl_->elements.emplace(std::move(key), elem);
    return elem;
}

std::vector<Ordinal> sample_positions(const Ordinal& mu, std::size_t count) {
    std::vector<Ordinal> out;
    auto pre = enumerate_below(mu, count);
    out = pre.values;
    if (mu.is_successor()) out.push_back(mu.predecessor());
    std::sort(out.begin(), out.end(), [](const Ordinal& a, const Ordinal& b) { return a < b; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.size() > count) out.resize(count);
    return out;
}

nlohmann::json Chain::to_json() const {
    // canonical element sample: the first eight enumerated positions
    std::vector<Ordinal> positions = sample_positions(impl_->length, 8);
    nlohmann::json elems = nlohmann::json::array();
    for (const auto& p : positions)
        elems.push_back({{"position", p.to_string()}, {"set", at(p).to_json()}});
    nlohmann::json audit;
    if (impl_->strategy == ChainStrategy::Interleaved) {
        // canonical prefix: exactly enough steps to cover the sampled
        // positions, independent of whatever else has been materialized
        const Ordinal& deepest = positions.back();
        ensure_covers(deepest);
        std::lock_guard<std::mutex> g(impl_->mu);
        std::size_t keep = impl_->partial.size();
        for (std::size_t i = 1; i < impl_->partial.size(); ++i) {
            if (impl_->partial[i] > deepest) {
                keep = i;
                break;
            }
        }
        nlohmann::json nus = nlohmann::json::array();
        for (std::size_t i = 0; i < keep; ++i) nus.push_back(impl_->nus[i].to_string());
        nlohmann::json sums = nlohmann::json::array();
        for (std::size_t i = 0; i <= keep; ++i) sums.push_back(impl_->partial[i].to_string());
        audit = {{"nus", nus}, {"partial_sums", sums}, {"cut", impl_->length.to_string()}};
    } else {
        audit = {{"cut", impl_->length.to_string()}};
    }
    return {{"length", impl_->length.to_string()},
            {"strategy", impl_->strategy == ChainStrategy::Direct ? "direct" : "interleaved"},
            {"audit", audit},
            {"elements", elems}};
}

Chain Chain::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("length") || !j.contains("strategy"))
        throw ParseError("chain document needs length and strategy");
    Ordinal mu = Ordinal::parse(j["length"].get<std::string>());
    std::string strat = j["strategy"].get<std::string>();
    if (strat != "direct" && strat != "interleaved")
        throw ParseError("unknown chain strategy: " + strat);
    Chain c = build_chain(mu, strat == "direct" ? ChainStrategy::Direct
                                                : ChainStrategy::Interleaved);
    if (j.contains("elements")) {
        for (const auto& e : j["elements"]) {
            Ordinal pos = Ordinal::parse(e.at("position").get<std::string>());
            UniformSet declared = UniformSet::from_json(e.at("set"));
            if (!(c.at(pos) == declared))
                throw ParseError("chain document element at position " + pos.to_string() +
                                 " does not match its reconstruction");
        }
    }
    return c;
}

bool Chain::operator==(const Chain& o) const { return to_json() == o.to_json(); }

} // namespace ordchain
