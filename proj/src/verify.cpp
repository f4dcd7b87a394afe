#include "ordchain/verify.hpp"

#include <algorithm>

#include "ordchain/errors.hpp"
#include "ordchain/sieve.hpp"

namespace ordchain {

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9E3779B97f4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Ordinal O(const char* s) { return Ordinal::parse(s); }

} // namespace

ProbePlan default_probe_plan(const Ordinal& mu, std::uint64_t seed, std::size_t min_probes) {
    ProbePlan plan;
    plan.seed = seed;
    std::uint64_t state = seed ^ 0xC0FFEE123456789ull;

    std::vector<Ordinal> lattice;
    for (const char* s : {"1", "2", "3", "5", "w", "w+1", "w+3", "w*2", "w*2+1", "w*3", "w^2",
                          "w^2+1", "w^2+w", "w^2+w*3+2"}) {
        Ordinal nu = O(s);
        if (nu <= mu) lattice.push_back(nu);
    }
    lattice.push_back(mu);
    if (!mu.is_finite()) lattice.push_back(Ordinal::add(mu, O("w")));

    // canonical witnesses
    for (const auto& nu : lattice) plan.reals.push_back(canonical_wo_set(nu, Rat(0), Rat(1)));
    // spoilers: witnesses polluted by descending tails, and bare spoilers
    for (std::size_t i = 0; i < lattice.size(); i += 2) {
        std::vector<Block> blocks;
        blocks.push_back(WoSetBlock{lattice[i], Rat(0), Rat(1)});
        blocks.push_back(DescendingLadderBlock{Rat(2), Rat(3)});
        plan.reals.push_back(SymbolicReal(blocks));
    }
    plan.reals.push_back(SymbolicReal({DescendingLadderBlock{Rat(0), Rat(1)}}));
    plan.reals.push_back(SymbolicReal(
        {AscendingLadderBlock{Rat(0), Rat(1)}, DescendingLadderBlock{Rat(1), Rat(2)}}));
    plan.reals.push_back(SymbolicReal());
    plan.reals.push_back(SymbolicReal({AscendingLadderBlock{Rat(0), Rat(1)},
                                       FinitePointsBlock{{Rat(2), Rat(3)}}}));

    // seeded finite sets over small rationals
    while (plan.reals.size() < min_probes) {
        std::size_t n = 1 + splitmix(state) % 6;
        std::vector<Rat> pts;
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t num = static_cast<std::int64_t>(splitmix(state) % 19) - 9;
            std::int64_t den = 1 + static_cast<std::int64_t>(splitmix(state) % 7);
            pts.push_back(Rat(num, den));
        }
        plan.reals.push_back(SymbolicReal({FinitePointsBlock{std::move(pts)}}));
    }

    // per-probe windows: leading segment elements plus fixed decoys
    for (const auto& z : plan.reals) {
        std::vector<Rat> w = {Rat(0), Rat(1, 2), Rat(2)};
        auto rep = z.initial_segment();
        for (const char* xs : {"0", "1", "2", "w"}) {
            auto e = rep.element_at(O(xs));
            if (e) w.push_back(*e);
        }
        std::sort(w.begin(), w.end());
        w.erase(std::unique(w.begin(), w.end()), w.end());
        plan.windows.push_back(std::move(w));
    }
    return plan;
}

namespace {

struct ElementSample {
    Ordinal position;
    UniformSet set;
    std::vector<std::optional<Rat>> values;  // per probe, memoized
};

std::vector<ElementSample> sample_elements(const Chain& chain, const ProbePlan& plan) {
    std::vector<ElementSample> out;
    for (const auto& pos : sample_positions(chain.length(), plan.position_budget)) {
        ElementSample s{pos, chain.at(pos), {}};
        s.values.reserve(plan.reals.size());
        for (const auto& z : plan.reals) s.values.push_back(s.set.value_at(z));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

VerificationReport verify_chain(const Chain& chain, const ProbePlan& plan) {
    VerificationReport rep;
    std::vector<ElementSample> elems = sample_elements(chain, plan);
    for (const auto& e : elems) rep.positions.push_back(e.position.to_string());

    // one encoding per probe; digit queries memoize inside it
    std::vector<BinaryExpansion> encodings;
    encodings.reserve(plan.reals.size());
    for (const auto& z : plan.reals) encodings.push_back(encode_real(z));

    // uniformity and oracle agreement against the structural multicodes
    for (const auto& e : elems) {
        for (std::size_t i = 0; i < plan.reals.size(); ++i) {
            const auto& v = e.values[i];
            std::vector<Rat> window = plan.windows[i];
            if (v) window.push_back(*v);
            std::sort(window.begin(), window.end());
            window.erase(std::unique(window.begin(), window.end()), window.end());
            std::size_t hits = 0;
            for (const auto& r : window) {
                bool structural = e.set.multicode().eval(encodings[i], r);
                bool semantic = v && *v == r;
                ++rep.oracle_checks;
                if (structural != semantic) {
                    ++rep.oracle_disagreements;
                    rep.uniformity_ok = false;
                    rep.uniformity_witnesses.push_back(
                        "position " + e.position.to_string() + ", probe " + std::to_string(i) +
                        ", ordinate " + r.to_string() + ": structural=" +
                        (structural ? "1" : "0") + " semantic=" + (semantic ? "1" : "0"));
                }
                if (structural) ++hits;
            }
            if (hits > 1) {
                rep.uniformity_ok = false;
                rep.uniformity_witnesses.push_back("position " + e.position.to_string() +
                                                   ", probe " + std::to_string(i) +
                                                   ": two structural witnesses in the window");
            }
        }
    }

    // pairwise order on sampled positions
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = i + 1; j < elems.size(); ++j) pairs.push_back({i, j});
    rep.pairs_available = pairs.size();
    if (pairs.size() > plan.pair_budget) {
        std::uint64_t state = plan.seed ^ 0xFEEDFACE5EEDull;
        std::vector<std::pair<std::size_t, std::size_t>> chosen;
        for (std::size_t k = 0; k < plan.pair_budget; ++k)
            chosen.push_back(pairs[splitmix(state) % pairs.size()]);
        pairs = std::move(chosen);
    }
    for (const auto& [i, j] : pairs) {
        ++rep.pairs_checked;
        bool shared = false;
        for (std::size_t t = 0; t < plan.reals.size(); ++t) {
            const auto& a = elems[i].values[t];
            const auto& b = elems[j].values[t];
            if (!a || !b) continue;
            shared = true;
            ++rep.pointwise_comparisons;
            if (!(*a < *b)) {
                rep.ordering_ok = false;
                rep.ordering_witnesses.push_back(
                    "positions " + elems[i].position.to_string() + " < " +
                    elems[j].position.to_string() + ", probe " + std::to_string(t) + ": " +
                    a->to_string() + " !< " + b->to_string());
            }
        }
        if (!shared) ++rep.pairs_vacuous;
    }

    // projection comparability: the descriptors decide which inclusion of
    // condition one holds (it may go either way in an assembled chain);
    // probed memberships must never contradict the decided direction
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = i + 1; j < elems.size(); ++j) {
            const auto& a = elems[i];
            const auto& b = elems[j];
            bool b_in_a = b.set.proj().subset_of(a.set.proj());
            bool a_in_b = a.set.proj().subset_of(b.set.proj());
            if (!b_in_a && !a_in_b) {
                rep.projection_ok = false;
                rep.projection_witnesses.push_back("descriptors at " + a.position.to_string() +
                                                   "," + b.position.to_string() +
                                                   " are incomparable");
                continue;
            }
            for (std::size_t t = 0; t < plan.reals.size(); ++t) {
                bool inside_a = a.values[t].has_value();
                bool inside_b = b.values[t].has_value();
                if ((b_in_a && inside_b && !inside_a) || (a_in_b && inside_a && !inside_b)) {
                    rep.projection_ok = false;
                    rep.projection_witnesses.push_back(
                        "probe " + std::to_string(t) + " contradicts the descriptor decision at " +
                        a.position.to_string() + "," + b.position.to_string());
                }
            }
        }
    // descriptor exactness on probes: membership in pr(P) iff the domain code admits it
    for (const auto& e : elems) {
        for (std::size_t t = 0; t < plan.reals.size(); ++t) {
            bool semantic = e.values[t].has_value();
            bool declared =
                plan.reals[t].initial_segment().order_type() > e.set.proj().level;
            if (semantic != declared) {
                rep.projection_ok = false;
                rep.projection_witnesses.push_back("probe " + std::to_string(t) + " at position " +
                                                   e.position.to_string() +
                                                   ": descriptor and section disagree");
            }
        }
    }

    // audit bookkeeping (interleaved only)
    if (chain.strategy() == ChainStrategy::Interleaved) {
        auto nus = chain.nus();
        auto sums = chain.partial_sums();
        Ordinal acc;
        if (sums.empty() || !(sums[0] == acc)) {
            rep.length_audit_ok = false;
            rep.audit_witnesses.push_back("partial sums must start at 0");
        }
        for (std::size_t i = 0; i < nus.size() && i + 1 < sums.size(); ++i) {
            acc = Ordinal::add(acc, Ordinal::add(Ordinal::from_int(1), nus[i]));
            if (!(sums[i + 1] == acc)) {
                rep.length_audit_ok = false;
                rep.audit_witnesses.push_back("partial sum " + std::to_string(i + 1) +
                                              " is not the fold of add over 1+nu");
            }
            if (!(sums[i] < sums[i + 1])) {
                rep.length_audit_ok = false;
                rep.audit_witnesses.push_back("partial sums not strictly increasing at " +
                                              std::to_string(i + 1));
            }
        }
        // position map: bijective and order preserving on the sample
        std::vector<std::pair<std::size_t, std::string>> seen;
        for (const auto& e : elems) {
            auto p = chain.locate(e.position);
            if (!(chain.position_of(p) == e.position)) {
                rep.length_audit_ok = false;
                rep.audit_witnesses.push_back("position map fails to invert at " +
                                              e.position.to_string());
            }
            std::string kind = p.is_base_element ? "base" : "ins:" + p.insertion_index.to_string();
            seen.push_back({p.step, kind});
        }
        for (std::size_t i = 0; i + 1 < seen.size(); ++i) {
            if (std::find(seen.begin() + static_cast<std::ptrdiff_t>(i) + 1, seen.end(), seen[i]) !=
                seen.end()) {
                rep.length_audit_ok = false;
                rep.audit_witnesses.push_back("position map repeats a source");
            }
        }
    }
    return rep;
}

nlohmann::json VerificationReport::to_json() const {
    return {{"uniformity", {{"ok", uniformity_ok}, {"witnesses", uniformity_witnesses}}},
            {"ordering",
             {{"ok", ordering_ok},
              {"pairs_checked", pairs_checked},
              {"pairs_available", pairs_available},
              {"pairs_vacuous", pairs_vacuous},
              {"pointwise_comparisons", pointwise_comparisons},
              {"witnesses", ordering_witnesses}}},
            {"projection_nesting", {{"ok", projection_ok}, {"witnesses", projection_witnesses}}},
            {"oracle_agreement",
             {{"checks", oracle_checks}, {"disagreements", oracle_disagreements}}},
            {"length_audit", {{"ok", length_audit_ok}, {"witnesses", audit_witnesses}}},
            {"positions", positions},
            {"all_pass", all_pass()}};
}

LayerDecomposition decompose_layers(const Chain& chain, const ProbePlan& plan) {
    LayerDecomposition out;
    std::vector<ElementSample> elems = sample_elements(chain, plan);
    out.per_probe_count.assign(plan.reals.size(), 0);
    for (std::size_t t = 0; t < plan.reals.size(); ++t) {
        std::optional<Rat> prev;
        std::size_t layer = 0;
        for (const auto& e : elems) {
            const auto& v = e.values[t];
            if (!v) continue;
            if (prev && !(*prev < *v))
                throw OrderingViolationError("probe " + std::to_string(t) +
                                             " has a non-increasing value sequence at position " +
                                             e.position.to_string());
            prev = v;
            if (out.layers.size() <= layer) out.layers.resize(layer + 1);
            out.layers[layer].emplace(t, *v);
            ++layer;
        }
        out.per_probe_count[t] = layer;
    }
    return out;
}

nlohmann::json LayerDecomposition::to_json() const {
    nlohmann::json layers_json = nlohmann::json::array();
    for (const auto& layer : layers) {
        nlohmann::json m = nlohmann::json::object();
        for (const auto& [probe, value] : layer) m[std::to_string(probe)] = value.to_string();
        layers_json.push_back(m);
    }
    return {{"layers", layers_json}, {"per_probe_count", per_probe_count}};
}

} // namespace ordchain
