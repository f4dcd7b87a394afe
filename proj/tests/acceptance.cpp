// Acceptance suite: runs every gate at its pinned tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any gate fails.

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "ordchain/borel_code.hpp"
#include "ordchain/errors.hpp"
#include "ordchain/hmap.hpp"
#include "ordchain/qindex.hpp"
#include "ordchain/sieve.hpp"
#include "ordchain/verify.hpp"

using namespace ordchain;

namespace {

Ordinal O(const std::string& s) { return Ordinal::parse(s); }

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9E3779B97f4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Rat small_rat(std::uint64_t& state) {
    std::int64_t num = static_cast<std::int64_t>(splitmix(state) % 41) - 20;
    std::int64_t den = 1 + static_cast<std::int64_t>(splitmix(state) % 12);
    return Rat(num, den);
}

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail
              << std::endl;
    if (!pass) ++failures;
}

// ---------------------------------------------------------------------------
// 1. chain validity over both strategies
// ---------------------------------------------------------------------------

struct BuiltChain {
    std::string mu_text;
    ChainStrategy strategy;
    Chain chain;
    ProbePlan plan;
    VerificationReport report;
};

std::vector<BuiltChain> gate_chain_validity() {
    const std::vector<std::string> lengths = {"5", "w", "w+3", "w*2", "w^2", "w^2+w*3+2"};
    std::vector<BuiltChain> built;
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::ostringstream detail;
    std::size_t min_pairs = SIZE_MAX, min_probes = SIZE_MAX;
    for (const auto& mu_text : lengths) {
        for (auto strat : {ChainStrategy::Direct, ChainStrategy::Interleaved}) {
            Ordinal mu = O(mu_text);
            Chain c = build_chain(mu, strat);
            ProbePlan plan = default_probe_plan(mu, 1, 50);
            plan.pair_budget = 500;
            VerificationReport rep = verify_chain(c, plan);
            bool ok = rep.all_pass();
            bool spoilers = false;
            for (const auto& z : plan.reals) spoilers = spoilers || !z.well_ordered_everywhere();
            // pair budget: at least 500 deterministic pairs, or every pair
            // the chain has when fewer than 500 exist
            bool enough_pairs =
                rep.pairs_checked >= std::min<std::size_t>(rep.pairs_available, 500);
            ok = ok && spoilers && plan.reals.size() >= 50 && enough_pairs;
            min_pairs = std::min(min_pairs, rep.pairs_checked);
            min_probes = std::min(min_probes, plan.reals.size());
            if (!ok) {
                pass = false;
                detail << " [" << mu_text
                       << (strat == ChainStrategy::Direct ? "/direct" : "/interleaved")
                       << " failed: " << rep.to_json().dump() << "]";
            }
            built.push_back(BuiltChain{mu_text, strat, c, plan, rep});
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    pass = pass && secs < 60.0;
    std::ostringstream line;
    line << "chain validity: 6 lengths x 2 strategies all-pass, >=" << min_probes
         << " probes with spoilers, 500 pairs (or every existing pair on short chains, min "
         << min_pairs << "), exact, runtime " << secs << "s < 60s" << detail.str();
    report(1, pass, line.str());
    return built;
}

// ---------------------------------------------------------------------------
// 2. oracle equivalence for selector and domain codes
// ---------------------------------------------------------------------------

void gate_oracle_equivalence() {
    std::vector<Ordinal> levels;
    for (std::uint64_t k = 0; k < 10; ++k) levels.push_back(Ordinal::from_int(k));
    for (std::uint64_t k = 0; k < 10; ++k)
        levels.push_back(Ordinal::add(O("w"), Ordinal::from_int(k)));
    for (std::uint64_t k = 0; k < 9; ++k)
        levels.push_back(Ordinal::add(O("w*2"), Ordinal::from_int(k)));
    levels.push_back(O("w*3"));

    ProbePlan plan = default_probe_plan(O("w*3"), 2, 100);
    std::size_t checks = 0, disagreements = 0;
    std::vector<BorelMultiCode> mcs;
    for (const auto& xi : levels) mcs.push_back(BorelMultiCode::u(xi));
    for (std::size_t i = 0; i < plan.reals.size(); ++i) {
        const SymbolicReal& z = plan.reals[i];
        BinaryExpansion enc = encode_real(z);
        auto rep = z.initial_segment();
        for (std::size_t li = 0; li < levels.size(); ++li) {
            const Ordinal& xi = levels[li];
            auto want = rep.element_at(xi);
            std::vector<Rat> window = plan.windows[i];
            if (want) window.push_back(*want);
            for (const auto& r : window) {
                bool via_code = mcs[li].eval(enc, r);
                bool via_oracle = want && *want == r;
                ++checks;
                if (via_code != via_oracle) ++disagreements;
            }
            bool in_domain_code = eval_code(d_code(xi), enc);
            bool in_domain_oracle = rep.order_type() > xi;
            ++checks;
            if (in_domain_code != in_domain_oracle) ++disagreements;
        }
    }
    std::ostringstream line;
    line << "oracle equivalence: " << levels.size() << " levels up to w*3, " << plan.reals.size()
         << " probes, " << checks << " checks, " << disagreements << " disagreements (required 0)";
    report(2, disagreements == 0 && levels.size() >= 30 && plan.reals.size() >= 100, line.str());
}

// ---------------------------------------------------------------------------
// 3. sieve round trip
// ---------------------------------------------------------------------------

SymbolicReal generated_descriptor(std::uint64_t& state) {
    std::vector<Block> blocks;
    std::size_t n = 1 + splitmix(state) % 3;
    for (std::size_t b = 0; b < n; ++b) {
        switch (splitmix(state) % 4) {
            case 0: {
                std::vector<Rat> pts;
                std::size_t k = 1 + splitmix(state) % 5;
                for (std::size_t i = 0; i < k; ++i) pts.push_back(small_rat(state));
                blocks.push_back(FinitePointsBlock{std::move(pts)});
                break;
            }
            case 1: {
                Rat a = small_rat(state);
                blocks.push_back(
                    AscendingLadderBlock{a, a + Rat(1 + static_cast<std::int64_t>(splitmix(state) % 3))});
                break;
            }
            case 2: {
                Rat a = small_rat(state);
                blocks.push_back(
                    DescendingLadderBlock{a, a + Rat(1 + static_cast<std::int64_t>(splitmix(state) % 3))});
                break;
            }
            default: {
                const char* types[] = {"3", "w", "w+2", "w*2", "w^2"};
                Rat a = small_rat(state);
                blocks.push_back(WoSetBlock{O(types[splitmix(state) % 5]), a, a + Rat(1)});
                break;
            }
        }
    }
    return SymbolicReal(std::move(blocks));
}

void gate_sieve_round_trip() {
    bool pass = true;
    std::ostringstream detail;

    BinaryExpansion empty = encode_real(SymbolicReal());
    if (!(empty.is_exact() && empty.exact_value() == Rat(2, 3))) {
        pass = false;
        detail << " [encode(empty) != 2/3]";
    }
    BinaryExpansion full = encode_full_rationals();
    if (!(full.is_exact() && full.exact_value() == Rat(0))) {
        pass = false;
        detail << " [encode(Q) != 0]";
    }

    std::vector<Rat> window;
    for (std::uint64_t n = 0; n < 50; ++n) window.push_back(rat_of_index(n));
    std::uint64_t state = 0xD15EA5E;
    std::size_t checks = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        SymbolicReal z = generated_descriptor(state);
        BinaryExpansion x = encode_real(z);
        for (const auto& r : window) {
            ++checks;
            if (decode_sieve(x, r) != z.contains(r)) {
                pass = false;
                detail << " [descriptor " << i << " at " << r.to_string() << "]";
            }
        }
    }
    std::ostringstream line;
    line << "sieve round trip: 200 descriptors x 50-rational windows (" << checks
         << " exact membership checks), encode(empty)=2/3, encode(Q)=0" << detail.str();
    report(3, pass, line.str());
}

// ---------------------------------------------------------------------------
// 4. h-map properties
// ---------------------------------------------------------------------------

void gate_hmap() {
    std::uint64_t state = 0xAB1E;
    bool pass = true;
    std::size_t trials = 10000;
    for (std::size_t i = 0; i < trials; ++i) {
        Rat u = small_rat(state);
        Rat v = u + Rat(1 + static_cast<std::int64_t>(splitmix(state) % 5),
                        1 + static_cast<std::int64_t>(splitmix(state) % 3));
        std::int64_t a = 1 + static_cast<std::int64_t>(splitmix(state) % 30);
        std::int64_t b = 1 + static_cast<std::int64_t>(splitmix(state) % 30);
        if (a == b) b = a + 1;
        if (a > b) std::swap(a, b);
        Rat y1 = u + (v - u) * Rat(a, 32);
        Rat y2 = u + (v - u) * Rat(b, 32);
        Rat t1 = h_map(u, v, y1);
        Rat t2 = h_map(u, v, y2);
        if (!(t1 < t2)) pass = false;                // strict monotonicity
        if (!(h_inv(u, v, t1) == y1)) pass = false;  // exact inversion
        if (!(h_inv(u, v, t2) == y2)) pass = false;
        Rat t = small_rat(state);
        Rat y = h_inv(u, v, t);
        if (!(u < y && y < v)) pass = false;  // lands inside the band
        if (!(h_map(u, v, y) == t)) pass = false;
    }
    std::ostringstream line;
    line << "h-map: " << trials
         << " random rational triples, strict monotonicity + exact two-sided inversion + "
            "rational-in/rational-out";
    report(4, pass, line.str());
}

// ---------------------------------------------------------------------------
// 5. length audit of interleaved builds
// ---------------------------------------------------------------------------

void gate_length_audit(const std::vector<BuiltChain>& built) {
    bool pass = true;
    std::ostringstream detail;
    std::size_t builds = 0;
    for (const auto& b : built) {
        if (b.strategy != ChainStrategy::Interleaved) continue;
        ++builds;
        const Chain& c = b.chain;
        Ordinal mu = c.length();
        std::vector<Ordinal> positions = sample_positions(mu, 40);
        c.ensure_covers(positions.back());
        auto nus = c.nus();
        auto sums = c.partial_sums();
        Ordinal acc;
        for (std::size_t i = 0; i < nus.size(); ++i) {
            acc = Ordinal::add(acc, Ordinal::add(Ordinal::from_int(1), nus[i]));
            if (!(sums[i + 1] == acc) || !(sums[i] < sums[i + 1])) {
                pass = false;
                detail << " [" << b.mu_text << ": fold mismatch at " << i << "]";
            }
        }
        // truncation at mu: either the prefix total already reached mu, or
        // every sampled position below mu is covered by the prefix
        Ordinal total = sums.back();
        Ordinal truncated = total >= mu ? mu : total;
        bool covered = positions.back() < total;
        if (!(truncated == mu || covered)) {
            pass = false;
            detail << " [" << b.mu_text << ": truncated fold misses mu]";
        }
        std::set<std::string> sources;
        for (const auto& p : positions) {
            auto place = c.locate(p);
            if (!(c.position_of(place) == p)) {
                pass = false;
                detail << " [" << b.mu_text << ": locate/position_of disagree at " << p.to_string()
                       << "]";
            }
            std::string key = std::to_string(place.step) + "/" +
                              (place.is_base_element ? "base" : place.insertion_index.to_string());
            if (!sources.insert(key).second) {
                pass = false;
                detail << " [" << b.mu_text << ": position map repeats a source]";
            }
        }
    }
    std::ostringstream line;
    line << "length audit: " << builds
         << " interleaved builds, exact fold of add over (1+nu), truncation reaches mu, position "
            "map bijective on 40 sampled positions each"
         << detail.str();
    report(5, pass, line.str());
}

// ---------------------------------------------------------------------------
// 6. layer decomposition obeys the layer properties on probes
// ---------------------------------------------------------------------------

void gate_layers(const std::vector<BuiltChain>& built) {
    bool pass = true;
    std::size_t violations = 0;
    std::ostringstream detail;
    for (const auto& b : built) {
        LayerDecomposition d;
        try {
            d = decompose_layers(b.chain, b.plan);
        } catch (const OrderingViolationError& e) {
            pass = false;
            detail << " [" << b.mu_text << ": " << e.what() << "]";
            continue;
        }
        for (std::size_t xi = 0; xi + 1 < d.layers.size(); ++xi) {
            for (const auto& [probe, value] : d.layers[xi + 1]) {
                auto it = d.layers[xi].find(probe);
                if (it == d.layers[xi].end()) {
                    ++violations;  // projections must nest
                } else if (!(it->second < value)) {
                    ++violations;  // layers must be ordered
                }
            }
        }
    }
    std::ostringstream line;
    line << "layer decomposition: " << built.size()
         << " verified chains, layers uniform, ordered and projection-nested on probes, "
         << violations << " violations (required 0)" << detail.str();
    report(6, pass && violations == 0, line.str());
}

// ---------------------------------------------------------------------------
// 7. serialization round trip, determinism and the golden fixture
// ---------------------------------------------------------------------------

const char* kGoldenU0Multicode = R"({"cache":{},"mc":{"ctor":"u","xi":"0"}})";
const char* kGoldenU0Section =
    R"({"union":[{"union":[{"union":[{"family":{"child":{"family":{"child":{"leaf":[[{"idx":0},{"align1":[{"idx":1},1]}]]},"kind":"rationals-below","params":{"bound":{"align":[{"idx":0},1]},"decide":"ray"}}},"kind":"rationals-below","params":{"decide":"digit-cell","pos":1}}}]}]},{"union":[{"family":{"child":{"gen":"g-section"},"kind":"rationals-below","params":{"bound":{"lit":"0"},"decide":"sieve-range"}}}]}]})";

void gate_serialization() {
    bool pass = true;
    std::ostringstream detail;
    std::size_t objects = 0;

    if (serialize(BorelMultiCode::u(Ordinal())) != kGoldenU0Multicode) {
        pass = false;
        detail << " [golden multicode bytes changed]";
    }
    if (serialize(u_section_code(Ordinal(), Rat(0))) != kGoldenU0Section) {
        pass = false;
        detail << " [golden section bytes changed]";
    }

    std::vector<std::string> level_texts = {"0", "1", "2", "3", "5", "w", "w+1", "w+2", "w*2",
                                            "w*2+1", "w*3", "w^2", "w^2+1", "w^2+w", "w^{w}"};
    std::uint64_t state = 0x5EA1;
    std::set<std::string> seen;

    std::vector<BorelCode> codes;
    for (const auto& lt : level_texts) {
        for (int k = 0; k < 14; ++k) {
            Rat r(static_cast<std::int64_t>(2 * k + 1) - 13,
                  static_cast<std::int64_t>(k % 5) + 2);
            codes.push_back(u_section_code(O(lt), r));
        }
        codes.push_back(d_code(O(lt)));
        codes.push_back(e_code(O(lt)));
    }
    for (int k = 0; k < 160; ++k)
        codes.push_back(g_section_code(Rat(static_cast<std::int64_t>(k) - 80,
                                           static_cast<std::int64_t>(k % 7) + 1)));
    for (const auto& c : codes) {
        ++objects;
        std::string bytes = serialize(c);
        if (serialize(deserialize_code(bytes)) != bytes || serialize(c) != bytes) {
            pass = false;
            detail << " [code round trip broke]";
        }
        seen.insert(bytes);
    }

    std::vector<BorelMultiCode> mcs;
    for (const auto& lt : level_texts) {
        BorelMultiCode u = BorelMultiCode::u(O(lt));
        BorelMultiCode r = BorelMultiCode::restricted(u, O(lt).successor());
        mcs.push_back(u);
        mcs.push_back(r);
        mcs.push_back(BorelMultiCode::shifted(r, O(lt)));
        mcs.push_back(BorelMultiCode::restricted(r, Ordinal::add(O(lt), O("w"))));
    }
    mcs.push_back(BorelMultiCode::g());
    for (const auto& m : mcs) {
        ++objects;
        std::string bytes = serialize(m);
        if (serialize(deserialize_multicode(bytes)) != bytes || serialize(m) != bytes) {
            pass = false;
            detail << " [multicode round trip broke]";
        }
        seen.insert(bytes);
    }

    for (const auto& mu : {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "w", "w+1", "w+2",
                           "w+3", "w*2", "w*2+1", "w*2+2", "w*3", "w^2", "w^2+1", "w^2+w"}) {
        for (auto strat : {ChainStrategy::Direct, ChainStrategy::Interleaved}) {
            ++objects;
            Chain c = build_chain(O(mu), strat);
            std::string bytes = c.to_json().dump();
            Chain back = Chain::from_json(nlohmann::json::parse(bytes));
            if (back.to_json().dump() != bytes) {
                pass = false;
                detail << " [chain " << mu << " round trip broke]";
            }
            seen.insert(bytes);
        }
    }

    std::ostringstream line;
    line << "serialization: " << objects
         << " generated codes/multicodes/chains, byte-exact round trips, deterministic bytes ("
         << seen.size() << " distinct documents), golden fixture byte-identical" << detail.str();
    report(7, pass && objects >= 500, line.str());
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<BuiltChain> built = gate_chain_validity();
    gate_oracle_equivalence();
    gate_sieve_round_trip();
    gate_hmap();
    gate_length_audit(built);
    gate_layers(built);
    gate_serialization();
    auto t1 = std::chrono::steady_clock::now();
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT") << " ("
              << std::chrono::duration<double>(t1 - t0).count() << "s total)" << std::endl;
    return failures == 0 ? 0 : 1;
}
