#pragma once

// Verification harness: probe plans, machine-readable certification
// reports for chains, and the per-probe layer decomposition of a chain's
// union. Failures are report entries with concrete witnesses, never
// exceptions; reports are deterministic given (chain, plan).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ordchain/symbolic_real.hpp"
#include "ordchain/uniform_sets.hpp"

namespace ordchain {

struct ProbePlan {
    std::vector<SymbolicReal> reals;
    std::vector<std::vector<Rat>> windows;  // per probe, same length as reals
    std::size_t pair_budget = 500;
    std::size_t position_budget = 34;
    std::uint64_t seed = 0;
};

// Canonical witnesses below mu, spoilers with descending blocks, and
// seeded finite sets; deterministic in (mu, seed).
ProbePlan default_probe_plan(const Ordinal& mu, std::uint64_t seed = 0,
                             std::size_t min_probes = 50);

struct VerificationReport {
    bool uniformity_ok = true;
    std::vector<std::string> uniformity_witnesses;

    bool ordering_ok = true;
    std::size_t pairs_checked = 0;
    std::size_t pairs_available = 0;
    std::size_t pairs_vacuous = 0;
    std::size_t pointwise_comparisons = 0;
    std::vector<std::string> ordering_witnesses;

    bool projection_ok = true;
    std::vector<std::string> projection_witnesses;

    std::size_t oracle_checks = 0;
    std::size_t oracle_disagreements = 0;

    bool length_audit_ok = true;
    std::vector<std::string> audit_witnesses;

    std::vector<std::string> positions;  // sampled, ascending

    bool all_pass() const {
        return uniformity_ok && ordering_ok && projection_ok && oracle_disagreements == 0 &&
               length_audit_ok;
    }
    nlohmann::json to_json() const;
};

VerificationReport verify_chain(const Chain& chain, const ProbePlan& plan);

struct LayerDecomposition {
    // layer index -> (probe index -> section value)
    std::vector<std::map<std::size_t, Rat>> layers;
    std::vector<std::size_t> per_probe_count;  // finite mu_x over the sampled positions
    nlohmann::json to_json() const;
};

// Splits the union of the sampled chain elements into uniform layers:
// per probe, the k-th smallest section value lands in layer k. Throws
// OrderingViolationError if a probe's values do not increase along the
// chain (a broken chain).
LayerDecomposition decompose_layers(const Chain& chain, const ProbePlan& plan);

} // namespace ordchain
