#pragma once

// Batch front end. Subcommands: build-chain, eval, verify, decompose,
// export, import, encode-real, wo-set. Exit codes: 0 success, 1
// verification failure, 2 usage or input errors. Deterministic output for
// fixed inputs and seed; CHAINS_SEED serves as the seed fallback.

#include <ostream>
#include <string>
#include <vector>

namespace ordchain {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ordchain
