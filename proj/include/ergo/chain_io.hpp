#pragma once

#include "ergo/chain.hpp"

#include <iosfwd>
#include <string>

// JSON serialization of chains. The on-disk format is
//   {"labels": ["a", ...], "kernel": [[row], [row], ...]}
// with "labels" optional. Rows whose sum is off 1 by more than 1e-9 are
// rejected; smaller deviations are renormalized on load.

namespace ergo {

FiniteChain load_chain(std::istream& in);
FiniteChain load_chain_file(const std::string& path);

// serialized with the chain's labels when present
std::string chain_to_json(const FiniteChain& chain);
void save_chain_file(const FiniteChain& chain, const std::string& path);

}  // namespace ergo
