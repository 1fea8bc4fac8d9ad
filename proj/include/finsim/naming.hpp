#pragma once

// Natural names: a state is identified by a base checkpoint plus an ordered
// suffix of transaction ids. Names are not unique (commuting transactions
// yield the same state under either order), which is exactly why commitments
// rather than names are compared.

#include "finsim/state.hpp"
#include "finsim/txn.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace finsim {

struct NaturalName {
    std::uint64_t base_checkpoint = 0;  // 0 = genesis
    std::vector<std::uint64_t> suffix;  // txn ids, unique, applied left to right
};

// Registry indirection: a body may be unfetchable (callData withheld), which
// surfaces here as nullopt.
using TxnLookup = std::function<std::optional<Transaction>(std::uint64_t)>;

// Left-to-right fold of full execute() semantics over the suffix.
State evaluate(const NaturalName& name, const TxnLookup& registry, const State& base_state,
               const VmSemantics& semantics = {});

// f and g commute at s when both application orders land on the same
// commitment.
bool commutes_at(const Transaction& f, const Transaction& g, const State& s,
                 const VmSemantics& semantics = {});

} // namespace finsim
