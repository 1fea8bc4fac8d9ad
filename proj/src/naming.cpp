#include "finsim/naming.hpp"

#include "finsim/errors.hpp"

#include <string>
#include <unordered_set>

namespace finsim {

State evaluate(const NaturalName& name, const TxnLookup& registry, const State& base_state,
               const VmSemantics& semantics) {
    std::unordered_set<std::uint64_t> seen;
    State s = base_state;
    for (std::uint64_t id : name.suffix) {
        if (!seen.insert(id).second) {
            throw UnresolvableName("duplicate transaction id " + std::to_string(id) +
                                   " in natural name");
        }
        const std::optional<Transaction> txn = registry(id);
        if (!txn) {
            throw UnresolvableName("transaction id " + std::to_string(id) +
                                   " does not resolve");
        }
        s = execute(*txn, s, semantics).new_state;
    }
    return s;
}

bool commutes_at(const Transaction& f, const Transaction& g, const State& s,
                 const VmSemantics& semantics) {
    const State fg = execute(g, execute(f, s, semantics).new_state, semantics).new_state;
    const State gf = execute(f, execute(g, s, semantics).new_state, semantics).new_state;
    return commit(fg) == commit(gf);
}

} // namespace finsim
