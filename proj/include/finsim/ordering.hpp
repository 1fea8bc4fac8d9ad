#pragma once

// The VM job queue: a mempool of admitted transactions plus the policy that
// turns it into an execution order. GasPriceThenArrival is the auction the
// sandwich adversary exploits; ArrivalOrder is the submission-order null
// hypothesis; RandomPermutation is a third point of comparison.

#include "finsim/state.hpp"
#include "finsim/txn.hpp"
#include "finsim/value.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <variant>
#include <vector>

namespace finsim {

struct ArrivalOrder {};
struct GasPriceThenArrival {};
struct RandomPermutation {
    std::uint64_t seed = 0;
};

using OrderingPolicy = std::variant<ArrivalOrder, GasPriceThenArrival, RandomPermutation>;

// Config strings: "arrival" | "gas_price" | "random:<seed>".
OrderingPolicy parse_ordering_policy(const std::string& text);
std::string ordering_policy_name(const OrderingPolicy& policy);

class Mempool {
public:
    // Duplicate txn ids are a caller bug.
    void add(Transaction txn);

    bool contains(std::uint64_t txn_id) const { return pending_.count(txn_id) != 0; }
    std::size_t size() const { return pending_.size(); }
    bool empty() const { return pending_.empty(); }

    // Deterministic prefix of the policy's total order; the mempool is not
    // mutated. Ties: ArrivalOrder by (arrival, txn id); GasPriceThenArrival
    // by price desc, then arrival, then txn id; RandomPermutation shuffles
    // the id-sorted contents with the policy seed.
    std::vector<Transaction> schedule(const OrderingPolicy& policy,
                                      std::size_t batch_size) const;

    // schedule() then remove the chosen transactions.
    std::vector<Transaction> take_batch(const OrderingPolicy& policy, std::size_t batch_size);

    void remove(std::uint64_t txn_id) { pending_.erase(txn_id); }

    const std::map<std::uint64_t, Transaction>& pending() const { return pending_; }

private:
    std::map<std::uint64_t, Transaction> pending_;
};

// f;g;f*: front, victim, back. Prices straddle the victim's so the gas-price
// auction schedules the three contiguously.
struct SandwichPlan {
    Transaction front;
    Transaction victim;
    Transaction back;
};

struct SandwichOpts {
    std::uint64_t front_txn_id = 0;
    std::uint64_t back_txn_id = 0;
    Value epsilon = 1;              // gas-price straddle, clamped at zero below
    std::uint32_t exit_bps = 10'000;  // fraction of the acquired position sold back
    Tick arrival = 0;
    std::uint64_t gas_limit = 200;
};

// Builds the straddle around a swap victim. The back leg size is what the
// front leg acquires when executed first against state_view.
SandwichPlan inject_sandwich(std::uint64_t adversary_account, const Transaction& victim,
                             const State& state_view, const SandwichOpts& opts);

struct ExecStep {
    Transaction txn;
    ExecOutcome outcome;
};

struct ExecTrace {
    State initial;
    std::vector<ExecStep> steps;

    const State& final_state() const {
        return steps.empty() ? initial : steps.back().outcome.new_state;
    }
};

ExecTrace run_batch(const std::vector<Transaction>& batch, const State& initial,
                    const VmSemantics& semantics = {});

// Final minus initial numeraire balance; gas paid is included, unexited pool
// holdings are not valued.
BigInt attacker_profit(const ExecTrace& trace, std::uint64_t adversary_account);

} // namespace finsim
