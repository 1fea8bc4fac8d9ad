#pragma once

// Run measurements: one record per submitted transaction (the four finality
// ticks, outcome, position) plus run-level counters. The finality-chain
// validator enforces log <= order <= state <= checkpoint wherever the later
// shade was reached.

#include "finsim/digest.hpp"
#include "finsim/txn.hpp"
#include "finsim/value.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace finsim {

struct TxnRecord {
    std::uint64_t txn_id = 0;
    std::uint64_t sender = 0;
    std::string action;
    Tick arrival = 0;

    std::optional<std::string> wft_rejected;  // admission failure reason

    std::optional<std::uint64_t> batch_id;
    std::optional<std::uint64_t> order_position;
    std::optional<ExecStatus> status;
    std::uint64_t gas_used = 0;
    bool implicitly_aborted = false;  // dropped by the availability timeout

    std::optional<Tick> log_final;
    std::optional<Tick> order_final;
    std::optional<Tick> state_final;
    std::optional<Tick> checkpoint_final;
};

struct Counters {
    std::uint64_t safety_failures = 0;
    std::uint64_t slash_events = 0;
    std::uint64_t ambiguous_dr = 0;
    std::uint64_t order_finality_violations = 0;
    std::uint64_t liveness_stall_ticks = 0;
    std::uint64_t flipped_outcomes = 0;
    std::uint64_t wft_rejections = 0;
    std::uint64_t reorgs_applied = 0;
    std::uint64_t entries_dropped_by_reorg = 0;
    std::uint64_t dd_rounds = 0;
    std::uint64_t dr_rounds = 0;
    std::uint64_t optimistic_reverts = 0;
    std::uint64_t checkpoints_declared = 0;
    std::uint64_t checkpoints_finalized = 0;
    std::uint64_t gc_entries_dropped = 0;
    std::uint64_t gc_payloads_dropped = 0;
    std::uint64_t node_executions = 0;  // per-member batch runs, summed
    std::uint64_t executed_txns = 0;
    std::uint64_t gas_underpaid = 0;
    BigInt attacker_profit = 0;
};

struct Metrics {
    std::vector<TxnRecord> txns;  // kept sorted by txn_id
    Counters counters;
    Digest head_commitment;

    TxnRecord& record(std::uint64_t txn_id);

    // Mean committee/validator executions per executed transaction.
    double replication_factor() const;

    // Throws InvariantViolation on any out-of-order finality pair.
    void validate_finality_chain() const;

    std::string to_csv() const;
    std::string summary_json(const std::string& scenario_name, std::uint64_t seed) const;
};

} // namespace finsim
