#pragma once

// Deterministic discrete-event engine. One tick = one log-append
// opportunity. Each tick: adversary reorg, arrivals and sandwich injection,
// admission checks, batch scheduling and OrderCommit, the finality-strategy
// pipeline (coupled / optimistic window / DD-DR), checkpoint plan, GC.

#include "finsim/checkpoint.hpp"
#include "finsim/ledger.hpp"
#include "finsim/metrics.hpp"
#include "finsim/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace finsim {

struct RunResult {
    Scenario scenario;
    Metrics metrics;
    Ledger ledger;
    AvailabilityStore store;
    CheckpointManager checkpoints;
    std::map<std::uint64_t, ExecStatus> statuses;  // executed txn outcomes
    State head_state;
    Tick end_tick = 0;
};

RunResult run(const Scenario& scenario);

// Full-order evaluation from genesis over the live ledger (requires all
// callData still present).
Digest evaluate_from_genesis(const RunResult& result);

// recover_replay driven by a finished run; identity interpreter when
// `patched` is null.
ReplayResult replay_run(const RunResult& result, const TxnInterpreter* patched = nullptr);

struct StrategySpec {
    std::string label;
    StrategyConfig config;
};

// "coupled[:validators]" | "optimistic:<window>:<validators>" |
// "dddr:<T>:<B>:<C>[:<byz_strategy>[:<p>]]", comma-separated.
std::vector<StrategySpec> parse_strategy_specs(const std::string& text);

// Same workload under each strategy; renders an aligned comparison table.
std::string compare(const Scenario& base, const std::vector<StrategySpec>& specs);

} // namespace finsim
