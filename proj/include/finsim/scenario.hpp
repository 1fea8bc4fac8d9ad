#pragma once

// Scenario files: versioned JSON describing one deterministic run. Parsing
// is strict; every complaint names the offending field.

#include "finsim/checkpoint.hpp"
#include "finsim/committee.hpp"
#include "finsim/ledger.hpp"
#include "finsim/ordering.hpp"
#include "finsim/txn.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace finsim {

inline constexpr int kScenarioSchemaVersion = 1;

struct GenesisAccount {
    std::uint64_t id = 0;
    Value balance = 0;
};

struct GenesisPool {
    std::uint64_t id = 0;
    Value base = 0;
    Value quote = 0;
};

struct WithholdSpec {
    std::uint64_t txn_id = 0;
    std::optional<Tick> reveal_at;  // absent: withheld for the whole run
};

struct SandwichSpec {
    std::uint64_t victim_txn_id = 0;
    std::uint64_t adversary_account = 0;
    Value epsilon = 1;
    std::optional<Tick> arrival;  // default: alongside the victim
    std::uint32_t exit_bps = 10'000;
    std::uint64_t gas_limit = 300;
};

struct CheckpointPlanEntry {
    Tick at_tick = 0;  // declare the newest state-final position at this tick
    Gate gate;
};

struct CoupledStrategy {
    std::uint32_t validators = 4;  // replication: every validator re-executes
};

struct OptimisticStrategy {
    Tick window = 20;
    std::uint32_t validators = 1;
    std::vector<std::uint64_t> cheat_batches;  // executor asserts a wrong value
};

struct DdDrStrategy {
    std::uint64_t pool_total = 20;      // T
    std::uint64_t pool_byzantine = 0;   // B
    std::uint64_t committee_size = 5;   // C
    ByzantineStrategy byz_strategy = AlwaysWrong{};
    std::uint32_t penalty_bps = 10'000;
    Tick dd_ticks = 1;
    Tick dr_ticks = 3;
};

using StrategyConfig = std::variant<CoupledStrategy, OptimisticStrategy, DdDrStrategy>;

std::string strategy_config_name(const StrategyConfig& strategy);

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    Tick ticks = 100;
    std::size_t batch_size = 8;

    std::vector<GenesisAccount> accounts;
    std::vector<GenesisPool> pools;

    FinalityMode log_mode = InstantFinality{};
    std::uint32_t reorg_depth = 0;  // adversary reorg attempt depth per tick

    OrderingPolicy ordering = ArrivalOrder{};
    StrategyConfig strategy = DdDrStrategy{};

    CalldataMode da_mode = CalldataMode::Inline;
    AvailabilityPolicy da_policy = WaitIndefinitely{};
    std::vector<WithholdSpec> withhold;

    std::uint64_t checkpoint_min_gap = 1000;
    std::vector<CheckpointPlanEntry> checkpoint_plan;
    bool gc_auto = false;

    std::vector<Transaction> workload;
    std::vector<SandwichSpec> sandwiches;

    bool wft_strict = true;
    Value posting_fee = 1;

    GasCostTable gas_costs;
    bool vm_exploitable = false;

    VmSemantics semantics() const { return VmSemantics{gas_costs, vm_exploitable}; }
};

// Throws ConfigError with a field-precise message on any problem.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

State build_genesis(const Scenario& scenario);

} // namespace finsim
