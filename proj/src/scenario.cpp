#include "finsim/scenario.hpp"

#include "finsim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace finsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
}

const json& member(const json& j, const std::string& field, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(field);
    if (it == j.end()) fail(path + "." + field, "missing");
    return *it;
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) fail(path, "expected an unsigned integer");
    return j.get<std::uint64_t>();
}

std::uint64_t req_u64(const json& j, const std::string& field, const std::string& path) {
    return as_u64(member(j, field, path), path + "." + field);
}

std::uint64_t opt_u64(const json& j, const std::string& field, const std::string& path,
                      std::uint64_t fallback) {
    if (!j.is_object() || !j.contains(field)) return fallback;
    return as_u64(j.at(field), path + "." + field);
}

double req_prob(const json& j, const std::string& field, const std::string& path) {
    const json& v = member(j, field, path);
    if (!v.is_number()) fail(path + "." + field, "expected a number");
    const double p = v.get<double>();
    if (p < 0.0 || p > 1.0) fail(path + "." + field, "probability out of [0,1]");
    return p;
}

std::string req_str(const json& j, const std::string& field, const std::string& path) {
    const json& v = member(j, field, path);
    if (!v.is_string()) fail(path + "." + field, "expected a string");
    return v.get<std::string>();
}

bool opt_bool(const json& j, const std::string& field, const std::string& path, bool fallback) {
    if (!j.is_object() || !j.contains(field)) return fallback;
    const json& v = j.at(field);
    if (!v.is_boolean()) fail(path + "." + field, "expected a boolean");
    return v.get<bool>();
}

// Token quantities accept either an unsigned number or a decimal string
// (128-bit values exceed JSON's safe integer range).
Value as_value(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return Value(j.get<std::uint64_t>());
    if (j.is_string()) {
        const std::string text = j.get<std::string>();
        if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
            fail(path, "expected a decimal amount, got \"" + text + "\"");
        }
        try {
            return Value(text);
        } catch (const std::exception&) {
            fail(path, "amount out of 128-bit range");
        }
    }
    fail(path, "expected an amount (unsigned number or decimal string)");
}

Value req_value(const json& j, const std::string& field, const std::string& path) {
    return as_value(member(j, field, path), path + "." + field);
}

Action parse_action(const json& j, const std::string& path) {
    const std::string kind = req_str(j, "kind", path);
    if (kind == "transfer") {
        return TransferAction{req_u64(j, "to", path), req_value(j, "amount", path)};
    }
    if (kind == "swap_buy") {
        return SwapBuyAction{req_u64(j, "pool", path), req_value(j, "amount_in", path)};
    }
    if (kind == "swap_sell") {
        return SwapSellAction{req_u64(j, "pool", path), req_value(j, "amount_in", path)};
    }
    if (kind == "noop") {
        return NoOpAction{};
    }
    if (kind == "malformed") {
        MalformedAction a;
        if (j.contains("bytes")) {
            const json& bytes = j.at("bytes");
            if (!bytes.is_array()) fail(path + ".bytes", "expected an array of bytes");
            for (std::size_t i = 0; i < bytes.size(); ++i) {
                const std::uint64_t b = as_u64(bytes[i], path + ".bytes[" + std::to_string(i) + "]");
                if (b > 0xFF) fail(path + ".bytes[" + std::to_string(i) + "]", "byte out of range");
                a.blob.push_back(static_cast<std::uint8_t>(b));
            }
        }
        return a;
    }
    fail(path + ".kind", "unknown action \"" + kind + "\"");
}

ByzantineStrategy parse_byz_strategy(const json& j, const std::string& path) {
    const std::string name = req_str(j, "byz_strategy", path);
    if (name == "always_wrong") return AlwaysWrong{};
    if (name == "colluding_wrong") return ColludingWrong{};
    if (name == "copycat") {
        Copycat c;
        if (j.contains("copycat_seed")) {
            c.seed = Digest::from_hex(req_str(j, "copycat_seed", path));
        }
        return c;
    }
    if (name == "cheat_with_prob") {
        return CheatWithProb{req_prob(j, "p", path)};
    }
    fail(path + ".byz_strategy", "unknown strategy \"" + name + "\"");
}

Gate parse_gate(const json& j, const std::string& path) {
    const std::string kind = req_str(j, "kind", path);
    if (kind == "height") {
        return BlockHeightGate{req_u64(j, "height", path)};
    }
    if (kind == "time_oracle") {
        TimeOracleGate g;
        g.quorum = static_cast<std::uint32_t>(req_u64(j, "quorum", path));
        g.target = req_u64(j, "target", path);
        const json& flips = member(j, "flips", path);
        if (!flips.is_array() || flips.empty()) fail(path + ".flips", "expected a nonempty array");
        for (std::size_t i = 0; i < flips.size(); ++i) {
            g.oracle_flip_ticks.push_back(as_u64(flips[i], path + ".flips[" + std::to_string(i) + "]"));
        }
        if (g.quorum == 0 || g.quorum > g.oracle_flip_ticks.size()) {
            fail(path + ".quorum", "must be between 1 and the oracle count");
        }
        return g;
    }
    fail(path + ".kind", "unknown gate \"" + kind + "\"");
}

StrategyConfig parse_strategy(const json& j, const std::string& path) {
    const std::string kind = req_str(j, "kind", path);
    if (kind == "coupled") {
        CoupledStrategy s;
        s.validators = static_cast<std::uint32_t>(opt_u64(j, "validators", path, s.validators));
        if (s.validators == 0) fail(path + ".validators", "must be at least 1");
        return s;
    }
    if (kind == "optimistic") {
        OptimisticStrategy s;
        s.window = req_u64(j, "window", path);
        if (s.window == 0) fail(path + ".window", "must be positive");
        s.validators = static_cast<std::uint32_t>(opt_u64(j, "validators", path, 1));
        if (j.contains("cheat_batches")) {
            const json& cheats = j.at("cheat_batches");
            if (!cheats.is_array()) fail(path + ".cheat_batches", "expected an array");
            for (std::size_t i = 0; i < cheats.size(); ++i) {
                s.cheat_batches.push_back(
                    as_u64(cheats[i], path + ".cheat_batches[" + std::to_string(i) + "]"));
            }
        }
        return s;
    }
    if (kind == "dddr") {
        DdDrStrategy s;
        s.pool_total = req_u64(j, "T", path);
        s.pool_byzantine = req_u64(j, "B", path);
        s.committee_size = req_u64(j, "C", path);
        if (s.pool_total == 0) fail(path + ".T", "must be positive");
        if (s.pool_byzantine > s.pool_total) fail(path + ".B", "exceeds T");
        if (s.committee_size == 0 || s.committee_size > s.pool_total) {
            fail(path + ".C", "must be between 1 and T");
        }
        if (j.contains("byz_strategy")) {
            s.byz_strategy = parse_byz_strategy(j, path);
        }
        const std::uint64_t penalty = opt_u64(j, "penalty_bps", path, 10'000);
        if (penalty > 10'000) fail(path + ".penalty_bps", "exceeds 10000");
        s.penalty_bps = static_cast<std::uint32_t>(penalty);
        s.dd_ticks = opt_u64(j, "dd_ticks", path, 1);
        s.dr_ticks = opt_u64(j, "dr_ticks", path, 3);
        if (s.dd_ticks == 0 || s.dr_ticks == 0) fail(path, "dd_ticks and dr_ticks must be positive");
        return s;
    }
    fail(path + ".kind", "unknown strategy \"" + kind + "\"");
}

} // namespace

std::string strategy_config_name(const StrategyConfig& strategy) {
    if (std::holds_alternative<CoupledStrategy>(strategy)) return "coupled";
    if (std::holds_alternative<OptimisticStrategy>(strategy)) return "optimistic";
    return "dddr";
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");

    const std::uint64_t version = req_u64(j, "schema_version", "scenario");
    if (version != kScenarioSchemaVersion) {
        fail("scenario.schema_version", "unsupported version " + std::to_string(version) +
                                            " (this build reads version " +
                                            std::to_string(kScenarioSchemaVersion) + ")");
    }

    Scenario sc;
    sc.name = req_str(j, "name", "scenario");
    sc.seed = req_u64(j, "seed", "scenario");
    sc.ticks = req_u64(j, "ticks", "scenario");
    if (sc.ticks == 0) fail("scenario.ticks", "must be positive");
    sc.batch_size = opt_u64(j, "batch_size", "scenario", 8);
    if (sc.batch_size == 0) fail("scenario.batch_size", "must be at least 1");

    // genesis
    const json& genesis = member(j, "genesis", "scenario");
    std::set<std::uint64_t> account_ids;
    if (genesis.contains("accounts")) {
        const json& accounts = genesis.at("accounts");
        if (!accounts.is_array()) fail("scenario.genesis.accounts", "expected an array");
        for (std::size_t i = 0; i < accounts.size(); ++i) {
            const std::string path = "scenario.genesis.accounts[" + std::to_string(i) + "]";
            GenesisAccount a;
            a.id = req_u64(accounts[i], "id", path);
            a.balance = req_value(accounts[i], "balance", path);
            if (a.id == kFeeSinkAccount) fail(path + ".id", "reserved for the fee sink");
            if (!account_ids.insert(a.id).second) fail(path + ".id", "duplicate account");
            sc.accounts.push_back(a);
        }
    }
    std::set<std::uint64_t> pool_ids;
    if (genesis.contains("pools")) {
        const json& pools = genesis.at("pools");
        if (!pools.is_array()) fail("scenario.genesis.pools", "expected an array");
        for (std::size_t i = 0; i < pools.size(); ++i) {
            const std::string path = "scenario.genesis.pools[" + std::to_string(i) + "]";
            GenesisPool p;
            p.id = req_u64(pools[i], "id", path);
            p.base = req_value(pools[i], "base", path);
            p.quote = req_value(pools[i], "quote", path);
            if (p.base == 0 || p.quote == 0) fail(path, "pool reserves must be positive");
            if (!pool_ids.insert(p.id).second) fail(path + ".id", "duplicate pool");
            sc.pools.push_back(p);
        }
    }

    // log mode
    const json& log = member(j, "log", "scenario");
    const std::string log_mode = req_str(log, "mode", "scenario.log");
    if (log_mode == "instant") {
        sc.log_mode = InstantFinality{};
    } else if (log_mode == "probabilistic") {
        ProbabilisticFinality p;
        p.depth_k = static_cast<std::uint32_t>(req_u64(log, "depth_k", "scenario.log"));
        if (p.depth_k == 0) fail("scenario.log.depth_k", "must be at least 1");
        p.reorg_prob = req_prob(log, "reorg_prob", "scenario.log");
        if (p.reorg_prob >= 1.0) fail("scenario.log.reorg_prob", "must be below 1");
        sc.log_mode = p;
        sc.reorg_depth = static_cast<std::uint32_t>(opt_u64(log, "reorg_depth", "scenario.log", 0));
    } else {
        fail("scenario.log.mode", "expected \"instant\" or \"probabilistic\"");
    }

    sc.ordering = parse_ordering_policy(req_str(j, "ordering", "scenario"));
    sc.strategy = parse_strategy(member(j, "strategy", "scenario"), "scenario.strategy");

    // data availability
    if (j.contains("da")) {
        const json& da = j.at("da");
        const std::string mode = req_str(da, "mode", "scenario.da");
        if (mode == "inline") {
            sc.da_mode = CalldataMode::Inline;
        } else if (mode == "cas") {
            sc.da_mode = CalldataMode::Cas;
        } else {
            fail("scenario.da.mode", "expected \"inline\" or \"cas\"");
        }
        if (da.contains("policy")) {
            const json& policy = da.at("policy");
            if (policy.is_string() && policy.get<std::string>() == "wait") {
                sc.da_policy = WaitIndefinitely{};
            } else if (policy.is_object()) {
                const std::uint64_t timeout = req_u64(policy, "timeout", "scenario.da.policy");
                if (timeout == 0) fail("scenario.da.policy.timeout", "must be positive");
                sc.da_policy = TimeoutAbort{timeout};
            } else {
                fail("scenario.da.policy", "expected \"wait\" or {\"timeout\": n}");
            }
        }
        if (da.contains("withhold")) {
            const json& withholds = da.at("withhold");
            if (!withholds.is_array()) fail("scenario.da.withhold", "expected an array");
            for (std::size_t i = 0; i < withholds.size(); ++i) {
                const std::string path = "scenario.da.withhold[" + std::to_string(i) + "]";
                WithholdSpec w;
                w.txn_id = req_u64(withholds[i], "txn_id", path);
                if (withholds[i].contains("reveal_at")) {
                    w.reveal_at = req_u64(withholds[i], "reveal_at", path);
                }
                sc.withhold.push_back(w);
            }
            if (!sc.withhold.empty() && sc.da_mode == CalldataMode::Inline) {
                fail("scenario.da.withhold", "inline callData cannot be withheld");
            }
        }
    }

    // checkpoints
    if (j.contains("checkpoints")) {
        const json& cps = j.at("checkpoints");
        sc.checkpoint_min_gap = opt_u64(cps, "min_gap", "scenario.checkpoints", 1000);
        if (sc.checkpoint_min_gap == 0) fail("scenario.checkpoints.min_gap", "must be positive");
        sc.gc_auto = opt_bool(cps, "gc_auto", "scenario.checkpoints", false);
        if (cps.contains("plan")) {
            const json& plan = cps.at("plan");
            if (!plan.is_array()) fail("scenario.checkpoints.plan", "expected an array");
            for (std::size_t i = 0; i < plan.size(); ++i) {
                const std::string path = "scenario.checkpoints.plan[" + std::to_string(i) + "]";
                CheckpointPlanEntry entry;
                entry.at_tick = req_u64(plan[i], "at_tick", path);
                entry.gate = parse_gate(member(plan[i], "gate", path), path + ".gate");
                sc.checkpoint_plan.push_back(entry);
            }
        }
    }

    // workload
    const json& workload = member(j, "workload", "scenario");
    if (!workload.is_array()) fail("scenario.workload", "expected an array");
    std::set<std::uint64_t> txn_ids;
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const std::string path = "scenario.workload[" + std::to_string(i) + "]";
        const json& w = workload[i];
        Transaction t;
        t.txn_id = req_u64(w, "txn_id", path);
        if (!txn_ids.insert(t.txn_id).second) fail(path + ".txn_id", "duplicate");
        t.sender = req_u64(w, "sender", path);
        t.action = parse_action(member(w, "action", path), path + ".action");
        t.gas_limit = req_u64(w, "gas_limit", path);
        if (t.gas_limit == 0) fail(path + ".gas_limit", "must be positive");
        t.gas_price = req_value(w, "gas_price", path);
        t.signed_ok = opt_bool(w, "signed", path, true);
        t.arrival_time = req_u64(w, "arrival", path);
        if (t.arrival_time >= sc.ticks) fail(path + ".arrival", "beyond the run length");
        sc.workload.push_back(std::move(t));
    }

    // adversary
    if (j.contains("adversary")) {
        const json& adv = j.at("adversary");
        if (adv.contains("sandwich")) {
            const json& sandwiches = adv.at("sandwich");
            if (!sandwiches.is_array()) fail("scenario.adversary.sandwich", "expected an array");
            for (std::size_t i = 0; i < sandwiches.size(); ++i) {
                const std::string path = "scenario.adversary.sandwich[" + std::to_string(i) + "]";
                const json& s = sandwiches[i];
                SandwichSpec spec;
                spec.victim_txn_id = req_u64(s, "victim_txn_id", path);
                spec.adversary_account = req_u64(s, "adversary_account", path);
                if (s.contains("epsilon")) spec.epsilon = req_value(s, "epsilon", path);
                if (s.contains("arrival")) spec.arrival = req_u64(s, "arrival", path);
                const std::uint64_t exit_bps = opt_u64(s, "exit_bps", path, 10'000);
                if (exit_bps > 10'000) fail(path + ".exit_bps", "exceeds 10000");
                spec.exit_bps = static_cast<std::uint32_t>(exit_bps);
                spec.gas_limit = opt_u64(s, "gas_limit", path, 300);

                const auto victim = std::find_if(
                    sc.workload.begin(), sc.workload.end(),
                    [&](const Transaction& t) { return t.txn_id == spec.victim_txn_id; });
                if (victim == sc.workload.end()) {
                    fail(path + ".victim_txn_id", "not in the workload");
                }
                const ActionKind kind = action_kind(victim->action);
                if (kind != ActionKind::SwapBuy && kind != ActionKind::SwapSell) {
                    fail(path + ".victim_txn_id", "victim is not a swap");
                }
                sc.sandwiches.push_back(spec);
            }
        }
    }

    for (std::size_t i = 0; i < sc.withhold.size(); ++i) {
        if (!txn_ids.count(sc.withhold[i].txn_id)) {
            fail("scenario.da.withhold[" + std::to_string(i) + "].txn_id", "not in the workload");
        }
    }
    if (!sc.withhold.empty() && std::holds_alternative<CoupledStrategy>(sc.strategy) &&
        std::holds_alternative<TimeoutAbort>(sc.da_policy)) {
        // Coupled embeds the value with the order; dropping withheld txns
        // afterwards would contradict the logged commitment.
        fail("scenario.da.policy", "coupled finality cannot abort on withheld callData");
    }

    // admission checks
    if (j.contains("wft")) {
        const json& wft = j.at("wft");
        sc.wft_strict = opt_bool(wft, "strict", "scenario.wft", true);
        if (wft.contains("posting_fee")) {
            sc.posting_fee = req_value(wft, "posting_fee", "scenario.wft");
        }
    }

    // gas cost table
    if (j.contains("gas_costs")) {
        const json& costs = j.at("gas_costs");
        sc.gas_costs.noop = opt_u64(costs, "noop", "scenario.gas_costs", sc.gas_costs.noop);
        sc.gas_costs.transfer =
            opt_u64(costs, "transfer", "scenario.gas_costs", sc.gas_costs.transfer);
        sc.gas_costs.swap_buy =
            opt_u64(costs, "swap_buy", "scenario.gas_costs", sc.gas_costs.swap_buy);
        sc.gas_costs.swap_sell =
            opt_u64(costs, "swap_sell", "scenario.gas_costs", sc.gas_costs.swap_sell);
        sc.gas_costs.malformed_abort =
            opt_u64(costs, "malformed_abort", "scenario.gas_costs", sc.gas_costs.malformed_abort);
    }

    if (j.contains("vm")) {
        sc.vm_exploitable = opt_bool(j.at("vm"), "exploitable", "scenario.vm", false);
    }

    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open scenario file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

State build_genesis(const Scenario& scenario) {
    State s;
    for (const GenesisAccount& a : scenario.accounts) {
        s.set(Key::account(a.id), a.balance);
    }
    for (const GenesisPool& p : scenario.pools) {
        s.set(Key::pool_reserve(p.id, TokenSide::Base), p.base);
        s.set(Key::pool_reserve(p.id, TokenSide::Quote), p.quote);
    }
    return s;
}

} // namespace finsim
