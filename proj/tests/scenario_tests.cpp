#include "finsim/errors.hpp"
#include "finsim/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <string>

using namespace finsim;
using nlohmann::json;

namespace {

json minimal() {
    return json{
        {"schema_version", 1},
        {"name", "t"},
        {"seed", 1},
        {"ticks", 10},
        {"genesis", {{"accounts", {{{"id", 1}, {"balance", 1000}}}}}},
        {"log", {{"mode", "instant"}}},
        {"ordering", "arrival"},
        {"strategy", {{"kind", "coupled"}}},
        {"workload", json::array()},
    };
}

json with_txn(json j, std::uint64_t id, std::uint64_t arrival = 0) {
    j["workload"].push_back({{"txn_id", id},
                             {"sender", 1},
                             {"action", {{"kind", "noop"}}},
                             {"gas_limit", 10},
                             {"gas_price", 1},
                             {"arrival", arrival}});
    return j;
}

#define CHECK_REJECTS(expr, needle)                                                               \
    CHECK_THROWS_WITH_AS(parse_scenario((expr).dump()), doctest::Contains(needle), ConfigError)

} // namespace

TEST_CASE("the minimal scenario parses with documented defaults") {
    const Scenario sc = parse_scenario(minimal().dump());
    CHECK(sc.name == "t");
    CHECK(sc.seed == 1);
    CHECK(sc.ticks == 10);
    CHECK(sc.batch_size == 8);
    CHECK(std::holds_alternative<InstantFinality>(sc.log_mode));
    CHECK(std::holds_alternative<ArrivalOrder>(sc.ordering));
    CHECK(std::holds_alternative<CoupledStrategy>(sc.strategy));
    CHECK(sc.da_mode == CalldataMode::Inline);
    CHECK(std::holds_alternative<WaitIndefinitely>(sc.da_policy));
    CHECK(sc.checkpoint_min_gap == 1000);
    CHECK(sc.wft_strict);
    CHECK(sc.posting_fee == 1);
    CHECK(!sc.vm_exploitable);
}

TEST_CASE("malformed documents and wrong versions are named precisely") {
    CHECK_THROWS_WITH_AS(parse_scenario("{nope"), doctest::Contains("not valid JSON"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario("[1,2]"), doctest::Contains("expected a JSON object"),
                         ConfigError);

    json j = minimal();
    j["schema_version"] = 2;
    CHECK_REJECTS(j, "scenario.schema_version");

    j = minimal();
    j.erase("name");
    CHECK_REJECTS(j, "scenario.name: missing");

    j = minimal();
    j["ticks"] = 0;
    CHECK_REJECTS(j, "scenario.ticks");

    j = minimal();
    j["batch_size"] = 0;
    CHECK_REJECTS(j, "scenario.batch_size");
}

TEST_CASE("genesis validation: duplicates, the fee sink and empty pools") {
    json j = minimal();
    j["genesis"]["accounts"].push_back({{"id", 1}, {"balance", 5}});
    CHECK_REJECTS(j, "duplicate account");

    j = minimal();
    j["genesis"]["accounts"][0]["id"] = 0xFFFFFFFFFFFFFFFFull;
    CHECK_REJECTS(j, "reserved for the fee sink");

    j = minimal();
    j["genesis"]["pools"] = {{{"id", 1}, {"base", 0}, {"quote", 5}}};
    CHECK_REJECTS(j, "pool reserves must be positive");

    j = minimal();
    j["genesis"]["pools"] = {{{"id", 1}, {"base", 5}, {"quote", 5}},
                             {{"id", 1}, {"base", 5}, {"quote", 5}}};
    CHECK_REJECTS(j, "duplicate pool");
}

TEST_CASE("balances accept decimal strings up to 128 bits") {
    json j = minimal();
    j["genesis"]["accounts"][0]["balance"] = "340282366920938463463374607431768211455";
    const Scenario sc = parse_scenario(j.dump());
    CHECK(sc.accounts[0].balance == Value("340282366920938463463374607431768211455"));

    j["genesis"]["accounts"][0]["balance"] = "340282366920938463463374607431768211456";
    CHECK_REJECTS(j, "out of 128-bit range");

    j["genesis"]["accounts"][0]["balance"] = "12x";
    CHECK_REJECTS(j, "expected a decimal amount");
}

TEST_CASE("log section: instant, probabilistic and their bounds") {
    json j = minimal();
    j["log"] = {{"mode", "probabilistic"}, {"depth_k", 4}, {"reorg_prob", 0.25},
                {"reorg_depth", 2}};
    const Scenario sc = parse_scenario(j.dump());
    const auto& p = std::get<ProbabilisticFinality>(sc.log_mode);
    CHECK(p.depth_k == 4);
    CHECK(p.reorg_prob == 0.25);
    CHECK(sc.reorg_depth == 2);

    j["log"]["depth_k"] = 0;
    CHECK_REJECTS(j, "scenario.log.depth_k");
    j["log"]["depth_k"] = 4;
    j["log"]["reorg_prob"] = 1.0;
    CHECK_REJECTS(j, "scenario.log.reorg_prob");
    j["log"]["reorg_prob"] = 1.5;
    CHECK_REJECTS(j, "out of [0,1]");
    j["log"] = {{"mode", "sometimes"}};
    CHECK_REJECTS(j, "scenario.log.mode");
}

TEST_CASE("strategy section: all three kinds and the dddr bounds") {
    json j = minimal();
    j["strategy"] = {{"kind", "optimistic"}, {"window", 6}, {"validators", 2},
                     {"cheat_batches", {3, 4}}};
    const auto opt = std::get<OptimisticStrategy>(parse_scenario(j.dump()).strategy);
    CHECK(opt.window == 6);
    CHECK(opt.validators == 2);
    CHECK(opt.cheat_batches == std::vector<std::uint64_t>{3, 4});

    j["strategy"] = {{"kind", "dddr"}, {"T", 20}, {"B", 6}, {"C", 4},
                     {"byz_strategy", "colluding_wrong"}, {"penalty_bps", 5000},
                     {"dd_ticks", 1}, {"dr_ticks", 3}};
    const auto dd = std::get<DdDrStrategy>(parse_scenario(j.dump()).strategy);
    CHECK(dd.pool_total == 20);
    CHECK(dd.pool_byzantine == 6);
    CHECK(dd.committee_size == 4);
    CHECK(std::holds_alternative<ColludingWrong>(dd.byz_strategy));
    CHECK(dd.penalty_bps == 5000);

    j["strategy"]["B"] = 21;
    CHECK_REJECTS(j, "exceeds T");
    j["strategy"]["B"] = 6;
    j["strategy"]["C"] = 21;
    CHECK_REJECTS(j, "scenario.strategy.C");
    j["strategy"]["C"] = 4;
    j["strategy"]["penalty_bps"] = 10001;
    CHECK_REJECTS(j, "penalty_bps");
    j["strategy"]["penalty_bps"] = 5000;
    j["strategy"]["byz_strategy"] = "polite";
    CHECK_REJECTS(j, "unknown strategy");

    j["strategy"] = {{"kind", "quantum"}};
    CHECK_REJECTS(j, "scenario.strategy.kind");

    j["strategy"] = {{"kind", "optimistic"}, {"window", 0}};
    CHECK_REJECTS(j, "scenario.strategy.window");

    j["strategy"] = {{"kind", "coupled"}, {"validators", 0}};
    CHECK_REJECTS(j, "scenario.strategy.validators");
}

TEST_CASE("da section: modes, policies and withholding constraints") {
    json j = with_txn(minimal(), 5);
    j["da"] = {{"mode", "cas"}, {"policy", "wait"},
               {"withhold", {{{"txn_id", 5}, {"reveal_at", 8}}}}};
    const Scenario sc = parse_scenario(j.dump());
    CHECK(sc.da_mode == CalldataMode::Cas);
    REQUIRE(sc.withhold.size() == 1);
    CHECK(sc.withhold[0].txn_id == 5);
    CHECK(sc.withhold[0].reveal_at == 8);

    json aborting = j;  // timeout + withholding needs a non-coupled strategy
    aborting["strategy"] = {{"kind", "optimistic"}, {"window", 5}};
    aborting["da"]["policy"] = {{"timeout", 4}};
    CHECK(std::get<TimeoutAbort>(parse_scenario(aborting.dump()).da_policy).timeout == 4);

    j["da"]["policy"] = {{"timeout", 0}};
    CHECK_REJECTS(j, "scenario.da.policy.timeout");
    j["da"]["policy"] = 7;
    CHECK_REJECTS(j, "scenario.da.policy");
    j["da"]["policy"] = "wait";
    j["da"]["mode"] = "carrier-pigeon";
    CHECK_REJECTS(j, "scenario.da.mode");

    j["da"]["mode"] = "inline";
    CHECK_REJECTS(j, "inline callData cannot be withheld");

    j["da"]["mode"] = "cas";
    j["da"]["withhold"][0]["txn_id"] = 99;
    CHECK_REJECTS(j, "not in the workload");

    // Coupled finality embeds the state value in the order entry; aborting
    // withheld transactions later would contradict it.
    json conflict = with_txn(minimal(), 5);
    conflict["da"] = {{"mode", "cas"}, {"policy", {{"timeout", 4}}},
                      {"withhold", {{{"txn_id", 5}}}}};
    CHECK_REJECTS(conflict, "coupled finality cannot abort");
    conflict["strategy"] = {{"kind", "dddr"}, {"T", 10}, {"B", 0}, {"C", 3},
                            {"byz_strategy", "always_wrong"}};
    CHECK(parse_scenario(conflict.dump()).withhold.size() == 1);
}

TEST_CASE("checkpoint plans parse both gates and reject nonsense") {
    json j = minimal();
    j["checkpoints"] = {{"min_gap", 2},
                        {"plan", {{{"at_tick", 5}, {"gate", {{"kind", "height"}, {"height", 3}}}},
                                  {{"at_tick", 8},
                                   {"gate", {{"kind", "time_oracle"}, {"quorum", 2},
                                             {"target", 6}, {"flips", {1, 5, 9}}}}}}}};
    const Scenario sc = parse_scenario(j.dump());
    CHECK(sc.checkpoint_min_gap == 2);
    REQUIRE(sc.checkpoint_plan.size() == 2);
    CHECK(std::get<BlockHeightGate>(sc.checkpoint_plan[0].gate).height == 3);
    const auto& oracle = std::get<TimeOracleGate>(sc.checkpoint_plan[1].gate);
    CHECK(oracle.quorum == 2);
    CHECK(oracle.oracle_flip_ticks.size() == 3);

    j["checkpoints"]["min_gap"] = 0;
    CHECK_REJECTS(j, "scenario.checkpoints.min_gap");
    j["checkpoints"]["min_gap"] = 2;
    j["checkpoints"]["plan"][0]["gate"]["kind"] = "rooster";
    CHECK_REJECTS(j, "unknown gate");
    j["checkpoints"]["plan"][0]["gate"] = {{"kind", "time_oracle"}, {"quorum", 4},
                                           {"target", 1}, {"flips", {1, 2}}};
    CHECK_REJECTS(j, "quorum");
}

TEST_CASE("workload validation is per-transaction and field-precise") {
    json j = with_txn(with_txn(minimal(), 5), 5);
    CHECK_REJECTS(j, "workload[1].txn_id");

    j = with_txn(minimal(), 5);
    j["workload"][0]["gas_limit"] = 0;
    CHECK_REJECTS(j, "workload[0].gas_limit");

    j = with_txn(minimal(), 5, /*arrival=*/10);
    CHECK_REJECTS(j, "beyond the run length");

    j = with_txn(minimal(), 5);
    j["workload"][0]["action"] = {{"kind", "teleport"}};
    CHECK_REJECTS(j, "unknown action");

    j = with_txn(minimal(), 5);
    j["workload"][0]["action"] = {{"kind", "malformed"}, {"bytes", {1, 2, 300}}};
    CHECK_REJECTS(j, "byte out of range");

    j = with_txn(minimal(), 5);
    j["workload"][0]["action"] =
        {{"kind", "transfer"}, {"to", 2}, {"amount", "99"}};
    j["workload"][0]["signed"] = false;
    const Scenario sc = parse_scenario(j.dump());
    CHECK(!sc.workload[0].signed_ok);
    CHECK(std::get<TransferAction>(sc.workload[0].action).amount == 99);
}

TEST_CASE("sandwich specs must target a swap in the workload") {
    json j = with_txn(minimal(), 5);
    j["adversary"] = {{"sandwich", {{{"victim_txn_id", 9}, {"adversary_account", 1}}}}};
    CHECK_REJECTS(j, "not in the workload");

    j["adversary"]["sandwich"][0]["victim_txn_id"] = 5;  // a noop
    CHECK_REJECTS(j, "victim is not a swap");

    json ok = minimal();
    ok["genesis"]["pools"] = {{{"id", 1}, {"base", 1000}, {"quote", 1000}}};
    ok["workload"].push_back({{"txn_id", 5}, {"sender", 1},
                              {"action", {{"kind", "swap_buy"}, {"pool", 1}, {"amount_in", 10}}},
                              {"gas_limit", 120}, {"gas_price", 3}, {"arrival", 0}});
    ok["adversary"] = {{"sandwich", {{{"victim_txn_id", 5}, {"adversary_account", 1},
                                      {"epsilon", 2}, {"exit_bps", 9000}}}}};
    const Scenario sc = parse_scenario(ok.dump());
    REQUIRE(sc.sandwiches.size() == 1);
    CHECK(sc.sandwiches[0].victim_txn_id == 5);
    CHECK(sc.sandwiches[0].epsilon == 2);
    CHECK(sc.sandwiches[0].exit_bps == 9000);

    ok["adversary"]["sandwich"][0]["exit_bps"] = 10001;
    CHECK_REJECTS(ok, "exit_bps");
}

TEST_CASE("build_genesis lays out accounts and pool reserves") {
    json j = minimal();
    j["genesis"]["accounts"].push_back({{"id", 4}, {"balance", 77}});
    j["genesis"]["pools"] = {{{"id", 2}, {"base", 500}, {"quote", 600}}};
    const Scenario sc = parse_scenario(j.dump());
    const State s = build_genesis(sc);
    CHECK(s.get(Key::account(1)) == 1000);
    CHECK(s.get(Key::account(4)) == 77);
    CHECK(s.get(Key::pool_reserve(2, TokenSide::Base)) == 500);
    CHECK(s.get(Key::pool_reserve(2, TokenSide::Quote)) == 600);
    CHECK(s.get(Key::fee_sink()) == 0);
    CHECK(s.entries().size() == 4);
}

TEST_CASE("the bundled scenarios load and stay well-formed") {
    const std::string dir = FINSIM_SCENARIO_DIR;
    const Scenario base = load_scenario(dir + "/honest-baseline.json");
    CHECK(base.name == "honest-baseline");
    CHECK(base.workload.size() == 10);
    CHECK(std::holds_alternative<DdDrStrategy>(base.strategy));

    CHECK(load_scenario(dir + "/sandwich-attack.json").sandwiches.size() == 1);
    CHECK(load_scenario(dir + "/withholding.json").withhold.size() == 1);
    const Scenario byz = load_scenario(dir + "/byzantine-dd.json");
    const auto& dd = std::get<DdDrStrategy>(byz.strategy);
    CHECK(dd.pool_byzantine == 6);
    CHECK(load_scenario(dir + "/zero-day-replay.json").vm_exploitable);

    CHECK_THROWS_WITH_AS(load_scenario(dir + "/no-such-file.json"),
                         doctest::Contains("cannot open scenario file"), ConfigError);
}
