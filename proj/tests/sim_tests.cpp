#include "finsim/errors.hpp"
#include "finsim/sim.hpp"

#include <doctest.h>

#include <string>

using namespace finsim;

namespace {

const std::string kDir = FINSIM_SCENARIO_DIR;

Scenario baseline() { return load_scenario(kDir + "/honest-baseline.json"); }

} // namespace

TEST_CASE("runs are byte-identical across invocations") {
    const Scenario sc = baseline();
    const RunResult a = run(sc);
    const RunResult b = run(sc);
    CHECK(a.metrics.head_commitment == b.metrics.head_commitment);
    CHECK(a.metrics.to_csv() == b.metrics.to_csv());
    CHECK(a.metrics.summary_json(sc.name, sc.seed) == b.metrics.summary_json(sc.name, sc.seed));
    CHECK(a.end_tick == b.end_tick);
}

TEST_CASE("the honest baseline executes cleanly") {
    const RunResult r = run(baseline());
    CHECK(r.metrics.counters.safety_failures == 0);
    CHECK(r.metrics.counters.slash_events == 0);
    CHECK(r.metrics.counters.order_finality_violations == 0);
    CHECK(r.metrics.counters.liveness_stall_ticks == 0);
    CHECK(r.metrics.counters.executed_txns == 9);   // 10 submitted, 1 unsigned rejected
    CHECK(r.metrics.counters.wft_rejections == 1);
    CHECK(r.metrics.counters.checkpoints_finalized == 1);
    r.metrics.validate_finality_chain();

    // One committee of five re-executed every batch: replication is exactly C.
    CHECK(r.metrics.replication_factor() == doctest::Approx(5.0));
}

TEST_CASE("rejected transactions never execute but are recorded") {
    const RunResult r = run(baseline());
    bool saw_rejvictim = false;
    for (const TxnRecord& rec : r.metrics.txns) {
        if (rec.wft_rejected) {
            saw_rejvictim = true;
            CHECK(!rec.status.has_value());
            CHECK(!rec.batch_id.has_value());
            CHECK(!rec.log_final.has_value());
        }
    }
    CHECK(saw_rejvictim);
    CHECK(r.metrics.to_csv().find("rejected:no_signature") != std::string::npos);
}

TEST_CASE("coupled finality collapses order and state ticks") {
    Scenario sc = baseline();
    sc.strategy = CoupledStrategy{3};
    const RunResult r = run(sc);
    for (const TxnRecord& rec : r.metrics.txns) {
        if (!rec.status) continue;
        REQUIRE(rec.order_final.has_value());
        REQUIRE(rec.state_final.has_value());
        CHECK(*rec.order_final == *rec.state_final);
    }
}

TEST_CASE("the head state does not depend on the finality strategy") {
    Scenario sc = baseline();
    const Digest reference = run(sc).metrics.head_commitment;

    sc.strategy = CoupledStrategy{2};
    CHECK(run(sc).metrics.head_commitment == reference);

    sc.strategy = OptimisticStrategy{3, 1, {}};
    CHECK(run(sc).metrics.head_commitment == reference);

    sc.strategy = DdDrStrategy{20, 0, 5, AlwaysWrong{}, 10000, 1, 3};
    CHECK(run(sc).metrics.head_commitment == reference);
}

TEST_CASE("the seed moves committee draws, not the executed state") {
    Scenario sc = baseline();
    const Digest reference = run(sc).metrics.head_commitment;
    sc.seed = 999999;
    CHECK(run(sc).metrics.head_commitment == reference);
}

TEST_CASE("evaluating the full live ledger reproduces the head commitment") {
    const RunResult r = run(baseline());
    CHECK(evaluate_from_genesis(r) == r.metrics.head_commitment);
    CHECK(commit(r.head_state).digest == r.metrics.head_commitment);
}

TEST_CASE("an identity replay flips nothing and lands on the head") {
    // Replay anchors at the latest finalized checkpoint, so only the suffix
    // beyond it re-executes; from the genesis checkpoint that is everything.
    Scenario sc = baseline();
    const RunResult r = run(sc);
    const ReplayResult replay = replay_run(r);
    CHECK(replay.flipped_outcomes == 0);
    CHECK(commit(replay.final_state).digest == r.metrics.head_commitment);
    CHECK(replay.replayed_txns <= r.metrics.counters.executed_txns);

    sc.checkpoint_plan.clear();
    const RunResult bare = run(sc);
    const ReplayResult full = replay_run(bare);
    CHECK(full.replayed_txns == bare.metrics.counters.executed_txns);
    CHECK(commit(full.final_state).digest == bare.metrics.head_commitment);
}

TEST_CASE("probabilistic finality with an adversary still converges") {
    Scenario sc = baseline();
    sc.ticks = 120;
    sc.log_mode = ProbabilisticFinality{2, 0.30};
    sc.reorg_depth = 2;
    // Drop the checkpoint plan: under reorgs the planned tick may precede
    // log finality of any position.
    sc.checkpoint_plan.clear();
    const RunResult r = run(sc);
    CHECK(r.metrics.counters.reorgs_applied > 0);
    CHECK(r.metrics.counters.entries_dropped_by_reorg > 0);
    CHECK(r.metrics.counters.order_finality_violations == 0);
    r.metrics.validate_finality_chain();
    CHECK(evaluate_from_genesis(r) == r.metrics.head_commitment);
    // The re-appended suffix still executes the same workload.
    CHECK(r.metrics.head_commitment == run(baseline()).metrics.head_commitment);
}

TEST_CASE("strategy specs parse labels and reject nonsense") {
    const auto specs =
        parse_strategy_specs("coupled,coupled:3,optimistic:10:2,dddr:20:6:4:colluding_wrong,"
                             "dddr:30:10:5:cheat_with_prob:0.25");
    REQUIRE(specs.size() == 5);
    CHECK(specs[0].label == "coupled");
    CHECK(std::get<CoupledStrategy>(specs[1].config).validators == 3);
    const auto& opt = std::get<OptimisticStrategy>(specs[2].config);
    CHECK(opt.window == 10);
    CHECK(opt.validators == 2);
    const auto& dd = std::get<DdDrStrategy>(specs[3].config);
    CHECK(dd.pool_total == 20);
    CHECK(dd.pool_byzantine == 6);
    CHECK(dd.committee_size == 4);
    CHECK(std::holds_alternative<ColludingWrong>(dd.byz_strategy));
    const auto& cheat = std::get<DdDrStrategy>(specs[4].config);
    CHECK(std::get<CheatWithProb>(cheat.byz_strategy).p == doctest::Approx(0.25));

    CHECK_THROWS_AS(parse_strategy_specs("pessimistic"), ConfigError);
    CHECK_THROWS_AS(parse_strategy_specs("optimistic:0:1"), ConfigError);
    CHECK_THROWS_AS(parse_strategy_specs("dddr:10:11:2"), ConfigError);
    CHECK_THROWS_AS(parse_strategy_specs("coupled:x"), ConfigError);
}

TEST_CASE("compare renders one row per strategy over the same workload") {
    const std::string table =
        compare(baseline(), parse_strategy_specs("coupled,optimistic:3:1,dddr:20:0:5"));
    CHECK(table.find("coupled") != std::string::npos);
    CHECK(table.find("optimistic:3:1") != std::string::npos);
    CHECK(table.find("dddr:20:0:5") != std::string::npos);
    // All-honest strategies agree on the head; the table renders it once per row.
    const Digest reference = run(baseline()).metrics.head_commitment;
    CHECK(table.find(reference.hex().substr(0, 12)) != std::string::npos);
}

TEST_CASE("scheduled checkpoints finalize and record checkpoint finality ticks") {
    const RunResult r = run(baseline());
    CHECK(r.checkpoints.latest_finalized().checkpoint_id >= 1);
    bool any_checkpoint_final = false;
    for (const TxnRecord& rec : r.metrics.txns) {
        if (rec.checkpoint_final) {
            any_checkpoint_final = true;
            REQUIRE(rec.state_final.has_value());
            CHECK(*rec.state_final <= *rec.checkpoint_final);
        }
    }
    CHECK(any_checkpoint_final);
}
