#include "finsim/sim.hpp"

#include "finsim/errors.hpp"
#include "finsim/ordering.hpp"
#include "finsim/rng.hpp"
#include "finsim/serialize.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace finsim {

namespace {

Digest labeled_wrong(const std::string& label, std::uint64_t id, const Digest& truth) {
    ByteWriter w;
    w.put_bytes(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    w.put_u64(id);
    Digest d = sha256(w.bytes());
    if (d == truth) d.bytes[0] ^= 0xFF;
    return d;
}

struct PendingOutcome {
    std::uint64_t txn_id = 0;
    ExecStatus status = ExecStatus::Committed;
    std::uint64_t gas_used = 0;
    bool underpaid = false;
};

enum class Phase : std::uint8_t { AwaitFinality, AwaitData, Running, Done, Dropped };

enum class RunStage : std::uint8_t { None, Dd, Dr, Window, WindowCorrected, Instant };

struct BatchInfo {
    std::uint64_t batch_id = 0;
    std::vector<Transaction> txns;
    std::uint64_t order_position = 0;
    Tick ordered_at = 0;
    Phase phase = Phase::AwaitFinality;

    // Per txn: tick its callData becomes fetchable; nullopt = never.
    std::vector<std::optional<Tick>> available_at;
    std::optional<Tick> log_final_tick;
    std::optional<Tick> order_final_tick;
    std::optional<Tick> blocked_since;
    std::vector<std::uint64_t> implicitly_aborted;

    std::vector<Transaction> exec_txns;  // txns minus implicit aborts
    State post_state;
    StateCommitment true_commitment;
    StateCommitment result;
    std::vector<PendingOutcome> outcomes;
    std::size_t executions = 0;

    RunStage stage = RunStage::None;
    Tick due = 0;
    std::vector<CommitteeReport> dd_reports;
    bool cheat = false;
    std::optional<Tick> revert_at;
};

struct QueuedSandwich {
    Tick when = 0;
    SandwichSpec spec;
    Transaction victim;
};

class Simulation {
public:
    explicit Simulation(const Scenario& scenario)
        : sc_(scenario),
          semantics_(scenario.semantics()),
          rng_reorg_(scenario.seed, "reorg"),
          rng_sampling_(scenario.seed, "sampling"),
          rng_byzantine_(scenario.seed, "byzantine"),
          rng_optimistic_(scenario.seed, "optimistic"),
          ledger_(scenario.log_mode),
          genesis_(build_genesis(scenario)),
          checkpoints_(genesis_, scenario.checkpoint_min_gap),
          confirmed_(genesis_),
          speculative_(genesis_) {
        if (const auto* dddr = std::get_if<DdDrStrategy>(&sc_.strategy)) {
            pool_ = NodePool::uniform(dddr->pool_total, dddr->pool_byzantine,
                                      dddr->byz_strategy);
        }
        std::uint64_t max_id = 0;
        for (const Transaction& t : sc_.workload) max_id = std::max(max_id, t.txn_id);
        next_synthetic_id_ = max_id + 1;
        for (const WithholdSpec& w : sc_.withhold) withhold_by_txn_[w.txn_id] = w;
    }

    RunResult execute() {
        for (Tick t = 0; t < sc_.ticks; ++t) {
            now_ = t;
            adversary_phase();
            arrivals_phase();
            schedule_phase();
            pipeline_phase();
            checkpoint_phase();
        }
        finish();
        RunResult result{sc_,           std::move(metrics_), std::move(ledger_),
                         std::move(store_), std::move(checkpoints_), std::move(statuses_),
                         std::move(confirmed_), sc_.ticks};
        return result;
    }

private:
    // --- adversary ------------------------------------------------------------

    void adversary_phase() {
        if (!std::holds_alternative<ProbabilisticFinality>(sc_.log_mode) || sc_.reorg_depth == 0) {
            return;
        }
        const ReorgReport report = ledger_.adversary_reorg(sc_.reorg_depth, rng_reorg_);
        if (!report.applied) return;
        ++metrics_.counters.reorgs_applied;
        metrics_.counters.entries_dropped_by_reorg += report.dropped.size();
        for (const LogEntry& entry : report.dropped) {
            handle_dropped_entry(entry);
        }
        rebuild_speculative();
    }

    void handle_dropped_entry(const LogEntry& entry) {
        if (const auto* oc = std::get_if<OrderCommitEntry>(&entry.kind)) {
            BatchInfo& batch = batch_by_id(oc->batch_id);
            batch.phase = Phase::Dropped;
            for (const Transaction& txn : batch.txns) {
                mempool_.add(txn);
                TxnRecord& rec = metrics_.record(txn.txn_id);
                rec.batch_id.reset();
                rec.order_position.reset();
                rec.log_final.reset();
                rec.order_final.reset();
            }
            return;
        }
        if (const auto* cd = std::get_if<CheckpointDeclEntry>(&entry.kind)) {
            // The declaration intent survives; re-anchor it in the new suffix.
            const std::uint64_t pos = ledger_.append(*cd, now_);
            checkpoints_.move_declaration(cd->checkpoint_id, pos);
            return;
        }
        // StateCommit / DisputableAssertion records are re-posted verbatim:
        // the agreement or assertion they witness still stands.
        ledger_.append(entry.kind, now_);
    }

    void rebuild_speculative() {
        speculative_ = confirmed_;
        for (const BatchInfo& batch : batches_) {
            if (batch.phase == Phase::Dropped || batch.phase == Phase::Done) continue;
            if (std::holds_alternative<CoupledStrategy>(sc_.strategy)) {
                speculative_ = batch.post_state;
            }
        }
    }

    // --- arrivals ---------------------------------------------------------------

    void arrivals_phase() {
        for (const Transaction& txn : sc_.workload) {
            if (txn.arrival_time != now_) continue;
            admit(txn);
            for (const SandwichSpec& spec : sc_.sandwiches) {
                if (spec.victim_txn_id != txn.txn_id) continue;
                QueuedSandwich q;
                q.when = spec.arrival.value_or(now_);
                q.spec = spec;
                q.victim = txn;
                if (q.when < now_) {
                    throw ConfigError("scenario.adversary.sandwich: arrival " +
                                      std::to_string(q.when) + " precedes the victim");
                }
                queued_sandwiches_.push_back(std::move(q));
            }
        }
        for (auto it = queued_sandwiches_.begin(); it != queued_sandwiches_.end();) {
            if (it->when != now_) {
                ++it;
                continue;
            }
            inject_sandwich_now(*it);
            it = queued_sandwiches_.erase(it);
        }
    }

    void inject_sandwich_now(const QueuedSandwich& q) {
        SandwichOpts opts;
        opts.front_txn_id = next_synthetic_id_++;
        opts.back_txn_id = next_synthetic_id_++;
        opts.epsilon = q.spec.epsilon;
        opts.exit_bps = q.spec.exit_bps;
        opts.arrival = now_;
        opts.gas_limit = q.spec.gas_limit;
        const State& view = std::holds_alternative<CoupledStrategy>(sc_.strategy)
                                ? speculative_
                                : confirmed_;
        const SandwichPlan plan =
            inject_sandwich(q.spec.adversary_account, q.victim, view, opts);
        adversary_accounts_.insert(q.spec.adversary_account);
        admit(plan.front);
        admit(plan.back);
    }

    void admit(const Transaction& txn) {
        TxnRecord& rec = metrics_.record(txn.txn_id);
        rec.sender = txn.sender;
        rec.action = action_name(txn.action);
        rec.arrival = now_;

        const BigInt estimate_wide =
            BigInt(confirmed_.get(Key::account(txn.sender))) - pending_debits(txn.sender);
        const Value estimate = estimate_wide > 0 ? Value(estimate_wide) : Value(0);
        const WftResult wft = check_wft(txn, estimate, sc_.posting_fee, sc_.wft_strict);
        if (!wft.well_formed) {
            rec.wft_rejected = wft_reason_name(wft.reason);
            ++metrics_.counters.wft_rejections;
            return;
        }
        mempool_.add(txn);
    }

    BigInt pending_debits(std::uint64_t sender) const {
        BigInt total = 0;
        auto add_txn = [&](const Transaction& t) {
            if (t.sender != sender) return;
            total += BigInt(t.gas_limit) * BigInt(t.gas_price);
            if (const auto* tr = std::get_if<TransferAction>(&t.action)) {
                total += BigInt(tr->amount);
            } else if (const auto* sb = std::get_if<SwapBuyAction>(&t.action)) {
                total += BigInt(sb->amount_in);
            }
        };
        for (const auto& [id, txn] : mempool_.pending()) add_txn(txn);
        for (const BatchInfo& batch : batches_) {
            if (batch.phase == Phase::Done || batch.phase == Phase::Dropped) continue;
            for (const Transaction& txn : batch.txns) add_txn(txn);
        }
        return total;
    }

    // --- scheduling -----------------------------------------------------------

    void schedule_phase() {
        if (mempool_.empty()) return;
        std::vector<Transaction> chosen = mempool_.take_batch(sc_.ordering, sc_.batch_size);
        if (chosen.empty()) return;

        BatchInfo batch;
        batch.batch_id = next_batch_id_++;
        batch.txns = std::move(chosen);
        batch.ordered_at = now_;

        OrderCommitEntry entry;
        entry.batch_id = batch.batch_id;
        for (const Transaction& txn : batch.txns) {
            std::vector<std::uint8_t> payload = serialize_txn(txn);
            bool withheld = false;
            std::optional<Tick> available = now_;
            auto wh = withhold_by_txn_.find(txn.txn_id);
            if (wh != withhold_by_txn_.end() && sc_.da_mode == CalldataMode::Cas) {
                withheld = true;
                available = wh->second.reveal_at;  // nullopt = never
            }
            CallDataRef ref = store_calldata(payload, sc_.da_mode, withheld, store_);
            if (withheld && wh->second.reveal_at) {
                store_.schedule_reveal(std::get<CasRef>(ref).digest, *wh->second.reveal_at);
            }
            batch.available_at.push_back(available);
            entry.refs.push_back(std::move(ref));
        }

        if (std::holds_alternative<CoupledStrategy>(sc_.strategy)) {
            // Coupled: the proposer executes at append time and logs order
            // and value together.
            compute_execution(batch, speculative_, batch.txns);
            entry.coupled_value = batch.true_commitment;
            batch.result = batch.true_commitment;
            speculative_ = batch.post_state;
        }

        batch.order_position = ledger_.append(std::move(entry), now_);
        for (const Transaction& txn : batch.txns) {
            TxnRecord& rec = metrics_.record(txn.txn_id);
            rec.batch_id = batch.batch_id;
            rec.order_position = batch.order_position;
        }
        batches_.push_back(std::move(batch));
    }

    void compute_execution(BatchInfo& batch, const State& input,
                           const std::vector<Transaction>& exec_txns) {
        batch.exec_txns = exec_txns;
        const ExecTrace trace = run_batch(exec_txns, input, semantics_);
        batch.post_state = trace.final_state();
        batch.true_commitment = commit(batch.post_state);
        batch.outcomes.clear();
        for (const ExecStep& step : trace.steps) {
            batch.outcomes.push_back({step.txn.txn_id, step.outcome.status,
                                      step.outcome.gas_used, step.outcome.gas_underpaid});
        }
    }

    // --- execution pipeline -----------------------------------------------------

    BatchInfo* head_incomplete() {
        for (BatchInfo& batch : batches_) {
            if (batch.phase == Phase::Done || batch.phase == Phase::Dropped) continue;
            return &batch;
        }
        return nullptr;
    }

    void pipeline_phase() {
        bool progress = true;
        while (progress) {
            progress = false;
            BatchInfo* batch = head_incomplete();
            if (!batch) return;
            switch (batch->phase) {
            case Phase::AwaitFinality:
                progress = advance_await_finality(*batch);
                break;
            case Phase::AwaitData:
                progress = advance_await_data(*batch);
                break;
            case Phase::Running:
                progress = advance_running(*batch);
                break;
            default:
                return;
            }
        }
    }

    bool advance_await_finality(BatchInfo& batch) {
        if (ledger_.finality_status(batch.order_position) != EntryStatus::LogFinal) {
            return false;
        }
        batch.log_final_tick = ledger_.finality_tick(batch.order_position);
        batch.phase = Phase::AwaitData;
        return true;
    }

    bool advance_await_data(BatchInfo& batch) {
        bool all_available = true;
        for (std::size_t i = 0; i < batch.txns.size(); ++i) {
            const auto& avail = batch.available_at[i];
            if (!avail || *avail > now_) {
                all_available = false;
                break;
            }
        }
        if (all_available) {
            Tick availability = batch.ordered_at;
            for (const auto& avail : batch.available_at) {
                availability = std::max(availability, *avail);
            }
            start_running(batch, std::max(*batch.log_final_tick, availability), batch.txns);
            return true;
        }

        if (!batch.blocked_since) batch.blocked_since = now_;
        if (std::holds_alternative<WaitIndefinitely>(sc_.da_policy)) {
            ++metrics_.counters.liveness_stall_ticks;
            return false;
        }
        const Tick timeout = std::get<TimeoutAbort>(sc_.da_policy).timeout;
        if (now_ < *batch.blocked_since + timeout) {
            return false;
        }
        // Timeout: the unavailable transactions are implicitly aborted. The
        // committed order no longer determines the state by itself.
        std::vector<Transaction> kept;
        Tick availability = batch.ordered_at;
        for (std::size_t i = 0; i < batch.txns.size(); ++i) {
            const auto& avail = batch.available_at[i];
            if (!avail || *avail > now_) {
                const std::uint64_t id = batch.txns[i].txn_id;
                batch.implicitly_aborted.push_back(id);
                metrics_.record(id).implicitly_aborted = true;
                ++metrics_.counters.order_finality_violations;
            } else {
                kept.push_back(batch.txns[i]);
                availability = std::max(availability, *avail);
            }
        }
        start_running(batch, std::max(*batch.log_final_tick, availability), kept);
        return true;
    }

    void start_running(BatchInfo& batch, Tick order_final, const std::vector<Transaction>& kept) {
        batch.order_final_tick = order_final;
        for (const Transaction& txn : kept) {
            TxnRecord& rec = metrics_.record(txn.txn_id);
            rec.log_final = batch.log_final_tick;
            rec.order_final = order_final;
        }
        batch.phase = Phase::Running;

        if (std::holds_alternative<CoupledStrategy>(sc_.strategy)) {
            const auto& coupled = std::get<CoupledStrategy>(sc_.strategy);
            // Value was computed and logged with the order; both shades land
            // together.
            if (!batch.implicitly_aborted.empty()) {
                throw InvariantViolation("coupled batch lost callData after embedding");
            }
            batch.executions = std::size_t(coupled.validators) * batch.exec_txns.size();
            batch.stage = RunStage::Instant;
            batch.due = now_;
            return;
        }

        compute_execution(batch, confirmed_, kept);

        if (const auto* opt = std::get_if<OptimisticStrategy>(&sc_.strategy)) {
            batch.cheat = std::find(opt->cheat_batches.begin(), opt->cheat_batches.end(),
                                    batch.batch_id) != opt->cheat_batches.end();
            const StateCommitment asserted =
                batch.cheat ? StateCommitment{labeled_wrong("optimistic-cheat", batch.batch_id,
                                                            batch.true_commitment.digest)}
                            : batch.true_commitment;
            batch.result = asserted;
            ledger_.append(DisputableAssertionEntry{batch.batch_id, asserted, now_ + opt->window},
                           now_);
            const OptimisticOutcome oc =
                optimistic_assert(now_, opt->window, opt->validators, batch.cheat,
                                  rng_optimistic_);
            batch.executions = std::size_t(1 + opt->validators) * batch.exec_txns.size();
            batch.stage = RunStage::Window;
            if (oc.reverted) batch.revert_at = oc.decided_at;
            batch.due = oc.decided_at;
            return;
        }

        const auto& dddr = std::get<DdDrStrategy>(sc_.strategy);
        const std::vector<std::uint64_t> committee =
            sample_committee(pool_, dddr.committee_size, rng_sampling_);
        DdContext ctx{batch.batch_id, batch.true_commitment};
        DdRunStats stats;
        const DdOutcome outcome =
            run_dd(pool_, committee, ctx, rng_byzantine_, reports_, &stats);
        ++metrics_.counters.dd_rounds;
        batch.executions = stats.executions * batch.exec_txns.size();
        if (const auto* agreed = std::get_if<DdAgreed>(&outcome)) {
            batch.result = agreed->commitment;
            batch.stage = RunStage::Dd;
            batch.due = now_ + dddr.dd_ticks;
        } else {
            batch.dd_reports = std::get<DdDiscrepancy>(outcome).reports;
            batch.stage = RunStage::Dr;
            batch.due = now_ + dddr.dd_ticks + dddr.dr_ticks;
        }
    }

    bool advance_running(BatchInfo& batch) {
        if (std::holds_alternative<OptimisticStrategy>(sc_.strategy) && batch.revert_at &&
            now_ >= *batch.revert_at && batch.stage == RunStage::Window) {
            // Challenge landed: revert, then re-assert honestly.
            const auto& opt = std::get<OptimisticStrategy>(sc_.strategy);
            ++metrics_.counters.optimistic_reverts;
            batch.result = batch.true_commitment;
            ledger_.append(DisputableAssertionEntry{batch.batch_id, batch.true_commitment,
                                                    *batch.revert_at + opt.window},
                           now_);
            batch.stage = RunStage::WindowCorrected;
            batch.due = *batch.revert_at + opt.window;
            return true;
        }
        if (now_ < batch.due) return false;

        switch (batch.stage) {
        case RunStage::Instant:
            complete(batch, *batch.order_final_tick);
            return true;
        case RunStage::Dd:
            if (batch.result != batch.true_commitment) ++metrics_.counters.safety_failures;
            ledger_.append(StateCommitEntry{batch.batch_id, batch.result}, now_);
            complete(batch, now_);
            return true;
        case RunStage::Dr: {
            const auto& dddr = std::get<DdDrStrategy>(sc_.strategy);
            DdContext ctx{batch.batch_id, batch.true_commitment};
            const DrResult dr = run_dr(pool_, ctx, rng_byzantine_, reports_);
            ++metrics_.counters.dr_rounds;
            if (dr.ambiguous) ++metrics_.counters.ambiguous_dr;
            if (dr.safety_failure) ++metrics_.counters.safety_failures;
            batch.executions += dr.executions * batch.exec_txns.size();
            const std::vector<SlashEvent> slashes =
                slash(batch.dd_reports, dr.winner, pool_, dddr.penalty_bps);
            metrics_.counters.slash_events += slashes.size();
            batch.result = dr.winner;
            ledger_.append(StateCommitEntry{batch.batch_id, dr.winner}, now_);
            complete(batch, now_);
            return true;
        }
        case RunStage::Window:
        case RunStage::WindowCorrected:
            // An unchallenged wrong assertion reaching the window end is the
            // safety failure; a corrected one never counts.
            if (batch.result != batch.true_commitment) ++metrics_.counters.safety_failures;
            complete(batch, now_);
            return true;
        case RunStage::None:
            throw InvariantViolation("running batch without a stage");
        }
        return false;
    }

    void complete(BatchInfo& batch, Tick state_final) {
        for (const PendingOutcome& out : batch.outcomes) {
            TxnRecord& rec = metrics_.record(out.txn_id);
            rec.status = out.status;
            rec.gas_used = out.gas_used;
            rec.state_final = state_final;
            statuses_[out.txn_id] = out.status;
            ++metrics_.counters.executed_txns;
            if (out.underpaid) ++metrics_.counters.gas_underpaid;
        }
        metrics_.counters.node_executions += batch.executions;
        confirmed_ = batch.post_state;
        if (!std::holds_alternative<CoupledStrategy>(sc_.strategy)) {
            speculative_ = confirmed_;
        }
        batch.phase = Phase::Done;
    }

    // --- checkpoints ---------------------------------------------------------------

    void checkpoint_phase() {
        for (const CheckpointPlanEntry& plan : sc_.checkpoint_plan) {
            if (plan.at_tick != now_) continue;
            declare_from_plan(plan);
        }
        for (const Checkpoint& cp : checkpoints_.all()) {
            if (cp.checkpoint_id == 0 || cp.finalized_at) continue;
            if (checkpoints_.finalize(cp.checkpoint_id, ledger_, now_)) {
                ++metrics_.counters.checkpoints_finalized;
                stamp_checkpoint_finality(checkpoints_.by_id(cp.checkpoint_id));
                if (sc_.gc_auto) {
                    const ReclaimReport gc = checkpoints_.garbage_collect(ledger_, store_);
                    metrics_.counters.gc_entries_dropped += gc.entries_dropped;
                    metrics_.counters.gc_payloads_dropped += gc.payloads_dropped;
                }
            }
        }
    }

    void declare_from_plan(const CheckpointPlanEntry& plan) {
        const BatchInfo* candidate = nullptr;
        for (const BatchInfo& batch : batches_) {
            if (batch.phase != Phase::Done) continue;
            if (ledger_.finality_status(batch.order_position) != EntryStatus::LogFinal) continue;
            if (!candidate || batch.order_position > candidate->order_position) {
                candidate = &batch;
            }
        }
        if (!candidate) {
            throw ConfigError("scenario.checkpoints.plan: no state-final position exists at tick " +
                              std::to_string(now_));
        }
        try {
            checkpoints_.declare(ledger_, candidate->order_position, candidate->post_state,
                                 plan.gate, now_, true);
            ++metrics_.counters.checkpoints_declared;
        } catch (const PrematureCheckpoint& e) {
            throw ConfigError(std::string("scenario.checkpoints.plan: ") + e.what());
        } catch (const UnfinalizedCandidate& e) {
            throw ConfigError(std::string("scenario.checkpoints.plan: ") + e.what());
        }
    }

    void stamp_checkpoint_finality(const Checkpoint& cp) {
        for (const BatchInfo& batch : batches_) {
            if (batch.phase != Phase::Done || batch.order_position > cp.named_position) continue;
            for (const PendingOutcome& out : batch.outcomes) {
                TxnRecord& rec = metrics_.record(out.txn_id);
                if (!rec.checkpoint_final) rec.checkpoint_final = now_;
            }
        }
    }

    // --- wrap-up ------------------------------------------------------------------

    void finish() {
        metrics_.head_commitment = commit(confirmed_).digest;
        for (std::uint64_t account : adversary_accounts_) {
            metrics_.counters.attacker_profit +=
                BigInt(confirmed_.get(Key::account(account))) -
                BigInt(genesis_.get(Key::account(account)));
        }
        metrics_.validate_finality_chain();
    }

    BatchInfo& batch_by_id(std::uint64_t batch_id) {
        for (BatchInfo& batch : batches_) {
            if (batch.batch_id == batch_id) return batch;
        }
        throw InvariantViolation("unknown batch id " + std::to_string(batch_id));
    }

    const Scenario& sc_;
    VmSemantics semantics_;
    DetRng rng_reorg_;
    DetRng rng_sampling_;
    DetRng rng_byzantine_;
    DetRng rng_optimistic_;

    Ledger ledger_;
    AvailabilityStore store_;
    Mempool mempool_;
    State genesis_;
    CheckpointManager checkpoints_;
    NodePool pool_;
    ReportStore reports_;
    Metrics metrics_;
    std::map<std::uint64_t, ExecStatus> statuses_;

    State confirmed_;    // after the last completed batch
    State speculative_;  // after the last ordered batch (coupled proposer chain)

    std::vector<BatchInfo> batches_;
    std::vector<QueuedSandwich> queued_sandwiches_;
    std::map<std::uint64_t, WithholdSpec> withhold_by_txn_;
    std::set<std::uint64_t> adversary_accounts_;

    Tick now_ = 0;
    std::uint64_t next_batch_id_ = 1;
    std::uint64_t next_synthetic_id_ = 1;
};

} // namespace

RunResult run(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.execute();
}

Digest evaluate_from_genesis(const RunResult& result) {
    if (result.ledger.base_position() != 0) {
        throw RecordsUnavailable("genesis-anchored records were garbage-collected");
    }
    const std::vector<Transaction> order =
        suffix_order(result.ledger, result.store, 0, result.end_tick);
    // Implicitly aborted transactions never execute; skip them the same way
    // the run did.
    std::vector<Transaction> effective;
    for (const Transaction& txn : order) {
        if (result.statuses.count(txn.txn_id)) effective.push_back(txn);
    }
    const VmSemantics semantics = result.scenario.semantics();
    const ReplayResult replay = replay_order(
        build_genesis(result.scenario), effective,
        [&](const Transaction& t, const State& s) { return execute(t, s, semantics); }, nullptr);
    return commit(replay.final_state).digest;
}

ReplayResult replay_run(const RunResult& result, const TxnInterpreter* patched) {
    const VmSemantics semantics = result.scenario.semantics();
    TxnInterpreter identity = [&](const Transaction& t, const State& s) {
        return execute(t, s, semantics);
    };
    const TxnInterpreter& interp = patched ? *patched : identity;
    const Checkpoint& cp = result.checkpoints.latest_finalized();

    const std::vector<Transaction> order =
        suffix_order(result.ledger, result.store, cp.named_position, result.end_tick);
    std::vector<Transaction> effective;
    for (const Transaction& txn : order) {
        if (result.statuses.count(txn.txn_id)) effective.push_back(txn);
    }
    return replay_order(cp.value, effective, interp, &result.statuses);
}

std::vector<StrategySpec> parse_strategy_specs(const std::string& text) {
    std::vector<StrategySpec> specs;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream istream(item);
        std::string part;
        while (std::getline(istream, part, ':')) parts.push_back(part);

        auto num = [&](std::size_t i, const char* what) -> std::uint64_t {
            try {
                std::size_t used = 0;
                const std::uint64_t v = std::stoull(parts.at(i), &used);
                if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("strategies: bad " + std::string(what) + " in \"" + item + "\"");
            }
        };

        StrategySpec spec;
        spec.label = item;
        if (parts[0] == "coupled") {
            CoupledStrategy s;
            if (parts.size() > 1) s.validators = static_cast<std::uint32_t>(num(1, "validators"));
            if (parts.size() > 2) throw ConfigError("strategies: too many fields in \"" + item + "\"");
            spec.config = s;
        } else if (parts[0] == "optimistic") {
            if (parts.size() < 3 || parts.size() > 3) {
                throw ConfigError("strategies: expected optimistic:<window>:<validators> in \"" +
                                  item + "\"");
            }
            OptimisticStrategy s;
            s.window = num(1, "window");
            s.validators = static_cast<std::uint32_t>(num(2, "validators"));
            if (s.window == 0) throw ConfigError("strategies: window must be positive");
            spec.config = s;
        } else if (parts[0] == "dddr") {
            if (parts.size() < 4 || parts.size() > 6) {
                throw ConfigError(
                    "strategies: expected dddr:<T>:<B>:<C>[:<byz_strategy>[:<p>]] in \"" + item +
                    "\"");
            }
            DdDrStrategy s;
            s.pool_total = num(1, "T");
            s.pool_byzantine = num(2, "B");
            s.committee_size = num(3, "C");
            if (s.pool_byzantine > s.pool_total) throw ConfigError("strategies: B exceeds T");
            if (s.committee_size == 0 || s.committee_size > s.pool_total) {
                throw ConfigError("strategies: C must be between 1 and T");
            }
            if (parts.size() >= 5) {
                const std::string& name = parts[4];
                if (name == "always_wrong") {
                    s.byz_strategy = AlwaysWrong{};
                } else if (name == "colluding_wrong") {
                    s.byz_strategy = ColludingWrong{};
                } else if (name == "copycat") {
                    s.byz_strategy = Copycat{};
                } else if (name == "cheat_with_prob") {
                    double p = 0.5;
                    if (parts.size() == 6) {
                        try {
                            p = std::stod(parts[5]);
                        } catch (const std::exception&) {
                            throw ConfigError("strategies: bad probability in \"" + item + "\"");
                        }
                    }
                    if (p < 0.0 || p > 1.0) throw ConfigError("strategies: p out of [0,1]");
                    s.byz_strategy = CheatWithProb{p};
                } else {
                    throw ConfigError("strategies: unknown byzantine strategy \"" + name + "\"");
                }
            }
            spec.config = s;
        } else {
            throw ConfigError("strategies: unknown strategy \"" + parts[0] + "\"");
        }
        specs.push_back(std::move(spec));
    }
    if (specs.empty()) {
        throw ConfigError("strategies: empty list");
    }
    return specs;
}

namespace {

double mean_latency(const Metrics& metrics, std::optional<Tick> TxnRecord::*field) {
    double total = 0;
    std::size_t n = 0;
    for (const TxnRecord& r : metrics.txns) {
        if (!(r.*field)) continue;
        total += static_cast<double>(*(r.*field)) - static_cast<double>(r.arrival);
        ++n;
    }
    return n == 0 ? 0.0 : total / static_cast<double>(n);
}

} // namespace

std::string compare(const Scenario& base, const std::vector<StrategySpec>& specs) {
    std::ostringstream out;
    out << std::left << std::setw(28) << "strategy" << std::right << std::setw(10) << "order_lat"
        << std::setw(10) << "state_lat" << std::setw(8) << "repl" << std::setw(8) << "safety"
        << std::setw(8) << "slashes" << "  head\n";
    for (const StrategySpec& spec : specs) {
        Scenario variant = base;
        variant.strategy = spec.config;
        const RunResult result = run(variant);
        out << std::left << std::setw(28) << spec.label << std::right << std::fixed
            << std::setprecision(2) << std::setw(10)
            << mean_latency(result.metrics, &TxnRecord::order_final) << std::setw(10)
            << mean_latency(result.metrics, &TxnRecord::state_final) << std::setw(8)
            << result.metrics.replication_factor() << std::setw(8)
            << result.metrics.counters.safety_failures << std::setw(8)
            << result.metrics.counters.slash_events << "  "
            << result.metrics.head_commitment.hex().substr(0, 16) << "\n";
    }
    return out.str();
}

} // namespace finsim
