#include "finsim/checkpoint.hpp"

#include "finsim/errors.hpp"
#include "finsim/rng.hpp"

#include <algorithm>

namespace finsim {

std::string gate_summary(const Gate& gate) {
    if (const auto* bh = std::get_if<BlockHeightGate>(&gate)) {
        return "height>=" + std::to_string(bh->height);
    }
    const auto& to = std::get<TimeOracleGate>(gate);
    return "oracles " + std::to_string(to.quorum) + "/" +
           std::to_string(to.oracle_flip_ticks.size()) + " after tick " +
           std::to_string(to.target);
}

bool gate_satisfied(const Gate& gate, std::uint64_t head, Tick now) {
    if (const auto* bh = std::get_if<BlockHeightGate>(&gate)) {
        return head >= bh->height;
    }
    const auto& to = std::get<TimeOracleGate>(gate);
    if (now < to.target) {
        return false;
    }
    std::uint32_t attesting = 0;
    for (Tick flip : to.oracle_flip_ticks) {
        if (now >= flip) ++attesting;
    }
    return attesting >= to.quorum;
}

const Checkpoint& CheckpointManager::declare(Ledger& ledger, std::uint64_t named_position,
                                             const State& value, Gate gate, Tick now,
                                             bool state_value_final) {
    const Checkpoint& prev = checkpoints_.back();
    if (named_position < prev.named_position + min_gap_) {
        const std::uint64_t gap =
            named_position > prev.named_position ? named_position - prev.named_position : 0;
        throw PrematureCheckpoint("gap " + std::to_string(gap) + " below minimum " +
                                  std::to_string(min_gap_));
    }
    if (named_position > ledger.head() ||
        ledger.finality_status(named_position) != EntryStatus::LogFinal) {
        throw UnfinalizedCandidate("position " + std::to_string(named_position) +
                                   " is not log-final");
    }
    if (!state_value_final) {
        throw UnfinalizedCandidate("state at position " + std::to_string(named_position) +
                                   " lacks state-value finality");
    }

    Checkpoint cp;
    cp.checkpoint_id = checkpoints_.size();
    cp.named_position = named_position;
    cp.value = value;
    cp.declared_at = now;
    cp.gate = gate;

    CheckpointDeclEntry entry;
    entry.checkpoint_id = cp.checkpoint_id;
    entry.named_position = named_position;
    entry.commitment = commit(value);
    entry.gate_summary = gate_summary(gate);
    cp.decl_position = ledger.append(entry, now);

    checkpoints_.push_back(std::move(cp));
    return checkpoints_.back();
}

bool CheckpointManager::finalize(std::uint64_t checkpoint_id, const Ledger& ledger, Tick now) {
    if (checkpoint_id == 0 || checkpoint_id >= checkpoints_.size()) {
        throw DomainError("unknown checkpoint id " + std::to_string(checkpoint_id));
    }
    Checkpoint& cp = checkpoints_[checkpoint_id];
    if (cp.finalized_at) {
        return true;
    }
    // The declaration itself must be irrevocable first.
    if (ledger.finality_status(cp.decl_position) != EntryStatus::LogFinal) {
        return false;
    }
    if (!gate_satisfied(cp.gate, ledger.head(), now)) {
        return false;
    }
    cp.finalized_at = now;
    return true;
}

void CheckpointManager::move_declaration(std::uint64_t checkpoint_id,
                                         std::uint64_t new_decl_position) {
    if (checkpoint_id == 0 || checkpoint_id >= checkpoints_.size()) {
        throw DomainError("unknown checkpoint id " + std::to_string(checkpoint_id));
    }
    Checkpoint& cp = checkpoints_[checkpoint_id];
    if (cp.finalized_at) {
        throw InvariantViolation("finalized checkpoint declaration cannot move");
    }
    cp.decl_position = new_decl_position;
}

const Checkpoint& CheckpointManager::latest_finalized() const {
    for (auto it = checkpoints_.rbegin(); it != checkpoints_.rend(); ++it) {
        if (it->finalized_at) return *it;
    }
    return checkpoints_.front();  // genesis is always finalized
}

const Checkpoint& CheckpointManager::by_id(std::uint64_t checkpoint_id) const {
    if (checkpoint_id >= checkpoints_.size()) {
        throw DomainError("unknown checkpoint id " + std::to_string(checkpoint_id));
    }
    return checkpoints_[checkpoint_id];
}

ReclaimReport CheckpointManager::garbage_collect(Ledger& ledger, AvailabilityStore& store) {
    ReclaimReport report;
    const Checkpoint& cp = latest_finalized();
    if (cp.named_position <= ledger.base_position()) {
        return report;  // nothing new to reclaim (genesis included)
    }
    std::vector<Digest> payloads;
    for (const LogEntry& entry : ledger.live_entries()) {
        if (entry.position > cp.named_position) break;
        if (const auto* oc = std::get_if<OrderCommitEntry>(&entry.kind)) {
            for (const CallDataRef& ref : oc->refs) {
                if (std::holds_alternative<CasRef>(ref)) {
                    payloads.push_back(calldata_digest(ref));
                }
            }
        }
    }
    report.entries_dropped = ledger.prune_through(cp.named_position).size();
    report.payloads_dropped = store.drop(payloads);
    return report;
}

ReplayResult replay_order(const State& base, const std::vector<Transaction>& order,
                          const TxnInterpreter& interpreter,
                          const std::map<std::uint64_t, ExecStatus>* original_statuses) {
    ReplayResult result;
    result.final_state = base;
    for (const Transaction& txn : order) {
        const ExecOutcome outcome = interpreter(txn, result.final_state);
        result.final_state = outcome.new_state;
        ++result.replayed_txns;
        if (original_statuses) {
            auto it = original_statuses->find(txn.txn_id);
            if (it != original_statuses->end() && it->second != outcome.status) {
                ++result.flipped_outcomes;
                result.flipped_txn_ids.push_back(txn.txn_id);
            }
        }
    }
    return result;
}

std::vector<Transaction> suffix_order(const Ledger& ledger, const AvailabilityStore& store,
                                      std::uint64_t from_position, Tick now) {
    std::vector<Transaction> order;
    for (const LogEntry& entry : ledger.live_entries()) {
        if (entry.position <= from_position) continue;
        const auto* oc = std::get_if<OrderCommitEntry>(&entry.kind);
        if (!oc) continue;
        for (const CallDataRef& ref : oc->refs) {
            const auto payload = fetch_calldata(ref, store, now);
            if (!payload) {
                throw RecordsUnavailable("callData " + calldata_digest(ref).hex() +
                                         " for position " + std::to_string(entry.position) +
                                         " is unavailable; replay cannot proceed");
            }
            order.push_back(deserialize_txn(*payload));
        }
    }
    return order;
}

ReplayResult recover_replay(const Checkpoint& checkpoint, const Ledger& ledger,
                            const AvailabilityStore& store, const TxnInterpreter& patched,
                            Tick now,
                            const std::map<std::uint64_t, ExecStatus>* original_statuses) {
    if (ledger.base_position() > checkpoint.named_position) {
        throw RecordsUnavailable("ledger pruned beyond checkpoint " +
                                 std::to_string(checkpoint.checkpoint_id));
    }
    const std::vector<Transaction> order =
        suffix_order(ledger, store, checkpoint.named_position, now);
    return replay_order(checkpoint.value, order, patched, original_statuses);
}

std::string freshness_verdict_name(FreshnessVerdict verdict) {
    switch (verdict) {
    case FreshnessVerdict::TrueHead: return "true_head";
    case FreshnessVerdict::ForkHead: return "fork_head";
    case FreshnessVerdict::Ambiguous: return "ambiguous";
    }
    throw InvariantViolation("unreachable verdict");
}

FreshnessVerdict verify_chain_freshness(std::size_t population, std::size_t compromised,
                                        std::size_t sample_n, std::size_t threshold_m,
                                        DetRng& rng) {
    if (compromised > population) {
        throw DomainError("compromised observers exceed population");
    }
    if (sample_n > population || threshold_m > sample_n || sample_n == 0) {
        throw DomainError("need 1 <= M <= N <= population");
    }
    // Observers 0..compromised-1 are eclipsed; sample N without replacement.
    std::vector<std::size_t> ids(population);
    for (std::size_t i = 0; i < population; ++i) ids[i] = i;
    std::size_t fork_reports = 0;
    for (std::size_t i = 0; i < sample_n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(population - i));
        std::swap(ids[i], ids[j]);
        if (ids[i] < compromised) ++fork_reports;
    }
    const std::size_t true_reports = sample_n - fork_reports;
    const std::size_t best = std::max(true_reports, fork_reports);
    if (best < threshold_m || true_reports == fork_reports) {
        return FreshnessVerdict::Ambiguous;
    }
    return true_reports > fork_reports ? FreshnessVerdict::TrueHead : FreshnessVerdict::ForkHead;
}

} // namespace finsim
