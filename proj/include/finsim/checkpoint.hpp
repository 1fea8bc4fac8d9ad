#pragma once

// Checkpoint lifecycle. A checkpoint hard-codes (natural name, state value):
// once finalized and garbage-collected past, the association can never be
// recomputed from records, only trusted. Declaration is a log entry; the
// gate (block height or time-oracle quorum) decides when checkpoint
// finality actually lands.

#include "finsim/ledger.hpp"
#include "finsim/naming.hpp"
#include "finsim/state.hpp"
#include "finsim/txn.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace finsim {

class DetRng;

struct BlockHeightGate {
    std::uint64_t height = 0;
};

struct TimeOracleGate {
    std::uint32_t quorum = 0;             // q of oracle_flip_ticks.size()
    std::vector<Tick> oracle_flip_ticks;  // each attestor flips true at its tick
    Tick target = 0;
};

using Gate = std::variant<BlockHeightGate, TimeOracleGate>;

std::string gate_summary(const Gate& gate);
bool gate_satisfied(const Gate& gate, std::uint64_t head, Tick now);

struct Checkpoint {
    std::uint64_t checkpoint_id = 0;
    std::uint64_t named_position = 0;  // log position of the last included txn batch
    State value;
    Tick declared_at = 0;
    Gate gate;
    std::uint64_t decl_position = 0;   // log position of the CheckpointDecl entry
    std::optional<Tick> finalized_at;
};

struct ReclaimReport {
    std::uint64_t entries_dropped = 0;
    std::uint64_t payloads_dropped = 0;
};

struct ReplayResult {
    State final_state;
    std::uint64_t replayed_txns = 0;
    // Outcome-status flips vs the original run (needs original statuses).
    std::uint64_t flipped_outcomes = 0;
    std::vector<std::uint64_t> flipped_txn_ids;
};

class CheckpointManager {
public:
    CheckpointManager(State genesis, std::uint64_t min_gap)
        : min_gap_(min_gap) {
        Checkpoint c0;
        c0.checkpoint_id = 0;
        c0.named_position = 0;
        c0.value = std::move(genesis);
        c0.finalized_at = 0;
        checkpoints_.push_back(std::move(c0));
    }

    // Appends a CheckpointDecl entry. The caller vouches that the candidate
    // state has state-value finality.
    const Checkpoint& declare(Ledger& ledger, std::uint64_t named_position, const State& value,
                              Gate gate, Tick now, bool state_value_final);

    // Finalized once the declaration entry is LogFinal and the gate holds.
    bool finalize(std::uint64_t checkpoint_id, const Ledger& ledger, Tick now);

    // Re-anchors a pending declaration after its entry moved (reorg re-append).
    void move_declaration(std::uint64_t checkpoint_id, std::uint64_t new_decl_position);

    ReclaimReport garbage_collect(Ledger& ledger, AvailabilityStore& store);

    const Checkpoint& genesis() const { return checkpoints_.front(); }
    const Checkpoint& latest_finalized() const;
    const Checkpoint& by_id(std::uint64_t checkpoint_id) const;
    const std::vector<Checkpoint>& all() const { return checkpoints_; }
    std::uint64_t min_gap() const { return min_gap_; }

private:
    std::uint64_t min_gap_;
    std::vector<Checkpoint> checkpoints_;  // [0] is genesis
};

// Replays a committed order from a base state under an arbitrary
// interpreter. Statuses are compared against `original_statuses` when given.
ReplayResult replay_order(const State& base, const std::vector<Transaction>& order,
                          const TxnInterpreter& interpreter,
                          const std::map<std::uint64_t, ExecStatus>* original_statuses);

// Rebuilds the post-checkpoint transaction order from the live ledger
// suffix. Throws RecordsUnavailable when any callData cannot be fetched.
std::vector<Transaction> suffix_order(const Ledger& ledger, const AvailabilityStore& store,
                                      std::uint64_t from_position, Tick now);

ReplayResult recover_replay(const Checkpoint& checkpoint, const Ledger& ledger,
                            const AvailabilityStore& store, const TxnInterpreter& patched,
                            Tick now,
                            const std::map<std::uint64_t, ExecStatus>* original_statuses);

// --- M-of-N freshness query ---------------------------------------------------

enum class FreshnessVerdict : std::uint8_t { TrueHead = 0, ForkHead = 1, Ambiguous = 2 };

std::string freshness_verdict_name(FreshnessVerdict verdict);

// Samples N observers from a population with `compromised` eclipsed members;
// honest observers report the true head, compromised ones the fork head.
// Head wins with >= M agreeing reports; a tie at or above M is Ambiguous.
FreshnessVerdict verify_chain_freshness(std::size_t population, std::size_t compromised,
                                        std::size_t sample_n, std::size_t threshold_m,
                                        DetRng& rng);

} // namespace finsim
