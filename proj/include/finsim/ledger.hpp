#pragma once

// Append-only log with pluggable log-finality semantics plus the callData
// availability layer. Positions are dense, 1-based, and strictly increasing;
// entries below the finality frontier are immutable. A reorg can only drop
// the non-final suffix. Garbage collection prunes a finalized prefix but
// keeps the position numbering.

#include "finsim/digest.hpp"
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

// --- log finality -----------------------------------------------------------

struct InstantFinality {};

struct ProbabilisticFinality {
    std::uint32_t depth_k = 6;   // entries required on top before final
    double reorg_prob = 0.0;     // per adversary opportunity
};

using FinalityMode = std::variant<InstantFinality, ProbabilisticFinality>;

enum class EntryStatus : std::uint8_t { Pending = 0, LogFinal = 1 };

// --- callData ---------------------------------------------------------------

struct InlineRef {
    std::vector<std::uint8_t> bytes;
};

struct CasRef {
    Digest digest;
};

using CallDataRef = std::variant<InlineRef, CasRef>;

Digest calldata_digest(const CallDataRef& ref);

enum class CalldataMode : std::uint8_t { Inline = 0, Cas = 1 };

// Content-addressed payload store. A withheld payload is known (its digest
// circulates) but not fetchable until revealed.
class AvailabilityStore {
public:
    Digest put(std::vector<std::uint8_t> payload, bool withhold);
    void schedule_reveal(const Digest& digest, Tick at);
    void reveal_now(const Digest& digest);

    // nullopt: withheld at `now` or dropped. Verifies payload integrity
    // against the digest and aborts the run on mismatch.
    std::optional<std::vector<std::uint8_t>> fetch(const Digest& digest, Tick now) const;

    bool known(const Digest& digest) const;
    bool withheld_at(const Digest& digest, Tick now) const;
    std::size_t drop(const std::vector<Digest>& digests);
    std::size_t size() const { return items_.size(); }

private:
    struct Stored {
        std::vector<std::uint8_t> payload;
        bool withheld = false;
        std::optional<Tick> reveal_at;
        bool visible(Tick now) const {
            return !withheld || (reveal_at && now >= *reveal_at);
        }
    };
    std::map<Digest, Stored> items_;
};

// --- unavailable-data policy (§ the liveness-vs-finality fork) --------------

struct WaitIndefinitely {};

struct TimeoutAbort {
    Tick timeout = 10;
};

using AvailabilityPolicy = std::variant<WaitIndefinitely, TimeoutAbort>;

enum class UnavailableDecision : std::uint8_t {
    KeepWaiting = 0,  // liveness stalls, order finality intact
    AbortTxn = 1,     // run proceeds, committed order no longer decides the state
};

UnavailableDecision resolve_unavailable(const AvailabilityPolicy& policy,
                                        Tick unavailable_since, Tick now);

// --- entries ----------------------------------------------------------------

struct OrderCommitEntry {
    std::uint64_t batch_id = 0;
    std::vector<CallDataRef> refs;
    // Present only under the coupled strategy: order and state value commit
    // in one entry, so their finality ticks coincide.
    std::optional<StateCommitment> coupled_value;
};

struct StateCommitEntry {
    std::uint64_t batch_id = 0;
    StateCommitment commitment;
};

struct CheckpointDeclEntry {
    std::uint64_t checkpoint_id = 0;
    std::uint64_t named_position = 0;
    StateCommitment commitment;
    std::string gate_summary;
};

struct DisputableAssertionEntry {
    std::uint64_t batch_id = 0;
    StateCommitment commitment;
    Tick window_end = 0;
};

using EntryKind =
    std::variant<OrderCommitEntry, StateCommitEntry, CheckpointDeclEntry, DisputableAssertionEntry>;

std::string entry_kind_name(const EntryKind& kind);
Digest entry_digest(const EntryKind& kind);

struct LogEntry {
    std::uint64_t position = 0;
    EntryKind kind;
    Tick appended_at = 0;
};

struct ReorgReport {
    bool applied = false;
    std::vector<LogEntry> dropped;  // ascending positions
};

// --- the ledger --------------------------------------------------------------

class Ledger {
public:
    explicit Ledger(FinalityMode mode) : mode_(std::move(mode)) {}

    std::uint64_t append(EntryKind kind, Tick now);

    std::uint64_t head() const { return base_position_ + entries_.size(); }
    std::uint64_t base_position() const { return base_position_; }

    // position in (base, head]
    const LogEntry& at(std::uint64_t position) const;
    bool pruned(std::uint64_t position) const { return position <= base_position_; }

    EntryStatus finality_status(std::uint64_t position) const;
    // Tick the entry reached log finality, if it has.
    std::optional<Tick> finality_tick(std::uint64_t position) const;

    // With probability reorg_prob, drops the youngest min(depth, k) entries.
    // Final entries are never dropped. Probabilistic mode only.
    ReorgReport adversary_reorg(std::uint32_t depth, DetRng& rng);

    // GC: discard entries at positions <= upto. Every dropped entry must be
    // LogFinal.
    std::vector<LogEntry> prune_through(std::uint64_t upto);

    const FinalityMode& mode() const { return mode_; }
    const std::vector<LogEntry>& live_entries() const { return entries_; }

private:
    FinalityMode mode_;
    std::uint64_t base_position_ = 0;  // count of pruned entries
    std::vector<LogEntry> entries_;    // entries_[i].position = base_position_ + i + 1
};

CallDataRef store_calldata(std::vector<std::uint8_t> payload, CalldataMode mode, bool withhold,
                           AvailabilityStore& store);

std::optional<std::vector<std::uint8_t>> fetch_calldata(const CallDataRef& ref,
                                                        const AvailabilityStore& store, Tick now);

} // namespace finsim
