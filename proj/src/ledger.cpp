#include "finsim/ledger.hpp"

#include "finsim/errors.hpp"
#include "finsim/rng.hpp"
#include "finsim/serialize.hpp"

#include <algorithm>

namespace finsim {

// --- callData ---------------------------------------------------------------

Digest calldata_digest(const CallDataRef& ref) {
    if (const auto* inl = std::get_if<InlineRef>(&ref)) {
        return sha256(inl->bytes);
    }
    return std::get<CasRef>(ref).digest;
}

Digest AvailabilityStore::put(std::vector<std::uint8_t> payload, bool withhold) {
    const Digest digest = sha256(payload);
    Stored stored;
    stored.payload = std::move(payload);
    stored.withheld = withhold;
    items_[digest] = std::move(stored);
    return digest;
}

void AvailabilityStore::schedule_reveal(const Digest& digest, Tick at) {
    auto it = items_.find(digest);
    if (it == items_.end()) {
        throw DomainError("schedule_reveal: unknown digest " + digest.hex());
    }
    it->second.reveal_at = at;
}

void AvailabilityStore::reveal_now(const Digest& digest) {
    auto it = items_.find(digest);
    if (it == items_.end()) {
        throw DomainError("reveal_now: unknown digest " + digest.hex());
    }
    it->second.withheld = false;
}

std::optional<std::vector<std::uint8_t>> AvailabilityStore::fetch(const Digest& digest,
                                                                  Tick now) const {
    auto it = items_.find(digest);
    if (it == items_.end() || !it->second.visible(now)) {
        return std::nullopt;
    }
    if (sha256(it->second.payload) != digest) {
        throw InvariantViolation("availability store corruption at " + digest.hex());
    }
    return it->second.payload;
}

bool AvailabilityStore::known(const Digest& digest) const {
    return items_.count(digest) != 0;
}

bool AvailabilityStore::withheld_at(const Digest& digest, Tick now) const {
    auto it = items_.find(digest);
    return it != items_.end() && !it->second.visible(now);
}

std::size_t AvailabilityStore::drop(const std::vector<Digest>& digests) {
    std::size_t dropped = 0;
    for (const Digest& d : digests) {
        dropped += items_.erase(d);
    }
    return dropped;
}

UnavailableDecision resolve_unavailable(const AvailabilityPolicy& policy,
                                        Tick unavailable_since, Tick now) {
    if (std::holds_alternative<WaitIndefinitely>(policy)) {
        return UnavailableDecision::KeepWaiting;
    }
    const Tick timeout = std::get<TimeoutAbort>(policy).timeout;
    return now >= unavailable_since + timeout ? UnavailableDecision::AbortTxn
                                              : UnavailableDecision::KeepWaiting;
}

// --- entries ----------------------------------------------------------------

std::string entry_kind_name(const EntryKind& kind) {
    switch (kind.index()) {
    case 0: return "order_commit";
    case 1: return "state_commit";
    case 2: return "checkpoint_decl";
    case 3: return "disputable_assertion";
    }
    throw InvariantViolation("unreachable entry kind");
}

Digest entry_digest(const EntryKind& kind) {
    ByteWriter w;
    w.put_u8(static_cast<std::uint8_t>(kind.index()));
    if (const auto* oc = std::get_if<OrderCommitEntry>(&kind)) {
        w.put_u64(oc->batch_id);
        w.put_u64(oc->refs.size());
        for (const CallDataRef& ref : oc->refs) {
            w.put_bytes(calldata_digest(ref).bytes);
        }
        w.put_u8(oc->coupled_value ? 1 : 0);
        if (oc->coupled_value) {
            w.put_bytes(oc->coupled_value->digest.bytes);
        }
    } else if (const auto* sc = std::get_if<StateCommitEntry>(&kind)) {
        w.put_u64(sc->batch_id);
        w.put_bytes(sc->commitment.digest.bytes);
    } else if (const auto* cd = std::get_if<CheckpointDeclEntry>(&kind)) {
        w.put_u64(cd->checkpoint_id);
        w.put_u64(cd->named_position);
        w.put_bytes(cd->commitment.digest.bytes);
    } else {
        const auto& da = std::get<DisputableAssertionEntry>(kind);
        w.put_u64(da.batch_id);
        w.put_bytes(da.commitment.digest.bytes);
        w.put_u64(da.window_end);
    }
    return sha256(w.bytes());
}

// --- the ledger ---------------------------------------------------------------

std::uint64_t Ledger::append(EntryKind kind, Tick now) {
    LogEntry entry;
    entry.position = head() + 1;
    entry.kind = std::move(kind);
    entry.appended_at = now;
    entries_.push_back(std::move(entry));
    return entries_.back().position;
}

const LogEntry& Ledger::at(std::uint64_t position) const {
    if (position <= base_position_) {
        throw RecordsUnavailable("position " + std::to_string(position) +
                                 " was garbage-collected");
    }
    if (position > head()) {
        throw PositionOutOfRange("position " + std::to_string(position) + " beyond head " +
                                 std::to_string(head()));
    }
    return entries_[position - base_position_ - 1];
}

EntryStatus Ledger::finality_status(std::uint64_t position) const {
    if (position > head()) {
        throw PositionOutOfRange("position " + std::to_string(position) + " beyond head " +
                                 std::to_string(head()));
    }
    if (std::holds_alternative<InstantFinality>(mode_)) {
        return EntryStatus::LogFinal;
    }
    const auto& prob = std::get<ProbabilisticFinality>(mode_);
    return head() - position >= prob.depth_k ? EntryStatus::LogFinal : EntryStatus::Pending;
}

std::optional<Tick> Ledger::finality_tick(std::uint64_t position) const {
    if (finality_status(position) == EntryStatus::Pending) {
        return std::nullopt;
    }
    if (std::holds_alternative<InstantFinality>(mode_)) {
        return at(position).appended_at;
    }
    const auto& prob = std::get<ProbabilisticFinality>(mode_);
    // Final once the k-th entry above it landed.
    const std::uint64_t deciding = position + prob.depth_k;
    if (deciding <= base_position_) {
        // Deciding entry was itself pruned; the checkpoint's own entry
        // carries the only surviving timestamp.
        return at(position).appended_at;
    }
    return at(deciding).appended_at;
}

ReorgReport Ledger::adversary_reorg(std::uint32_t depth, DetRng& rng) {
    if (!std::holds_alternative<ProbabilisticFinality>(mode_)) {
        throw UnsupportedMode("reorg is meaningless under instant finality");
    }
    const auto& prob = std::get<ProbabilisticFinality>(mode_);
    ReorgReport report;
    if (depth == 0 || prob.reorg_prob <= 0.0) {
        return report;
    }
    if (!rng.bernoulli(prob.reorg_prob)) {
        return report;
    }
    const std::uint64_t d = std::min<std::uint64_t>(depth, prob.depth_k);
    // Drop positions with head - position < d.
    const std::uint64_t cut = head() >= d ? head() - d : 0;  // keep positions <= cut
    while (head() > cut && head() > base_position_) {
        report.dropped.push_back(entries_.back());
        entries_.pop_back();
    }
    std::reverse(report.dropped.begin(), report.dropped.end());
    report.applied = !report.dropped.empty();
    return report;
}

std::vector<LogEntry> Ledger::prune_through(std::uint64_t upto) {
    if (upto <= base_position_) {
        return {};
    }
    if (upto > head()) {
        throw PositionOutOfRange("prune beyond head");
    }
    // Validate the whole prefix before touching the vector: erasing as we go
    // would shrink head() and poison the finality checks that follow.
    for (std::uint64_t pos = base_position_ + 1; pos <= upto; ++pos) {
        if (finality_status(pos) != EntryStatus::LogFinal) {
            throw InvariantViolation("prune would drop a non-final entry");
        }
    }
    const auto count = static_cast<std::ptrdiff_t>(upto - base_position_);
    std::vector<LogEntry> removed(std::make_move_iterator(entries_.begin()),
                                  std::make_move_iterator(entries_.begin() + count));
    entries_.erase(entries_.begin(), entries_.begin() + count);
    base_position_ = upto;
    return removed;
}

CallDataRef store_calldata(std::vector<std::uint8_t> payload, CalldataMode mode, bool withhold,
                           AvailabilityStore& store) {
    if (mode == CalldataMode::Inline) {
        if (withhold) {
            throw DomainError("inline callData cannot be withheld");
        }
        return InlineRef{std::move(payload)};
    }
    return CasRef{store.put(std::move(payload), withhold)};
}

std::optional<std::vector<std::uint8_t>> fetch_calldata(const CallDataRef& ref,
                                                        const AvailabilityStore& store, Tick now) {
    if (const auto* inl = std::get_if<InlineRef>(&ref)) {
        return inl->bytes;
    }
    return store.fetch(std::get<CasRef>(ref).digest, now);
}

} // namespace finsim
