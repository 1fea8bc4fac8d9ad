#pragma once

// State-value finality machinery: uniform committee sampling (explicitly not
// stake-weighted), the DD fast path (commit on unanimity only), the DR slow
// path (full-pool plurality), slashing of dissenting DD reporters, and the
// optimistic challenge window used for comparison runs.

#include "finsim/digest.hpp"
#include "finsim/rng.hpp"
#include "finsim/state.hpp"
#include "finsim/txn.hpp"
#include "finsim/value.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace finsim {

// --- Byzantine strategies ----------------------------------------------------

// Every Byzantine node knows the true commitment and may pick wrong digests
// adaptively; this is the strongest adversary the pool model supports.
struct AlwaysWrong {
    // Fixed claim; derived from the node id when absent. Nudged if it ever
    // collides with the true commitment, so the node is genuinely wrong.
    std::optional<Digest> claim;
};

struct ColludingWrong {};  // one shared wrong digest per batch

struct Copycat {
    // Fallback claim when nobody else on the committee produces a report.
    Digest seed;
};

struct CheatWithProb {
    double p = 0.0;
};

using ByzantineStrategy = std::variant<AlwaysWrong, ColludingWrong, Copycat, CheatWithProb>;

std::string strategy_name(const ByzantineStrategy& strategy);

struct Node {
    std::uint64_t id = 0;
    bool honest = true;
    Value stake = 0;
    bool slashed = false;
    ByzantineStrategy strategy;  // ignored for honest nodes
};

class NodePool {
public:
    NodePool() = default;

    // ids 0..T-1; ids below byzantine_count get the strategy, the rest are
    // honest.
    static NodePool uniform(std::size_t total, std::size_t byzantine_count,
                            ByzantineStrategy strategy, Value stake_each = 100);

    void add(Node node);
    Node& node(std::uint64_t id);
    const Node& node(std::uint64_t id) const;

    std::vector<std::uint64_t> unslashed_ids() const;
    std::size_t total() const { return nodes_.size(); }
    std::size_t unslashed_count() const;
    std::size_t byzantine_unslashed_count() const;

private:
    std::vector<Node> nodes_;
};

// --- reports ------------------------------------------------------------------

struct CommitteeReport {
    std::uint64_t node_id = 0;
    StateCommitment claimed;
};

// Sign-at-most-once registry: a node's first report for a batch is the only
// one that counts; later submissions are rejected.
class ReportStore {
public:
    bool submit(std::uint64_t batch_id, std::uint64_t node_id, const StateCommitment& claimed);
    std::optional<StateCommitment> lookup(std::uint64_t batch_id, std::uint64_t node_id) const;
    std::vector<CommitteeReport> batch_reports(std::uint64_t batch_id) const;

private:
    std::map<std::pair<std::uint64_t, std::uint64_t>, StateCommitment> reports_;
};

// --- DD / DR -------------------------------------------------------------------

struct DdAgreed {
    StateCommitment commitment;
};

struct DdDiscrepancy {
    std::vector<CommitteeReport> reports;
};

using DdOutcome = std::variant<DdAgreed, DdDiscrepancy>;

struct DdContext {
    std::uint64_t batch_id = 0;
    StateCommitment true_commitment;
};

struct DdRunStats {
    std::size_t executions = 0;  // members that actually ran the batch (copycats skip)
    bool safety_failure = false; // Agreed on a commitment != truth
};

// Uniform sample without replacement from unslashed nodes, returned in
// ascending id order (the copycat first-seen rule keys off this order).
std::vector<std::uint64_t> sample_committee(const NodePool& pool, std::size_t committee_size,
                                            DetRng& rng);

DdOutcome run_dd(const NodePool& pool, const std::vector<std::uint64_t>& committee,
                 const DdContext& ctx, DetRng& rng, ReportStore& reports,
                 DdRunStats* stats = nullptr);

// Convenience form that derives the true commitment by executing the batch.
DdOutcome run_dd(const NodePool& pool, const std::vector<std::uint64_t>& committee,
                 std::uint64_t batch_id, const std::vector<Transaction>& batch,
                 const State& input_state, DetRng& rng, ReportStore& reports,
                 DdRunStats* stats = nullptr, const VmSemantics& semantics = {});

struct DrResult {
    StateCommitment winner;
    bool ambiguous = false;      // plurality tie; lowest digest won
    bool safety_failure = false; // winner != truth
    std::size_t executions = 0;  // fresh executions beyond reused DD reports
    std::vector<CommitteeReport> reports;
};

// Full-pool plurality vote. Nodes that already signed for this batch keep
// that report.
DrResult run_dr(const NodePool& pool, const DdContext& ctx, DetRng& rng, ReportStore& reports);

struct SlashEvent {
    std::uint64_t node_id = 0;
    Value amount = 0;
};

// Every DD reporter whose claim differs from the DR result loses
// penalty_bps/10000 of stake and is removed from future sampling.
std::vector<SlashEvent> slash(const std::vector<CommitteeReport>& dd_reports,
                              const StateCommitment& dr_result, NodePool& pool,
                              std::uint32_t penalty_bps);

// --- optimistic window ----------------------------------------------------------

struct OptimisticOutcome {
    bool reverted = false;
    Tick decided_at = 0;         // challenge tick, or window end when accepted
    bool safety_failure = false; // cheat accepted because no validator existed
};

OptimisticOutcome optimistic_assert(Tick assert_tick, Tick window, std::uint32_t honest_validators,
                                    bool cheat, DetRng& rng);

} // namespace finsim
