#include "finsim/committee.hpp"

#include "finsim/errors.hpp"
#include "finsim/ordering.hpp"
#include "finsim/serialize.hpp"

#include <algorithm>

namespace finsim {

namespace {

Digest labeled_digest(const std::string& label, std::uint64_t a, std::uint64_t b = 0) {
    ByteWriter w;
    w.put_bytes(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    w.put_u64(a);
    w.put_u64(b);
    return sha256(w.bytes());
}

// A wrong claim must actually differ from the truth.
Digest ensure_not(Digest candidate, const Digest& truth) {
    if (candidate == truth) {
        candidate.bytes[0] ^= 0xFF;
    }
    return candidate;
}

StateCommitment wrong_claim_for(const Node& node, const DdContext& ctx) {
    if (const auto* aw = std::get_if<AlwaysWrong>(&node.strategy)) {
        const Digest base =
            aw->claim ? *aw->claim : labeled_digest("always-wrong", node.id);
        return StateCommitment{ensure_not(base, ctx.true_commitment.digest)};
    }
    if (std::holds_alternative<ColludingWrong>(node.strategy)) {
        const Digest base = labeled_digest("colluding-wrong", ctx.batch_id);
        return StateCommitment{ensure_not(base, ctx.true_commitment.digest)};
    }
    throw InvariantViolation("wrong_claim_for: strategy has no wrong claim");
}

} // namespace

std::string strategy_name(const ByzantineStrategy& strategy) {
    switch (strategy.index()) {
    case 0: return "always_wrong";
    case 1: return "colluding_wrong";
    case 2: return "copycat";
    case 3: return "cheat_with_prob";
    }
    throw InvariantViolation("unreachable strategy");
}

NodePool NodePool::uniform(std::size_t total, std::size_t byzantine_count,
                           ByzantineStrategy strategy, Value stake_each) {
    if (byzantine_count > total) {
        throw DomainError("byzantine count exceeds pool size");
    }
    NodePool pool;
    for (std::size_t i = 0; i < total; ++i) {
        Node n;
        n.id = i;
        n.honest = i >= byzantine_count;
        n.stake = stake_each;
        n.strategy = strategy;
        pool.add(std::move(n));
    }
    return pool;
}

void NodePool::add(Node node) {
    for (const Node& existing : nodes_) {
        if (existing.id == node.id) {
            throw DomainError("duplicate node id " + std::to_string(node.id));
        }
    }
    if (node.stake == 0) {
        throw DomainError("node stake must be positive");
    }
    nodes_.push_back(std::move(node));
}

Node& NodePool::node(std::uint64_t id) {
    for (Node& n : nodes_) {
        if (n.id == id) return n;
    }
    throw DomainError("unknown node id " + std::to_string(id));
}

const Node& NodePool::node(std::uint64_t id) const {
    for (const Node& n : nodes_) {
        if (n.id == id) return n;
    }
    throw DomainError("unknown node id " + std::to_string(id));
}

std::vector<std::uint64_t> NodePool::unslashed_ids() const {
    std::vector<std::uint64_t> ids;
    for (const Node& n : nodes_) {
        if (!n.slashed) ids.push_back(n.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::size_t NodePool::unslashed_count() const {
    return unslashed_ids().size();
}

std::size_t NodePool::byzantine_unslashed_count() const {
    std::size_t count = 0;
    for (const Node& n : nodes_) {
        if (!n.slashed && !n.honest) ++count;
    }
    return count;
}

bool ReportStore::submit(std::uint64_t batch_id, std::uint64_t node_id,
                         const StateCommitment& claimed) {
    return reports_.emplace(std::make_pair(batch_id, node_id), claimed).second;
}

std::optional<StateCommitment> ReportStore::lookup(std::uint64_t batch_id,
                                                   std::uint64_t node_id) const {
    auto it = reports_.find({batch_id, node_id});
    if (it == reports_.end()) return std::nullopt;
    return it->second;
}

std::vector<CommitteeReport> ReportStore::batch_reports(std::uint64_t batch_id) const {
    std::vector<CommitteeReport> out;
    for (auto it = reports_.lower_bound({batch_id, 0});
         it != reports_.end() && it->first.first == batch_id; ++it) {
        out.push_back({it->first.second, it->second});
    }
    return out;
}

std::vector<std::uint64_t> sample_committee(const NodePool& pool, std::size_t committee_size,
                                            DetRng& rng) {
    std::vector<std::uint64_t> ids = pool.unslashed_ids();
    if (committee_size < 1 || committee_size > ids.size()) {
        throw InfeasibleCommittee("committee size " + std::to_string(committee_size) +
                                  " not drawable from " + std::to_string(ids.size()) +
                                  " unslashed nodes");
    }
    // Partial Fisher-Yates: the first committee_size slots become the sample.
    for (std::size_t i = 0; i < committee_size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(committee_size);
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

// Shared reporting core for DD and DR. Members produce claims in ascending
// id order; copycats defer to the first non-copycat report and fall back to
// their seed when no such report exists.
struct ReportRound {
    std::vector<CommitteeReport> reports;
    std::size_t executions = 0;
};

ReportRound collect_reports(const NodePool& pool, const std::vector<std::uint64_t>& member_ids,
                            const DdContext& ctx, DetRng& rng, ReportStore& store) {
    ReportRound round;
    std::optional<StateCommitment> first_seen;
    std::vector<std::uint64_t> copycats;

    for (std::uint64_t id : member_ids) {
        const Node& n = pool.node(id);
        if (const auto existing = store.lookup(ctx.batch_id, id)) {
            // Signed already (DD report carried into DR); nothing new to run.
            round.reports.push_back({id, *existing});
            if (!first_seen && (n.honest || !std::holds_alternative<Copycat>(n.strategy))) {
                first_seen = *existing;
            }
            continue;
        }
        if (!n.honest && std::holds_alternative<Copycat>(n.strategy)) {
            copycats.push_back(id);
            continue;
        }

        StateCommitment claim;
        if (n.honest) {
            claim = ctx.true_commitment;
            ++round.executions;
        } else if (const auto* cheat = std::get_if<CheatWithProb>(&n.strategy)) {
            ++round.executions;
            if (rng.bernoulli(cheat->p)) {
                claim = StateCommitment{ensure_not(labeled_digest("cheat", ctx.batch_id, id),
                                                   ctx.true_commitment.digest)};
            } else {
                claim = ctx.true_commitment;
            }
        } else {
            // AlwaysWrong / ColludingWrong still run the batch (that is how
            // they know which digest to avoid), then claim adaptively.
            ++round.executions;
            claim = wrong_claim_for(n, ctx);
        }
        store.submit(ctx.batch_id, id, claim);
        round.reports.push_back({id, claim});
        if (!first_seen) first_seen = claim;
    }

    for (std::uint64_t id : copycats) {
        const Node& n = pool.node(id);
        const StateCommitment claim =
            first_seen ? *first_seen
                       : StateCommitment{std::get<Copycat>(n.strategy).seed};
        store.submit(ctx.batch_id, id, claim);
        round.reports.push_back({id, claim});
    }

    std::sort(round.reports.begin(), round.reports.end(),
              [](const auto& a, const auto& b) { return a.node_id < b.node_id; });
    return round;
}

} // namespace

DdOutcome run_dd(const NodePool& pool, const std::vector<std::uint64_t>& committee,
                 const DdContext& ctx, DetRng& rng, ReportStore& reports, DdRunStats* stats) {
    if (committee.empty()) {
        throw InfeasibleCommittee("empty committee");
    }
    const ReportRound round = collect_reports(pool, committee, ctx, rng, reports);
    if (stats) {
        stats->executions = round.executions;
        stats->safety_failure = false;
    }
    const StateCommitment& first = round.reports.front().claimed;
    const bool unanimous =
        std::all_of(round.reports.begin(), round.reports.end(),
                    [&](const CommitteeReport& r) { return r.claimed == first; });
    if (!unanimous) {
        return DdDiscrepancy{round.reports};
    }
    if (stats && !(first == ctx.true_commitment)) {
        stats->safety_failure = true;
    }
    return DdAgreed{first};
}

DdOutcome run_dd(const NodePool& pool, const std::vector<std::uint64_t>& committee,
                 std::uint64_t batch_id, const std::vector<Transaction>& batch,
                 const State& input_state, DetRng& rng, ReportStore& reports, DdRunStats* stats,
                 const VmSemantics& semantics) {
    DdContext ctx;
    ctx.batch_id = batch_id;
    ctx.true_commitment = commit(run_batch(batch, input_state, semantics).final_state());
    return run_dd(pool, committee, ctx, rng, reports, stats);
}

DrResult run_dr(const NodePool& pool, const DdContext& ctx, DetRng& rng, ReportStore& reports) {
    const std::vector<std::uint64_t> voters = pool.unslashed_ids();
    if (voters.empty()) {
        throw NoResolution("no unslashed nodes left to resolve the discrepancy");
    }
    const ReportRound round = collect_reports(pool, voters, ctx, rng, reports);

    std::map<Digest, std::size_t> tally;
    for (const CommitteeReport& r : round.reports) {
        ++tally[r.claimed.digest];
    }
    // Plurality; ties resolve to the lowest digest and are flagged.
    auto best = tally.begin();
    bool tie = false;
    for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
        if (it->second > best->second) {
            best = it;
            tie = false;
        } else if (it->second == best->second) {
            tie = true;  // best stays: map order is ascending digest
        }
    }

    DrResult result;
    result.winner = StateCommitment{best->first};
    result.ambiguous = tie;
    result.safety_failure = !(result.winner == ctx.true_commitment);
    result.executions = round.executions;
    result.reports = round.reports;
    return result;
}

std::vector<SlashEvent> slash(const std::vector<CommitteeReport>& dd_reports,
                              const StateCommitment& dr_result, NodePool& pool,
                              std::uint32_t penalty_bps) {
    if (penalty_bps > 10'000) {
        throw DomainError("penalty exceeds 100%");
    }
    std::vector<SlashEvent> events;
    for (const CommitteeReport& r : dd_reports) {
        if (r.claimed == dr_result) continue;
        Node& n = pool.node(r.node_id);
        if (n.slashed) continue;
        const Value amount = Value(BigInt(n.stake) * penalty_bps / 10'000);
        n.stake -= amount;
        n.slashed = true;
        events.push_back({n.id, amount});
    }
    return events;
}

OptimisticOutcome optimistic_assert(Tick assert_tick, Tick window, std::uint32_t honest_validators,
                                    bool cheat, DetRng& rng) {
    if (window == 0) {
        throw DomainError("challenge window must be positive");
    }
    OptimisticOutcome out;
    if (cheat && honest_validators >= 1) {
        out.reverted = true;
        out.decided_at = assert_tick + 1 + rng.next_below(window);
        return out;
    }
    out.decided_at = assert_tick + window;
    out.safety_failure = cheat;  // nobody was there to challenge
    return out;
}

} // namespace finsim
