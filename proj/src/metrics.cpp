#include "finsim/metrics.hpp"

#include "finsim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace finsim {

TxnRecord& Metrics::record(std::uint64_t txn_id) {
    auto it = std::lower_bound(txns.begin(), txns.end(), txn_id,
                               [](const TxnRecord& r, std::uint64_t id) { return r.txn_id < id; });
    if (it != txns.end() && it->txn_id == txn_id) {
        return *it;
    }
    TxnRecord fresh;
    fresh.txn_id = txn_id;
    return *txns.insert(it, std::move(fresh));
}

double Metrics::replication_factor() const {
    if (counters.executed_txns == 0) return 0.0;
    return static_cast<double>(counters.node_executions) /
           static_cast<double>(counters.executed_txns);
}

void Metrics::validate_finality_chain() const {
    auto check = [](const std::optional<Tick>& earlier, const std::optional<Tick>& later,
                    const char* pair, std::uint64_t txn_id) {
        if (!later) return;  // later shade not reached; nothing to compare
        if (!earlier) {
            throw InvariantViolation("txn " + std::to_string(txn_id) + ": " + pair +
                                     " reached out of order (earlier shade missing)");
        }
        if (*earlier > *later) {
            throw InvariantViolation("txn " + std::to_string(txn_id) + ": " + pair +
                                     " out of order (" + std::to_string(*earlier) + " > " +
                                     std::to_string(*later) + ")");
        }
    };
    for (const TxnRecord& r : txns) {
        check(r.log_final, r.order_final, "log/order", r.txn_id);
        check(r.order_final, r.state_final, "order/state", r.txn_id);
        check(r.state_final, r.checkpoint_final, "state/checkpoint", r.txn_id);
    }
}

namespace {

std::string opt_tick(const std::optional<Tick>& t) {
    return t ? std::to_string(*t) : std::string("pending");
}

std::string opt_u64(const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string("");
}

} // namespace

std::string Metrics::to_csv() const {
    std::ostringstream out;
    out << "txn_id,sender,action,arrival,wft,status,gas_used,batch_id,order_position,"
           "log_final,order_final,state_final,checkpoint_final\n";
    for (const TxnRecord& r : txns) {
        out << r.txn_id << ',' << r.sender << ',' << r.action << ',' << r.arrival << ','
            << (r.wft_rejected ? "rejected:" + *r.wft_rejected : std::string("admitted")) << ',';
        if (r.wft_rejected) {
            out << ',';
        } else if (r.implicitly_aborted) {
            out << "aborted_unavailable,";
        } else if (r.status) {
            out << status_name(*r.status) << ',';
        } else {
            out << "pending,";
        }
        out << r.gas_used << ',' << opt_u64(r.batch_id) << ',' << opt_u64(r.order_position) << ','
            << opt_tick(r.log_final) << ',' << opt_tick(r.order_final) << ','
            << opt_tick(r.state_final) << ',' << opt_tick(r.checkpoint_final) << '\n';
    }
    return out.str();
}

std::string Metrics::summary_json(const std::string& scenario_name, std::uint64_t seed) const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["head_commitment"] = head_commitment.hex();
    j["transactions"] = txns.size();

    nlohmann::ordered_json c;
    c["safety_failures"] = counters.safety_failures;
    c["slash_events"] = counters.slash_events;
    c["ambiguous_dr"] = counters.ambiguous_dr;
    c["order_finality_violations"] = counters.order_finality_violations;
    c["liveness_stall_ticks"] = counters.liveness_stall_ticks;
    c["flipped_outcomes"] = counters.flipped_outcomes;
    c["wft_rejections"] = counters.wft_rejections;
    c["reorgs_applied"] = counters.reorgs_applied;
    c["entries_dropped_by_reorg"] = counters.entries_dropped_by_reorg;
    c["dd_rounds"] = counters.dd_rounds;
    c["dr_rounds"] = counters.dr_rounds;
    c["optimistic_reverts"] = counters.optimistic_reverts;
    c["checkpoints_declared"] = counters.checkpoints_declared;
    c["checkpoints_finalized"] = counters.checkpoints_finalized;
    c["gc_entries_dropped"] = counters.gc_entries_dropped;
    c["gc_payloads_dropped"] = counters.gc_payloads_dropped;
    c["node_executions"] = counters.node_executions;
    c["executed_txns"] = counters.executed_txns;
    c["gas_underpaid"] = counters.gas_underpaid;
    c["attacker_profit"] = counters.attacker_profit.str();
    j["counters"] = c;
    j["replication_factor"] = replication_factor();

    return j.dump(2) + "\n";
}

} // namespace finsim
