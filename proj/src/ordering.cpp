#include "finsim/ordering.hpp"

#include "finsim/errors.hpp"
#include "finsim/rng.hpp"

#include <algorithm>

namespace finsim {

OrderingPolicy parse_ordering_policy(const std::string& text) {
    if (text == "arrival") {
        return ArrivalOrder{};
    }
    if (text == "gas_price") {
        return GasPriceThenArrival{};
    }
    if (text.rfind("random:", 0) == 0) {
        const std::string seed_text = text.substr(7);
        try {
            std::size_t used = 0;
            const std::uint64_t seed = std::stoull(seed_text, &used);
            if (used != seed_text.size()) {
                throw std::invalid_argument(seed_text);
            }
            return RandomPermutation{seed};
        } catch (const std::exception&) {
            throw ConfigError("ordering: bad seed in \"" + text + "\"");
        }
    }
    throw ConfigError("ordering: unknown policy \"" + text +
                      "\" (expected arrival | gas_price | random:<seed>)");
}

std::string ordering_policy_name(const OrderingPolicy& policy) {
    if (std::holds_alternative<ArrivalOrder>(policy)) {
        return "arrival";
    }
    if (std::holds_alternative<GasPriceThenArrival>(policy)) {
        return "gas_price";
    }
    return "random:" + std::to_string(std::get<RandomPermutation>(policy).seed);
}

void Mempool::add(Transaction txn) {
    if (txn.gas_limit == 0) {
        throw DomainError("transaction gas_limit must be positive");
    }
    const std::uint64_t id = txn.txn_id;
    if (!pending_.emplace(id, std::move(txn)).second) {
        throw InvariantViolation("duplicate txn id " + std::to_string(id) + " in mempool");
    }
}

std::vector<Transaction> Mempool::schedule(const OrderingPolicy& policy,
                                           std::size_t batch_size) const {
    if (batch_size == 0) {
        throw DomainError("batch_size must be at least 1");
    }
    std::vector<Transaction> order;
    order.reserve(pending_.size());
    for (const auto& [id, txn] : pending_) {
        order.push_back(txn);  // map iteration yields id-sorted contents
    }

    if (std::holds_alternative<ArrivalOrder>(policy)) {
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.arrival_time < b.arrival_time;  // id order breaks ties
        });
    } else if (std::holds_alternative<GasPriceThenArrival>(policy)) {
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (a.gas_price != b.gas_price) return a.gas_price > b.gas_price;
            return a.arrival_time < b.arrival_time;
        });
    } else {
        DetRng rng(std::get<RandomPermutation>(policy).seed);
        rng.shuffle(order);
    }

    if (order.size() > batch_size) {
        order.resize(batch_size);
    }
    return order;
}

std::vector<Transaction> Mempool::take_batch(const OrderingPolicy& policy,
                                             std::size_t batch_size) {
    std::vector<Transaction> batch = schedule(policy, batch_size);
    for (const Transaction& txn : batch) {
        pending_.erase(txn.txn_id);
    }
    return batch;
}

SandwichPlan inject_sandwich(std::uint64_t adversary_account, const Transaction& victim,
                             const State& state_view, const SandwichOpts& opts) {
    SandwichPlan plan;
    plan.victim = victim;

    const Value front_price = victim.gas_price + opts.epsilon;
    const Value back_price = victim.gas_price >= opts.epsilon
                                 ? Value(victim.gas_price - opts.epsilon)
                                 : Value(0);

    auto make_leg = [&](std::uint64_t id, Action action, const Value& price) {
        Transaction t;
        t.txn_id = id;
        t.sender = adversary_account;
        t.action = std::move(action);
        t.gas_limit = opts.gas_limit;
        t.gas_price = price;
        t.signed_ok = true;
        t.arrival_time = opts.arrival;
        return t;
    };

    auto scaled = [&](const Value& amount) {
        return Value(BigInt(amount) * opts.exit_bps / 10'000);
    };

    if (const auto* buy = std::get_if<SwapBuyAction>(&victim.action)) {
        // Mirror the buy, then unwind the exact base position the front leg
        // acquires from this state.
        const Value r_quote = state_view.get(Key::pool_reserve(buy->pool_id, TokenSide::Quote));
        const Value r_base = state_view.get(Key::pool_reserve(buy->pool_id, TokenSide::Base));
        const Value acquired = constant_product_out(r_quote, r_base, buy->amount_in);
        plan.front = make_leg(opts.front_txn_id, SwapBuyAction{buy->pool_id, buy->amount_in},
                              front_price);
        plan.back = make_leg(opts.back_txn_id, SwapSellAction{buy->pool_id, scaled(acquired)},
                             back_price);
        return plan;
    }
    if (const auto* sell = std::get_if<SwapSellAction>(&victim.action)) {
        // Mirror the sell, then buy the position back with the proceeds.
        const Value r_quote = state_view.get(Key::pool_reserve(sell->pool_id, TokenSide::Quote));
        const Value r_base = state_view.get(Key::pool_reserve(sell->pool_id, TokenSide::Base));
        const Value proceeds = constant_product_out(r_base, r_quote, sell->amount_in);
        plan.front = make_leg(opts.front_txn_id, SwapSellAction{sell->pool_id, sell->amount_in},
                              front_price);
        plan.back = make_leg(opts.back_txn_id, SwapBuyAction{sell->pool_id, scaled(proceeds)},
                             back_price);
        return plan;
    }
    throw NotFrontRunnable("victim txn " + std::to_string(victim.txn_id) + " is not a swap");
}

ExecTrace run_batch(const std::vector<Transaction>& batch, const State& initial,
                    const VmSemantics& semantics) {
    ExecTrace trace;
    trace.initial = initial;
    const State* current = &trace.initial;
    for (const Transaction& txn : batch) {
        ExecStep step;
        step.txn = txn;
        step.outcome = execute(txn, *current, semantics);
        trace.steps.push_back(std::move(step));
        current = &trace.steps.back().outcome.new_state;
    }
    return trace;
}

BigInt attacker_profit(const ExecTrace& trace, std::uint64_t adversary_account) {
    const Key key = Key::account(adversary_account);
    return BigInt(trace.final_state().get(key)) - BigInt(trace.initial.get(key));
}

} // namespace finsim
