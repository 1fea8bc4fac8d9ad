#include "finsim/txn.hpp"

#include "finsim/errors.hpp"
#include "finsim/serialize.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace finsim {

namespace {

namespace mp = boost::multiprecision;

// gas_limit * gas_price, saturated into Value range only through explicit
// comparison; the raw product can exceed 128 bits, so it lives in cpp_int.
BigInt max_fee_wide(const Transaction& txn) {
    return BigInt(txn.gas_limit) * BigInt(txn.gas_price);
}

// Debit up to `owed` from `account`; clamps at zero when the balance cannot
// cover it. Returns the amount actually moved.
Value debit_clamped(State& state, const Key& account, const BigInt& owed) {
    const Value balance = state.get(account);
    const BigInt have(balance);
    if (have >= owed) {
        const Value paid = Value(owed);
        state.sub(account, paid);
        return paid;
    }
    state.set(account, 0);
    return balance;
}

} // namespace

ActionKind action_kind(const Action& action) {
    return static_cast<ActionKind>(action.index());
}

std::string action_name(const Action& action) {
    switch (action_kind(action)) {
    case ActionKind::Transfer: return "transfer";
    case ActionKind::SwapBuy: return "swap_buy";
    case ActionKind::SwapSell: return "swap_sell";
    case ActionKind::NoOp: return "noop";
    case ActionKind::Malformed: return "malformed";
    }
    throw InvariantViolation("unreachable action kind");
}

std::string status_name(ExecStatus status) {
    switch (status) {
    case ExecStatus::Committed: return "committed";
    case ExecStatus::Aborted: return "aborted";
    case ExecStatus::GasExhausted: return "gas_exhausted";
    }
    throw InvariantViolation("unreachable exec status");
}

std::uint64_t GasCostTable::cost(const Action& action) const {
    switch (action_kind(action)) {
    case ActionKind::Transfer: return transfer;
    case ActionKind::SwapBuy: return swap_buy;
    case ActionKind::SwapSell: return swap_sell;
    case ActionKind::NoOp: return noop;
    case ActionKind::Malformed: return malformed_abort;
    }
    throw InvariantViolation("unreachable action kind");
}

Value constant_product_out(const Value& reserve_in, const Value& reserve_out,
                           const Value& amount_in) {
    if (amount_in == 0) {
        return 0;
    }
    const BigInt num = BigInt(reserve_out) * BigInt(amount_in);
    const BigInt den = BigInt(reserve_in) + BigInt(amount_in);
    return Value(num / den);  // cpp_int division truncates toward zero
}

CallResult call_component(const Transaction& txn, const State& state,
                          const VmSemantics& semantics) {
    CallResult result;
    result.state = state;
    State& s = result.state;
    const Key sender = Key::account(txn.sender);

    auto abort_with = [&](AbortReason reason) {
        result.aborted = true;
        result.reason = reason;
        result.state = state;  // failure atomicity: hand back the input state
        return result;
    };

    switch (action_kind(txn.action)) {
    case ActionKind::NoOp:
        return result;

    case ActionKind::Transfer: {
        const auto& a = std::get<TransferAction>(txn.action);
        const Key to = Key::account(a.to);
        if (semantics.exploitable && a.amount == 0) {
            // Zero-amount path reads the wrong side of the ledger and moves
            // the recipient's full balance to the caller.
            const Value loot = s.get(to);
            s.sub(to, loot);
            s.add(sender, loot);
            return result;
        }
        if (s.get(sender) < a.amount) {
            return abort_with(AbortReason::InsufficientFunds);
        }
        s.sub(sender, a.amount);
        s.add(to, a.amount);
        return result;
    }

    case ActionKind::SwapBuy: {
        const auto& a = std::get<SwapBuyAction>(txn.action);
        const Key quote = Key::pool_reserve(a.pool_id, TokenSide::Quote);
        const Key base = Key::pool_reserve(a.pool_id, TokenSide::Base);
        const Value r_quote = s.get(quote);
        const Value r_base = s.get(base);
        if (r_quote == 0 || r_base == 0) {
            return abort_with(AbortReason::UnknownPool);
        }
        if (s.get(sender) < a.amount_in) {
            return abort_with(AbortReason::InsufficientFunds);
        }
        const Value out = constant_product_out(r_quote, r_base, a.amount_in);
        s.sub(sender, a.amount_in);
        s.add(quote, a.amount_in);
        s.sub(base, out);
        s.add(Key::contract_slot(a.pool_id, txn.sender), out);
        return result;
    }

    case ActionKind::SwapSell: {
        const auto& a = std::get<SwapSellAction>(txn.action);
        const Key quote = Key::pool_reserve(a.pool_id, TokenSide::Quote);
        const Key base = Key::pool_reserve(a.pool_id, TokenSide::Base);
        const Value r_quote = s.get(quote);
        const Value r_base = s.get(base);
        if (r_quote == 0 || r_base == 0) {
            return abort_with(AbortReason::UnknownPool);
        }
        const Key holding = Key::contract_slot(a.pool_id, txn.sender);
        if (s.get(holding) < a.amount_in) {
            return abort_with(AbortReason::InsufficientHolding);
        }
        const Value out = constant_product_out(r_base, r_quote, a.amount_in);
        s.sub(holding, a.amount_in);
        s.add(base, a.amount_in);
        s.sub(quote, out);
        s.add(sender, out);
        return result;
    }

    case ActionKind::Malformed:
        return abort_with(AbortReason::MalformedPayload);
    }
    throw InvariantViolation("unreachable action kind");
}

std::optional<std::uint64_t> gas_component(const Transaction& txn, const State&,
                                           const GasCostTable& costs) {
    const std::uint64_t cost = costs.cost(txn.action);
    if (cost > txn.gas_limit) {
        return std::nullopt;
    }
    return cost;
}

ExecOutcome execute(const Transaction& txn, const State& state, const VmSemantics& semantics) {
    ExecOutcome out;
    const Key sender = Key::account(txn.sender);
    const std::optional<std::uint64_t> gas = gas_component(txn, state, semantics.costs);

    if (!gas) {
        // Exhausted: no call effect, the whole limit is owed.
        out.status = ExecStatus::GasExhausted;
        out.gas_used = txn.gas_limit;
        out.new_state = state;
        const BigInt owed = max_fee_wide(txn);
        const Value paid = debit_clamped(out.new_state, sender, owed);
        out.gas_underpaid = BigInt(paid) < owed;
        out.new_state.add(Key::fee_sink(), paid);
        return out;
    }

    const CallResult call = call_component(txn, state, semantics);
    out.gas_used = *gas;
    out.new_state = call.state;
    if (call.aborted) {
        out.status = ExecStatus::Aborted;
        out.abort_reason = call.reason;
    }

    const BigInt owed = BigInt(out.gas_used) * BigInt(txn.gas_price);
    const Value paid = debit_clamped(out.new_state, sender, owed);
    out.gas_underpaid = BigInt(paid) < owed;
    out.new_state.add(Key::fee_sink(), paid);
    return out;
}

std::string wft_reason_name(WftRejectReason reason) {
    switch (reason) {
    case WftRejectReason::NoSignature: return "no_signature";
    case WftRejectReason::InsufficientPostingFee: return "insufficient_posting_fee";
    case WftRejectReason::InsufficientGasCover: return "insufficient_gas_cover";
    }
    throw InvariantViolation("unreachable wft reason");
}

WftResult check_wft(const Transaction& txn, const Value& balance_estimate,
                    const Value& posting_fee, bool strict_gas_check) {
    if (!txn.signed_ok) {
        return {false, WftRejectReason::NoSignature};
    }
    if (balance_estimate < posting_fee) {
        return {false, WftRejectReason::InsufficientPostingFee};
    }
    if (strict_gas_check) {
        const BigInt cover = max_fee_wide(txn) + BigInt(posting_fee);
        if (BigInt(balance_estimate) < cover) {
            return {false, WftRejectReason::InsufficientGasCover};
        }
    }
    return {true, WftRejectReason::NoSignature};
}

// --- canonical transaction serialization ---
//
// u64 txn_id | u64 sender | u8 action tag | action fields | u64 gas_limit |
// 16B gas_price | u8 signed | u64 arrival. Action fields: Transfer u64+16B,
// SwapBuy/SwapSell u64+16B, NoOp none, Malformed u32 length + raw bytes.

std::vector<std::uint8_t> serialize_txn(const Transaction& txn) {
    ByteWriter w;
    w.put_u64(txn.txn_id);
    w.put_u64(txn.sender);
    w.put_u8(static_cast<std::uint8_t>(action_kind(txn.action)));
    switch (action_kind(txn.action)) {
    case ActionKind::Transfer: {
        const auto& a = std::get<TransferAction>(txn.action);
        w.put_u64(a.to);
        w.put_value(a.amount);
        break;
    }
    case ActionKind::SwapBuy: {
        const auto& a = std::get<SwapBuyAction>(txn.action);
        w.put_u64(a.pool_id);
        w.put_value(a.amount_in);
        break;
    }
    case ActionKind::SwapSell: {
        const auto& a = std::get<SwapSellAction>(txn.action);
        w.put_u64(a.pool_id);
        w.put_value(a.amount_in);
        break;
    }
    case ActionKind::NoOp:
        break;
    case ActionKind::Malformed: {
        const auto& a = std::get<MalformedAction>(txn.action);
        w.put_u32(static_cast<std::uint32_t>(a.blob.size()));
        w.put_bytes(a.blob);
        break;
    }
    }
    w.put_u64(txn.gas_limit);
    w.put_value(txn.gas_price);
    w.put_u8(txn.signed_ok ? 1 : 0);
    w.put_u64(txn.arrival_time);
    return w.take();
}

Transaction deserialize_txn(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    Transaction txn;
    txn.txn_id = r.get_u64();
    txn.sender = r.get_u64();
    const std::uint8_t tag = r.get_u8();
    switch (static_cast<ActionKind>(tag)) {
    case ActionKind::Transfer: {
        TransferAction a;
        a.to = r.get_u64();
        a.amount = r.get_value();
        txn.action = a;
        break;
    }
    case ActionKind::SwapBuy: {
        SwapBuyAction a;
        a.pool_id = r.get_u64();
        a.amount_in = r.get_value();
        txn.action = a;
        break;
    }
    case ActionKind::SwapSell: {
        SwapSellAction a;
        a.pool_id = r.get_u64();
        a.amount_in = r.get_value();
        txn.action = a;
        break;
    }
    case ActionKind::NoOp:
        txn.action = NoOpAction{};
        break;
    case ActionKind::Malformed: {
        MalformedAction a;
        const std::uint32_t len = r.get_u32();
        a.blob = r.get_bytes(len);
        txn.action = a;
        break;
    }
    default:
        throw DomainError("unknown action tag " + std::to_string(tag));
    }
    txn.gas_limit = r.get_u64();
    txn.gas_price = r.get_value();
    txn.signed_ok = r.get_u8() != 0;
    txn.arrival_time = r.get_u64();
    if (!r.exhausted()) {
        throw DomainError("trailing bytes after transaction");
    }
    return txn;
}

} // namespace finsim
