#pragma once

// Transactions as curried state transforms. A transaction splits into a call
// component (the pure contract effect, where an abort returns the input
// state) and a gas component (a deterministic cost, exhausted when the cost
// exceeds the limit). execute() combines the two:
//
//   exhausted:  only the sender pays, gas_limit * gas_price
//   otherwise:  the call effect, then the sender pays gas_used * gas_price
//
// Gas payments land in the fee-sink account so token totals are preserved.

#include "finsim/state.hpp"
#include "finsim/value.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace finsim {

using Tick = std::uint64_t;

enum class ActionKind : std::uint8_t {
    Transfer = 0,
    SwapBuy = 1,
    SwapSell = 2,
    NoOp = 3,
    Malformed = 4,
};

struct TransferAction {
    std::uint64_t to = 0;
    Value amount = 0;
};

// Spend amount_in of the numeraire for the pool's base token. Acquired base
// tokens are booked in the pool contract's per-account slot.
struct SwapBuyAction {
    std::uint64_t pool_id = 0;
    Value amount_in = 0;
};

// Sell amount_in base tokens from the sender's pool slot for numeraire.
struct SwapSellAction {
    std::uint64_t pool_id = 0;
    Value amount_in = 0;
};

struct NoOpAction {};

struct MalformedAction {
    std::vector<std::uint8_t> blob;
};

using Action =
    std::variant<TransferAction, SwapBuyAction, SwapSellAction, NoOpAction, MalformedAction>;

ActionKind action_kind(const Action& action);
std::string action_name(const Action& action);

struct Transaction {
    std::uint64_t txn_id = 0;
    std::uint64_t sender = 0;   // curried msg.sender
    Action action;
    std::uint64_t gas_limit = 1;
    Value gas_price = 0;        // per gas unit
    bool signed_ok = true;      // simulated signature validity
    Tick arrival_time = 0;
};

std::vector<std::uint8_t> serialize_txn(const Transaction& txn);
Transaction deserialize_txn(std::span<const std::uint8_t> bytes);

enum class ExecStatus : std::uint8_t {
    Committed = 0,
    Aborted = 1,
    GasExhausted = 2,
};

enum class AbortReason : std::uint8_t {
    None = 0,
    InsufficientFunds,
    InsufficientHolding,
    UnknownPool,
    MalformedPayload,
};

std::string status_name(ExecStatus status);

struct ExecOutcome {
    ExecStatus status = ExecStatus::Committed;
    AbortReason abort_reason = AbortReason::None;
    std::uint64_t gas_used = 0;
    State new_state;
    // Sender could not cover the owed gas; balance clamped at zero.
    bool gas_underpaid = false;
};

// Per-action gas costs. The defaults keep t_g deterministic; a scenario may
// override them.
struct GasCostTable {
    std::uint64_t noop = 10;
    std::uint64_t transfer = 21;
    std::uint64_t swap_buy = 100;
    std::uint64_t swap_sell = 100;
    std::uint64_t malformed_abort = 5;

    std::uint64_t cost(const Action& action) const;
};

struct VmSemantics {
    GasCostTable costs;
    // Planted zero-day: a Transfer of amount zero drains the recipient's
    // entire balance to the sender. Disabled under the standard interpreter.
    bool exploitable = false;
};

struct CallResult {
    bool aborted = false;
    AbortReason reason = AbortReason::None;
    State state;  // aborted => identical to the input state
};

// t_c: the contract effect alone, no gas accounting.
CallResult call_component(const Transaction& txn, const State& state,
                          const VmSemantics& semantics = {});

// t_g: deterministic cost, or nullopt when the cost exceeds gas_limit.
std::optional<std::uint64_t> gas_component(const Transaction& txn, const State& state,
                                           const GasCostTable& costs = {});

ExecOutcome execute(const Transaction& txn, const State& state,
                    const VmSemantics& semantics = {});

using TxnInterpreter = std::function<ExecOutcome(const Transaction&, const State&)>;

inline TxnInterpreter make_interpreter(VmSemantics semantics) {
    return [semantics](const Transaction& txn, const State& state) {
        return execute(txn, state, semantics);
    };
}

// Constant-product quote: floor(reserve_out * amount_in / (reserve_in + amount_in)).
Value constant_product_out(const Value& reserve_in, const Value& reserve_out,
                           const Value& amount_in);

enum class WftRejectReason : std::uint8_t {
    NoSignature = 0,
    InsufficientPostingFee,
    InsufficientGasCover,
};

struct WftResult {
    bool well_formed = true;
    WftRejectReason reason = WftRejectReason::NoSignature;
};

std::string wft_reason_name(WftRejectReason reason);

// Admission checks only. The action payload is opaque at this point: a
// malformed body still passes, it simply aborts later inside the VM.
WftResult check_wft(const Transaction& txn, const Value& balance_estimate,
                    const Value& posting_fee, bool strict_gas_check);

} // namespace finsim
