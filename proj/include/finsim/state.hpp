#pragma once

// Virtual-machine state: a total mapping Key -> Value with absent keys
// reading as zero, plus the canonical serialization and 32-byte commitment
// used everywhere a state must be compared.
//
// Canonical layout (little-endian, documented in the README):
//   u64   entry count (zero-valued entries omitted)
//   per entry, keys ascending:
//     u8  key tag            0=AccountBalance 1=PoolReserve 2=ContractSlot
//     tag 0: u64 account id
//     tag 1: u64 pool id, u8 token side (0=base, 1=quote)
//     tag 2: u64 contract id, u64 slot index
//     16B value (u128)

#include "finsim/digest.hpp"
#include "finsim/value.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

namespace finsim {

enum class KeyTag : std::uint8_t {
    AccountBalance = 0,
    PoolReserve = 1,
    ContractSlot = 2,
};

enum class TokenSide : std::uint8_t {
    Base = 0,
    Quote = 1,
};

// Gas fees are credited here so that every execution moves tokens between
// keys and the total supply stays constant.
inline constexpr std::uint64_t kFeeSinkAccount = 0xFFFF'FFFF'FFFF'FFFFull;

struct Key {
    KeyTag tag = KeyTag::AccountBalance;
    std::uint64_t id = 0;      // account / pool / contract id
    std::uint64_t index = 0;   // token side or slot index

    static Key account(std::uint64_t account_id) {
        return Key{KeyTag::AccountBalance, account_id, 0};
    }
    static Key pool_reserve(std::uint64_t pool_id, TokenSide side) {
        return Key{KeyTag::PoolReserve, pool_id, static_cast<std::uint64_t>(side)};
    }
    static Key contract_slot(std::uint64_t contract_id, std::uint64_t slot) {
        return Key{KeyTag::ContractSlot, contract_id, slot};
    }
    static Key fee_sink() { return account(kFeeSinkAccount); }

    // Total order: tag, then id, then index.
    auto operator<=>(const Key&) const = default;
};

struct StateCommitment {
    Digest digest;

    auto operator<=>(const StateCommitment&) const = default;
    std::string hex() const { return digest.hex(); }
};

class State {
public:
    State() = default;

    // Total lookup: absent keys read as zero.
    Value get(const Key& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? Value(0) : it->second;
    }

    // Zero stores erase, so states built by different write sequences with
    // the same non-zero entries compare and commit equal.
    void set(const Key& key, const Value& value) {
        if (value == 0) {
            entries_.erase(key);
        } else {
            entries_[key] = value;
        }
    }

    void add(const Key& key, const Value& delta) { set(key, get(key) + delta); }
    void sub(const Key& key, const Value& delta) { set(key, get(key) - delta); }

    const std::map<Key, Value>& entries() const { return entries_; }

    // Sum over all stored values, every key variant included. Constant under
    // the built-in transaction semantics.
    Value total_supply() const {
        Value sum = 0;
        for (const auto& [k, v] : entries_) sum += v;
        return sum;
    }

    bool operator==(const State& other) const { return entries_ == other.entries_; }

private:
    std::map<Key, Value> entries_;
};

std::vector<std::uint8_t> canonical_serialize(const State& state);
State canonical_deserialize(std::span<const std::uint8_t> bytes);

StateCommitment commit(const State& state);

} // namespace finsim
