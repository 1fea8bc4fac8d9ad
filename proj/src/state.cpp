#include "finsim/state.hpp"

#include "finsim/errors.hpp"
#include "finsim/serialize.hpp"

namespace finsim {

namespace {

void write_key(ByteWriter& w, const Key& key) {
    w.put_u8(static_cast<std::uint8_t>(key.tag));
    switch (key.tag) {
        case KeyTag::AccountBalance:
            w.put_u64(key.id);
            break;
        case KeyTag::PoolReserve:
            w.put_u64(key.id);
            w.put_u8(static_cast<std::uint8_t>(key.index));
            break;
        case KeyTag::ContractSlot:
            w.put_u64(key.id);
            w.put_u64(key.index);
            break;
    }
}

Key read_key(ByteReader& r) {
    Key key;
    std::uint8_t tag = r.get_u8();
    if (tag > 2) throw DomainError("unknown key tag in state blob");
    key.tag = static_cast<KeyTag>(tag);
    key.id = r.get_u64();
    switch (key.tag) {
        case KeyTag::AccountBalance:
            key.index = 0;
            break;
        case KeyTag::PoolReserve:
            key.index = r.get_u8();
            break;
        case KeyTag::ContractSlot:
            key.index = r.get_u64();
            break;
    }
    return key;
}

} // namespace

std::vector<std::uint8_t> canonical_serialize(const State& state) {
    ByteWriter w;
    w.put_u64(state.entries().size());
    for (const auto& [key, value] : state.entries()) {
        write_key(w, key);
        w.put_value(value);
    }
    return w.take();
}

State canonical_deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    State state;
    std::uint64_t count = r.get_u64();
    for (std::uint64_t i = 0; i < count; ++i) {
        Key key = read_key(r);
        Value value = r.get_value();
        state.set(key, value);
    }
    if (!r.exhausted()) throw DomainError("trailing bytes after state blob");
    return state;
}

StateCommitment commit(const State& state) {
    auto blob = canonical_serialize(state);
    return StateCommitment{sha256(blob)};
}

} // namespace finsim
