#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace finsim {

// Token amounts and raw storage slots share one 128-bit unsigned carrier.
// The checked backend throws std::overflow_error / std::range_error instead
// of wrapping, which is the required behaviour for all value arithmetic.
using Value = boost::multiprecision::checked_uint128_t;

// Signed, arbitrary precision. Used for balance deltas (attacker profit).
using BigInt = boost::multiprecision::cpp_int;

inline std::uint64_t value_to_u64(const Value& v) {
    return v.convert_to<std::uint64_t>();
}

inline Value value_min(const Value& a, const Value& b) {
    return a < b ? a : b;
}

} // namespace finsim
