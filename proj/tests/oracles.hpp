#pragma once

// Independent checkers for the test suites. Everything here is written
// against the arithmetic definitions directly (exact integers/rationals) and
// deliberately shares no code with the library implementations it checks.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace oracle {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact constant-product pool: out = floor(r_out * in / (r_in + in)).
struct Pool {
    Int base;
    Int quote;

    // Spend `amount_in` quote, receive base.
    Int buy(const Int& amount_in);
    // Spend `amount_in` base, receive quote.
    Int sell(const Int& amount_in);
};

// Net numeraire delta for the f;g;f* sandwich around a buy victim: mirror
// buy of victim_in, victim buy, then sell back floor(acquired*exit_bps/1e4).
// Gas for each adversary leg is gas_cost * its gas price (front = victim+eps,
// back = victim-eps clamped at zero).
Int sandwich_buy_profit(const Int& r_base, const Int& r_quote, const Int& victim_in,
                        const Int& front_gas_cost, const Int& back_gas_cost,
                        const Int& victim_gas_price, const Int& epsilon, std::uint32_t exit_bps);

// Pascal's-triangle binomial; an independent method from the library's
// stepwise exact division.
Int binom_pascal(std::uint64_t n, std::uint64_t k);

// P(all C draws Byzantine) as the product (B-i)/(T-i), i = 0..C-1. No
// binomials involved.
Rat hyper_all_faulty(std::uint64_t T, std::uint64_t B, std::uint64_t C);

} // namespace oracle
