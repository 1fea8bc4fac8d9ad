#pragma once

// Committee security calculator. W = C(T,C) / C(B',C) is the expected number
// of uniform committee selections before an all-faulty committee, with
// B' = B + R treating rational participants as bribable. All ratios are kept
// exact; C(100,25) does not fit in any machine word.

#include "finsim/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace finsim {

using Rational = boost::multiprecision::cpp_rational;
using boost::multiprecision::cpp_int;

// 365.25-day Julian year; this choice reproduces the headline year figures.
inline constexpr std::uint64_t kHoursPerYear = 8766;

struct CommitteeParams {
    std::uint64_t total = 0;           // T
    std::uint64_t byzantine = 0;       // B
    std::uint64_t committee = 0;       // C
    std::uint64_t rational = 0;        // R, folded into the worst case as B+R
    Rational selection_rate = 1;       // committee selections per hour
};

struct Odds {
    bool infinite = false;  // an all-faulty committee is impossible (C > B+R)
    Rational ratio;         // valid when finite
    double approx() const;
};

struct Duration {
    bool infinite = false;
    Rational hours;
    Rational years;
    double hours_approx() const;
    double years_approx() const;
};

cpp_int binomial(std::uint64_t n, std::uint64_t k);

// Expected selections before an all-faulty committee.
Odds all_faulty_odds(const CommitteeParams& params);

// Per-selection probability C(B,C)/C(T,C); R folded in like all_faulty_odds.
Odds all_faulty_probability(const CommitteeParams& params);

Duration expected_time(const Odds& odds, const Rational& selection_rate);

// Smallest C whose expected time to an all-faulty committee meets the
// target. Throws InfeasibleParams when no C <= T does (B + R = T).
std::uint64_t min_committee_size(std::uint64_t total, std::uint64_t byzantine,
                                 std::uint64_t rational, const Rational& selection_rate,
                                 const Rational& target_years);

struct BreakEven {
    double multiplier = 0.0;  // m* = C: proof generation above this costs more than DD
    double adjusted = 0.0;    // C - verifier_count * verify_cost_fraction
};

BreakEven replication_break_even(std::uint64_t committee, std::uint64_t verifier_count,
                                 double verify_cost_fraction);

std::string rational_to_decimal(const Rational& value, unsigned digits);

} // namespace finsim
