#include "finsim/params.hpp"

#include <limits>
#include <sstream>

namespace finsim {

double Odds::approx() const {
    if (infinite) return std::numeric_limits<double>::infinity();
    return static_cast<double>(ratio);
}

double Duration::hours_approx() const {
    if (infinite) return std::numeric_limits<double>::infinity();
    return static_cast<double>(hours);
}

double Duration::years_approx() const {
    if (infinite) return std::numeric_limits<double>::infinity();
    return static_cast<double>(years);
}

cpp_int binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    cpp_int result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result *= cpp_int(n - k + i);
        result /= cpp_int(i);  // exact at every step: result is C(n-k+i, i)
    }
    return result;
}

namespace {

void validate(const CommitteeParams& p) {
    if (p.byzantine + p.rational > p.total) {
        throw InfeasibleParams("B + R exceeds T");
    }
    if (p.committee > p.total) {
        throw InfeasibleParams("committee size exceeds pool size");
    }
}

} // namespace

Odds all_faulty_odds(const CommitteeParams& params) {
    validate(params);
    const std::uint64_t faulty = params.byzantine + params.rational;
    Odds odds;
    if (params.committee > faulty) {
        odds.infinite = true;
        return odds;
    }
    odds.ratio = Rational(binomial(params.total, params.committee),
                          binomial(faulty, params.committee));
    return odds;
}

Odds all_faulty_probability(const CommitteeParams& params) {
    validate(params);
    const std::uint64_t faulty = params.byzantine + params.rational;
    Odds odds;
    if (params.committee > faulty) {
        odds.ratio = 0;  // impossible, probability zero
        return odds;
    }
    odds.ratio = Rational(binomial(faulty, params.committee),
                          binomial(params.total, params.committee));
    return odds;
}

Duration expected_time(const Odds& odds, const Rational& selection_rate) {
    if (selection_rate <= 0) {
        throw DomainError("selection rate must be positive");
    }
    Duration d;
    if (odds.infinite) {
        d.infinite = true;
        return d;
    }
    d.hours = odds.ratio / selection_rate;
    d.years = d.hours / kHoursPerYear;
    return d;
}

std::uint64_t min_committee_size(std::uint64_t total, std::uint64_t byzantine,
                                 std::uint64_t rational, const Rational& selection_rate,
                                 const Rational& target_years) {
    if (target_years <= 0) {
        throw DomainError("target must be positive");
    }
    for (std::uint64_t c = 0; c <= total; ++c) {
        CommitteeParams p;
        p.total = total;
        p.byzantine = byzantine;
        p.rational = rational;
        p.committee = c;
        const Duration d = expected_time(all_faulty_odds(p), selection_rate);
        if (d.infinite || d.years >= target_years) {
            return c;
        }
    }
    throw InfeasibleParams("no committee size up to T reaches the target (B + R = T)");
}

BreakEven replication_break_even(std::uint64_t committee, std::uint64_t verifier_count,
                                 double verify_cost_fraction) {
    if (committee < 1) {
        throw DomainError("committee must have at least one member");
    }
    BreakEven be;
    be.multiplier = static_cast<double>(committee);
    be.adjusted = be.multiplier -
                  static_cast<double>(verifier_count) * verify_cost_fraction;
    return be;
}

std::string rational_to_decimal(const Rational& value, unsigned digits) {
    const bool negative = value < 0;
    Rational v = negative ? Rational(-value) : value;
    cpp_int scale = 1;
    for (unsigned i = 0; i < digits; ++i) scale *= 10;
    // Round half up at the last digit.
    const cpp_int scaled =
        (boost::multiprecision::numerator(v) * scale * 2 +
         boost::multiprecision::denominator(v)) /
        (boost::multiprecision::denominator(v) * 2);
    const cpp_int whole = scaled / scale;
    cpp_int frac = scaled % scale;
    std::ostringstream out;
    if (negative) out << '-';
    out << whole;
    if (digits > 0) {
        std::string f = frac.str();
        out << '.' << std::string(digits - f.size(), '0') << f;
    }
    return out.str();
}

} // namespace finsim
