#include "finsim/params.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace finsim;

namespace {

CommitteeParams cp(std::uint64_t t, std::uint64_t b, std::uint64_t c, std::uint64_t r = 0,
                   Rational rate = 1000) {
    CommitteeParams p;
    p.total = t;
    p.byzantine = b;
    p.committee = c;
    p.rational = r;
    p.selection_rate = std::move(rate);
    return p;
}

} // namespace

TEST_CASE("binomial agrees with Pascal's triangle on a dense grid") {
    for (std::uint64_t n = 0; n <= 30; ++n) {
        for (std::uint64_t k = 0; k <= n + 2; ++k) {
            CHECK(binomial(n, k) == oracle::binom_pascal(n, k));
        }
    }
    CHECK(binomial(100, 25) == cpp_int("242519269720337121015504"));
}

TEST_CASE("the odds ratio is exactly C(T,C)/C(B+R,C)") {
    const Odds w = all_faulty_odds(cp(100, 49, 25));
    REQUIRE(!w.infinite);
    CHECK(w.ratio == Rational(binomial(100, 25), binomial(49, 25)));
    // The equivalent product form (T-i)/(B-i) is an independent derivation.
    Rational recurrence = 1;
    for (std::uint64_t i = 0; i < 25; ++i) {
        recurrence *= Rational(100 - i, 49 - i);
    }
    CHECK(w.ratio == recurrence);
    CHECK(w.approx() == doctest::Approx(3.837e9).epsilon(0.001));
}

TEST_CASE("odds and probability are exact reciprocals when finite") {
    for (std::uint64_t c : {1ull, 5ull, 10ull, 19ull}) {
        const Odds w = all_faulty_odds(cp(40, 19, c));
        const Odds p = all_faulty_probability(cp(40, 19, c));
        CHECK(w.ratio * p.ratio == 1);
        CHECK(p.ratio == oracle::hyper_all_faulty(40, 19, c));
    }
}

TEST_CASE("a committee larger than the faulty pool can never be all-faulty") {
    const Odds w = all_faulty_odds(cp(100, 49, 50));
    CHECK(w.infinite);
    CHECK(std::isinf(w.approx()));
    const Odds p = all_faulty_probability(cp(100, 49, 50));
    CHECK(!p.infinite);
    CHECK(p.ratio == 0);
    const Duration d = expected_time(w, 1000);
    CHECK(d.infinite);
    CHECK(std::isinf(d.years_approx()));
}

TEST_CASE("rational participants fold into the faulty pool") {
    // B=30, R=19 behaves exactly like B=49.
    const Odds folded = all_faulty_odds(cp(100, 30, 25, 19));
    const Odds plain = all_faulty_odds(cp(100, 49, 25));
    CHECK(folded.ratio == plain.ratio);
    CHECK_THROWS_AS(all_faulty_odds(cp(100, 60, 25, 41)), InfeasibleParams);
    CHECK_THROWS_AS(all_faulty_odds(cp(10, 5, 11)), InfeasibleParams);
}

TEST_CASE("headline expected times at 1000 selections per hour") {
    // (100, 49, 25): ~437.7 years to an all-faulty committee.
    {
        const Duration d = expected_time(all_faulty_odds(cp(100, 49, 25)), 1000);
        CHECK(d.years_approx() == doctest::Approx(437.7).epsilon(0.001));
        CHECK(d.hours_approx() == doctest::Approx(437.7 * 8766).epsilon(0.001));
    }
    // One more member at C=26 multiplies the wait by 75/24.
    {
        const Duration d = expected_time(all_faulty_odds(cp(100, 49, 26)), 1000);
        CHECK(d.years_approx() == doctest::Approx(1367.9).epsilon(0.001));
    }
    // C=30 pushes it past the hundred-thousand-year mark.
    {
        const Duration d = expected_time(all_faulty_odds(cp(100, 49, 30)), 1000);
        CHECK(d.years_approx() == doctest::Approx(177740.7).epsilon(0.001));
    }
    CHECK_THROWS_AS(expected_time(all_faulty_odds(cp(100, 49, 25)), 0), DomainError);
}

TEST_CASE("expected time scales inversely with the selection rate") {
    const Odds w = all_faulty_odds(cp(100, 49, 10));
    const Duration fast = expected_time(w, 2000);
    const Duration slow = expected_time(w, 500);
    CHECK(slow.hours == fast.hours * 4);
}

TEST_CASE("minimum committee size for a year target") {
    // 25 is the smallest committee pushing (100,49) past 437 years at rate 1000.
    CHECK(min_committee_size(100, 49, 0, 1000, 437) == 25);
    const Duration at24 = expected_time(all_faulty_odds(cp(100, 49, 24)), 1000);
    CHECK(at24.years < 437);

    // Easier targets need smaller committees; impossible pools throw.
    CHECK(min_committee_size(100, 49, 0, 1000, Rational(1, 1000000)) < 25);
    CHECK(min_committee_size(100, 0, 0, 1000, 1) >= 1);
    CHECK_THROWS_AS(min_committee_size(100, 51, 49, 1000, 437), InfeasibleParams);
    CHECK_THROWS_AS(min_committee_size(100, 49, 0, 1000, 0), DomainError);
}

TEST_CASE("replication break-even is the committee size, minus amortized verification") {
    const BreakEven be = replication_break_even(25, 0, 0.0);
    CHECK(be.multiplier == 25.0);
    CHECK(be.adjusted == 25.0);

    const BreakEven busy = replication_break_even(25, 100, 0.01);
    CHECK(busy.multiplier == 25.0);
    CHECK(busy.adjusted == doctest::Approx(24.0));

    CHECK_THROWS_AS(replication_break_even(0, 1, 0.5), DomainError);
}

TEST_CASE("rational_to_decimal renders exact digits with half-up rounding") {
    CHECK(rational_to_decimal(Rational(1, 8), 3) == "0.125");
    CHECK(rational_to_decimal(Rational(1, 8), 2) == "0.13");
    CHECK(rational_to_decimal(Rational(1, 3), 4) == "0.3333");
    CHECK(rational_to_decimal(Rational(2, 3), 4) == "0.6667");
    CHECK(rational_to_decimal(Rational(5, 1), 0) == "5");
    CHECK(rational_to_decimal(Rational(-7, 2), 1) == "-3.5");
    CHECK(rational_to_decimal(Rational(1, 2), 0) == "1");  // half rounds up
}
