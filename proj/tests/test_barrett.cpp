// SPDX-License-Identifier: Apache-2.0
//
// Barrett reference reduction and its shift-add expansion. Constants for the
// two lattice moduli are frozen oracles; everything else is differential
// against builtin integer division.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "modred/barrett.hpp"

using namespace modred;

namespace {

std::uint64_t reconstruct(const ShiftAddPlan& plan) {
    __int128 sum = 0;
    for (const ShiftAddTerm& t : plan.terms) {
        sum += static_cast<__int128>(t.sign) * (static_cast<__int128>(1) << t.shift);
    }
    REQUIRE(sum >= 0);
    return static_cast<std::uint64_t>(sum);
}

std::vector<unsigned> shifts_ascending(const ShiftAddPlan& plan) {
    std::vector<unsigned> s;
    for (const ShiftAddTerm& t : plan.terms) {
        s.push_back(t.shift);
    }
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

TEST_CASE("constants for the worked moduli") {
    const BarrettConstants k13 = barrett_constants(Modulus(13));
    CHECK(k13.shift == 8);
    CHECK(k13.multiplier == 19);

    const BarrettConstants kyber = barrett_constants(Modulus(3329));
    CHECK(kyber.shift == 24);
    CHECK(kyber.multiplier == 5039);

    const BarrettConstants dilithium = barrett_constants(Modulus(8380417));
    CHECK(dilithium.shift == 46);
    CHECK(dilithium.multiplier == 8396807);
}

TEST_CASE("multiplier matches 2^2n / q for random moduli") {
    std::mt19937_64 rng(211);
    for (int trial = 0; trial < 500; ++trial) {
        const std::uint64_t q = 2 + rng() % ((std::uint64_t{1} << 31) - 1);
        const Modulus m(q);
        const BarrettConstants c = barrett_constants(m);
        CHECK(c.shift == static_cast<unsigned>(2 * m.n));
        CHECK(c.multiplier ==
              static_cast<std::uint64_t>((static_cast<uint128>(1) << c.shift) / q));
    }
}

TEST_CASE("quotient estimate is off by at most one over the full domain") {
    for (std::uint64_t q = 2; q <= 256; ++q) {
        const BarrettConstants c = barrett_constants(Modulus(q));
        for (std::uint64_t v = 0; v < q * q; ++v) {
            const std::uint64_t approx = static_cast<std::uint64_t>(
                (static_cast<uint128>(v) * c.multiplier) >> c.shift);
            const std::uint64_t truth = v / q;
            REQUIRE(approx <= truth);
            REQUIRE(truth - approx <= 1);
        }
    }
}

TEST_CASE("barrett_reduce differential against builtin mod") {
    for (std::uint64_t q : {2ull, 13ull, 3329ull, 8380417ull}) {
        const BarrettConstants c = barrett_constants(Modulus(q));
        std::mt19937_64 rng(223);
        const std::uint64_t q2 = q * q;
        for (int i = 0; i < 100000; ++i) {
            const std::uint64_t v = rng() % q2;
            REQUIRE(barrett_reduce(c, v) == v % q);
        }
        CHECK(barrett_reduce(c, 0) == 0);
        CHECK(barrett_reduce(c, q2 - 1) == (q2 - 1) % q);
        CHECK_THROWS_AS(barrett_reduce(c, q2), std::out_of_range);
    }
}

TEST_CASE("unsigned shift-add plans follow the binary expansion") {
    const ShiftAddPlan p3329 = shift_add_plan(3329, false);
    CHECK(shifts_ascending(p3329) == std::vector<unsigned>{0, 8, 10, 11});
    CHECK(p3329.terms.size() == 4);

    const ShiftAddPlan p5039 = shift_add_plan(5039, false);
    CHECK(p5039.terms.size() == 9);
    CHECK(shifts_ascending(p5039) == std::vector<unsigned>{0, 1, 2, 3, 5, 7, 8, 9, 12});

    const ShiftAddPlan p19 = shift_add_plan(19, false);
    CHECK(shifts_ascending(p19) == std::vector<unsigned>{0, 1, 4});

    for (const ShiftAddTerm& t : p5039.terms) {
        CHECK(t.sign == 1);
    }
    CHECK(reconstruct(p3329) == 3329);
    CHECK(reconstruct(p5039) == 5039);
}

TEST_CASE("signed-digit plans for the Dilithium constants") {
    // 8380417 = 2^23 - 2^13 + 1: three nonzero digits.
    const ShiftAddPlan pq = shift_add_plan(8380417, true);
    REQUIRE(pq.terms.size() == 3);
    CHECK(pq.terms[0].shift == 23);
    CHECK(pq.terms[0].sign == 1);
    CHECK(pq.terms[1].shift == 13);
    CHECK(pq.terms[1].sign == -1);
    CHECK(pq.terms[2].shift == 0);
    CHECK(pq.terms[2].sign == 1);
    CHECK(reconstruct(pq) == 8380417);

    // 8396807 = 2^23 + 2^13 + 2^3 - 1. Its canonical signed-digit form has
    // four nonzero digits, and no shorter form exists: three signed powers of
    // two cannot hit a number whose binary expansion has weight five and no
    // adjacent ones apart from the trailing 0111.
    const ShiftAddPlan pm = shift_add_plan(8396807, true);
    CHECK(pm.terms.size() == 4);
    CHECK(reconstruct(pm) == 8396807);
}

TEST_CASE("signed-digit recoding properties hold for random constants") {
    std::mt19937_64 rng(227);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::uint64_t c = 1 + (rng() & ((std::uint64_t{1} << 48) - 1));
        const ShiftAddPlan plan = shift_add_plan(c, true);
        CAPTURE(c);
        REQUIRE(reconstruct(plan) == c);
        REQUIRE(plan.terms.size() <= static_cast<std::size_t>(std::popcount(c)) + 1);
        for (std::size_t i = 0; i < plan.terms.size(); ++i) {
            REQUIRE((plan.terms[i].sign == 1 || plan.terms[i].sign == -1));
            if (i + 1 < plan.terms.size()) {
                // descending and non-adjacent
                REQUIRE(plan.terms[i].shift >= plan.terms[i + 1].shift + 2);
            }
        }
        // Weight never exceeds the plain binary expansion.
        const ShiftAddPlan unsigned_plan = shift_add_plan(c, false);
        REQUIRE(plan.terms.size() <= unsigned_plan.terms.size());
    }
}

TEST_CASE("shift_add_multiply equals the wide product") {
    std::mt19937_64 rng(229);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint64_t c = 1 + (rng() & ((std::uint64_t{1} << 40) - 1));
        const std::uint64_t v = rng() & ((std::uint64_t{1} << 40) - 1);
        const uint128 expected = static_cast<uint128>(c) * v;
        REQUIRE(shift_add_multiply(shift_add_plan(c, false), v) == expected);
        REQUIRE(shift_add_multiply(shift_add_plan(c, true), v) == expected);
    }
}

TEST_CASE("shift-add Barrett agrees with the general form") {
    std::mt19937_64 rng(233);
    for (std::uint64_t q : {13ull, 3329ull, 8380417ull, 65521ull}) {
        const BarrettConstants c = barrett_constants(Modulus(q));
        const ShiftAddBarrett u = ShiftAddBarrett::create(Modulus(q), false);
        const ShiftAddBarrett s = ShiftAddBarrett::create(Modulus(q), true);
        CHECK(u.constants.multiplier == c.multiplier);
        CHECK(reconstruct(u.multiplier_plan) == c.multiplier);
        CHECK(reconstruct(u.modulus_plan) == q);
        CHECK(reconstruct(s.multiplier_plan) == c.multiplier);
        CHECK(reconstruct(s.modulus_plan) == q);
        const std::uint64_t q2 = q * q;
        for (int i = 0; i < 20000; ++i) {
            const std::uint64_t v = rng() % q2;
            const std::uint64_t expected = v % q;
            REQUIRE(barrett_reduce_shift_add(u, v) == expected);
            REQUIRE(barrett_reduce_shift_add(s, v) == expected);
        }
        CHECK_THROWS_AS(barrett_reduce_shift_add(u, q2), std::out_of_range);
    }
}

TEST_CASE("shift_add_plan of zero is the empty sum") {
    for (bool signed_digits : {false, true}) {
        const ShiftAddPlan plan = shift_add_plan(0, signed_digits);
        CHECK(plan.terms.empty());
        CHECK(shift_add_multiply(plan, 12345) == 0);
    }
}
