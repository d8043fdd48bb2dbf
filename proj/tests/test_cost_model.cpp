// SPDX-License-Identifier: Apache-2.0
//
// Structural cost model. Expected values follow directly from the plan
// shapes: storage is sum(2^k_i) * n, one adder per table, final cases are
// i_max + 1.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "modred/cost.hpp"

using namespace modred;

namespace {

ReductionPlan kyber_plan() {
    GroupingSpec spec;
    spec.table_sizes = {7, 6};
    return build_grouped_plan(Modulus(3329), 24, spec);
}

}  // namespace

TEST_CASE("grouped q=13 plan costs") {
    GroupingSpec spec;
    spec.table_sizes = {2, 2};
    const CostReport r = cost_of_plan(build_grouped_plan(Modulus(13), 8, spec));
    CHECK(r.storage_bits == 32);  // two 4-entry tables of 4-bit residues
    CHECK(r.table_count == 2);
    CHECK(r.adder_count == 2);
    CHECK(r.adder_width == 6);  // operands up to 36
    CHECK(r.final_cases == 3);
    CHECK(r.multiplier_count == 0);
    CHECK(r.shift_add_terms == 0);
}

TEST_CASE("basic q=13 plan costs") {
    const CostReport r = cost_of_plan(build_basic_plan(Modulus(13), 8));
    CHECK(r.storage_bits == 32);  // four 2-entry tables of 4-bit residues
    CHECK(r.table_count == 4);
    CHECK(r.adder_count == 4);
    CHECK(r.final_cases == 4);
}

TEST_CASE("Kyber-size plan costs") {
    const CostReport r = cost_of_plan(kyber_plan());
    CHECK(r.storage_bits == 2304);  // (128 + 64) * 12
    CHECK(r.table_count == 2);
    CHECK(r.adder_count == 2);
    CHECK(r.adder_width == 14);  // intermediate bound 8659
    CHECK(r.final_cases == 3);
    CHECK(r.multiplier_count == 0);
}

TEST_CASE("power-of-two modulus with two 5-bit tables") {
    GroupingSpec spec;
    spec.table_sizes = {5, 5};
    const CostReport r = cost_of_plan(build_grouped_plan(Modulus(1024), 20, spec));
    CHECK(r.storage_bits == 640);  // (32 + 32) * 10
    CHECK(r.table_count == 2);
}

TEST_CASE("width n plan needs no storage or adders") {
    const CostReport r = cost_of_plan(build_basic_plan(Modulus(13), 4));
    CHECK(r.storage_bits == 0);
    CHECK(r.table_count == 0);
    CHECK(r.adder_count == 0);
    CHECK(r.final_cases == 2);
    const CostReport r16 = cost_of_plan(build_basic_plan(Modulus(16), 4));
    CHECK(r16.final_cases == 1);
}

TEST_CASE("general Barrett costs") {
    const CostReport r = cost_of_barrett(Modulus(3329), BarrettMode::general);
    CHECK(r.multiplier_count == 2);
    CHECK(r.adder_count == 2);
    CHECK(r.adder_width == 24);
    CHECK(r.final_cases == 2);
    CHECK(r.storage_bits == 0);
    CHECK(r.shift_add_terms == 0);
}

TEST_CASE("shift-add Barrett costs, unsigned digits") {
    const CostReport r = cost_of_barrett(Modulus(3329), BarrettMode::shift_add);
    // popcount(5039) + popcount(3329) = 9 + 4 nonzero digits.
    CHECK(r.shift_add_terms == 13);
    CHECK(r.adder_count == 13);  // terms - 2 merge adders + 2 data-path adders
    CHECK(r.multiplier_count == 0);
    CHECK(r.adder_width == 24);
}

TEST_CASE("shift-add Barrett costs, signed digits") {
    const CostReport r = cost_of_barrett(Modulus(8380417), BarrettMode::shift_add, true);
    // Signed-digit weights: 4 for the multiplier 8396807, 3 for the modulus.
    CHECK(r.shift_add_terms == 7);
    CHECK(r.adder_count == 7);
    const CostReport u = cost_of_barrett(Modulus(8380417), BarrettMode::shift_add, false);
    CHECK(u.shift_add_terms == 16);  // popcount(8396807) + popcount(8380417)
    CHECK(r.shift_add_terms < u.shift_add_terms);
}

TEST_CASE("comparison report for the q=13 example") {
    GroupingSpec spec;
    spec.table_sizes = {2, 2};
    const ComparisonReport r = compare_costs(Modulus(13), 8, spec);
    CHECK(r.q == 13);
    CHECK(r.width == 8);
    CHECK(r.lut_grouped.final_cases == 3);
    CHECK(r.lut_basic.final_cases == 4);
    CHECK(r.lut_grouped.adder_count == 2);
    CHECK(r.lut_basic.adder_count == 4);
    CHECK(r.adder_ratio == doctest::Approx(2.0));
    CHECK(r.storage_ratio == doctest::Approx(1.0));
    CHECK(r.barrett_general.multiplier_count == 2);
    CHECK(r.barrett_shift_add.multiplier_count == 0);
}

TEST_CASE("comparison report from an existing plan") {
    const ComparisonReport r = compare_costs(kyber_plan());
    CHECK(r.q == 3329);
    CHECK(r.width == 24);
    CHECK(r.lut_grouped.storage_bits == 2304);
    CHECK(r.lut_basic.table_count == 12);   // single-bit tables for bits 12..23
    CHECK(r.lut_basic.storage_bits == 288);  // 12 tables * 2 entries * 12 bits
    CHECK(r.lut_basic.final_cases == 10);
    CHECK(r.lut_grouped.final_cases == 3);
    CHECK(r.adder_ratio == doctest::Approx(6.0));
    CHECK(r.storage_ratio == doctest::Approx(8.0));
}

TEST_CASE("splitting tables trades adders for storage") {
    const Modulus m(3329);
    GroupingSpec coarse;
    coarse.table_sizes = {6, 7};
    GroupingSpec fine;
    fine.table_sizes = {3, 3, 3, 4};
    const CostReport rc = cost_of_plan(build_grouped_plan(m, 24, coarse));
    const CostReport rf = cost_of_plan(build_grouped_plan(m, 24, fine));
    CHECK(rf.storage_bits < rc.storage_bits);
    CHECK(rf.adder_count > rc.adder_count);
}
