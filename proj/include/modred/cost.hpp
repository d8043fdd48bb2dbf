// SPDX-License-Identifier: Apache-2.0
//
// Structural resource estimates: stored ROM bits, adder count and width,
// final-stage cases, multiplier usage. Operation counts only; no attempt to
// predict technology-mapped LUT/DSP/area figures.

#pragma once

#include <cstdint>

#include "modred/barrett.hpp"
#include "modred/plan.hpp"

namespace modred {

struct CostReport {
    std::uint64_t storage_bits = 0;   // total precomputed ROM bits
    std::uint64_t table_count = 0;
    std::uint64_t adder_count = 0;    // two-input adders
    int adder_width = 0;              // operand width in bits
    std::uint64_t final_cases = 0;    // i_max + 1
    std::uint64_t multiplier_count = 0;
    std::uint64_t shift_add_terms = 0;  // nonzero digits across constant multiplies
};

enum class BarrettMode { general, shift_add };

CostReport cost_of_plan(const ReductionPlan& plan);

// signed_digits selects NAF digit counts for shift_add mode; ignored for
// general mode.
CostReport cost_of_barrett(const Modulus& modulus, BarrettMode mode,
                           bool signed_digits = false);

struct ComparisonReport {
    std::uint64_t q = 0;
    int width = 0;
    CostReport lut_grouped;
    CostReport lut_basic;
    CostReport barrett_general;
    CostReport barrett_shift_add;
    // Trade-off ratios of the grouped plan against the single-bit plan.
    double adder_ratio = 0.0;    // basic adders / grouped adders
    double storage_ratio = 0.0;  // grouped storage / basic storage
};

ComparisonReport compare_costs(const Modulus& modulus, int width, const GroupingSpec& grouping);

/// Comparison against the baselines for an already-built grouped plan.
ComparisonReport compare_costs(const ReductionPlan& grouped_plan);

}  // namespace modred
