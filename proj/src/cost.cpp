// SPDX-License-Identifier: Apache-2.0

#include "modred/cost.hpp"

#include <bit>

namespace modred {

CostReport cost_of_plan(const ReductionPlan& plan) {
    CostReport r;
    r.table_count = plan.tables.size();
    for (const LutTable& t : plan.tables) {
        r.storage_bits += (std::uint64_t{1} << t.group.bit_indices.size()) *
                          static_cast<std::uint64_t>(plan.modulus.n);
    }
    // Balanced tree over table_count + 1 operands (tables plus passthrough).
    r.adder_count = r.table_count;
    r.adder_width = std::bit_width(plan.max_intermediate);
    r.final_cases = plan.i_max + 1;
    r.multiplier_count = 0;
    r.shift_add_terms = 0;
    return r;
}

CostReport cost_of_barrett(const Modulus& modulus, BarrettMode mode, bool signed_digits) {
    const BarrettConstants constants = barrett_constants(modulus);
    CostReport r;
    r.adder_width = 2 * modulus.n;
    r.final_cases = 2;  // one conditional subtraction
    if (mode == BarrettMode::general) {
        r.multiplier_count = 2;
        r.adder_count = 2;  // subtract plus final conditional subtract
        return r;
    }
    const ShiftAddPlan m_plan = shift_add_plan(constants.multiplier, signed_digits);
    const ShiftAddPlan q_plan = shift_add_plan(modulus.q, signed_digits);
    r.shift_add_terms = m_plan.terms.size() + q_plan.terms.size();
    // Each t-term multiply needs t - 1 tree adders; plus subtract and final
    // conditional subtract.
    r.adder_count = r.shift_add_terms - 2 + 2;
    return r;
}

ComparisonReport compare_costs(const ReductionPlan& grouped_plan) {
    ComparisonReport report;
    report.q = grouped_plan.modulus.q;
    report.width = grouped_plan.width;
    report.lut_grouped = cost_of_plan(grouped_plan);
    report.lut_basic =
        cost_of_plan(build_basic_plan(grouped_plan.modulus, grouped_plan.width));
    report.barrett_general = cost_of_barrett(grouped_plan.modulus, BarrettMode::general);
    report.barrett_shift_add = cost_of_barrett(grouped_plan.modulus, BarrettMode::shift_add);
    if (report.lut_grouped.adder_count > 0) {
        report.adder_ratio = static_cast<double>(report.lut_basic.adder_count) /
                             static_cast<double>(report.lut_grouped.adder_count);
    }
    if (report.lut_basic.storage_bits > 0) {
        report.storage_ratio = static_cast<double>(report.lut_grouped.storage_bits) /
                               static_cast<double>(report.lut_basic.storage_bits);
    }
    return report;
}

ComparisonReport compare_costs(const Modulus& modulus, int width, const GroupingSpec& grouping) {
    return compare_costs(build_grouped_plan(modulus, width, grouping));
}

}  // namespace modred
