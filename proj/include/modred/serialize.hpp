// SPDX-License-Identifier: Apache-2.0
//
// JSON serialization for plans and cost reports.
//
// Plan document: fields q, n, width, passthrough_bits, tables (array of
// {input_bits, entries}), max_intermediate, i_max; tables ordered by smallest
// input bit index; all integers decimal.

#pragma once

#include <string>

#include <json.hpp>

#include "modred/cost.hpp"
#include "modred/plan.hpp"

namespace modred {

using json = nlohmann::ordered_json;

json plan_to_json(const ReductionPlan& plan);

// Accepts any structurally well-formed plan document and rebuilds the
// derived fields (max_intermediate, i_max, multiples) from the stored
// entries. Table entries are taken verbatim and are NOT checked against the
// modulus, so a corrupted document loads and is caught by verification.
ReductionPlan plan_from_json(const json& doc);

ReductionPlan load_plan_file(const std::string& path);
void save_plan_file(const ReductionPlan& plan, const std::string& path);

json cost_report_to_json(const CostReport& report);
json comparison_to_json(const ComparisonReport& report);

}  // namespace modred
