// SPDX-License-Identifier: Apache-2.0

#include "modred/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace modred {

json plan_to_json(const ReductionPlan& plan) {
    json doc;
    doc["q"] = plan.modulus.q;
    doc["n"] = plan.modulus.n;
    doc["width"] = plan.width;
    doc["passthrough_bits"] = plan.passthrough_bits;
    json tables = json::array();
    for (const LutTable& t : plan.tables) {
        json table;
        table["input_bits"] = t.group.bit_indices;
        table["entries"] = t.entries;
        tables.push_back(std::move(table));
    }
    doc["tables"] = std::move(tables);
    doc["max_intermediate"] = plan.max_intermediate;
    doc["i_max"] = plan.i_max;
    return doc;
}

ReductionPlan plan_from_json(const json& doc) {
    const Modulus modulus(doc.at("q").get<std::uint64_t>());
    if (doc.contains("n") && doc.at("n").get<int>() != modulus.n) {
        throw std::invalid_argument("plan field n does not match the modulus");
    }
    const int width = doc.at("width").get<int>();
    const int passthrough = doc.at("passthrough_bits").get<int>();
    std::vector<LutTable> tables;
    for (const json& entry : doc.at("tables")) {
        LutTable t;
        t.group.bit_indices = entry.at("input_bits").get<std::vector<int>>();
        t.entries = entry.at("entries").get<std::vector<std::uint64_t>>();
        tables.push_back(std::move(t));
    }
    // max_intermediate and i_max are derived; stored values are ignored and
    // recomputed from the entries as loaded.
    return assemble_plan(modulus, width, passthrough, std::move(tables));
}

ReductionPlan load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open plan file: " + path);
    }
    json doc = json::parse(in);
    return plan_from_json(doc);
}

void save_plan_file(const ReductionPlan& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << plan_to_json(plan).dump(2) << '\n';
}

json cost_report_to_json(const CostReport& report) {
    json doc;
    doc["storage_bits"] = report.storage_bits;
    doc["table_count"] = report.table_count;
    doc["adder_count"] = report.adder_count;
    doc["adder_width"] = report.adder_width;
    doc["final_cases"] = report.final_cases;
    doc["multiplier_count"] = report.multiplier_count;
    doc["shift_add_terms"] = report.shift_add_terms;
    return doc;
}

json comparison_to_json(const ComparisonReport& report) {
    json doc;
    doc["q"] = report.q;
    doc["width"] = report.width;
    doc["lut_grouped"] = cost_report_to_json(report.lut_grouped);
    doc["lut_basic"] = cost_report_to_json(report.lut_basic);
    doc["barrett_general"] = cost_report_to_json(report.barrett_general);
    doc["barrett_shift_add"] = cost_report_to_json(report.barrett_shift_add);
    doc["adder_ratio"] = report.adder_ratio;
    doc["storage_ratio"] = report.storage_ratio;
    return doc;
}

}  // namespace modred
