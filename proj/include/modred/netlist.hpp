// SPDX-License-Identifier: Apache-2.0
//
// Gate-level lowering of a reduction plan: a small netlist IR, a bit-exact
// functional evaluator, and a Verilog-2001 emitter for the combinational
// (optionally pipelined) circuit.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modred/plan.hpp"

namespace modred {

enum class NodeKind {
    constant,    // fixed value
    slice,       // input bits [lo, lo + width)
    rom_lookup,  // contents indexed by the gathered address bits
    add,         // inputs[0] + inputs[1]
    compare_ge,  // inputs[0] >= value, 1-bit result
    select,      // contents[count of true inputs]
    subtract     // inputs[0] - inputs[1], truncated to width
};

struct Node {
    NodeKind kind = NodeKind::constant;
    int width = 0;      // result width in bits
    int stage = 0;      // 0 tables, 1 adder tree, 2 compares, 3 final stage
    std::uint64_t value = 0;              // constant value or compare threshold
    int lo = 0;                           // slice: lowest input bit
    std::vector<int> inputs;              // operand node indices
    std::vector<int> address_bits;        // rom_lookup: input bit per address bit
    std::vector<std::uint64_t> contents;  // rom_lookup entries or select candidates
};

/// Feed-forward circuit computing reduce(plan, x). Nodes are topologically
/// ordered (operands precede users). pipeline_stages registers the first s
/// of the three stage boundaries (after the tables, after the adder tree,
/// after the compares); registers affect timing only, never the function.
struct Netlist {
    std::uint64_t q = 0;
    int input_width = 0;
    int output_width = 0;
    int pipeline_stages = 0;
    std::vector<Node> nodes;
    int output = -1;  // index of the final subtract node
};

/// Lowers a plan. pipeline_stages must be in [0, 3].
Netlist lower(const ReductionPlan& plan, int pipeline_stages);

/// Functional evaluation, registers ignored. Equals reduce(plan, input) for
/// the plan the netlist was lowered from. Throws std::out_of_range when
/// input does not fit input_width.
std::uint64_t eval_netlist(const Netlist& netlist, std::uint64_t input);

/// Deterministic Verilog-2001 text: ports x (and clk when pipelined) and y,
/// ROMs as complete case statements, stable n<index> node names. Identical
/// netlists yield byte-identical text. Throws std::invalid_argument for an
/// invalid module name.
std::string emit_verilog(const Netlist& netlist, const std::string& module_name);

/// Self-checking testbench for the emitted module: vector_count random
/// inputs with expected outputs precomputed and embedded as literals.
std::string emit_testbench(const Netlist& netlist, const std::string& module_name,
                           int vector_count, std::uint64_t seed);

}  // namespace modred
