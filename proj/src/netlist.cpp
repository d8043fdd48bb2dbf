// SPDX-License-Identifier: Apache-2.0

#include "modred/netlist.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <random>
#include <sstream>
#include <stdexcept>

namespace modred {

namespace {

std::uint64_t low_mask(int bits) {
    return bits == 0 ? 0 : (~std::uint64_t{0} >> (64 - bits));
}

int value_width(std::uint64_t max_value) {
    return std::max(1, static_cast<int>(std::bit_width(max_value)));
}

}  // namespace

Netlist lower(const ReductionPlan& plan, int pipeline_stages) {
    if (pipeline_stages < 0 || pipeline_stages > 3) {
        throw std::invalid_argument("pipeline stages must be in [0, 3]");
    }
    Netlist nl;
    nl.q = plan.modulus.q;
    nl.input_width = plan.width;
    nl.output_width = plan.modulus.n;
    nl.pipeline_stages = pipeline_stages;

    // max_values[i] bounds node i's result; it sizes wires and is exact for
    // slices and roms, so adder widths stay tight.
    std::vector<std::uint64_t> max_values;
    auto push = [&](Node node, std::uint64_t max_value) {
        nl.nodes.push_back(std::move(node));
        max_values.push_back(max_value);
        return static_cast<int>(nl.nodes.size()) - 1;
    };

    // Stage 0: passthrough slice and one ROM per table.
    std::vector<int> operands;
    const int p = plan.passthrough_bits;
    if (p > 0) {
        Node slice;
        slice.kind = NodeKind::slice;
        slice.width = p;
        slice.stage = 0;
        slice.lo = 0;
        operands.push_back(push(std::move(slice), low_mask(p)));
    }
    for (const LutTable& t : plan.tables) {
        const std::uint64_t max_entry = *std::max_element(t.entries.begin(), t.entries.end());
        Node rom;
        rom.kind = NodeKind::rom_lookup;
        rom.width = value_width(max_entry);
        rom.stage = 0;
        rom.address_bits = t.group.bit_indices;
        rom.contents = t.entries;
        operands.push_back(push(std::move(rom), max_entry));
    }

    // Stage 1: balanced binary tree, pairing adjacent operands per round.
    while (operands.size() > 1) {
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < operands.size(); i += 2) {
            const std::uint64_t max_sum = max_values[static_cast<std::size_t>(operands[i])] +
                                          max_values[static_cast<std::size_t>(operands[i + 1])];
            Node add;
            add.kind = NodeKind::add;
            add.width = value_width(max_sum);
            add.stage = 1;
            add.inputs = {operands[i], operands[i + 1]};
            next.push_back(push(std::move(add), max_sum));
        }
        if (operands.size() % 2 == 1) {
            next.push_back(operands.back());
        }
        operands = std::move(next);
    }
    const int sum = operands.front();

    // Stages 2 and 3: parallel compares, multiple selection, subtraction.
    int subtrahend = -1;
    if (plan.i_max == 0) {
        Node zero;
        zero.kind = NodeKind::constant;
        zero.width = 1;
        zero.value = 0;
        subtrahend = push(std::move(zero), 0);
    } else {
        std::vector<int> compares;
        for (std::uint64_t i = 1; i <= plan.i_max; ++i) {
            Node cmp;
            cmp.kind = NodeKind::compare_ge;
            cmp.width = 1;
            cmp.stage = 2;
            cmp.value = plan.multiples[i];
            cmp.inputs = {sum};
            compares.push_back(push(std::move(cmp), 1));
        }
        Node select;
        select.kind = NodeKind::select;
        select.width = value_width(plan.multiples[plan.i_max]);
        select.stage = 3;
        select.inputs = std::move(compares);
        select.contents = plan.multiples;
        subtrahend = push(std::move(select), plan.multiples[plan.i_max]);
    }
    Node sub;
    sub.kind = NodeKind::subtract;
    sub.width = plan.modulus.n;
    sub.stage = 3;
    sub.inputs = {sum, subtrahend};
    nl.output = push(std::move(sub), plan.modulus.q - 1);
    return nl;
}

std::uint64_t eval_netlist(const Netlist& netlist, std::uint64_t input) {
    if (netlist.input_width < 64 && (input >> netlist.input_width) != 0) {
        throw std::out_of_range("eval_netlist: input does not fit the netlist width");
    }
    std::vector<std::uint64_t> values(netlist.nodes.size(), 0);
    for (std::size_t i = 0; i < netlist.nodes.size(); ++i) {
        const Node& node = netlist.nodes[i];
        std::uint64_t v = 0;
        switch (node.kind) {
            case NodeKind::constant:
                v = node.value;
                break;
            case NodeKind::slice:
                v = (input >> node.lo) & low_mask(node.width);
                break;
            case NodeKind::rom_lookup: {
                std::uint64_t addr = 0;
                for (std::size_t j = 0; j < node.address_bits.size(); ++j) {
                    addr |= ((input >> node.address_bits[j]) & 1u) << j;
                }
                v = node.contents[addr];
                break;
            }
            case NodeKind::add:
                v = values[static_cast<std::size_t>(node.inputs[0])] +
                    values[static_cast<std::size_t>(node.inputs[1])];
                break;
            case NodeKind::compare_ge:
                v = values[static_cast<std::size_t>(node.inputs[0])] >= node.value ? 1 : 0;
                break;
            case NodeKind::select: {
                std::uint64_t index = 0;
                for (int in : node.inputs) {
                    index += values[static_cast<std::size_t>(in)];
                }
                v = node.contents[index];
                break;
            }
            case NodeKind::subtract:
                v = (values[static_cast<std::size_t>(node.inputs[0])] -
                     values[static_cast<std::size_t>(node.inputs[1])]) &
                    low_mask(node.width);
                break;
        }
        values[i] = v;
    }
    return values[static_cast<std::size_t>(netlist.output)];
}

namespace {

const char* const kVerilogKeywords[] = {
    "always", "assign", "begin",   "case",    "default", "else",    "end",     "endcase",
    "endmodule", "endtask", "if",  "initial", "input",   "integer", "module",  "negedge",
    "output", "posedge", "reg",    "repeat",  "task",    "wire"};

void validate_module_name(const std::string& name) {
    const bool bad_first = name.empty() || (!std::isalpha(static_cast<unsigned char>(name[0])) &&
                                            name[0] != '_');
    bool bad_char = false;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '$') {
            bad_char = true;
        }
    }
    bool keyword = false;
    for (const char* kw : kVerilogKeywords) {
        if (name == kw) {
            keyword = true;
        }
    }
    if (bad_first || bad_char || keyword) {
        throw std::invalid_argument("invalid Verilog module name: '" + name + "'");
    }
}

std::string literal(int width, std::uint64_t value) {
    return std::to_string(width) + "'d" + std::to_string(value);
}

// Declaration range: empty for 1-bit nets.
std::string range(int width) {
    return width == 1 ? "" : "[" + std::to_string(width - 1) + ":0] ";
}

std::string node_name(int index) {
    return "n" + std::to_string(index);
}

// Cycles of register delay between a producer and a consuming stage:
// boundary t (after stage t) is registered iff t < pipeline_stages, and the
// path from stage i to stage j crosses boundaries i..j-1. Constants are
// never registered.
int register_delay(const Node& producer, int consumer_stage, int pipeline_stages) {
    if (producer.kind == NodeKind::constant) {
        return 0;
    }
    return std::max(0, std::min(consumer_stage, pipeline_stages) - producer.stage);
}

std::string operand_ref(const Netlist& nl, int producer, int consumer_stage) {
    const Node& node = nl.nodes[static_cast<std::size_t>(producer)];
    const int d = register_delay(node, consumer_stage, nl.pipeline_stages);
    std::string name = node_name(producer);
    if (d > 0) {
        name += "_q" + std::to_string(d);
    }
    return name;
}

}  // namespace

std::string emit_verilog(const Netlist& nl, const std::string& module_name) {
    validate_module_name(module_name);
    std::ostringstream out;
    out << "// Modular reduction circuit: y = x mod " << nl.q << ".\n";
    out << "// Input width " << nl.input_width << ", output width " << nl.output_width
        << ", pipeline stages " << nl.pipeline_stages << ".\n";
    out << "module " << module_name << " (\n";
    if (nl.pipeline_stages > 0) {
        out << "  input  wire clk,\n";
    }
    out << "  input  wire " << range(nl.input_width) << "x,\n";
    out << "  output wire " << range(nl.output_width) << "y\n";
    out << ");\n";

    // Deepest register chain needed per node.
    std::vector<int> max_delay(nl.nodes.size(), 0);
    for (const Node& node : nl.nodes) {
        for (int in : node.inputs) {
            const Node& producer = nl.nodes[static_cast<std::size_t>(in)];
            max_delay[static_cast<std::size_t>(in)] =
                std::max(max_delay[static_cast<std::size_t>(in)],
                         register_delay(producer, node.stage, nl.pipeline_stages));
        }
    }

    for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
        const Node& node = nl.nodes[i];
        const std::string name = node_name(static_cast<int>(i));
        out << "\n";
        switch (node.kind) {
            case NodeKind::constant:
                out << "  wire " << range(node.width) << name << ";\n";
                out << "  assign " << name << " = " << literal(node.width, node.value) << ";\n";
                break;
            case NodeKind::slice:
                out << "  // passthrough bits\n";
                out << "  wire " << range(node.width) << name << ";\n";
                out << "  assign " << name << " = x[" << node.lo + node.width - 1 << ":"
                    << node.lo << "];\n";
                break;
            case NodeKind::rom_lookup: {
                const int k = static_cast<int>(node.address_bits.size());
                out << "  // table over input bits {";
                for (int j = 0; j < k; ++j) {
                    out << (j > 0 ? ", " : "") << node.address_bits[j];
                }
                out << "}\n";
                out << "  reg " << range(node.width) << name << ";\n";
                out << "  always @* begin\n";
                out << "    case (";
                if (k == 1) {
                    out << "x[" << node.address_bits[0] << "]";
                } else {
                    out << "{";
                    for (int j = k - 1; j >= 0; --j) {
                        out << "x[" << node.address_bits[static_cast<std::size_t>(j)] << "]"
                            << (j > 0 ? ", " : "");
                    }
                    out << "}";
                }
                out << ")\n";
                for (std::size_t a = 0; a < node.contents.size(); ++a) {
                    out << "      " << literal(k, a) << ": " << name << " = "
                        << literal(node.width, node.contents[a]) << ";\n";
                }
                out << "    endcase\n";
                out << "  end\n";
                break;
            }
            case NodeKind::add:
                out << "  wire " << range(node.width) << name << ";\n";
                out << "  assign " << name << " = " << operand_ref(nl, node.inputs[0], node.stage)
                    << " + " << operand_ref(nl, node.inputs[1], node.stage) << ";\n";
                break;
            case NodeKind::compare_ge: {
                const Node& src = nl.nodes[static_cast<std::size_t>(node.inputs[0])];
                out << "  wire " << name << ";\n";
                out << "  assign " << name << " = ("
                    << operand_ref(nl, node.inputs[0], node.stage) << " >= "
                    << literal(src.width, node.value) << ");\n";
                break;
            }
            case NodeKind::select: {
                // Thresholds ascend, so the compare bits are a thermometer
                // code and their count indexes the multiple to subtract.
                const int index_width = value_width(node.contents.size() - 1);
                out << "  // multiple of " << nl.q << " selected by compare count\n";
                out << "  wire " << range(index_width) << name << "_idx;\n";
                out << "  assign " << name << "_idx = ";
                for (std::size_t j = 0; j < node.inputs.size(); ++j) {
                    out << (j > 0 ? " + " : "") << operand_ref(nl, node.inputs[j], node.stage);
                }
                out << ";\n";
                out << "  reg " << range(node.width) << name << ";\n";
                out << "  always @* begin\n";
                out << "    case (" << name << "_idx)\n";
                for (std::size_t c = 1; c < node.contents.size(); ++c) {
                    out << "      " << literal(index_width, c) << ": " << name << " = "
                        << literal(node.width, node.contents[c]) << ";\n";
                }
                out << "      default: " << name << " = " << literal(node.width, 0) << ";\n";
                out << "    endcase\n";
                out << "  end\n";
                break;
            }
            case NodeKind::subtract:
                out << "  // final stage, truncated to " << node.width << " bits\n";
                out << "  wire " << range(node.width) << name << ";\n";
                out << "  assign " << name << " = " << operand_ref(nl, node.inputs[0], node.stage)
                    << " - " << operand_ref(nl, node.inputs[1], node.stage) << ";\n";
                break;
        }
        for (int d = 1; d <= max_delay[i]; ++d) {
            const std::string from = d == 1 ? name : name + "_q" + std::to_string(d - 1);
            out << "  reg " << range(node.width) << name << "_q" << d << ";\n";
            out << "  always @(posedge clk) " << name << "_q" << d << " <= " << from << ";\n";
        }
    }

    out << "\n  assign y = " << node_name(nl.output) << ";\n";
    out << "endmodule\n";
    return out.str();
}

std::string emit_testbench(const Netlist& nl, const std::string& module_name, int vector_count,
                           std::uint64_t seed) {
    validate_module_name(module_name);
    if (vector_count < 1) {
        throw std::invalid_argument("testbench needs at least one vector");
    }
    const int s = nl.pipeline_stages;
    std::ostringstream out;
    out << "// Self-checking testbench for " << module_name << ": " << vector_count
        << " random vectors, expected values precomputed.\n";
    out << "module " << module_name << "_tb;\n";
    if (s > 0) {
        out << "  reg clk;\n";
    }
    out << "  reg " << range(nl.input_width) << "x;\n";
    out << "  wire " << range(nl.output_width) << "y;\n";
    out << "  integer errors;\n\n";
    out << "  " << module_name << " dut (";
    if (s > 0) {
        out << ".clk(clk), ";
    }
    out << ".x(x), .y(y));\n\n";
    if (s > 0) {
        out << "  always #5 clk = ~clk;\n\n";
    }
    out << "  task check;\n";
    out << "    input " << range(nl.input_width) << "v;\n";
    out << "    input " << range(nl.output_width) << "e;\n";
    out << "    begin\n";
    if (s > 0) {
        out << "      @(negedge clk);\n";
        out << "      x = v;\n";
        out << "      repeat (" << s << ") @(posedge clk);\n";
    } else {
        out << "      x = v;\n";
    }
    out << "      #1;\n";
    out << "      if (y !== e) begin\n";
    out << "        errors = errors + 1;\n";
    out << "        $display(\"FAIL x=%0d y=%0d expected=%0d\", v, y, e);\n";
    out << "      end\n";
    out << "    end\n";
    out << "  endtask\n\n";
    out << "  initial begin\n";
    out << "    errors = 0;\n";
    if (s > 0) {
        out << "    clk = 0;\n";
    }
    std::mt19937_64 rng(seed);
    const std::uint64_t mask = low_mask(nl.input_width);
    for (int i = 0; i < vector_count; ++i) {
        const std::uint64_t v = rng() & mask;
        const std::uint64_t e = eval_netlist(nl, v);
        out << "    check(" << literal(nl.input_width, v) << ", "
            << literal(nl.output_width, e) << ");\n";
    }
    out << "    if (errors == 0) $display(\"PASS " << vector_count << " vectors\");\n";
    out << "    else $display(\"FAIL %0d errors\", errors);\n";
    out << "    $finish;\n";
    out << "  end\n";
    out << "endmodule\n";
    return out.str();
}

}  // namespace modred
