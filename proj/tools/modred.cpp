// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: plan construction, reduction, differential
// verification, cost comparison, Verilog emission, and benchmarking.
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "modred/barrett.hpp"
#include "modred/cost.hpp"
#include "modred/netlist.hpp"
#include "modred/plan.hpp"
#include "modred/serialize.hpp"

namespace {

using namespace modred;

std::uint64_t parse_value(const std::string& text) {
    std::string_view sv{text};
    int base = 10;
    if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'x' || sv[1] == 'X')) {
        base = 16;
        sv.remove_prefix(2);
    } else if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'b' || sv[1] == 'B')) {
        base = 2;
        sv.remove_prefix(2);
    }
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out, base);
    if (sv.empty() || ec != std::errc{} || ptr != sv.data() + sv.size()) {
        throw std::invalid_argument("invalid numeric value: '" + text + "'");
    }
    return out;
}

std::uint64_t width_mask(int width) {
    return width == 0 ? 0 : (~std::uint64_t{0} >> (64 - width));
}

struct CommonOpts {
    std::string q_text;
    int width = 0;  // 0 selects the default 2n
    std::string sizes_text;
    bool optimize = false;
    bool no_nth_bit = false;
    std::string plan_file;
};

std::vector<int> parse_table_sizes(const std::string& text) {
    std::vector<int> sizes;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        int k = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + comma, k);
        if (ec != std::errc{} || ptr != text.data() + comma || comma == pos) {
            throw std::invalid_argument("invalid table size list: '" + text + "'");
        }
        sizes.push_back(k);
        pos = comma + 1;
    }
    return sizes;
}

void add_common(CLI::App* sub, CommonOpts& o, bool with_plan_file) {
    auto* q = sub->add_option("-q,--modulus", o.q_text,
                              "Modulus (decimal, 0x hex, or 0b binary)");
    auto* w = sub->add_option("-w,--width", o.width, "Input width in bits (default 2n)");
    auto* t = sub->add_option("-t,--tables", o.sizes_text,
                              "Comma-separated table input widths (default 6 per table)");
    auto* g = sub->add_flag("--optimize-grouping", o.optimize,
                            "Search for a bit-to-table assignment minimizing the "
                            "intermediate maximum");
    auto* n = sub->add_flag("--no-nth-bit", o.no_nth_bit,
                            "Keep bit n-1 in the passthrough range (p = n) instead of "
                            "folding it into the tables");
    if (with_plan_file) {
        sub->add_option("--plan-file", o.plan_file, "Load the plan from a JSON file")
            ->excludes(q)
            ->excludes(w)
            ->excludes(t)
            ->excludes(g)
            ->excludes(n);
    } else {
        q->required();
    }
}

ReductionPlan make_plan(const CommonOpts& o) {
    if (!o.plan_file.empty()) {
        return load_plan_file(o.plan_file);
    }
    if (o.q_text.empty()) {
        throw std::invalid_argument("either -q or --plan-file is required");
    }
    const Modulus modulus(parse_value(o.q_text));
    const int width = o.width > 0 ? o.width : 2 * modulus.n;
    std::vector<int> sizes =
        o.sizes_text.empty() ? std::vector<int>{} : parse_table_sizes(o.sizes_text);
    if (sizes.empty()) {
        const int passthrough = o.no_nth_bit ? modulus.n : modulus.n - 1;
        sizes = GroupingSpec::uniform(6, width - passthrough).table_sizes;
    } else {
        const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
        if (o.no_nth_bit && infer_passthrough(modulus, width, total) != modulus.n) {
            throw std::invalid_argument(
                "--no-nth-bit conflicts with the table sizes: they cover bit n-1");
        }
    }
    if (o.optimize) {
        const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
        std::vector<BitGroup> groups = optimize_grouping(modulus, width, sizes);
        return build_plan_from_groups(modulus, width,
                                      infer_passthrough(modulus, width, total),
                                      std::move(groups));
    }
    GroupingSpec spec;
    spec.table_sizes = std::move(sizes);
    return build_grouped_plan(modulus, width, spec);
}

// ---------------------------------------------------------------------------
// plan

int run_plan(const CommonOpts& opts, bool json_only) {
    const ReductionPlan plan = make_plan(opts);
    if (!json_only) {
        const CostReport cost = cost_of_plan(plan);
        std::cout << "q=" << plan.modulus.q << " n=" << plan.modulus.n
                  << " width=" << plan.width << " passthrough=" << plan.passthrough_bits
                  << " tables=" << plan.tables.size()
                  << " max_intermediate=" << plan.max_intermediate << " i_max=" << plan.i_max
                  << " storage_bits=" << cost.storage_bits << "\n";
    }
    std::cout << plan_to_json(plan).dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// reduce

int run_reduce(const CommonOpts& opts, const std::string& value_text, bool trace) {
    const ReductionPlan plan = make_plan(opts);
    const std::uint64_t value = parse_value(value_text);
    if (trace) {
        const ReduceTrace t = reduce_trace(plan, value);
        std::cout << "c_hat=" << t.intermediate << " i=" << t.index << " c=" << t.residue
                  << "\n";
    } else {
        std::cout << reduce(plan, value) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct Counterexample {
    const char* engine;
    std::uint64_t value;
    std::uint64_t expected;
    std::uint64_t got;
};

// All reduction engines for one configuration, compared against builtin %.
// The Barrett engines are defined on [0, q^2) and are skipped above that.
struct Engines {
    ReductionPlan grouped;
    ReductionPlan basic;
    Netlist net;
    BarrettConstants barrett;
    ShiftAddBarrett shift_add_unsigned;
    ShiftAddBarrett shift_add_signed;
    std::uint64_t q = 0;
    std::uint64_t q_squared = 0;

    explicit Engines(ReductionPlan plan)
        : grouped(std::move(plan)),
          basic(build_basic_plan(grouped.modulus, grouped.width)),
          net(lower(grouped, 0)),
          barrett(barrett_constants(grouped.modulus)),
          shift_add_unsigned(ShiftAddBarrett::create(grouped.modulus, false)),
          shift_add_signed(ShiftAddBarrett::create(grouped.modulus, true)),
          q(grouped.modulus.q),
          q_squared(grouped.modulus.q * grouped.modulus.q) {}

    std::optional<Counterexample> check(std::uint64_t value) const {
        const std::uint64_t expected = value % q;
        std::uint64_t got = reduce(grouped, value);
        if (got != expected) {
            return Counterexample{"lut_grouped", value, expected, got};
        }
        got = reduce(basic, value);
        if (got != expected) {
            return Counterexample{"lut_basic", value, expected, got};
        }
        got = eval_netlist(net, value);
        if (got != expected) {
            return Counterexample{"netlist", value, expected, got};
        }
        if (value < q_squared) {
            got = barrett_reduce(barrett, value);
            if (got != expected) {
                return Counterexample{"barrett_general", value, expected, got};
            }
            got = barrett_reduce_shift_add(shift_add_unsigned, value);
            if (got != expected) {
                return Counterexample{"barrett_shift_add", value, expected, got};
            }
            got = barrett_reduce_shift_add(shift_add_signed, value);
            if (got != expected) {
                return Counterexample{"barrett_shift_add_signed", value, expected, got};
            }
        }
        return std::nullopt;
    }
};

// First failure in value order, independent of the thread count.
std::optional<Counterexample> scan_chunk(const Engines& engines,
                                         const std::vector<std::uint64_t>& values,
                                         int threads) {
    const std::size_t count = values.size();
    if (threads <= 1 || count < 4096) {
        for (std::uint64_t v : values) {
            if (auto c = engines.check(v)) {
                return c;
            }
        }
        return std::nullopt;
    }
    const std::size_t per = (count + static_cast<std::size_t>(threads) - 1) /
                            static_cast<std::size_t>(threads);
    std::vector<std::optional<Counterexample>> results(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * per;
        const std::size_t hi = std::min(count, lo + per);
        if (lo >= hi) {
            break;
        }
        pool.emplace_back([&, lo, hi, t] {
            for (std::size_t i = lo; i < hi; ++i) {
                if (auto c = engines.check(values[i])) {
                    results[static_cast<std::size_t>(t)] = c;
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) {
        th.join();
    }
    for (const auto& r : results) {
        if (r) {
            return r;
        }
    }
    return std::nullopt;
}

int report_failure(const Engines& engines, const Counterexample& c) {
    std::cout << "FAIL q=" << engines.q << " width=" << engines.grouped.width
              << " engine=" << c.engine << " value=" << c.value << " expected=" << c.expected
              << " got=" << c.got << "\n";
    return 1;
}

int run_verify(const CommonOpts& opts, bool exhaustive, std::uint64_t random_count,
               int threads, std::uint64_t seed) {
    if (exhaustive == (random_count > 0)) {
        throw std::invalid_argument("choose exactly one of --exhaustive and --random N");
    }
    const Engines engines(make_plan(opts));
    const int width = engines.grouped.width;
    constexpr std::size_t kChunk = std::size_t{1} << 20;
    std::vector<std::uint64_t> buffer;

    if (exhaustive) {
        if (width > 24) {
            throw std::invalid_argument("exhaustive verification is limited to widths <= 24");
        }
        const std::uint64_t total = std::uint64_t{1} << width;
        for (std::uint64_t start = 0; start < total; start += kChunk) {
            const std::uint64_t end = std::min(total, start + kChunk);
            buffer.resize(end - start);
            std::iota(buffer.begin(), buffer.end(), start);
            if (auto c = scan_chunk(engines, buffer, threads)) {
                return report_failure(engines, *c);
            }
        }
        std::cout << "PASS q=" << engines.q << " width=" << width
                  << " mode=exhaustive vectors=" << total << "\n";
        return 0;
    }

    std::mt19937_64 rng(seed);
    const std::uint64_t mask = width_mask(width);
    std::uint64_t remaining = random_count;
    while (remaining > 0) {
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kChunk));
        buffer.resize(count);
        for (std::uint64_t& v : buffer) {
            v = rng() & mask;
        }
        if (auto c = scan_chunk(engines, buffer, threads)) {
            return report_failure(engines, *c);
        }
        remaining -= count;
    }
    std::cout << "PASS q=" << engines.q << " width=" << width
              << " mode=random vectors=" << random_count << " seed=" << seed << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// compare

void print_cost_row(const std::string& name, const CostReport& r) {
    std::cout << std::left << std::setw(20) << name << std::right << std::setw(13)
              << r.storage_bits << std::setw(8) << r.table_count << std::setw(8)
              << r.adder_count << std::setw(13) << r.adder_width << std::setw(13)
              << r.final_cases << std::setw(13) << r.multiplier_count << std::setw(17)
              << r.shift_add_terms << "\n";
}

int run_compare(const CommonOpts& opts, bool as_json) {
    const ComparisonReport report = compare_costs(make_plan(opts));
    if (as_json) {
        std::cout << comparison_to_json(report).dump(2) << "\n";
        return 0;
    }
    std::cout << "q=" << report.q << " width=" << report.width << "\n";
    std::cout << std::left << std::setw(20) << "scheme" << std::right << std::setw(13)
              << "storage_bits" << std::setw(8) << "tables" << std::setw(8) << "adders"
              << std::setw(13) << "adder_width" << std::setw(13) << "final_cases"
              << std::setw(13) << "multipliers" << std::setw(17) << "shift_add_terms"
              << "\n";
    print_cost_row("lut_grouped", report.lut_grouped);
    print_cost_row("lut_basic", report.lut_basic);
    print_cost_row("barrett_general", report.barrett_general);
    print_cost_row("barrett_shift_add", report.barrett_shift_add);
    std::cout << std::fixed << std::setprecision(3) << "adder_ratio=" << report.adder_ratio
              << " storage_ratio=" << report.storage_ratio << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// emit

int run_emit(const CommonOpts& opts, std::string module_name, int pipeline,
             const std::string& out_path, const std::string& tb_path, int tb_vectors,
             std::uint64_t seed) {
    const ReductionPlan plan = make_plan(opts);
    const Netlist net = lower(plan, pipeline);
    if (module_name.empty()) {
        module_name = "reduce_q" + std::to_string(plan.modulus.q) + "_w" +
                      std::to_string(plan.width);
    }
    const std::string text = emit_verilog(net, module_name);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            throw std::runtime_error("cannot open output file: " + out_path);
        }
        out << text;
    }
    if (!tb_path.empty()) {
        std::ofstream out(tb_path);
        if (!out) {
            throw std::runtime_error("cannot open output file: " + tb_path);
        }
        out << emit_testbench(net, module_name, tb_vectors, seed);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench

int run_bench(const CommonOpts& opts, long long iterations, std::uint64_t seed) {
    const Engines engines(make_plan(opts));
    const std::uint64_t mask = width_mask(engines.grouped.width);
    const std::uint64_t q_squared = engines.q_squared;

    const auto time_engine = [&](const char* name, auto fn) {
        std::mt19937_64 rng(seed);
        std::uint64_t checksum = 0;
        const auto start = std::chrono::steady_clock::now();
        for (long long i = 0; i < iterations; ++i) {
            checksum += fn(rng());
        }
        const std::chrono::duration<double, std::nano> elapsed =
            std::chrono::steady_clock::now() - start;
        std::cout << name << " checksum=" << checksum << "\n";
        std::cerr << name << " " << std::fixed << std::setprecision(2)
                  << elapsed.count() / static_cast<double>(iterations) << " ns/op\n";
    };

    time_engine("lut_grouped",
                [&](std::uint64_t r) { return reduce(engines.grouped, r & mask); });
    time_engine("lut_basic", [&](std::uint64_t r) { return reduce(engines.basic, r & mask); });
    time_engine("netlist", [&](std::uint64_t r) { return eval_netlist(engines.net, r & mask); });
    time_engine("barrett_general",
                [&](std::uint64_t r) { return barrett_reduce(engines.barrett, r % q_squared); });
    time_engine("barrett_shift_add", [&](std::uint64_t r) {
        return barrett_reduce_shift_add(engines.shift_add_unsigned, r % q_squared);
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LUT-based modular reduction: planning, verification, costing, and "
                 "Verilog emission"};
    app.require_subcommand(1);

    CommonOpts plan_opts;
    bool plan_json = false;
    auto* cmd_plan = app.add_subcommand("plan", "Construct a plan and print it as JSON");
    add_common(cmd_plan, plan_opts, false);
    cmd_plan->add_flag("--json", plan_json, "Print only the JSON document");

    CommonOpts reduce_opts;
    std::string reduce_value;
    bool reduce_trace_flag = false;
    auto* cmd_reduce = app.add_subcommand("reduce", "Reduce a value modulo q via the plan");
    add_common(cmd_reduce, reduce_opts, true);
    cmd_reduce->add_option("value", reduce_value, "Value to reduce")->required();
    cmd_reduce->add_flag("--trace", reduce_trace_flag,
                         "Print the intermediate sum and selected multiple");

    CommonOpts verify_opts;
    bool verify_exhaustive = false;
    std::uint64_t verify_random = 0;
    int verify_threads = 1;
    std::uint64_t verify_seed = 1;
    auto* cmd_verify =
        app.add_subcommand("verify", "Check all engines against builtin mod");
    add_common(cmd_verify, verify_opts, true);
    cmd_verify->add_flag("--exhaustive", verify_exhaustive,
                         "Sweep every value below 2^width (width <= 24)");
    cmd_verify->add_option("--random", verify_random, "Number of random vectors");
    cmd_verify->add_option("--threads", verify_threads, "Worker threads")
        ->check(CLI::Range(1, 64));
    cmd_verify->add_option("--seed", verify_seed, "Random seed");

    CommonOpts compare_opts;
    bool compare_json = false;
    auto* cmd_compare =
        app.add_subcommand("compare", "Structural cost comparison of all schemes");
    add_common(cmd_compare, compare_opts, true);
    cmd_compare->add_flag("--json", compare_json, "Print the report as JSON");

    CommonOpts emit_opts;
    std::string emit_module;
    int emit_pipeline = 0;
    std::string emit_out;
    std::string emit_tb;
    int emit_tb_vectors = 100;
    std::uint64_t emit_seed = 1;
    auto* cmd_emit = app.add_subcommand("emit", "Emit Verilog for the plan");
    add_common(cmd_emit, emit_opts, true);
    cmd_emit->add_option("--module", emit_module, "Module name (default reduce_q<q>_w<W>)");
    cmd_emit->add_option("--pipeline", emit_pipeline, "Pipeline register stages")
        ->check(CLI::Range(0, 3));
    cmd_emit->add_option("-o,--output", emit_out, "Output file (default stdout)");
    cmd_emit->add_option("--testbench", emit_tb, "Also write a self-checking testbench");
    cmd_emit->add_option("--tb-vectors", emit_tb_vectors, "Testbench vector count")
        ->check(CLI::Range(1, 100000));
    cmd_emit->add_option("--seed", emit_seed, "Testbench vector seed");

    CommonOpts bench_opts;
    long long bench_iterations = 1000000;
    std::uint64_t bench_seed = 1;
    auto* cmd_bench = app.add_subcommand("bench", "Time the software engines");
    add_common(cmd_bench, bench_opts, true);
    cmd_bench->add_option("--iterations", bench_iterations, "Values per engine")
        ->check(CLI::Range(static_cast<long long>(1), static_cast<long long>(1) << 32));
    cmd_bench->add_option("--seed", bench_seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_plan->parsed()) {
            return run_plan(plan_opts, plan_json);
        }
        if (cmd_reduce->parsed()) {
            return run_reduce(reduce_opts, reduce_value, reduce_trace_flag);
        }
        if (cmd_verify->parsed()) {
            return run_verify(verify_opts, verify_exhaustive, verify_random, verify_threads,
                              verify_seed);
        }
        if (cmd_compare->parsed()) {
            return run_compare(compare_opts, compare_json);
        }
        if (cmd_emit->parsed()) {
            return run_emit(emit_opts, emit_module, emit_pipeline, emit_out, emit_tb,
                            emit_tb_vectors, emit_seed);
        }
        if (cmd_bench->parsed()) {
            return run_bench(bench_opts, bench_iterations, bench_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
