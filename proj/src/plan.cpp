// SPDX-License-Identifier: Apache-2.0

#include "modred/plan.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace modred {

namespace {

constexpr int kMaxWidth = 63;
constexpr int kMaxTableBits = 20;

std::uint64_t low_mask(int bits) {
    return bits == 0 ? 0 : (~std::uint64_t{0} >> (64 - bits));
}

LutTable build_table(BitGroup group, std::uint64_t q) {
    const int k = static_cast<int>(group.bit_indices.size());
    std::vector<std::uint64_t> residues(k);
    for (int j = 0; j < k; ++j) {
        residues[j] = pow2_mod(static_cast<unsigned>(group.bit_indices[j]), q);
    }
    std::vector<std::uint64_t> entries(std::size_t{1} << k, 0);
    for (std::size_t x = 1; x < entries.size(); ++x) {
        const int j = std::countr_zero(x);
        entries[x] = add_mod(entries[x & (x - 1)], residues[j], q);
    }
    return LutTable{std::move(group), std::move(entries)};
}

void validate_width(const Modulus& modulus, int width) {
    if (width < modulus.n) {
        throw std::invalid_argument("input width " + std::to_string(width) +
                                    " is narrower than the modulus (" +
                                    std::to_string(modulus.n) + " bits)");
    }
    if (width > kMaxWidth) {
        throw std::invalid_argument("input width must not exceed 63 bits");
    }
}

}  // namespace

GroupingSpec GroupingSpec::uniform(int k, int total_bits, GroupingStrategy strategy) {
    if (k < 1) {
        throw std::invalid_argument("table size must be at least 1");
    }
    GroupingSpec spec;
    spec.strategy = strategy;
    int remaining = total_bits;
    while (remaining > k) {
        spec.table_sizes.push_back(k);
        remaining -= k;
    }
    if (remaining > 0) {
        spec.table_sizes.push_back(remaining);
    }
    return spec;
}

ReductionPlan assemble_plan(const Modulus& modulus, int width, int passthrough_bits,
                            std::vector<LutTable> tables) {
    validate_width(modulus, width);
    if (passthrough_bits != modulus.n && passthrough_bits != modulus.n - 1) {
        throw std::invalid_argument("passthrough bit count must be n or n-1");
    }
    std::vector<bool> covered(static_cast<std::size_t>(width), false);
    int covered_count = 0;
    for (const LutTable& t : tables) {
        const auto& bits = t.group.bit_indices;
        if (bits.empty()) {
            throw std::invalid_argument("table input bit list must not be empty");
        }
        if (static_cast<int>(bits.size()) > kMaxTableBits) {
            throw std::invalid_argument("table size must not exceed " +
                                        std::to_string(kMaxTableBits) + " bits");
        }
        if (t.entries.size() != std::size_t{1} << bits.size()) {
            throw std::invalid_argument("table entry count does not match its input bit count");
        }
        for (std::size_t j = 0; j < bits.size(); ++j) {
            const int b = bits[j];
            if (j > 0 && bits[j - 1] >= b) {
                throw std::invalid_argument("table input bits must be ascending");
            }
            if (b < passthrough_bits || b >= width) {
                throw std::invalid_argument("bit index " + std::to_string(b) +
                                            " outside the table range");
            }
            if (covered[static_cast<std::size_t>(b)]) {
                throw std::invalid_argument("bit index " + std::to_string(b) +
                                            " assigned to two tables");
            }
            covered[static_cast<std::size_t>(b)] = true;
            ++covered_count;
        }
    }
    if (covered_count != width - passthrough_bits) {
        throw std::invalid_argument("bit groups do not cover all non-passthrough bits");
    }
    std::sort(tables.begin(), tables.end(), [](const LutTable& a, const LutTable& b) {
        return a.group.bit_indices.front() < b.group.bit_indices.front();
    });
    std::uint64_t max_sum = low_mask(passthrough_bits);
    for (const LutTable& t : tables) {
        max_sum += *std::max_element(t.entries.begin(), t.entries.end());
    }
    const std::uint64_t i_max = max_sum / modulus.q;
    std::vector<std::uint64_t> multiples(i_max + 1);
    for (std::uint64_t i = 0; i <= i_max; ++i) {
        multiples[i] = i * modulus.q;
    }
    return ReductionPlan{modulus,           width, passthrough_bits, std::move(tables),
                         max_sum,           i_max, std::move(multiples)};
}

ReductionPlan build_basic_plan(const Modulus& modulus, int width) {
    validate_width(modulus, width);
    std::vector<LutTable> tables;
    tables.reserve(static_cast<std::size_t>(width - modulus.n));
    for (int bit = modulus.n; bit < width; ++bit) {
        tables.push_back(build_table(BitGroup{{bit}}, modulus.q));
    }
    return assemble_plan(modulus, width, modulus.n, std::move(tables));
}

int infer_passthrough(const Modulus& modulus, int width, int total_table_bits) {
    validate_width(modulus, width);
    if (total_table_bits == width - modulus.n) {
        return modulus.n;
    }
    if (total_table_bits == width - (modulus.n - 1)) {
        return modulus.n - 1;
    }
    throw std::invalid_argument("table sizes sum to " + std::to_string(total_table_bits) +
                                ", expected " + std::to_string(width - modulus.n) + " or " +
                                std::to_string(width - modulus.n + 1) +
                                " for a width of " + std::to_string(width));
}

ReductionPlan build_grouped_plan(const Modulus& modulus, int width,
                                 const GroupingSpec& grouping) {
    validate_width(modulus, width);
    int total = 0;
    std::uint64_t total_entries = 0;
    for (int k : grouping.table_sizes) {
        if (k < 1) {
            throw std::invalid_argument("table size must be at least 1");
        }
        if (k > kMaxTableBits) {
            throw std::invalid_argument("table size must not exceed " +
                                        std::to_string(kMaxTableBits) + " bits");
        }
        total += k;
        total_entries += std::uint64_t{1} << k;
    }
    const int passthrough = infer_passthrough(modulus, width, total);
    if (total_entries > (std::uint64_t{1} << 21)) {
        throw std::invalid_argument("plan would store more than 2^21 table entries");
    }

    std::vector<BitGroup> groups;
    switch (grouping.strategy) {
        case GroupingStrategy::natural: {
            int bit = passthrough;
            for (int k : grouping.table_sizes) {
                BitGroup g;
                for (int j = 0; j < k; ++j) {
                    g.bit_indices.push_back(bit++);
                }
                groups.push_back(std::move(g));
            }
            break;
        }
        case GroupingStrategy::exhaustive:
            groups = optimize_grouping_exhaustive(modulus, width, grouping.table_sizes);
            break;
        case GroupingStrategy::greedy:
            groups = optimize_grouping_greedy(modulus, width, grouping.table_sizes);
            break;
    }
    return build_plan_from_groups(modulus, width, passthrough, std::move(groups));
}

ReductionPlan build_plan_from_groups(const Modulus& modulus, int width, int passthrough_bits,
                                     std::vector<BitGroup> groups) {
    std::vector<LutTable> tables;
    tables.reserve(groups.size());
    for (BitGroup& g : groups) {
        if (g.bit_indices.empty()) {
            throw std::invalid_argument("bit group must not be empty");
        }
        if (static_cast<int>(g.bit_indices.size()) > kMaxTableBits) {
            throw std::invalid_argument("table size must not exceed " +
                                        std::to_string(kMaxTableBits) + " bits");
        }
        std::sort(g.bit_indices.begin(), g.bit_indices.end());
        tables.push_back(build_table(std::move(g), modulus.q));
    }
    return assemble_plan(modulus, width, passthrough_bits, std::move(tables));
}

namespace {

std::uint64_t accumulate(const ReductionPlan& plan, std::uint64_t value, OpCounts& counts) {
    if (plan.width < 64 && (value >> plan.width) != 0) {
        throw std::out_of_range("reduce: value does not fit the plan width");
    }
    std::uint64_t sum = value & low_mask(plan.passthrough_bits);
    for (const LutTable& t : plan.tables) {
        const auto& bits = t.group.bit_indices;
        std::uint64_t addr = 0;
        for (std::size_t j = 0; j < bits.size(); ++j) {
            addr |= ((value >> bits[j]) & 1u) << j;
        }
        ++counts.lookups;
        sum += t.entries[addr];
        ++counts.adds;
    }
    return sum;
}

}  // namespace

std::uint64_t reduce(const ReductionPlan& plan, std::uint64_t value, OpCounts& counts) {
    const std::uint64_t sum = accumulate(plan, value, counts);
    // Final stage: all comparisons are evaluated unconditionally, the
    // subtracted multiple is picked by the count of satisfied ones.
    std::uint64_t index = 0;
    for (std::uint64_t i = 1; i <= plan.i_max; ++i) {
        index += static_cast<std::uint64_t>(sum >= plan.multiples[i]);
        ++counts.compares;
    }
    ++counts.subtracts;
    return sum - plan.multiples[index];
}

std::uint64_t reduce(const ReductionPlan& plan, std::uint64_t value) {
    OpCounts counts;
    return reduce(plan, value, counts);
}

std::uint64_t intermediate_sum(const ReductionPlan& plan, std::uint64_t value) {
    OpCounts counts;
    return accumulate(plan, value, counts);
}

ReduceTrace reduce_trace(const ReductionPlan& plan, std::uint64_t value) {
    OpCounts counts;
    const std::uint64_t sum = accumulate(plan, value, counts);
    std::uint64_t index = 0;
    for (std::uint64_t i = 1; i <= plan.i_max; ++i) {
        index += static_cast<std::uint64_t>(sum >= plan.multiples[i]);
    }
    return ReduceTrace{sum, index, sum - plan.multiples[index]};
}

}  // namespace modred
