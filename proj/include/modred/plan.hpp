// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "modred/modulus.hpp"

#include <cstdint>
#include <vector>

namespace modred {

/// Input bit positions feeding one lookup table. bit_indices[j] is the
/// input bit wired to address bit j (bit 0 = least significant).
struct BitGroup {
    std::vector<int> bit_indices;
};

/// Precomputed table. entries[x] is the residue of the weighted sum of the
/// group's bits under the address pattern x:
///   entries[x] = (sum over set bits j of x of 2^bit_indices[j]) mod q
struct LutTable {
    BitGroup group;
    std::vector<std::uint64_t> entries;  // size 2^|group|, entries[0] == 0
};

enum class GroupingStrategy { natural, exhaustive, greedy };

/// Requested table input widths for the non-passthrough bits.
struct GroupingSpec {
    std::vector<int> table_sizes;
    GroupingStrategy strategy = GroupingStrategy::natural;

    /// Chunks total_bits into tables of k inputs each; the last table takes
    /// the remainder when k does not divide total_bits. total_bits == 0
    /// yields no tables.
    static GroupingSpec uniform(int k, int total_bits,
                                GroupingStrategy strategy = GroupingStrategy::natural);
};

/// Full precomputed reduction artifact for a fixed modulus and input width.
///
/// Evaluation adds the low passthrough_bits of the input to one output per
/// table, then subtracts the unique multiple of q that lands the sum in
/// [0, q). The plan is immutable after construction and safe to share
/// across threads.
struct ReductionPlan {
    Modulus modulus;
    int width;                             // W, input bits
    int passthrough_bits;                  // p, low bits summed unchanged
    std::vector<LutTable> tables;          // disjoint cover of bits [p, W)
    std::uint64_t max_intermediate;        // (2^p - 1) + sum of table maxima
    std::uint64_t i_max;                   // max_intermediate / q
    std::vector<std::uint64_t> multiples;  // 0*q, 1*q, ..., i_max*q
};

/// Counters for the fixed-work property of reduce(): for a given plan every
/// input executes exactly the same number of each operation.
struct OpCounts {
    std::uint64_t adds = 0;
    std::uint64_t compares = 0;
    std::uint64_t subtracts = 0;
    std::uint64_t lookups = 0;

    bool operator==(const OpCounts&) const = default;
};

/// Single-bit tables for every input bit in [n, width), passthrough p = n.
/// Throws std::invalid_argument for width < n or width > 63.
ReductionPlan build_basic_plan(const Modulus& modulus, int width);

/// Passthrough width implied by the total table input count: p is n or n-1,
/// whichever satisfies total_table_bits == width - p (the two are distinct,
/// so the choice is unique). Folding bit n-1 into the tables usually removes
/// one case from the final stage. Throws for any other total.
int infer_passthrough(const Modulus& modulus, int width, int total_table_bits);

/// Grouped tables over the non-passthrough bits, with p inferred from the
/// size list. Natural strategy assigns bits to tables in ascending order;
/// exhaustive/greedy take the assignment from the grouping optimizer.
ReductionPlan build_grouped_plan(const Modulus& modulus, int width,
                                 const GroupingSpec& grouping);

/// Plan from an explicit bit-to-table assignment. Groups are canonicalized
/// (indices ascending inside a group, tables ordered by lowest index) and
/// must partition [passthrough_bits, width) exactly.
ReductionPlan build_plan_from_groups(const Modulus& modulus, int width,
                                     int passthrough_bits,
                                     std::vector<BitGroup> groups);

/// Plan from prebuilt tables. Structure is validated (group cover, entry
/// counts, ascending bit order) and the derived fields are recomputed, but
/// entry values are taken verbatim without checking them against the
/// modulus: a plan with wrong entries assembles fine and is caught by
/// verification. Backs the JSON loader; prefer the build_* functions.
ReductionPlan assemble_plan(const Modulus& modulus, int width, int passthrough_bits,
                            std::vector<LutTable> tables);

/// Assignment of the bits in [p, width) to tables of the given sizes whose
/// summed per-table maxima are never worse than the natural-order
/// assignment (p inferred as in build_grouped_plan). Exhaustive search up
/// to 12 assignable bits, deterministic greedy pairwise-swap descent beyond
/// that.
std::vector<BitGroup> optimize_grouping(const Modulus& modulus, int width,
                                        const std::vector<int>& table_sizes);

std::vector<BitGroup> optimize_grouping_exhaustive(const Modulus& modulus, int width,
                                                   const std::vector<int>& table_sizes);

std::vector<BitGroup> optimize_grouping_greedy(const Modulus& modulus, int width,
                                               const std::vector<int>& table_sizes);

/// Largest value of (sum of 2^b over any subset of the group) mod q.
std::uint64_t max_table_entry(const BitGroup& group, std::uint64_t q);

/// value mod q with a fixed operation schedule: passthrough extraction, one
/// lookup per table, one adder-tree accumulation, parallel comparisons
/// against the precomputed multiples of q, and a single subtraction. The
/// operations executed depend on the plan only, never on the value.
/// Throws std::out_of_range for value >= 2^width.
std::uint64_t reduce(const ReductionPlan& plan, std::uint64_t value);

/// As reduce(), accumulating executed operation counts into counts.
std::uint64_t reduce(const ReductionPlan& plan, std::uint64_t value, OpCounts& counts);

/// The pre-final-stage sum: passthrough value plus all table outputs.
/// Congruent to value mod q and bounded by plan.max_intermediate.
std::uint64_t intermediate_sum(const ReductionPlan& plan, std::uint64_t value);

struct ReduceTrace {
    std::uint64_t intermediate;  // sum before the final stage
    std::uint64_t index;         // multiple of q subtracted
    std::uint64_t residue;
};

ReduceTrace reduce_trace(const ReductionPlan& plan, std::uint64_t value);

}  // namespace modred
