// SPDX-License-Identifier: Apache-2.0

#include "modred/plan.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

namespace modred {

namespace {

constexpr int kExhaustiveAutoLimit = 12;
constexpr int kExhaustiveHardLimit = 16;

struct OptimizeInput {
    int passthrough = 0;
    std::vector<int> bits;  // assignable input bit positions, ascending
};

OptimizeInput prepare(const Modulus& modulus, int width, const std::vector<int>& table_sizes) {
    OptimizeInput in;
    int total = 0;
    for (int k : table_sizes) {
        if (k < 1) {
            throw std::invalid_argument("table size must be at least 1");
        }
        total += k;
    }
    in.passthrough = infer_passthrough(modulus, width, total);
    for (int b = in.passthrough; b < width; ++b) {
        in.bits.push_back(b);
    }
    return in;
}

std::vector<BitGroup> natural_groups(const OptimizeInput& in, const std::vector<int>& sizes) {
    std::vector<BitGroup> groups;
    std::size_t next = 0;
    for (int k : sizes) {
        BitGroup g;
        for (int j = 0; j < k; ++j) {
            g.bit_indices.push_back(in.bits[next++]);
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

void canonicalize(std::vector<BitGroup>& groups) {
    for (BitGroup& g : groups) {
        std::sort(g.bit_indices.begin(), g.bit_indices.end());
    }
    std::sort(groups.begin(), groups.end(), [](const BitGroup& a, const BitGroup& b) {
        return a.bit_indices.front() < b.bit_indices.front();
    });
}

// Enumeration state for the exhaustive search. Groups of equal size are
// interchangeable, so for consecutive equal sizes only assignments with
// increasing lowest members are visited.
struct ExhaustiveSearch {
    const std::vector<int>* sizes = nullptr;
    int bit_count = 0;
    std::vector<std::uint64_t> subset_max;  // per bit mask over in.bits
    std::vector<unsigned> chosen;
    std::vector<unsigned> best;
    std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();

    void run(std::size_t group, unsigned remaining, std::uint64_t cost) {
        if (cost >= best_cost) {
            return;
        }
        if (group == sizes->size()) {
            best_cost = cost;
            best = chosen;
            return;
        }
        const int k = (*sizes)[group];
        unsigned floor_mask = 0;
        if (group > 0 && (*sizes)[group - 1] == k) {
            // skip members at or below the previous equal-size group's lowest bit
            floor_mask = (chosen[group - 1] & (~chosen[group - 1] + 1)) * 2 - 1;
        }
        std::vector<int> pool;
        for (int b = 0; b < bit_count; ++b) {
            if ((remaining >> b & 1u) != 0 && ((floor_mask >> b) & 1u) == 0) {
                pool.push_back(b);
            }
        }
        if (static_cast<int>(pool.size()) < k) {
            return;
        }
        std::vector<int> pick(static_cast<std::size_t>(k));
        choose(group, remaining, cost, pool, pick, 0, 0);
    }

    void choose(std::size_t group, unsigned remaining, std::uint64_t cost,
                const std::vector<int>& pool, std::vector<int>& pick, std::size_t depth,
                std::size_t from) {
        const std::size_t k = pick.size();
        if (depth == k) {
            unsigned mask = 0;
            for (int b : pick) {
                mask |= 1u << b;
            }
            chosen[group] = mask;
            run(group + 1, remaining & ~mask, cost + subset_max[mask]);
            return;
        }
        for (std::size_t i = from; i + (k - depth) <= pool.size(); ++i) {
            pick[depth] = pool[i];
            choose(group, remaining, cost, pool, pick, depth + 1, i + 1);
        }
    }
};

// subset_max[mask] = max over submasks s of mask of (weighted bit sum of s) mod q
std::vector<std::uint64_t> subset_maxima(const std::vector<int>& bits, std::uint64_t q) {
    const int n = static_cast<int>(bits.size());
    std::vector<std::uint64_t> value(std::size_t{1} << n, 0);
    for (std::size_t mask = 1; mask < value.size(); ++mask) {
        const int j = std::countr_zero(mask);
        value[mask] = add_mod(value[mask & (mask - 1)],
                              pow2_mod(static_cast<unsigned>(bits[j]), q), q);
    }
    for (int b = 0; b < n; ++b) {
        for (std::size_t mask = 0; mask < value.size(); ++mask) {
            if (mask >> b & 1u) {
                value[mask] = std::max(value[mask], value[mask ^ (std::size_t{1} << b)]);
            }
        }
    }
    return value;
}

}  // namespace

std::uint64_t max_table_entry(const BitGroup& group, std::uint64_t q) {
    const int k = static_cast<int>(group.bit_indices.size());
    if (k <= 14) {
        // Gray-code walk over all patterns, one modular add/sub per step.
        std::uint64_t current = 0;
        std::uint64_t best = 0;
        for (std::uint64_t i = 1; i < (std::uint64_t{1} << k); ++i) {
            const int j = std::countr_zero(i);
            const std::uint64_t r = pow2_mod(static_cast<unsigned>(group.bit_indices[j]), q);
            const std::uint64_t gray = i ^ (i >> 1);
            if (gray >> j & 1u) {
                current = add_mod(current, r, q);
            } else {
                current = current >= r ? current - r : current + q - r;
            }
            best = std::max(best, current);
        }
        return best;
    }
    // Meet in the middle: the maximum of (a + b) mod q over residues a, b of
    // the two halves is either the largest a + b below q or the overall
    // largest a + b minus q.
    const int half = k / 2;
    std::vector<std::uint64_t> lo{0}, hi{0};
    for (int j = 0; j < k; ++j) {
        auto& side = j < half ? lo : hi;
        const std::uint64_t r = pow2_mod(static_cast<unsigned>(group.bit_indices[j]), q);
        const std::size_t count = side.size();
        for (std::size_t i = 0; i < count; ++i) {
            side.push_back(add_mod(side[i], r, q));
        }
    }
    std::sort(hi.begin(), hi.end());
    const std::uint64_t hi_max = hi.back();
    std::uint64_t best = 0;
    for (std::uint64_t a : lo) {
        auto it = std::upper_bound(hi.begin(), hi.end(), q - 1 - a);
        if (it != hi.begin()) {
            best = std::max(best, a + *std::prev(it));
        }
        if (a + hi_max >= q) {
            best = std::max(best, a + hi_max - q);
        }
    }
    return best;
}

std::vector<BitGroup> optimize_grouping_exhaustive(const Modulus& modulus, int width,
                                                   const std::vector<int>& table_sizes) {
    const OptimizeInput in = prepare(modulus, width, table_sizes);
    const int n = static_cast<int>(in.bits.size());
    if (n > kExhaustiveHardLimit) {
        throw std::invalid_argument("exhaustive grouping search limited to " +
                                    std::to_string(kExhaustiveHardLimit) + " bits");
    }
    if (n == 0) {
        return {};
    }
    ExhaustiveSearch search;
    search.sizes = &table_sizes;
    search.bit_count = n;
    search.subset_max = subset_maxima(in.bits, modulus.q);
    search.chosen.assign(table_sizes.size(), 0);
    search.run(0, (1u << n) - 1, 0);

    std::vector<BitGroup> groups;
    for (unsigned mask : search.best) {
        BitGroup g;
        for (int b = 0; b < n; ++b) {
            if (mask >> b & 1u) {
                g.bit_indices.push_back(in.bits[static_cast<std::size_t>(b)]);
            }
        }
        groups.push_back(std::move(g));
    }
    canonicalize(groups);
    return groups;
}

std::vector<BitGroup> optimize_grouping_greedy(const Modulus& modulus, int width,
                                               const std::vector<int>& table_sizes) {
    const OptimizeInput in = prepare(modulus, width, table_sizes);
    std::vector<BitGroup> groups = natural_groups(in, table_sizes);
    if (groups.size() < 2) {
        canonicalize(groups);
        return groups;
    }
    const std::uint64_t q = modulus.q;
    std::vector<std::uint64_t> cost(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        cost[g] = max_table_entry(groups[g], q);
    }
    const std::uint64_t bit_count = static_cast<std::uint64_t>(in.bits.size());
    const std::uint64_t swap_cap = 10 * bit_count * bit_count;
    std::uint64_t swaps = 0;
    bool improved = true;
    while (improved && swaps < swap_cap) {
        improved = false;
        for (std::size_t g1 = 0; g1 < groups.size() && !improved; ++g1) {
            for (std::size_t g2 = g1 + 1; g2 < groups.size() && !improved; ++g2) {
                for (std::size_t i = 0; i < groups[g1].bit_indices.size() && !improved; ++i) {
                    for (std::size_t j = 0; j < groups[g2].bit_indices.size() && !improved; ++j) {
                        std::swap(groups[g1].bit_indices[i], groups[g2].bit_indices[j]);
                        const std::uint64_t c1 = max_table_entry(groups[g1], q);
                        const std::uint64_t c2 = max_table_entry(groups[g2], q);
                        if (c1 + c2 < cost[g1] + cost[g2]) {
                            cost[g1] = c1;
                            cost[g2] = c2;
                            improved = true;
                            ++swaps;
                        } else {
                            std::swap(groups[g1].bit_indices[i], groups[g2].bit_indices[j]);
                        }
                    }
                }
            }
        }
    }
    canonicalize(groups);
    return groups;
}

std::vector<BitGroup> optimize_grouping(const Modulus& modulus, int width,
                                        const std::vector<int>& table_sizes) {
    const OptimizeInput in = prepare(modulus, width, table_sizes);
    if (static_cast<int>(in.bits.size()) <= kExhaustiveAutoLimit) {
        return optimize_grouping_exhaustive(modulus, width, table_sizes);
    }
    return optimize_grouping_greedy(modulus, width, table_sizes);
}

}  // namespace modred
