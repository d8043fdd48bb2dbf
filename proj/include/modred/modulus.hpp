// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace modred {

using uint128 = unsigned __int128;

/// Static modulus together with its derived bit width n = ceil(log2 q).
/// Residues mod q occupy n bits. For q an exact power of two (q = 2^m)
/// the width is n = m, so the reduction degenerates to masking.
struct Modulus {
    std::uint64_t q;
    int n;

    /// Throws std::invalid_argument unless 2 <= modulus <= 2^31.
    explicit Modulus(std::uint64_t modulus);

    bool is_power_of_two() const;
};

/// 2^exponent mod q, computed by iterated doubling with a conditional
/// subtraction per step. No intermediate ever exceeds 2q.
std::uint64_t pow2_mod(unsigned exponent, std::uint64_t q);

/// Reduces a value in [0, 2q) into [0, q) with a branch-free select.
/// Throws std::out_of_range for value >= 2q.
std::uint64_t conditional_subtract(std::uint64_t value, std::uint64_t q);

/// (a + b) mod q for operands already in [0, q).
std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q);

}  // namespace modred
