// SPDX-License-Identifier: Apache-2.0
//
// Barrett reduction for a static modulus, in two variants: the general form
// with two wide multiplications, and a multiplier-free form where each
// constant multiplication is expanded into shifts and adds.

#pragma once

#include <cstdint>
#include <vector>

#include "modred/modulus.hpp"

namespace modred {

struct BarrettConstants {
    std::uint64_t q = 0;
    unsigned shift = 0;           // k, with 2^k >= q^2
    std::uint64_t multiplier = 0; // m = floor(2^k / q)
};

// Computes m and k = 2n and checks that floor((c * m) >> k) differs from
// floor(c / q) by at most one for every c < q^2, so a single conditional
// subtraction after the multiply-shift suffices.
BarrettConstants barrett_constants(const Modulus& modulus);

// Reduces value < q^2. Throws std::out_of_range beyond that bound.
std::uint64_t barrett_reduce(const BarrettConstants& constants, std::uint64_t value);

// One addend of a shift-add expansion: sign * (x << shift).
struct ShiftAddTerm {
    unsigned shift = 0;
    int sign = 1;  // +1 or -1
};

struct ShiftAddPlan {
    std::uint64_t constant = 0;
    std::vector<ShiftAddTerm> terms;  // descending shift
};

// Expands constant * x into shift-add terms. With signed_digits the canonical
// signed-digit (NAF) form is used, which never has two adjacent nonzero
// digits; otherwise one positive term per set bit.
ShiftAddPlan shift_add_plan(std::uint64_t constant, bool signed_digits);

// Evaluates plan.constant * value through the term list.
uint128 shift_add_multiply(const ShiftAddPlan& plan, std::uint64_t value);

// Barrett reduction with both constant multiplications done by shift-add.
struct ShiftAddBarrett {
    BarrettConstants constants;
    ShiftAddPlan multiplier_plan;  // expands m
    ShiftAddPlan modulus_plan;     // expands q

    static ShiftAddBarrett create(const Modulus& modulus, bool signed_digits);
};

std::uint64_t barrett_reduce_shift_add(const ShiftAddBarrett& barrett, std::uint64_t value);

}  // namespace modred
