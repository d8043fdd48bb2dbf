// SPDX-License-Identifier: Apache-2.0

#include "modred/barrett.hpp"

#include <algorithm>
#include <stdexcept>

namespace modred {

BarrettConstants barrett_constants(const Modulus& modulus) {
    BarrettConstants c;
    c.q = modulus.q;
    c.shift = 2 * static_cast<unsigned>(modulus.n);
    c.multiplier = static_cast<std::uint64_t>((uint128{1} << c.shift) / c.q);
    // Quotient error check: floor(c*m >> k) in {t-1, t} with t = floor(c/q).
    // For n <= 8 every input below q^2 is tried; otherwise the worst-case
    // residual bound q * (2^k mod q) <= 2^k implies the same.
    if (modulus.n <= 8) {
        const std::uint64_t limit = c.q * c.q;
        for (std::uint64_t v = 0; v < limit; ++v) {
            const std::uint64_t t = v / c.q;
            const std::uint64_t approx =
                static_cast<std::uint64_t>((uint128{v} * c.multiplier) >> c.shift);
            if (approx != t && approx + 1 != t) {
                throw std::logic_error("barrett constant verification failed");
            }
        }
    } else {
        const uint128 pow = uint128{1} << c.shift;
        const uint128 residual = pow - uint128{c.multiplier} * c.q;  // 2^k mod q
        if (uint128{c.q} * residual > pow) {
            throw std::logic_error("barrett constant verification failed");
        }
    }
    return c;
}

std::uint64_t barrett_reduce(const BarrettConstants& constants, std::uint64_t value) {
    const std::uint64_t q = constants.q;
    if (value >= q * q) {
        throw std::out_of_range("barrett input must be below q^2");
    }
    const std::uint64_t approx =
        static_cast<std::uint64_t>((uint128{value} * constants.multiplier) >> constants.shift);
    const std::uint64_t r = value - approx * q;
    return conditional_subtract(r, q);
}

ShiftAddPlan shift_add_plan(std::uint64_t constant, bool signed_digits) {
    ShiftAddPlan plan;
    plan.constant = constant;
    if (!signed_digits) {
        for (unsigned b = 0; b < 64; ++b) {
            if (constant >> b & 1u) {
                plan.terms.push_back({b, 1});
            }
        }
    } else {
        // Canonical signed-digit recoding: while x is odd emit digit
        // 2 - (x mod 4), i.e. +1 below a 0 bit and -1 below a 1 bit.
        std::uint64_t x = constant;
        unsigned b = 0;
        while (x != 0) {
            if (x & 1u) {
                const int digit = 2 - static_cast<int>(x & 3u);
                plan.terms.push_back({b, digit});
                x -= static_cast<std::uint64_t>(static_cast<std::int64_t>(digit));
            }
            x >>= 1;
            ++b;
        }
    }
    // Descending shift; terms were gathered from the low end.
    std::reverse(plan.terms.begin(), plan.terms.end());
    return plan;
}

uint128 shift_add_multiply(const ShiftAddPlan& plan, std::uint64_t value) {
    __int128 acc = 0;
    for (const ShiftAddTerm& term : plan.terms) {
        const __int128 shifted = static_cast<__int128>(uint128{value} << term.shift);
        acc += term.sign > 0 ? shifted : -shifted;
    }
    return static_cast<uint128>(acc);
}

ShiftAddBarrett ShiftAddBarrett::create(const Modulus& modulus, bool signed_digits) {
    ShiftAddBarrett b;
    b.constants = barrett_constants(modulus);
    b.multiplier_plan = shift_add_plan(b.constants.multiplier, signed_digits);
    b.modulus_plan = shift_add_plan(modulus.q, signed_digits);
    return b;
}

std::uint64_t barrett_reduce_shift_add(const ShiftAddBarrett& barrett, std::uint64_t value) {
    const std::uint64_t q = barrett.constants.q;
    if (value >= q * q) {
        throw std::out_of_range("barrett input must be below q^2");
    }
    const uint128 product = shift_add_multiply(barrett.multiplier_plan, value);
    const std::uint64_t approx = static_cast<std::uint64_t>(product >> barrett.constants.shift);
    const std::uint64_t back =
        static_cast<std::uint64_t>(shift_add_multiply(barrett.modulus_plan, approx));
    const std::uint64_t r = value - back;
    return conditional_subtract(r, q);
}

}  // namespace modred
