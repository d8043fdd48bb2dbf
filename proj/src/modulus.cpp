// SPDX-License-Identifier: Apache-2.0

#include "modred/modulus.hpp"

#include <bit>
#include <stdexcept>

namespace modred {

namespace {
constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 31;
}

Modulus::Modulus(std::uint64_t modulus) : q(modulus) {
    if (q < 2) {
        throw std::invalid_argument("modulus must be at least 2");
    }
    if (q > kMaxModulus) {
        throw std::invalid_argument("modulus must not exceed 2^31");
    }
    n = static_cast<int>(std::bit_width(q - 1));
}

bool Modulus::is_power_of_two() const {
    return std::has_single_bit(q);
}

std::uint64_t conditional_subtract(std::uint64_t value, std::uint64_t q) {
    if (value >= 2 * q) {
        throw std::out_of_range("conditional_subtract: value not in [0, 2q)");
    }
    const std::uint64_t diff = value - q;  // wraps when value < q
    const std::uint64_t keep = -static_cast<std::uint64_t>(value < q);
    return (value & keep) | (diff & ~keep);
}

std::uint64_t pow2_mod(unsigned exponent, std::uint64_t q) {
    if (q < 2) {
        throw std::invalid_argument("pow2_mod: modulus must be at least 2");
    }
    std::uint64_t r = 1 % q;
    for (unsigned i = 0; i < exponent; ++i) {
        r = conditional_subtract(2 * r, q);
    }
    return r;
}

std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return conditional_subtract(a + b, q);
}

}  // namespace modred
