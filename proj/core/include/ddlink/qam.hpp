#pragma once

#include "ddlink/common.hpp"

#include <cstdint>

namespace ddlink::link {

enum class Modulation { kQPSK, kQAM16, kQAM64 };

int bits_per_symbol(Modulation mod);
const char* modulation_name(Modulation mod);

/**
 * Gray-mapped square QAM with unit average power (5G NR bit-to-level
 * convention: the first bit of each axis pair is the sign bit, so QPSK
 * bits 00 map to (1+j)/sqrt(2)).
 * bits.size() must be a multiple of bits_per_symbol(mod).
 */
cvec qam_map(const std::vector<uint8_t>& bits, Modulation mod);

/**
 * Max-log LLRs, positive for bit 0. `symbols` are soft estimates of
 * unit-average-power constellation points; `sinr` is the per-symbol
 * post-equalization signal-to-noise-plus-interference ratio (linear) that
 * scales the LLRs.
 */
std::vector<double> qam_demap(const cvec& symbols, const std::vector<double>& sinr, Modulation mod);

/// Hard decision helper: bits of the nearest constellation point.
std::vector<uint8_t> qam_hard_bits(const cvec& symbols, Modulation mod);

} // namespace ddlink::link
