#pragma once

#include "ddlink/common.hpp"

#include <cstdint>

namespace ddlink::link {

/// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF) over a bit sequence,
/// returned as 16 bits MSB first.
std::vector<uint8_t> crc16_bits(const std::vector<uint8_t>& bits);

/**
 * Systematic irregular repeat-accumulate LDPC code.
 *
 * Parity-check matrix H = [H1 | H2]: H1 is a pseudo-random column-weight-3
 * block over the k systematic bits (built deterministically from (n, k));
 * H2 is the dual-diagonal accumulator, which makes encoding a single
 * back-substitution pass. Decoding is flooding normalized min-sum.
 *
 * This is a generic code family parameterized directly by (n, k); it is not
 * a standards-compliant chain, so absolute waterfall positions are specific
 * to this construction.
 */
class LdpcCode {
public:
    /// k counts systematic bits including any CRC. Throws ConfigError for
    /// dimensions the construction cannot support.
    LdpcCode(int n, int k);

    int n() const { return n_; }
    int k() const { return k_; }

    /// info.size() must equal k.
    std::vector<uint8_t> encode(const std::vector<uint8_t>& info) const;

    struct DecodeResult {
        std::vector<uint8_t> bits; // length k (systematic part)
        bool parity_ok = false;
        int iterations = 0;
    };

    /// llrs: length n, positive favors bit 0.
    DecodeResult decode(const std::vector<double>& llrs, int max_iter = 50) const;

    /// True when the hard bits satisfy every check.
    bool syndrome_ok(const std::vector<uint8_t>& codeword) const;

    /// Process-wide cache; codes are deterministic functions of (n, k).
    static const LdpcCode& cached(int n, int k);

private:
    int n_ = 0;
    int k_ = 0;
    int m_ = 0;
    // H1 in compressed row form: variable indices (< k) per check row.
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
};

/// Appends CRC-16 to `info` and encodes to `n_coded` bits.
std::vector<uint8_t> encode_block(const std::vector<uint8_t>& info, int n_coded);

struct BlockDecode {
    std::vector<uint8_t> info; // payload without CRC
    bool crc_ok = false;
    int iterations = 0;
};

/// Decodes an n=llrs.size() block with k_total systematic bits (payload +
/// 16-bit CRC) and verifies the CRC.
BlockDecode decode_block(const std::vector<double>& llrs, int k_total, int max_iter = 50);

} // namespace ddlink::link
