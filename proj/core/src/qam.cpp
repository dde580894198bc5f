#include "ddlink/qam.hpp"

#include <cmath>

namespace ddlink::link {

int bits_per_symbol(Modulation mod) {
    switch (mod) {
        case Modulation::kQPSK: return 2;
        case Modulation::kQAM16: return 4;
        case Modulation::kQAM64: return 6;
    }
    return 0;
}

const char* modulation_name(Modulation mod) {
    switch (mod) {
        case Modulation::kQPSK: return "qpsk";
        case Modulation::kQAM16: return "16qam";
        case Modulation::kQAM64: return "64qam";
    }
    return "?";
}

namespace {

// Per-axis amplitude level from the axis bit group (NR convention):
// 1 bit:  b0            -> (1-2b0)
// 2 bits: b0 b1         -> (1-2b0) * (2 - (1-2b1))
// 3 bits: b0 b1 b2      -> (1-2b0) * (4 - (1-2b1)*(2 - (1-2b2)))
double axis_level(const uint8_t* b, int nbits) {
    auto s = [](uint8_t bit) { return 1.0 - 2.0 * bit; };
    switch (nbits) {
        case 1: return s(b[0]);
        case 2: return s(b[0]) * (2.0 - s(b[1]));
        case 3: return s(b[0]) * (4.0 - s(b[1]) * (2.0 - s(b[2])));
        default: return 0.0;
    }
}

double axis_scale(Modulation mod) {
    switch (mod) {
        case Modulation::kQPSK: return 1.0 / std::sqrt(2.0);
        case Modulation::kQAM16: return 1.0 / std::sqrt(10.0);
        case Modulation::kQAM64: return 1.0 / std::sqrt(42.0);
    }
    return 1.0;
}

// Enumerates the 2^(bps/2) levels of one axis together with their bit
// patterns; index = bit pattern read MSB-first.
std::vector<double> axis_levels(Modulation mod) {
    const int nb = bits_per_symbol(mod) / 2;
    std::vector<double> levels(static_cast<size_t>(1) << nb);
    for (size_t pattern = 0; pattern < levels.size(); ++pattern) {
        uint8_t b[3] = {0, 0, 0};
        for (int i = 0; i < nb; ++i) b[i] = (pattern >> (nb - 1 - i)) & 1u;
        levels[pattern] = axis_level(b, nb) * axis_scale(mod);
    }
    return levels;
}

} // namespace

cvec qam_map(const std::vector<uint8_t>& bits, Modulation mod) {
    const int bps = bits_per_symbol(mod);
    if (bits.size() % static_cast<size_t>(bps) != 0)
        throw std::invalid_argument("qam_map: bit count not a multiple of bits per symbol");
    const int nb = bps / 2;
    const double scale = axis_scale(mod);
    cvec out(bits.size() / bps);
    for (size_t i = 0; i < out.size(); ++i) {
        const uint8_t* b = bits.data() + i * bps;
        // Bits alternate between I and Q: even positions drive I, odd Q.
        uint8_t bi[3], bq[3];
        for (int j = 0; j < nb; ++j) {
            bi[j] = b[2 * j];
            bq[j] = b[2 * j + 1];
        }
        out[i] = cd(axis_level(bi, nb) * scale, axis_level(bq, nb) * scale);
    }
    return out;
}

std::vector<double> qam_demap(const cvec& symbols, const std::vector<double>& sinr, Modulation mod) {
    if (symbols.size() != sinr.size())
        throw std::invalid_argument("qam_demap: sinr list must match symbol count");
    const int bps = bits_per_symbol(mod);
    const int nb = bps / 2;
    const std::vector<double> levels = axis_levels(mod);
    const size_t npat = levels.size();

    std::vector<double> llrs(symbols.size() * static_cast<size_t>(bps));
    for (size_t i = 0; i < symbols.size(); ++i) {
        const double axes[2] = {symbols[i].real(), symbols[i].imag()};
        for (int axis = 0; axis < 2; ++axis) {
            const double r = axes[axis];
            for (int j = 0; j < nb; ++j) {
                double best0 = 1e300, best1 = 1e300;
                for (size_t pattern = 0; pattern < npat; ++pattern) {
                    const double d = r - levels[pattern];
                    const double metric = d * d;
                    if ((pattern >> (nb - 1 - j)) & 1u)
                        best1 = std::min(best1, metric);
                    else
                        best0 = std::min(best0, metric);
                }
                // L = log P(0)/P(1); positive when a bit-0 point is closer.
                llrs[i * bps + static_cast<size_t>(2 * j + axis)] = (best1 - best0) * sinr[i];
            }
        }
    }
    return llrs;
}

std::vector<uint8_t> qam_hard_bits(const cvec& symbols, Modulation mod) {
    const int bps = bits_per_symbol(mod);
    const int nb = bps / 2;
    const std::vector<double> levels = axis_levels(mod);
    std::vector<uint8_t> bits(symbols.size() * static_cast<size_t>(bps));
    for (size_t i = 0; i < symbols.size(); ++i) {
        const double axes[2] = {symbols[i].real(), symbols[i].imag()};
        for (int axis = 0; axis < 2; ++axis) {
            size_t best = 0;
            double bestd = 1e300;
            for (size_t pattern = 0; pattern < levels.size(); ++pattern) {
                const double d = std::abs(axes[axis] - levels[pattern]);
                if (d < bestd) {
                    bestd = d;
                    best = pattern;
                }
            }
            for (int j = 0; j < nb; ++j)
                bits[i * bps + static_cast<size_t>(2 * j + axis)] = (best >> (nb - 1 - j)) & 1u;
        }
    }
    return bits;
}

} // namespace ddlink::link
