#pragma once

#include "ddlink/common.hpp"

#include <cstdint>

namespace ddlink::ofdm {

/// CP overhead fraction t_cp / (t_cp + 1/delta_f).
double cp_overhead(double delta_f, double t_cp);

/// Pilot+guard strip overhead of a point-pilot DD frame: 2*width/period.
/// Arguments are unit-agnostic (seconds/seconds or Hz/Hz).
/// Throws ConfigError when width >= period.
double zak_strip_overhead(double strip_width, double period);

/// Demodulation reference signal placement: pilot symbols in time, a comb
/// in frequency inside each pilot symbol. Non-comb subcarriers of a pilot
/// symbol carry data.
struct DMRSPattern {
    std::vector<int> time_positions;
    int freq_comb = 2;
    int freq_offset = 0;

    bool is_pilot_symbol(int s) const;
};

struct OFDMConfig {
    double delta_f = 15e3; // subcarrier spacing, Hz
    int n_sub = 0;         // subcarriers (bandwidth / delta_f)
    int cp_samples = 0;    // cyclic prefix length at the critical rate
    int n_symbols = 0;     // symbols fitting the allocated duration
    DMRSPattern dmrs;
    double boost_db = 0.0; // pilot power boost relative to a data RE

    double sample_rate() const { return delta_f * n_sub; }
    double t_cp() const { return cp_samples / sample_rate(); }
    double t_prb() const { return t_cp() + 1.0 / delta_f; }
    int symbol_samples() const { return n_sub + cp_samples; }
    int frame_samples() const { return n_symbols * symbol_samples(); }

    bool is_pilot_re(int m, int s) const;
    int data_re_count() const;
};

/**
 * Builds a numerology for the given allocation. The CP duration defaults to
 * the normal-CP ratio (144/2048 of the useful symbol, halving as delta_f
 * doubles) and is quantized to the critical sample grid; n_symbols is the
 * number of whole symbols fitting `duration`. DMRS has `dmrs_density` pilot
 * symbols: the first at index 2, the rest spread to the frame end, comb-2.
 * Throws ConfigError for non-integer bandwidth/delta_f ratios or frames
 * too short for the pilot pattern.
 */
OFDMConfig make_config(double bandwidth, double delta_f, double duration, int dmrs_density,
                       double boost_db, double cp_ratio = 144.0 / 2048.0);

/// n_sub x n_symbols complex resource grid, subcarrier-major per symbol.
struct ResourceGrid {
    int n_sub = 0;
    int n_symbols = 0;
    cvec re;

    ResourceGrid() = default;
    ResourceGrid(int n_sub_, int n_symbols_)
        : n_sub(n_sub_), n_symbols(n_symbols_), re(static_cast<size_t>(n_sub_) * n_symbols_, cd(0, 0)) {}

    cd& at(int m, int s) { return re[static_cast<size_t>(s) * n_sub + m]; }
    const cd& at(int m, int s) const { return re[static_cast<size_t>(s) * n_sub + m]; }
};

/// Deterministic unit-power QPSK reference value for pilot RE (m, s);
/// known to transmitter and receiver.
cd dmrs_symbol(int m, int s);

/**
 * Maps boosted pilots and unit-average-power data symbols onto the grid
 * (data order: symbol-major, ascending subcarrier, skipping pilot REs),
 * applies the unitary inverse DFT per symbol, prepends the cyclic prefix,
 * and normalizes the concatenated frame to unit total power.
 */
cvec modulate(const OFDMConfig& cfg, const cvec& data_symbols);

/// CP removal and per-symbol unitary DFT.
/// Throws std::invalid_argument when rx length mismatches the frame.
ResourceGrid demodulate(const OFDMConfig& cfg, const cvec& rx);

/**
 * LS estimates at pilot REs followed by linear interpolation (with linear
 * edge extrapolation) across frequency inside each pilot symbol, then
 * linear interpolation across time between pilot symbols (constant beyond
 * the outermost pilots). Throws ConfigError when the pattern has no pilots.
 */
ResourceGrid estimate_grid_channel(const ResourceGrid& grid, const OFDMConfig& cfg);

struct MmseOut {
    cvec data;                // conj(H)*Y / (|H|^2 + noise_var) at data REs
    std::vector<double> sinr; // per-RE |H|^2 / noise_var
};

/// Per-subcarrier (per-RE) MMSE equalization; data REs only, modulate() order.
MmseOut mmse_equalize(const ResourceGrid& grid, const ResourceGrid& h_hat, const OFDMConfig& cfg,
                      double noise_var);

} // namespace ddlink::ofdm
