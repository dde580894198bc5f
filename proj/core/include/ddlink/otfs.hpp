#pragma once

#include "ddlink/dd.hpp"

#include <cstdint>

namespace ddlink::otfs {

/// Crystallization condition: the channel spreads fit strictly inside one
/// DD period cell, which makes the sampled I/O relation alias-free.
bool crystallization_check(double tau_max, double nu_max, const DDGrid& grid);

enum class LayoutVariant { kNarrow, kMedium, kWide };
const char* layout_name(LayoutVariant v);
LayoutVariant layout_from_name(const std::string& name);

/**
 * Pilot/guard/data partition of a frame (delay strips of full Doppler
 * height around a centered point pilot).
 *
 * The pilot sits at (M/2, N/2). The pilot region is a strip of
 * {1x, 2x, 4x} k_max columns starting at the pilot column (clamped to the
 * grid, at least one column), flanked by k_max-wide guard strips on both
 * sides; every remaining cell carries data. The three region index lists
 * partition the grid minus the pilot cell; data order is (k, l)
 * lexicographic and is the symbol order used on the air.
 */
struct FrameLayout {
    DDGrid grid;
    LayoutVariant variant = LayoutVariant::kNarrow;
    int k_max = 0;     // ceil(B * tau_max) used for the strip widths
    int pilot_k = 0;
    int pilot_l = 0;
    std::vector<std::pair<int, int>> pilot_region;
    std::vector<std::pair<int, int>> guard_region;
    std::vector<std::pair<int, int>> data_region;

    enum class Cell : uint8_t { kData, kPilot, kPilotRegion, kGuard };
    std::vector<Cell> cell_kind; // size M*N, index k*N + l
    Cell kind(int k, int l) const { return cell_kind[static_cast<size_t>(k) * grid.N + l]; }
};

/// Builds the Fig-style strip layout for a channel with delay spread
/// tau_max. Throws ConfigError when no data cells remain.
FrameLayout build_layout(const DDGrid& grid, double tau_max, LayoutVariant variant);

struct OTFSConfig {
    DDGrid grid;
    FrameLayout layout;
    double pdr_db = 0.0; // pilot-to-data power ratio
    double alpha_tau = 0.01;
    double alpha_nu = 0.01;
};

struct TxFrame {
    cvec samples;            // length M*N at sample rate B, unit total energy
    double pilot_amplitude;  // applied pilot amplitude (after normalization)
    double data_amplitude;   // per-symbol amplitude applied to unit-power data
};

/**
 * Places unit-average-power data symbols in the data region and the point
 * pilot with power 10^(pdr_db/10) times the per-data-symbol power, with the
 * total frame power fixed at 1 regardless of pdr_db. Applies the Gauss-sinc
 * transmit filter, then synthesizes the time-domain frame.
 * Throws std::invalid_argument when the symbol count does not match.
 */
TxFrame modulate(const OTFSConfig& cfg, const cvec& data_symbols);

/**
 * Point-pilot acquisition: reads the received pilot response on the window
 * k in [0, k_max], l in [-l_max, l_max] around the pilot position and
 * removes the twisted-convolution phase so that, for a noiseless channel
 * supported inside the window, the result equals the effective DD filter.
 * Requires l_max <= floor(N/2)-1 and the window to stay inside the
 * pilot+guard strips (ConfigError otherwise).
 */
DDFilter estimate_channel(const DDFrame& rx_frame, const FrameLayout& layout, double pilot_amplitude,
                          int k_max, int l_max);

struct EqualizeResult {
    cvec data;             // soft estimates, data_region order (tx amplitude scale)
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;   // ||y - H x|| after pilot cancellation
    double noise_var_eff = 0.0;   // residual power per output sample
};

/**
 * Matrix-free regularized least squares over the data symbols:
 * minimizes ||y' - H x||^2 + noise_var ||x||^2 where y' is the received
 * frame with the pilot contribution subtracted and H applies h_est by
 * twisted convolution. Solved by LSMR using only the operator/adjoint
 * pair; stops at max_iter or when the relative residual tests reach tol.
 */
EqualizeResult lsmr_equalize(const DDFrame& rx_frame, const DDFilter& h_est, const FrameLayout& layout,
                             double pilot_amplitude, double noise_var, int max_iter = 200,
                             double tol = 1e-10);

} // namespace ddlink::otfs
