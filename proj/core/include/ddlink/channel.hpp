#pragma once

#include "ddlink/common.hpp"

#include <cstdint>
#include <limits>

namespace ddlink::chan {

/// One propagation path of a doubly-spread channel.
struct Path {
    cd gain{0.0, 0.0};
    double delay = 0.0;   // seconds, >= 0
    double doppler = 0.0; // Hz
};

/// Sparse physical channel. Gains are normalized so sum |gain|^2 == 1.
struct PathSet {
    std::vector<Path> paths;

    double tau_max() const;
    double nu_max() const;

    /// Scales gains so total path power is 1. No-op on an empty set.
    void normalize_power();
};

/// How per-path Doppler shifts are drawn from the channel Doppler spread.
enum class DopplerModel {
    kJakes,    // nu_i = nu_max * cos(theta_i), theta_i uniform
    kWorstCase // nu_i = nu_max for every path
};

struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity(); // +inf disables noise
    uint64_t seed = 0;
};

/**
 * ITU-R Vehicular-A profile realization: six taps at delays
 * {0, 0.31, 0.71, 1.09, 1.73, 2.51} us with powers {0,-1,-9,-10,-15,-20} dB,
 * i.i.d. uniform phases, and Doppler shifts per the chosen model.
 * Deterministic for a fixed seed.
 */
PathSet veh_a_paths(double nu_max, uint64_t rng_seed, DopplerModel model = DopplerModel::kJakes);

/// Veh-A with the delay list linearly rescaled so its maximum equals
/// tau_max. tau_max == 0 collapses the profile to a single unit-power path.
PathSet veh_a_paths_scaled(double tau_max, double nu_max, uint64_t rng_seed,
                           DopplerModel model = DopplerModel::kJakes);

/// Largest delay of the standard (unscaled) Veh-A profile, seconds.
double veh_a_tau_max();

/**
 * Applies a doubly-spread channel in the time domain:
 *   y[n] = sum_i gain_i * s((n - d_i)/fs) * exp(j2*pi*nu_i*(n/fs - delay_i))
 * Fractional delays are realized by band-limited FFT interpolation at the
 * given oversampling factor (delays quantize to 1/(oversample*fs)).
 * Output has the input length; the shifted-out tail is truncated and
 * samples before a path's delay are zero.
 */
cvec apply_paths(const cvec& s, double sample_rate, const PathSet& paths, int oversample = 4);

/// Adds circular complex AWGN with per-sample variance
/// signal_power_ref / 10^(snr_db/10). Infinite snr_db returns the input.
cvec add_awgn(const cvec& s, const NoiseSpec& noise, double signal_power_ref);

} // namespace ddlink::chan
