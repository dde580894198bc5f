#pragma once

#include "ddlink/channel.hpp"
#include "ddlink/ofdm.hpp"
#include "ddlink/otfs.hpp"
#include "ddlink/qam.hpp"

#include <cstdint>
#include <string>

namespace ddlink::link {

/// Modulation-and-coding scheme: Gray QAM plus a rational code rate.
struct MCS {
    int id = 0;
    Modulation mod = Modulation::kQPSK;
    int rate_num = 1;
    int rate_den = 2;

    double rate() const { return static_cast<double>(rate_num) / rate_den; }
    double se() const { return bits_per_symbol(mod) * rate(); } // coded bits/s/Hz ceiling
    std::string label() const;
};

/// Nine-entry ladder spanning QPSK 1/3 to 64QAM 5/6.
const std::vector<MCS>& mcs_table();
const MCS& mcs_by_id(int id);
const MCS& mcs_by_label(const std::string& label);

/// Channel scenario for one sweep cell.
struct ChannelSpec {
    double tau_max = 0.0; // delay spread, seconds
    double nu_max = 0.0;  // Doppler spread (max |shift|), Hz
    double snr_db = 12.0; // total transmit power to noise ratio
    chan::DopplerModel doppler_model = chan::DopplerModel::kJakes;
    int oversample = 4;
};

/// One Zak-OTFS candidate configuration.
struct OtfsLink {
    double bandwidth = 672e3;
    double duration = 1e-3;
    double nu_p = 8e3; // requested Doppler period (snapped to an integer grid)
    otfs::LayoutVariant variant = otfs::LayoutVariant::kNarrow;
    double pdr_db = 0.0;
    MCS mcs;

    std::string label() const;
};

/// One CP-OFDM candidate configuration.
struct OfdmLink {
    double bandwidth = 720e3;
    double duration = 1e-3;
    double delta_f = 15e3;
    int dmrs_density = 1;
    double boost_db = 0.0;
    MCS mcs;
    double cp_ratio = 144.0 / 2048.0; // normal CP: t_cp = cp_ratio / delta_f

    std::string label() const;
};

struct LinkResult {
    double bler = 1.0;
    double bler_lo = 0.0; // Wilson 95% interval
    double bler_hi = 1.0;
    long info_bits = 0;          // payload bits per frame (CRC excluded)
    double effective_se = 0.0;   // info_bits/(B*T) when the gate passes, else 0
    bool gate_passed = false;
    int frames_run = 0;
    int block_errors = 0;
    std::string config_descriptor;
};

/// Wilson 95% score interval for a binomial proportion.
std::pair<double, double> wilson_interval(int errors, int n);

/// Snaps a requested Doppler period onto the integer numerology: M divides
/// B*T and is closest to B/nu_p. Throws ConfigError when B*T is not an
/// integer.
DDGrid snap_grid(double bandwidth, double duration, double nu_p);

/**
 * Monte-Carlo link simulation: n_frames independent Veh-A realizations and
 * noise draws, one transport block per frame. The returned effective SE is
 * info_bits/(B*T_total) when the measured BLER is below bler_gate and 0
 * otherwise. Deterministic for a fixed seed. With early_stop the loop ends
 * as soon as the gate provably cannot pass (the gate decision and SE are
 * unchanged; only the reported BLER resolution drops).
 * Throws ConfigError for infeasible configurations.
 */
LinkResult run_link(const OtfsLink& cfg, const ChannelSpec& channel, int n_frames, uint64_t seed,
                    double bler_gate = 0.1, bool early_stop = false);
LinkResult run_link(const OfdmLink& cfg, const ChannelSpec& channel, int n_frames, uint64_t seed,
                    double bler_gate = 0.1, bool early_stop = false);

} // namespace ddlink::link
