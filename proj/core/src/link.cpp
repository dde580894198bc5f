#include "ddlink/link.hpp"

#include "ddlink/ldpc.hpp"
#include "ddlink/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddlink::link {

std::string MCS::label() const {
    std::ostringstream os;
    os << modulation_name(mod) << "_" << rate_num << "/" << rate_den;
    return os.str();
}

const std::vector<MCS>& mcs_table() {
    static const std::vector<MCS> table = {
        {0, Modulation::kQPSK, 1, 3},  {1, Modulation::kQPSK, 1, 2},  {2, Modulation::kQPSK, 2, 3},
        {3, Modulation::kQAM16, 1, 2}, {4, Modulation::kQAM16, 2, 3}, {5, Modulation::kQAM16, 3, 4},
        {6, Modulation::kQAM64, 2, 3}, {7, Modulation::kQAM64, 3, 4}, {8, Modulation::kQAM64, 5, 6},
    };
    return table;
}

const MCS& mcs_by_id(int id) {
    for (const MCS& m : mcs_table())
        if (m.id == id) return m;
    throw ConfigError("unknown MCS id " + std::to_string(id));
}

const MCS& mcs_by_label(const std::string& label) {
    for (const MCS& m : mcs_table())
        if (m.label() == label) return m;
    throw ConfigError("unknown MCS label " + label);
}

std::string OtfsLink::label() const {
    std::ostringstream os;
    os << "nu_p=" << nu_p << ";pdr_db=" << pdr_db << ";layout=" << otfs::layout_name(variant)
       << ";mcs=" << mcs.label();
    return os.str();
}

std::string OfdmLink::label() const {
    std::ostringstream os;
    os << "delta_f=" << delta_f << ";dmrs=" << dmrs_density << ";boost_db=" << boost_db
       << ";mcs=" << mcs.label();
    return os.str();
}

std::pair<double, double> wilson_interval(int errors, int n) {
    if (n <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054; // 95%
    const double p = static_cast<double>(errors) / n;
    const double z2n = z * z / n;
    const double denom = 1.0 + z2n;
    const double center = (p + z2n / 2.0) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

DDGrid snap_grid(double bandwidth, double duration, double nu_p) {
    if (!(bandwidth > 0.0) || !(duration > 0.0) || !(nu_p > 0.0))
        throw ConfigError("snap_grid: bandwidth, duration and nu_p must be positive");
    const double bt_real = bandwidth * duration;
    const long bt = std::lround(bt_real);
    if (bt < 1 || std::abs(bt_real - bt) > 1e-6)
        throw ConfigError("snap_grid: bandwidth * duration must be an integer symbol count");
    const double m_target = bandwidth / nu_p;
    long best_m = 0;
    for (long m = 1; m <= bt; ++m) {
        if (bt % m != 0) continue;
        if (best_m == 0 || std::abs(m - m_target) < std::abs(best_m - m_target)) best_m = m;
    }
    const double tau_p = static_cast<double>(best_m) / bandwidth;
    return DDGrid::from_delay_period(static_cast<int>(best_m), static_cast<int>(bt / best_m), tau_p);
}

namespace {

struct BlerCounter {
    int frames_run = 0;
    int block_errors = 0;

    // Once the gate provably cannot pass, further frames cannot change the
    // selection outcome.
    bool hopeless(int n_frames, double gate) const {
        return static_cast<double>(block_errors) > gate * n_frames;
    }
};

void fill_result(LinkResult& res, const BlerCounter& c, long info_bits, double bt_total,
                 double bler_gate) {
    res.frames_run = c.frames_run;
    res.block_errors = c.block_errors;
    res.bler = c.frames_run > 0 ? static_cast<double>(c.block_errors) / c.frames_run : 1.0;
    std::tie(res.bler_lo, res.bler_hi) = wilson_interval(c.block_errors, c.frames_run);
    res.info_bits = info_bits;
    res.gate_passed = res.bler < bler_gate;
    res.effective_se = res.gate_passed ? static_cast<double>(info_bits) / bt_total : 0.0;
}

std::vector<uint8_t> random_bits(int count, uint64_t seed) {
    Rng rng(seed);
    std::vector<uint8_t> bits(static_cast<size_t>(count));
    for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.bit());
    return bits;
}

constexpr uint64_t kPathStream = 1, kNoiseStream = 2, kBitStream = 3;

} // namespace

LinkResult run_link(const OtfsLink& cfg, const ChannelSpec& channel, int n_frames, uint64_t seed,
                    double bler_gate, bool early_stop) {
    if (n_frames < 1) throw std::invalid_argument("run_link: n_frames must be >= 1");

    const DDGrid grid = snap_grid(cfg.bandwidth, cfg.duration, cfg.nu_p);
    const int mn = grid.size();
    const double bw = grid.bandwidth();

    if (!otfs::crystallization_check(channel.tau_max, channel.nu_max, grid))
        throw ConfigError("otfs link: crystallization violated for nu_p=" + std::to_string(grid.nu_p));
    const int doppler_taps = static_cast<int>(std::ceil(grid.duration() * channel.nu_max - 1e-9));
    const int l_bound = grid.N / 2 - 1;
    if (doppler_taps > l_bound)
        throw ConfigError("otfs link: Doppler support does not fit the estimation window");
    const int l_max = std::min(doppler_taps + 1, l_bound);

    otfs::OTFSConfig phy;
    phy.grid = grid;
    phy.layout = otfs::build_layout(grid, channel.tau_max, cfg.variant);
    phy.pdr_db = cfg.pdr_db;
    const int k_max = phy.layout.k_max;

    const int data_res = static_cast<int>(phy.layout.data_region.size());
    const int bps = bits_per_symbol(cfg.mcs.mod);
    const int n_coded = data_res * bps;
    const int k_total = static_cast<int>(std::lround(n_coded * cfg.mcs.rate()));
    const long info_bits = k_total - 16;
    if (info_bits < 8) throw ConfigError("otfs link: block too small for the payload");
    LdpcCode::cached(n_coded, k_total); // surface unsupported dimensions now

    // Validate the estimation window against the layout once.
    {
        DDFrame probe(grid);
        probe.at(phy.layout.pilot_k, phy.layout.pilot_l) = 1.0;
        otfs::estimate_channel(probe, phy.layout, 1.0, k_max, l_max);
    }

    const double noise_var =
        std::isinf(channel.snr_db) ? 0.0 : (1.0 / mn) / db_to_linear(channel.snr_db);
    const int prefix = channel.tau_max > 0.0
                           ? std::min(mn, static_cast<int>(std::ceil(channel.tau_max * bw)) + 8)
                           : 0;

    LinkResult res;
    res.config_descriptor = cfg.label();
    BlerCounter counter;
    const int gate_limit = static_cast<int>(std::floor(bler_gate * n_frames));

    for (int f = 0; f < n_frames; ++f) {
        const chan::PathSet paths = chan::veh_a_paths_scaled(
            channel.tau_max, channel.nu_max, derive_seed(seed, static_cast<uint64_t>(f), kPathStream),
            channel.doppler_model);
        const std::vector<uint8_t> info =
            random_bits(static_cast<int>(info_bits), derive_seed(seed, static_cast<uint64_t>(f), kBitStream));
        const std::vector<uint8_t> coded = encode_block(info, n_coded);
        const cvec symbols = qam_map(coded, cfg.mcs.mod);
        const otfs::TxFrame tx = otfs::modulate(phy, symbols);

        // The cyclic extension stands in for the tail of a continuing pulse
        // train; the receiver discards it, so it carries no rate cost.
        cvec air(tx.samples.end() - prefix, tx.samples.end());
        air.insert(air.end(), tx.samples.begin(), tx.samples.end());
        cvec rx_t = chan::apply_paths(air, bw, paths, channel.oversample);
        rx_t = chan::add_awgn(rx_t, {channel.snr_db, derive_seed(seed, static_cast<uint64_t>(f), kNoiseStream)},
                              1.0 / mn);

        const cvec rx_window(rx_t.begin() + prefix, rx_t.begin() + prefix + mn);
        const DDFrame rx_frame = forward_zak(rx_window, grid);

        const DDFilter h_est = otfs::estimate_channel(rx_frame, phy.layout, tx.pilot_amplitude, k_max, l_max);
        const otfs::EqualizeResult eq =
            otfs::lsmr_equalize(rx_frame, h_est, phy.layout, tx.pilot_amplitude, noise_var);

        cvec soft(eq.data.size());
        std::vector<double> sinr(eq.data.size());
        const double sym_power = tx.data_amplitude * tx.data_amplitude;
        const double eff_noise = std::max(eq.noise_var_eff, 1e-30);
        for (size_t i = 0; i < soft.size(); ++i) {
            soft[i] = eq.data[i] / tx.data_amplitude;
            sinr[i] = sym_power / eff_noise;
        }
        const std::vector<double> llrs = qam_demap(soft, sinr, cfg.mcs.mod);
        const BlockDecode dec = decode_block(llrs, k_total);

        ++counter.frames_run;
        if (dec.info != info) ++counter.block_errors;
        if (early_stop && counter.block_errors > gate_limit) break;
    }

    fill_result(res, counter, info_bits, bw * cfg.duration, bler_gate);
    return res;
}

LinkResult run_link(const OfdmLink& cfg, const ChannelSpec& channel, int n_frames, uint64_t seed,
                    double bler_gate, bool early_stop) {
    if (n_frames < 1) throw std::invalid_argument("run_link: n_frames must be >= 1");

    const ofdm::OFDMConfig phy = ofdm::make_config(cfg.bandwidth, cfg.delta_f, cfg.duration,
                                                   cfg.dmrs_density, cfg.boost_db, cfg.cp_ratio);
    const int data_res = phy.data_re_count();
    const int bps = bits_per_symbol(cfg.mcs.mod);
    const int n_coded = data_res * bps;
    const int k_total = static_cast<int>(std::lround(n_coded * cfg.mcs.rate()));
    const long info_bits = k_total - 16;
    if (info_bits < 8) throw ConfigError("ofdm link: block too small for the payload");
    LdpcCode::cached(n_coded, k_total);

    const int frame_len = phy.frame_samples();
    const double fs = phy.sample_rate();
    const double noise_var =
        std::isinf(channel.snr_db) ? 0.0 : (1.0 / frame_len) / db_to_linear(channel.snr_db);

    LinkResult res;
    res.config_descriptor = cfg.label();
    BlerCounter counter;
    const int gate_limit = static_cast<int>(std::floor(bler_gate * n_frames));

    for (int f = 0; f < n_frames; ++f) {
        const chan::PathSet paths = chan::veh_a_paths_scaled(
            channel.tau_max, channel.nu_max, derive_seed(seed, static_cast<uint64_t>(f), kPathStream),
            channel.doppler_model);
        const std::vector<uint8_t> info =
            random_bits(static_cast<int>(info_bits), derive_seed(seed, static_cast<uint64_t>(f), kBitStream));
        const std::vector<uint8_t> coded = encode_block(info, n_coded);
        const cvec symbols = qam_map(coded, cfg.mcs.mod);
        cvec tx = ofdm::modulate(phy, symbols);

        cvec rx_t = chan::apply_paths(tx, fs, paths, channel.oversample);
        rx_t = chan::add_awgn(rx_t, {channel.snr_db, derive_seed(seed, static_cast<uint64_t>(f), kNoiseStream)},
                              1.0 / frame_len);

        const ofdm::ResourceGrid grid = ofdm::demodulate(phy, rx_t);
        const ofdm::ResourceGrid h_hat = ofdm::estimate_grid_channel(grid, phy);
        ofdm::MmseOut eq = ofdm::mmse_equalize(grid, h_hat, phy, noise_var);

        // Undo the MMSE shrinkage before demapping: x_mmse = x/(1 + 1/sinr).
        for (size_t i = 0; i < eq.data.size(); ++i) {
            if (eq.sinr[i] < 1e-12) {
                eq.data[i] = cd(0.0, 0.0);
                eq.sinr[i] = 1e-12;
            } else {
                eq.data[i] *= 1.0 + 1.0 / eq.sinr[i];
            }
        }
        const std::vector<double> llrs = qam_demap(eq.data, eq.sinr, cfg.mcs.mod);
        const BlockDecode dec = decode_block(llrs, k_total);

        ++counter.frames_run;
        if (dec.info != info) ++counter.block_errors;
        if (early_stop && counter.block_errors > gate_limit) break;
    }

    fill_result(res, counter, info_bits, cfg.bandwidth * cfg.duration, bler_gate);
    return res;
}

} // namespace ddlink::link
