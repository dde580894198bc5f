// Command-line harness for the delay-Doppler link toolkit: configuration
// sweeps over (tau_max, nu_max) grids, single-cell link runs, overhead
// tables and a quick self-test.

#include "ddlink/ldpc.hpp"
#include "ddlink/rng.hpp"
#include "ddlink/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace ddlink;

void print_link_result(const link::LinkResult& r, double gate) {
    std::cout << "config:        " << r.config_descriptor << "\n"
              << "frames:        " << r.frames_run << "\n"
              << "block_errors:  " << r.block_errors << "\n"
              << "bler:          " << r.bler << "  (wilson95 [" << r.bler_lo << ", " << r.bler_hi << "])\n"
              << "info_bits:     " << r.info_bits << "\n"
              << "gate:          " << (r.gate_passed ? "pass" : "fail") << " (bler < " << gate << ")\n"
              << "effective_se:  " << r.effective_se << " bits/s/Hz\n";
}

int cmd_overhead(double zak_strip, double period, double cp_tcp, double cp_delta_f) {
    if (zak_strip > 0.0 || period > 0.0) {
        if (!(zak_strip > 0.0) || !(period > 0.0))
            throw ConfigError("overhead: --zak-strip and --period must be given together");
        const double frac = ofdm::zak_strip_overhead(zak_strip, period);
        std::printf("zak strip overhead: %g%%\n", frac * 100.0);
        return 0;
    }
    if (cp_tcp >= 0.0 && cp_delta_f > 0.0) {
        const double frac = ofdm::cp_overhead(cp_delta_f, cp_tcp);
        std::printf("cp overhead: %g%%\n", frac * 100.0);
        return 0;
    }

    std::printf("CP overhead when the subcarrier spacing scales with Doppler spread\n");
    std::printf("(delta_f = 10 x spread, CP pinned to a 4.7 us delay spread):\n");
    std::printf("  %-22s %-16s %s\n", "doppler spread [kHz]", "delta_f [kHz]", "cp overhead");
    for (double nu_khz : {1.0, 2.0, 4.0}) {
        const double df = 10.0 * nu_khz * 1e3;
        std::printf("  %-22g %-16g %.4g%%\n", nu_khz, df / 1e3, ofdm::cp_overhead(df, 4.7e-6) * 100.0);
    }
    std::printf("\nCP overhead vs delay spread (CP = delay spread, delta_f = 15 kHz):\n");
    std::printf("  %-22s %s\n", "delay spread [us]", "cp overhead");
    for (double tau_us : {1.15, 2.35, 4.7}) {
        std::printf("  %-22g %.4g%%\n", tau_us, ofdm::cp_overhead(15e3, tau_us * 1e-6) * 100.0);
    }
    std::printf("\nPoint-pilot strip overhead (pilot + guard = 2 x strip/period):\n");
    std::printf("  %-34s %s\n", "strip / period", "overhead");
    std::printf("  %-34s %.4g%%\n", "2.5 us / 200 us", ofdm::zak_strip_overhead(2.5e-6, 200e-6) * 100.0);
    std::printf("  %-34s %.4g%%\n", "1 kHz / 160 kHz", ofdm::zak_strip_overhead(1e3, 160e3) * 100.0);
    return 0;
}

bool report(const char* name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    return ok;
}

int cmd_selftest() {
    bool all = true;
    Rng rng(7);

    { // Zak round trip + unitarity
        const DDGrid g = DDGrid::from_delay_period(8, 4, 8.0 / 64e3);
        DDFrame x(g);
        for (cd& v : x.symbols()) v = rng.cgauss();
        const cvec s = inverse_zak(x);
        const DDFrame back = forward_zak(s, g);
        double err = 0.0;
        for (size_t i = 0; i < x.symbols().size(); ++i) err += std::abs(x.symbols()[i] - back.symbols()[i]);
        all &= report("zak round trip", err < 1e-12 && std::abs(energy(s) - x.energy()) < 1e-12);
    }
    { // twisted convolution vs time-domain path application (periodic frame)
        const DDGrid g = DDGrid::from_delay_period(8, 4, 8.0 / 64e3);
        DDFrame x(g);
        for (cd& v : x.symbols()) v = rng.cgauss();
        DDFilter h;
        h.grid = g;
        chan::PathSet ps;
        const int taps[][2] = {{0, 0}, {2, 1}, {3, -1}};
        for (auto& t : taps) {
            const cd gain = rng.cgauss();
            h.add_tap(t[0], t[1], gain);
            ps.paths.push_back({gain, t[0] / g.bandwidth(), t[1] / g.duration()});
        }
        h.sort_taps();
        const cvec s = inverse_zak(x);
        cvec two = s;
        two.insert(two.end(), s.begin(), s.end());
        const cvec y_t = chan::apply_paths(two, g.bandwidth(), ps, 4);
        const cvec window(y_t.begin() + g.size(), y_t.end());
        const DDFrame want = forward_zak(window, g);
        const DDFrame got = twisted_convolve(h, x);
        double err = 0.0;
        for (size_t i = 0; i < want.symbols().size(); ++i) err = std::max(err, std::abs(want.symbols()[i] - got.symbols()[i]));
        all &= report("twisted convolution vs time domain", err < 1e-9);
    }
    { // overhead arithmetic
        all &= report("overhead arithmetic",
                      ofdm::zak_strip_overhead(2.5e-6, 200e-6) == 0.025 &&
                          ofdm::zak_strip_overhead(1e3, 160e3) == 0.0125);
    }
    { // QAM + LDPC loopback
        std::vector<uint8_t> info(304);
        for (auto& b : info) b = static_cast<uint8_t>(rng.bit());
        const auto coded = link::encode_block(info, 960);
        std::vector<double> llrs(coded.size());
        for (size_t i = 0; i < coded.size(); ++i) llrs[i] = coded[i] ? -20.0 : 20.0;
        const auto dec = link::decode_block(llrs, 320);
        all &= report("ldpc loopback", dec.crc_ok && dec.info == info);
    }
    { // point-pilot estimation of the identity channel
        const DDGrid g = DDGrid::from_delay_period(16, 8, 16.0 / 128e3);
        const auto layout = otfs::build_layout(g, 2.0 / g.bandwidth(), otfs::LayoutVariant::kNarrow);
        DDFrame frame(g);
        frame.at(layout.pilot_k, layout.pilot_l) = 0.5;
        const DDFilter h = otfs::estimate_channel(frame, layout, 0.5, 2, 2);
        double err = 0.0;
        for (const auto& t : h.taps) err += std::abs(t.gain - ((t.k == 0 && t.l == 0) ? cd(1, 0) : cd(0, 0)));
        all &= report("point-pilot estimation (identity)", err < 1e-10);
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay-Doppler vs CP-OFDM link-level simulation toolkit"};
    app.require_subcommand(1);

    uint64_t seed = 1;
    int frames = 0; // 0 = keep spec default
    int threads = 0;
    double bler_gate = 0.1;
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--frames", frames, "Monte-Carlo frames per candidate");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--bler-gate", bler_gate, "reliability gate on BLER");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run the (tau_max, nu_max) grid search and write CSV");
    std::string config_path, out_path;
    bool paper_scale = false;
    sweep_cmd->add_option("config", config_path, "sweep config file (key = value lines)");
    sweep_cmd->add_option("--out", out_path, "output CSV path (default: stdout)");
    sweep_cmd->add_flag("--paper-scale", paper_scale, "start from the full-scale defaults");

    // single-cell runs
    auto* otfs_cmd = app.add_subcommand("run-otfs", "run one Zak-OTFS link configuration");
    auto* ofdm_cmd = app.add_subcommand("run-ofdm", "run one CP-OFDM link configuration");
    double tau_max = 0.0, nu_max = 0.0, snr_db = 12.0;
    double bw_otfs = 672e3, bw_ofdm = 720e3, duration = 1e-3;
    double nu_p = 8e3, pdr_db = 0.0;
    std::string layout = "narrow", mcs = "qpsk_1/2";
    double delta_f = 15e3, boost_db = 0.0;
    int dmrs_density = 1;
    for (CLI::App* cmd : {otfs_cmd, ofdm_cmd}) {
        cmd->add_option("--tau-max", tau_max, "channel delay spread [s]");
        cmd->add_option("--nu-max", nu_max, "channel Doppler spread [Hz]");
        cmd->add_option("--snr", snr_db, "transmit power to noise ratio [dB]");
        cmd->add_option("--duration", duration, "frame duration [s]");
        cmd->add_option("--mcs", mcs, "MCS label (e.g. 16qam_3/4) or id");
    }
    otfs_cmd->add_option("--bw", bw_otfs, "allocated bandwidth [Hz]");
    otfs_cmd->add_option("--nu-p", nu_p, "Doppler period [Hz]");
    otfs_cmd->add_option("--pdr", pdr_db, "pilot-to-data power ratio [dB]");
    otfs_cmd->add_option("--layout", layout, "narrow|medium|wide");
    ofdm_cmd->add_option("--bw", bw_ofdm, "allocated bandwidth [Hz]");
    ofdm_cmd->add_option("--delta-f", delta_f, "subcarrier spacing [Hz]");
    ofdm_cmd->add_option("--boost", boost_db, "DMRS power boost [dB]");
    ofdm_cmd->add_option("--dmrs-density", dmrs_density, "pilot symbols per frame");

    // overhead
    auto* ovh_cmd = app.add_subcommand("overhead", "print overhead tables or a single overhead value");
    double zak_strip = 0.0, period = 0.0, cp_tcp = -1.0, cp_delta_f = 0.0;
    ovh_cmd->add_option("--zak-strip", zak_strip, "pilot/guard strip width (s or Hz)");
    ovh_cmd->add_option("--period", period, "DD period in the strip units");
    ovh_cmd->add_option("--cp-tcp", cp_tcp, "cyclic prefix duration [s]");
    ovh_cmd->add_option("--cp-delta-f", cp_delta_f, "subcarrier spacing [Hz]");

    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (sweep_cmd->parsed()) {
            sweep::SweepSpec spec = paper_scale ? sweep::paper_spec() : sweep::desk_spec();
            spec.seed = seed;
            spec.bler_gate = bler_gate;
            if (threads > 0) spec.threads = threads;
            if (frames > 0) spec.n_frames = frames;
            if (!config_path.empty()) spec = sweep::parse_config_file(config_path, spec);
            // Command-line flags win over file values when given explicitly.
            if (app.count("--seed")) spec.seed = seed;
            if (app.count("--frames") && frames > 0) spec.n_frames = frames;
            if (app.count("--threads") && threads > 0) spec.threads = threads;
            if (app.count("--bler-gate")) spec.bler_gate = bler_gate;
            spec.validate();

            std::cerr << "[sweep] " << spec.tau_max_list.size() << "x" << spec.nu_max_list.size()
                      << " cells, " << spec.n_frames << " frames/candidate, seed " << spec.seed
                      << ", dmrs density list is an interpretation of the Type-A allocation\n";
            const sweep::SweepResult result = sweep::run_sweep(spec);
            if (out_path.empty()) {
                sweep::write_csv(result, std::cout);
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw ConfigError("cannot open output file " + out_path);
                sweep::write_csv(result, out);
            }
            return 0;
        }
        if (otfs_cmd->parsed() || ofdm_cmd->parsed()) {
            link::ChannelSpec channel;
            channel.tau_max = tau_max;
            channel.nu_max = nu_max;
            channel.snr_db = snr_db;
            const int n = frames > 0 ? frames : 200;
            const link::MCS& m = mcs.find_first_not_of("0123456789") == std::string::npos
                                     ? link::mcs_by_id(std::stoi(mcs))
                                     : link::mcs_by_label(mcs);
            link::LinkResult r;
            if (otfs_cmd->parsed()) {
                link::OtfsLink cfg;
                cfg.bandwidth = bw_otfs;
                cfg.duration = duration;
                cfg.nu_p = nu_p;
                cfg.variant = otfs::layout_from_name(layout);
                cfg.pdr_db = pdr_db;
                cfg.mcs = m;
                r = link::run_link(cfg, channel, n, seed, bler_gate);
            } else {
                link::OfdmLink cfg;
                cfg.bandwidth = bw_ofdm;
                cfg.duration = duration;
                cfg.delta_f = delta_f;
                cfg.dmrs_density = dmrs_density;
                cfg.boost_db = boost_db;
                cfg.mcs = m;
                r = link::run_link(cfg, channel, n, seed, bler_gate);
            }
            print_link_result(r, bler_gate);
            return 0;
        }
        if (ovh_cmd->parsed()) return cmd_overhead(zak_strip, period, cp_tcp, cp_delta_f);
        if (selftest_cmd->parsed()) return cmd_selftest();
    } catch (const ddlink::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
