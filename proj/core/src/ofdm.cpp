#include "ddlink/ofdm.hpp"

#include "ddlink/fft.hpp"
#include "ddlink/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ddlink::ofdm {

double cp_overhead(double delta_f, double t_cp) {
    if (!(delta_f > 0.0) || t_cp < 0.0) throw std::invalid_argument("cp_overhead: bad arguments");
    return t_cp / (t_cp + 1.0 / delta_f);
}

double zak_strip_overhead(double strip_width, double period) {
    if (!(strip_width > 0.0) || !(period > 0.0))
        throw std::invalid_argument("zak_strip_overhead: arguments must be positive");
    if (strip_width >= period) throw ConfigError("zak_strip_overhead: strip width must be below the period");
    return 2.0 * strip_width / period;
}

bool DMRSPattern::is_pilot_symbol(int s) const {
    return std::find(time_positions.begin(), time_positions.end(), s) != time_positions.end();
}

bool OFDMConfig::is_pilot_re(int m, int s) const {
    if (!dmrs.is_pilot_symbol(s)) return false;
    return (m % dmrs.freq_comb) == dmrs.freq_offset;
}

int OFDMConfig::data_re_count() const {
    const int pilots_per_symbol = (n_sub - dmrs.freq_offset + dmrs.freq_comb - 1) / dmrs.freq_comb;
    return n_sub * n_symbols - static_cast<int>(dmrs.time_positions.size()) * pilots_per_symbol;
}

OFDMConfig make_config(double bandwidth, double delta_f, double duration, int dmrs_density,
                       double boost_db, double cp_ratio) {
    if (!(bandwidth > 0.0) || !(delta_f > 0.0) || !(duration > 0.0))
        throw ConfigError("ofdm::make_config: bandwidth, delta_f and duration must be positive");
    const double n_sub_real = bandwidth / delta_f;
    const int n_sub = static_cast<int>(std::lround(n_sub_real));
    if (std::abs(n_sub_real - n_sub) > 1e-6 || n_sub < 2)
        throw ConfigError("ofdm::make_config: bandwidth must be an integer multiple of delta_f");

    OFDMConfig cfg;
    cfg.delta_f = delta_f;
    cfg.n_sub = n_sub;
    cfg.boost_db = boost_db;
    const double fs = cfg.sample_rate();
    const double t_cp_target = cp_ratio / delta_f;
    cfg.cp_samples = static_cast<int>(std::lround(t_cp_target * fs));
    cfg.n_symbols = static_cast<int>(std::floor(duration * fs / cfg.symbol_samples() + 1e-9));
    if (cfg.n_symbols < 1) throw ConfigError("ofdm::make_config: duration too short for one symbol");

    if (dmrs_density < 1) throw ConfigError("ofdm::make_config: dmrs_density must be >= 1");
    if (cfg.n_symbols <= 2) throw ConfigError("ofdm::make_config: frame too short for the DMRS anchor symbol");
    cfg.dmrs.freq_comb = 2;
    cfg.dmrs.freq_offset = 0;
    cfg.dmrs.time_positions.push_back(2);
    // Remaining pilot symbols spread evenly from the anchor to the frame end.
    for (int i = 1; i < dmrs_density; ++i) {
        const int pos =
            2 + static_cast<int>(std::lround(static_cast<double>(i) * (cfg.n_symbols - 3) / (dmrs_density - 1)));
        if (pos > 2 && pos < cfg.n_symbols && !cfg.dmrs.is_pilot_symbol(pos))
            cfg.dmrs.time_positions.push_back(pos);
    }
    std::sort(cfg.dmrs.time_positions.begin(), cfg.dmrs.time_positions.end());
    return cfg;
}

cd dmrs_symbol(int m, int s) {
    uint64_t state = derive_seed(0xdf5eedULL, static_cast<uint64_t>(m), static_cast<uint64_t>(s));
    const uint64_t r = splitmix64(state);
    const double a = (r & 1) ? -1.0 : 1.0;
    const double b = (r & 2) ? -1.0 : 1.0;
    return cd(a, b) / std::sqrt(2.0);
}

cvec modulate(const OFDMConfig& cfg, const cvec& data_symbols) {
    if (static_cast<int>(data_symbols.size()) != cfg.data_re_count())
        throw std::invalid_argument("ofdm::modulate: data symbol count does not match the frame");

    const double boost_amp = std::sqrt(db_to_linear(cfg.boost_db));
    ResourceGrid grid(cfg.n_sub, cfg.n_symbols);
    size_t di = 0;
    for (int s = 0; s < cfg.n_symbols; ++s) {
        for (int m = 0; m < cfg.n_sub; ++m) {
            grid.at(m, s) = cfg.is_pilot_re(m, s) ? boost_amp * dmrs_symbol(m, s) : data_symbols[di++];
        }
    }

    cvec frame(static_cast<size_t>(cfg.frame_samples()));
    cvec sym(static_cast<size_t>(cfg.n_sub));
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_sub));
    for (int s = 0; s < cfg.n_symbols; ++s) {
        for (int m = 0; m < cfg.n_sub; ++m) sym[static_cast<size_t>(m)] = grid.at(m, s);
        fft_inplace(sym, +1); // unnormalized inverse DFT
        cd* out = frame.data() + static_cast<size_t>(s) * cfg.symbol_samples();
        for (int n = 0; n < cfg.n_sub; ++n) out[cfg.cp_samples + n] = scale * sym[static_cast<size_t>(n)];
        for (int n = 0; n < cfg.cp_samples; ++n) out[n] = out[n + cfg.n_sub]; // CP = tail copy
    }

    const double e = energy(frame);
    if (e > 0.0) {
        const double g = 1.0 / std::sqrt(e);
        for (cd& v : frame) v *= g;
    }
    return frame;
}

ResourceGrid demodulate(const OFDMConfig& cfg, const cvec& rx) {
    if (static_cast<int>(rx.size()) != cfg.frame_samples())
        throw std::invalid_argument("ofdm::demodulate: sample count does not match the frame");
    ResourceGrid grid(cfg.n_sub, cfg.n_symbols);
    cvec sym(static_cast<size_t>(cfg.n_sub));
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_sub));
    for (int s = 0; s < cfg.n_symbols; ++s) {
        const cd* in = rx.data() + static_cast<size_t>(s) * cfg.symbol_samples() + cfg.cp_samples;
        std::copy(in, in + cfg.n_sub, sym.begin());
        fft_inplace(sym, -1);
        for (int m = 0; m < cfg.n_sub; ++m) grid.at(m, s) = scale * sym[static_cast<size_t>(m)];
    }
    return grid;
}

namespace {

// Linear interpolation over knot positions with linear extrapolation at the
// edges; degenerates to a constant with a single knot.
void interp_linear(const std::vector<int>& pos, const cvec& val, int count, cvec& out) {
    out.assign(static_cast<size_t>(count), cd(0.0, 0.0));
    if (pos.empty()) return;
    if (pos.size() == 1) {
        std::fill(out.begin(), out.end(), val[0]);
        return;
    }
    for (int x = 0; x < count; ++x) {
        size_t j = 0;
        while (j + 2 < pos.size() && x >= pos[j + 1]) ++j;
        const double x0 = pos[j], x1 = pos[j + 1];
        const double t = (x - x0) / (x1 - x0);
        out[static_cast<size_t>(x)] = val[j] + t * (val[j + 1] - val[j]);
    }
}

} // namespace

ResourceGrid estimate_grid_channel(const ResourceGrid& grid, const OFDMConfig& cfg) {
    if (cfg.dmrs.time_positions.empty()) throw ConfigError("estimate_grid_channel: no pilot symbols");
    const double boost_amp = std::sqrt(db_to_linear(cfg.boost_db));

    // LS at pilot REs, then frequency interpolation within each pilot symbol.
    std::vector<int> pilot_syms = cfg.dmrs.time_positions;
    std::vector<cvec> per_symbol(pilot_syms.size());
    std::vector<int> comb_pos;
    for (int m = cfg.dmrs.freq_offset; m < cfg.n_sub; m += cfg.dmrs.freq_comb) comb_pos.push_back(m);
    if (comb_pos.empty()) throw ConfigError("estimate_grid_channel: comb leaves no pilot subcarriers");

    for (size_t i = 0; i < pilot_syms.size(); ++i) {
        cvec ls(comb_pos.size());
        for (size_t j = 0; j < comb_pos.size(); ++j) {
            const int m = comb_pos[j];
            ls[j] = grid.at(m, pilot_syms[i]) / (boost_amp * dmrs_symbol(m, pilot_syms[i]));
        }
        interp_linear(comb_pos, ls, cfg.n_sub, per_symbol[i]);
    }

    // Time interpolation between pilot symbols, constant beyond the edges.
    ResourceGrid h(cfg.n_sub, cfg.n_symbols);
    for (int m = 0; m < cfg.n_sub; ++m) {
        for (int s = 0; s < cfg.n_symbols; ++s) {
            cd v;
            if (s <= pilot_syms.front()) {
                v = per_symbol.front()[static_cast<size_t>(m)];
            } else if (s >= pilot_syms.back()) {
                v = per_symbol.back()[static_cast<size_t>(m)];
            } else {
                size_t j = 0;
                while (j + 2 < pilot_syms.size() && s >= pilot_syms[j + 1]) ++j;
                const double t = static_cast<double>(s - pilot_syms[j]) / (pilot_syms[j + 1] - pilot_syms[j]);
                v = per_symbol[j][static_cast<size_t>(m)] +
                    t * (per_symbol[j + 1][static_cast<size_t>(m)] - per_symbol[j][static_cast<size_t>(m)]);
            }
            h.at(m, s) = v;
        }
    }
    return h;
}

MmseOut mmse_equalize(const ResourceGrid& grid, const ResourceGrid& h_hat, const OFDMConfig& cfg,
                      double noise_var) {
    if (grid.n_sub != h_hat.n_sub || grid.n_symbols != h_hat.n_symbols)
        throw std::invalid_argument("mmse_equalize: grid shapes differ");
    if (noise_var < 0.0) throw std::invalid_argument("mmse_equalize: noise_var must be >= 0");

    MmseOut out;
    out.data.reserve(static_cast<size_t>(cfg.data_re_count()));
    out.sinr.reserve(out.data.capacity());
    for (int s = 0; s < cfg.n_symbols; ++s) {
        for (int m = 0; m < cfg.n_sub; ++m) {
            if (cfg.is_pilot_re(m, s)) continue;
            const cd h = h_hat.at(m, s);
            const double h2 = std::norm(h);
            const double denom = h2 + noise_var;
            out.data.push_back(denom > 0.0 ? std::conj(h) * grid.at(m, s) / denom : cd(0.0, 0.0));
            out.sinr.push_back(h2 / std::max(noise_var, 1e-30));
        }
    }
    return out;
}

} // namespace ddlink::ofdm
