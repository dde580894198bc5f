#include "ddlink/channel.hpp"

#include "ddlink/fft.hpp"
#include "ddlink/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ddlink::chan {

namespace {
constexpr std::array<double, 6> kVehADelaysUs = {0.0, 0.31, 0.71, 1.09, 1.73, 2.51};
constexpr std::array<double, 6> kVehAPowersDb = {0.0, -1.0, -9.0, -10.0, -15.0, -20.0};
} // namespace

double veh_a_tau_max() { return kVehADelaysUs.back() * 1e-6; }

double PathSet::tau_max() const {
    double m = 0.0;
    for (const Path& p : paths) m = std::max(m, p.delay);
    return m;
}

double PathSet::nu_max() const {
    double m = 0.0;
    for (const Path& p : paths) m = std::max(m, std::abs(p.doppler));
    return m;
}

void PathSet::normalize_power() {
    double p = 0.0;
    for (const Path& path : paths) p += std::norm(path.gain);
    if (p <= 0.0) return;
    const double s = 1.0 / std::sqrt(p);
    for (Path& path : paths) path.gain *= s;
}

PathSet veh_a_paths(double nu_max, uint64_t rng_seed, DopplerModel model) {
    if (nu_max < 0.0) throw std::invalid_argument("veh_a_paths: nu_max must be >= 0");
    Rng rng(rng_seed);
    PathSet ps;
    ps.paths.reserve(kVehADelaysUs.size());
    for (size_t i = 0; i < kVehADelaysUs.size(); ++i) {
        Path p;
        const double amp = std::sqrt(db_to_linear(kVehAPowersDb[i]));
        const double phi = rng.angle();
        p.gain = amp * cd(std::cos(phi), std::sin(phi));
        p.delay = kVehADelaysUs[i] * 1e-6;
        const double theta = rng.angle();
        p.doppler = (model == DopplerModel::kJakes) ? nu_max * std::cos(theta) : nu_max;
        ps.paths.push_back(p);
    }
    ps.normalize_power();
    return ps;
}

PathSet veh_a_paths_scaled(double tau_max, double nu_max, uint64_t rng_seed, DopplerModel model) {
    if (tau_max < 0.0) throw std::invalid_argument("veh_a_paths_scaled: tau_max must be >= 0");
    if (tau_max == 0.0) {
        Rng rng(rng_seed);
        PathSet ps;
        Path p;
        const double phi = rng.angle();
        p.gain = cd(std::cos(phi), std::sin(phi));
        p.delay = 0.0;
        const double theta = rng.angle();
        p.doppler = (model == DopplerModel::kJakes) ? nu_max * std::cos(theta) : nu_max;
        ps.paths.push_back(p);
        return ps;
    }
    PathSet ps = veh_a_paths(nu_max, rng_seed, model);
    const double scale = tau_max / veh_a_tau_max();
    for (Path& p : ps.paths) p.delay *= scale;
    return ps;
}

cvec apply_paths(const cvec& s, double sample_rate, const PathSet& paths, int oversample) {
    if (oversample < 1) throw std::invalid_argument("apply_paths: oversample must be >= 1");
    if (s.empty() || paths.paths.empty()) return cvec(s.size(), cd(0.0, 0.0));

    const size_t len = s.size();
    const double fs = sample_rate;
    size_t max_delay_samples = 0;
    for (const Path& p : paths.paths) {
        if (p.delay < 0.0) throw std::invalid_argument("apply_paths: negative path delay");
        max_delay_samples = std::max(max_delay_samples, static_cast<size_t>(std::ceil(p.delay * fs)));
    }

    // Zero-pad the tail so delayed content never wraps in the FFT resampler.
    size_t padded = len + max_delay_samples + 8;
    padded = (padded + 15) / 16 * 16;
    cvec work(padded, cd(0.0, 0.0));
    std::copy(s.begin(), s.end(), work.begin());
    const cvec up = upsample_fft(work, oversample);
    const long long up_len = static_cast<long long>(up.size());

    cvec y(len, cd(0.0, 0.0));
    for (const Path& p : paths.paths) {
        const long long d_up = llround(p.delay * fs * oversample);
        const double w = kTwoPi * p.doppler / fs;
        const double phase0 = -kTwoPi * p.doppler * p.delay;
        for (size_t n = 0; n < len; ++n) {
            const long long idx = static_cast<long long>(n) * oversample - d_up;
            if (idx < 0 || idx >= up_len) continue;
            const double ph = phase0 + w * static_cast<double>(n);
            y[n] += p.gain * up[static_cast<size_t>(idx)] * cd(std::cos(ph), std::sin(ph));
        }
    }
    return y;
}

cvec add_awgn(const cvec& s, const NoiseSpec& noise, double signal_power_ref) {
    if (!(signal_power_ref > 0.0)) throw std::invalid_argument("add_awgn: signal_power_ref must be > 0");
    if (std::isinf(noise.snr_db)) return s;
    const double var = signal_power_ref / db_to_linear(noise.snr_db);
    const double sigma = std::sqrt(var);
    Rng rng(noise.seed);
    cvec y = s;
    for (cd& v : y) v += sigma * rng.cgauss();
    return y;
}

} // namespace ddlink::chan
