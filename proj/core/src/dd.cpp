#include "ddlink/dd.hpp"

#include "ddlink/fft.hpp"

#include <algorithm>
#include <cmath>

namespace ddlink {

DDGrid DDGrid::from_delay_period(int M, int N, double tau_p) {
    if (M <= 0 || N <= 0) throw std::invalid_argument("DDGrid: M and N must be positive");
    if (!(tau_p > 0.0)) throw std::invalid_argument("DDGrid: tau_p must be positive");
    DDGrid g;
    g.M = M;
    g.N = N;
    g.tau_p = tau_p;
    g.nu_p = 1.0 / tau_p;
    return g;
}

DDFrame::DDFrame(const DDGrid& grid, cvec symbols) : grid_(grid), symbols_(std::move(symbols)) {
    if (symbols_.size() != static_cast<size_t>(grid_.size()))
        throw std::invalid_argument("DDFrame: symbol count does not match grid");
}

namespace {
// Floor division/modulo for possibly negative indices.
inline int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
inline int floor_mod(int a, int b) { return a - floor_div(a, b) * b; }
} // namespace

cd DDFrame::extended_at(int k, int l) const {
    const int M = grid_.M;
    const int N = grid_.N;
    const int n = floor_div(k, M);
    const int k0 = k - n * M;
    const int l0 = floor_mod(l, N);
    const cd base = at(k0, l0);
    if (n == 0) return base;
    const double phase = kTwoPi * static_cast<double>(n) * static_cast<double>(l0) / N;
    return base * cd(std::cos(phase), std::sin(phase));
}

void DDFilter::add_tap(int k, int l, cd gain) { taps.push_back(FilterTap{k, l, gain}); }

void DDFilter::sort_taps() {
    std::sort(taps.begin(), taps.end(), [](const FilterTap& a, const FilterTap& b) {
        return a.k != b.k ? a.k < b.k : a.l < b.l;
    });
}

int DDFilter::max_delay_tap() const {
    int m = 0;
    for (const auto& t : taps) m = std::max(m, t.k);
    return m;
}

int DDFilter::max_abs_doppler_tap() const {
    int m = 0;
    for (const auto& t : taps) m = std::max(m, std::abs(t.l));
    return m;
}

cvec inverse_zak(const DDFrame& frame) {
    const DDGrid& g = frame.grid();
    const int M = g.M;
    const int N = g.N;
    cvec s(static_cast<size_t>(M) * N);
    cvec col(static_cast<size_t>(N));
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < N; ++l) col[l] = frame.at(k, l);
        // s[k + n*M] = (1/sqrt(N)) sum_l X(k,l) e^{+j2pi nl/N}: an inverse DFT.
        fft_inplace(col, +1);
        for (int n = 0; n < N; ++n) s[static_cast<size_t>(k) + static_cast<size_t>(n) * M] = scale * col[n];
    }
    return s;
}

DDFrame forward_zak(const cvec& s, const DDGrid& grid) {
    const int M = grid.M;
    const int N = grid.N;
    if (s.size() != static_cast<size_t>(M) * N)
        throw std::invalid_argument("forward_zak: sample count does not match grid");
    DDFrame frame(grid);
    cvec col(static_cast<size_t>(N));
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (int k = 0; k < M; ++k) {
        for (int n = 0; n < N; ++n) col[n] = s[static_cast<size_t>(k) + static_cast<size_t>(n) * M];
        fft_inplace(col, -1);
        for (int l = 0; l < N; ++l) frame.at(k, l) = scale * col[l];
    }
    return frame;
}

namespace {

// Delay-period wrap phases of the quasi-periodic extension:
// ext(k - M, l) = x(k, l) * e^{-j2pi l/N}, ext(k + M, l) = x(k, l) * e^{+j2pi l/N}.
void wrap_phase_table(int N, cvec& minus, cvec& plus) {
    minus.resize(static_cast<size_t>(N));
    plus.resize(static_cast<size_t>(N));
    for (int l = 0; l < N; ++l) {
        const double ph = kTwoPi * static_cast<double>(l) / N;
        plus[static_cast<size_t>(l)] = cd(std::cos(ph), std::sin(ph));
        minus[static_cast<size_t>(l)] = std::conj(plus[static_cast<size_t>(l)]);
    }
}

} // namespace

void twisted_convolve_into(const DDFilter& h, const DDFrame& x, DDFrame& y) {
    if (!(h.grid == x.grid())) throw std::invalid_argument("twisted_convolve: grid mismatch");
    const DDGrid& g = x.grid();
    const int M = g.M;
    const int N = g.N;
    const double mn = static_cast<double>(M) * N;
    if (!(y.grid() == g)) y = DDFrame(g);
    std::fill(y.symbols().begin(), y.symbols().end(), cd(0.0, 0.0));

    cvec wrap_minus, wrap_plus;
    wrap_phase_table(N, wrap_minus, wrap_plus);

    const cd* X = x.symbols().data();
    cd* Y = y.symbols().data();
    for (const FilterTap& t : h.taps) {
        // Source Doppler index walks cyclically: src_l = (l - t.l) mod N.
        int l_start = (-t.l) % N;
        if (l_start < 0) l_start += N;
        for (int k = 0; k < M; ++k) {
            int sk = k - t.k;
            int wraps = 0;
            while (sk < 0) {
                sk += M;
                --wraps;
            }
            while (sk >= M) {
                sk -= M;
                ++wraps;
            }
            const double phase = kTwoPi * static_cast<double>(t.l) * static_cast<double>(k - t.k) / mn;
            const cd w = t.gain * cd(std::cos(phase), std::sin(phase));
            const cd* xrow = X + static_cast<size_t>(sk) * N;
            cd* yrow = Y + static_cast<size_t>(k) * N;
            int sl = l_start;
            if (wraps == 0) {
                for (int l = 0; l < N; ++l) {
                    yrow[l] += w * xrow[sl];
                    if (++sl == N) sl = 0;
                }
            } else {
                const cvec& tbl = wraps < 0 ? wrap_minus : wrap_plus;
                const int reps = std::abs(wraps);
                for (int l = 0; l < N; ++l) {
                    cd v = xrow[sl];
                    for (int r = 0; r < reps; ++r) v *= tbl[static_cast<size_t>(sl)];
                    yrow[l] += w * v;
                    if (++sl == N) sl = 0;
                }
            }
        }
    }
}

DDFrame twisted_convolve(const DDFilter& h, const DDFrame& x) {
    DDFrame y(x.grid());
    twisted_convolve_into(h, x, y);
    return y;
}

void twisted_adjoint_into(const DDFilter& h, const DDFrame& y, DDFrame& x) {
    if (!(h.grid == y.grid())) throw std::invalid_argument("twisted_adjoint: grid mismatch");
    const DDGrid& g = y.grid();
    const int M = g.M;
    const int N = g.N;
    const double mn = static_cast<double>(M) * N;
    if (!(x.grid() == g)) x = DDFrame(g);
    std::fill(x.symbols().begin(), x.symbols().end(), cd(0.0, 0.0));

    cvec wrap_minus, wrap_plus;
    wrap_phase_table(N, wrap_minus, wrap_plus);

    const cd* Y = y.symbols().data();
    cd* X = x.symbols().data();
    for (const FilterTap& t : h.taps) {
        const cd gc = std::conj(t.gain);
        int l_start = t.l % N;
        if (l_start < 0) l_start += N;
        for (int k = 0; k < M; ++k) {
            int sk = k + t.k;
            int wraps = 0;
            while (sk < 0) {
                sk += M;
                --wraps;
            }
            while (sk >= M) {
                sk -= M;
                ++wraps;
            }
            const double phase = -kTwoPi * static_cast<double>(t.l) * static_cast<double>(k) / mn;
            const cd w = gc * cd(std::cos(phase), std::sin(phase));
            const cd* yrow = Y + static_cast<size_t>(sk) * N;
            cd* xrow = X + static_cast<size_t>(k) * N;
            int sl = l_start;
            if (wraps == 0) {
                for (int l = 0; l < N; ++l) {
                    xrow[l] += w * yrow[sl];
                    if (++sl == N) sl = 0;
                }
            } else {
                const cvec& tbl = wraps < 0 ? wrap_minus : wrap_plus;
                const int reps = std::abs(wraps);
                for (int l = 0; l < N; ++l) {
                    cd v = yrow[sl];
                    for (int r = 0; r < reps; ++r) v *= tbl[static_cast<size_t>(sl)];
                    xrow[l] += w * v;
                    if (++sl == N) sl = 0;
                }
            }
        }
    }
}

DDFrame twisted_adjoint(const DDFilter& h, const DDFrame& y) {
    DDFrame x(y.grid());
    twisted_adjoint_into(h, y, x);
    return x;
}

DDFilter twisted_product(const DDFilter& second, const DDFilter& first) {
    if (!(second.grid == first.grid)) throw std::invalid_argument("twisted_product: grid mismatch");
    const double mn = static_cast<double>(second.grid.M) * second.grid.N;
    DDFilter out;
    out.grid = second.grid;
    for (const FilterTap& b : second.taps) {
        for (const FilterTap& a : first.taps) {
            const double phase = kTwoPi * static_cast<double>(b.l) * static_cast<double>(a.k) / mn;
            const cd gain = b.gain * a.gain * cd(std::cos(phase), std::sin(phase));
            out.add_tap(a.k + b.k, a.l + b.l, gain);
        }
    }
    // Merge duplicate (k, l) taps.
    out.sort_taps();
    std::vector<FilterTap> merged;
    for (const FilterTap& t : out.taps) {
        if (!merged.empty() && merged.back().k == t.k && merged.back().l == t.l)
            merged.back().gain += t.gain;
        else
            merged.push_back(t);
    }
    out.taps = std::move(merged);
    return out;
}

double gauss_sinc_sample(double u, double v, double alpha_tau, double alpha_nu) {
    auto sinc = [](double t) {
        if (t == 0.0) return 1.0;
        const double p = kPi * t;
        return std::sin(p) / p;
    };
    return sinc(u) * std::exp(-alpha_tau * u * u) * sinc(v) * std::exp(-alpha_nu * v * v);
}

DDFilter gauss_sinc_filter(const DDGrid& grid, double alpha_tau, double alpha_nu) {
    if (!(alpha_tau > 0.0) || !(alpha_nu > 0.0))
        throw std::invalid_argument("gauss_sinc_filter: alpha parameters must be positive");
    // Evaluate on integer taps out to the crystallized support bound, then
    // truncate relative to the peak. sinc vanishes at nonzero integers, so
    // only numerical care is needed at (0, 0).
    const int k_hi = grid.M - 1;
    const int l_hi = grid.N / 2 >= 1 ? grid.N / 2 - 1 : 0;
    double peak = 0.0;
    std::vector<FilterTap> raw;
    for (int k = 0; k <= k_hi; ++k) {
        for (int l = -l_hi; l <= l_hi; ++l) {
            const double w = gauss_sinc_sample(k, l, alpha_tau, alpha_nu);
            if (w != 0.0) raw.push_back(FilterTap{k, l, cd(w, 0.0)});
            peak = std::max(peak, std::abs(w));
        }
    }
    DDFilter out;
    out.grid = grid;
    for (const FilterTap& t : raw)
        if (std::abs(t.gain) >= 1e-6 * peak) out.taps.push_back(t);
    out.sort_taps();
    for (FilterTap& t : out.taps) t.gain /= peak;
    return out;
}

} // namespace ddlink
