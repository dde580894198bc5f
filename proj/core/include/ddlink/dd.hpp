#pragma once

#include "ddlink/common.hpp"

#include <cstdint>

namespace ddlink {

/**
 * Delay-Doppler numerology.
 *
 * M delay bins and N Doppler bins over one (tau_p, nu_p) period cell with
 * tau_p * nu_p = 1. Bandwidth B = M/tau_p, duration T = N*tau_p, so a frame
 * carries B*T = M*N symbols with delay resolution 1/B and Doppler
 * resolution 1/T.
 */
struct DDGrid {
    int M = 0;          // delay bins
    int N = 0;          // Doppler bins
    double tau_p = 0.0; // delay period, seconds
    double nu_p = 0.0;  // Doppler period, Hz

    static DDGrid from_delay_period(int M, int N, double tau_p);
    static DDGrid from_doppler_period(int M, int N, double nu_p) {
        return from_delay_period(M, N, 1.0 / nu_p);
    }

    double bandwidth() const { return static_cast<double>(M) / tau_p; }
    double duration() const { return static_cast<double>(N) * tau_p; }
    double delay_resolution() const { return tau_p / M; }
    double doppler_resolution() const { return nu_p / N; }
    int size() const { return M * N; }

    bool operator==(const DDGrid& o) const { return M == o.M && N == o.N && tau_p == o.tau_p; }
};

/**
 * One M x N delay-Doppler frame, the fundamental domain of a quasi-periodic
 * function: the value at (k + n*M, l + m*N) is symbols(k,l) * exp(j2*pi*n*l/N).
 * Storage is delay-major: index = k*N + l.
 */
class DDFrame {
public:
    DDFrame() = default;
    explicit DDFrame(const DDGrid& grid) : grid_(grid), symbols_(static_cast<size_t>(grid.size()), cd(0, 0)) {}
    DDFrame(const DDGrid& grid, cvec symbols);

    const DDGrid& grid() const { return grid_; }

    cd& at(int k, int l) { return symbols_[static_cast<size_t>(k) * grid_.N + l]; }
    const cd& at(int k, int l) const { return symbols_[static_cast<size_t>(k) * grid_.N + l]; }

    /// Value of the quasi-periodic extension at arbitrary integer (k, l).
    cd extended_at(int k, int l) const;

    cvec& symbols() { return symbols_; }
    const cvec& symbols() const { return symbols_; }

    double energy() const { return ddlink::energy(symbols_); }

private:
    DDGrid grid_;
    cvec symbols_;
};

/// One tap of a sparse DD-domain filter.
struct FilterTap {
    int k = 0; // delay tap
    int l = 0; // Doppler tap
    cd gain{0.0, 0.0};
};

/**
 * Sparse delay-Doppler filter acting on frames by twisted convolution.
 * Taps are kept sorted by (k, l) so iteration order is deterministic.
 */
struct DDFilter {
    DDGrid grid;
    std::vector<FilterTap> taps;

    static DDFilter identity(const DDGrid& grid) { return DDFilter{grid, {FilterTap{0, 0, cd(1.0, 0.0)}}}; }

    void add_tap(int k, int l, cd gain);
    void sort_taps();

    int max_delay_tap() const;
    int max_abs_doppler_tap() const;
};

// --- Zak transforms -------------------------------------------------------

/// Time-domain synthesis of a DD frame: a length M*N vector at sample rate B
/// with s[k + n*M] = (1/sqrt(N)) * sum_l symbols(k,l) * exp(j2*pi*n*l/N).
/// Unitary: the output energy equals the frame energy.
cvec inverse_zak(const DDFrame& frame);

/// Analysis transform, the inverse (and adjoint) of inverse_zak.
/// Throws std::invalid_argument when s.size() != M*N.
DDFrame forward_zak(const cvec& s, const DDGrid& grid);

// --- Twisted convolution ---------------------------------------------------

/// y(k,l) = sum_taps h(k',l') * x_ext(k-k', l-l') * exp(j2*pi*l'*(k-k')/(M*N)).
/// This is how a doubly-spread channel acts on a DD frame.
DDFrame twisted_convolve(const DDFilter& h, const DDFrame& x);

/// Adjoint of twisted_convolve(h, .) with respect to the fundamental-domain
/// inner product: <twisted_convolve(h,x), y> == <x, twisted_adjoint(h,y)>.
DDFrame twisted_adjoint(const DDFilter& h, const DDFrame& y);

/// Allocation-free variants for iterative solvers; `out` is overwritten
/// (and resized to the shared grid if needed).
void twisted_convolve_into(const DDFilter& h, const DDFrame& x, DDFrame& out);
void twisted_adjoint_into(const DDFilter& h, const DDFrame& y, DDFrame& out);

/// Composition rule: applying `first` then `second` equals twisted
/// convolution with twisted_product(second, first).
DDFilter twisted_product(const DDFilter& second, const DDFilter& first);

// --- Pulse shaping ---------------------------------------------------------

/// Gaussian-windowed sinc pulse value at fractional DD offsets (u, v):
/// sinc(u)*exp(-alpha_tau*u^2) * sinc(v)*exp(-alpha_nu*v^2).
double gauss_sinc_sample(double u, double v, double alpha_tau, double alpha_nu);

/// Separable Gauss-sinc shaping filter sampled on integer taps, truncated
/// where |w| < 1e-6 * max|w| and peak-normalized. At critical sampling the
/// sinc factor vanishes off-grid, so this reduces to the identity tap.
/// Throws std::invalid_argument for non-positive alpha.
DDFilter gauss_sinc_filter(const DDGrid& grid, double alpha_tau = 0.01, double alpha_nu = 0.01);

} // namespace ddlink
