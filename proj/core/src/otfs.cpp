#include "ddlink/otfs.hpp"

#include <algorithm>
#include <cmath>

namespace ddlink::otfs {

bool crystallization_check(double tau_max, double nu_max, const DDGrid& grid) {
    if (tau_max < 0.0 || nu_max < 0.0)
        throw std::invalid_argument("crystallization_check: spreads must be >= 0");
    return grid.tau_p > tau_max && grid.nu_p > nu_max;
}

const char* layout_name(LayoutVariant v) {
    switch (v) {
        case LayoutVariant::kNarrow: return "narrow";
        case LayoutVariant::kMedium: return "medium";
        case LayoutVariant::kWide: return "wide";
    }
    return "?";
}

LayoutVariant layout_from_name(const std::string& name) {
    if (name == "narrow") return LayoutVariant::kNarrow;
    if (name == "medium") return LayoutVariant::kMedium;
    if (name == "wide") return LayoutVariant::kWide;
    throw ConfigError("unknown layout variant: " + name);
}

FrameLayout build_layout(const DDGrid& grid, double tau_max, LayoutVariant variant) {
    if (tau_max < 0.0) throw std::invalid_argument("build_layout: tau_max must be >= 0");
    FrameLayout layout;
    layout.grid = grid;
    layout.variant = variant;
    layout.k_max = static_cast<int>(std::ceil(grid.bandwidth() * tau_max - 1e-9));
    layout.pilot_k = grid.M / 2;
    layout.pilot_l = grid.N / 2;

    const int mult = variant == LayoutVariant::kNarrow ? 1 : variant == LayoutVariant::kMedium ? 2 : 4;
    int width = std::max(1, mult * layout.k_max);
    width = std::min(width, grid.M - layout.pilot_k); // keep the strip inside the grid

    const int guard_left = std::min(layout.k_max, layout.pilot_k);
    const int guard_right = std::min(layout.k_max, grid.M - layout.pilot_k - width);

    const int strip_lo = layout.pilot_k - guard_left;          // first guarded column
    const int strip_hi = layout.pilot_k + width + guard_right; // one past last guarded column

    layout.cell_kind.assign(static_cast<size_t>(grid.size()), FrameLayout::Cell::kData);
    for (int k = 0; k < grid.M; ++k) {
        for (int l = 0; l < grid.N; ++l) {
            FrameLayout::Cell kind = FrameLayout::Cell::kData;
            if (k == layout.pilot_k && l == layout.pilot_l) {
                kind = FrameLayout::Cell::kPilot;
            } else if (k >= layout.pilot_k && k < layout.pilot_k + width) {
                kind = FrameLayout::Cell::kPilotRegion;
            } else if (k >= strip_lo && k < strip_hi) {
                kind = FrameLayout::Cell::kGuard;
            }
            layout.cell_kind[static_cast<size_t>(k) * grid.N + l] = kind;
            switch (kind) {
                case FrameLayout::Cell::kPilot: break;
                case FrameLayout::Cell::kPilotRegion: layout.pilot_region.emplace_back(k, l); break;
                case FrameLayout::Cell::kGuard: layout.guard_region.emplace_back(k, l); break;
                case FrameLayout::Cell::kData: layout.data_region.emplace_back(k, l); break;
            }
        }
    }
    if (layout.data_region.empty())
        throw ConfigError("build_layout: pilot and guard strips leave no data cells");
    return layout;
}

TxFrame modulate(const OTFSConfig& cfg, const cvec& data_symbols) {
    const FrameLayout& layout = cfg.layout;
    if (data_symbols.size() != layout.data_region.size())
        throw std::invalid_argument("otfs::modulate: data symbol count does not match layout");

    const double rho = db_to_linear(cfg.pdr_db);
    const double d = static_cast<double>(layout.data_region.size());
    const double data_power = 1.0 / (d + rho);
    const double pilot_power = rho * data_power;
    const double data_amp = std::sqrt(data_power);
    const double pilot_amp = std::sqrt(pilot_power);

    DDFrame frame(cfg.grid);
    for (size_t i = 0; i < data_symbols.size(); ++i) {
        const auto [k, l] = layout.data_region[i];
        frame.at(k, l) = data_amp * data_symbols[i];
    }
    frame.at(layout.pilot_k, layout.pilot_l) = pilot_amp;

    const DDFilter tx_filter = gauss_sinc_filter(cfg.grid, cfg.alpha_tau, cfg.alpha_nu);
    DDFrame shaped = twisted_convolve(tx_filter, frame);

    TxFrame tx;
    tx.samples = inverse_zak(shaped);
    const double e = energy(tx.samples);
    const double scale = e > 0.0 ? 1.0 / std::sqrt(e) : 1.0;
    for (cd& v : tx.samples) v *= scale;
    tx.pilot_amplitude = pilot_amp * scale;
    tx.data_amplitude = data_amp * scale;
    return tx;
}

DDFilter estimate_channel(const DDFrame& rx_frame, const FrameLayout& layout, double pilot_amplitude,
                          int k_max, int l_max) {
    const DDGrid& grid = rx_frame.grid();
    if (l_max < 0 || l_max > grid.N / 2 - 1)
        throw ConfigError("estimate_channel: l_max must satisfy 0 <= l_max <= floor(N/2)-1");
    if (k_max < 0) throw std::invalid_argument("estimate_channel: k_max must be >= 0");
    if (!(pilot_amplitude > 0.0)) throw std::invalid_argument("estimate_channel: pilot amplitude must be > 0");

    // The read window must stay clear of data cells.
    for (int k = 0; k <= k_max; ++k) {
        const int col = layout.pilot_k + k;
        if (col >= grid.M) throw ConfigError("estimate_channel: window exceeds the grid");
        for (int l = -l_max; l <= l_max; ++l) {
            int row = layout.pilot_l + l;
            row = ((row % grid.N) + grid.N) % grid.N;
            const FrameLayout::Cell kind = layout.kind(col, row);
            if (kind == FrameLayout::Cell::kData)
                throw ConfigError("estimate_channel: window exceeds the pilot+guard region");
        }
    }

    const double mn = static_cast<double>(grid.M) * grid.N;
    DDFilter h;
    h.grid = grid;
    for (int k = 0; k <= k_max; ++k) {
        for (int l = -l_max; l <= l_max; ++l) {
            const cd raw = rx_frame.extended_at(layout.pilot_k + k, layout.pilot_l + l);
            // Undo the twisted phase picked up across the pilot delay offset.
            const double phase = -kTwoPi * static_cast<double>(l) * static_cast<double>(layout.pilot_k) / mn;
            h.add_tap(k, l, raw * cd(std::cos(phase), std::sin(phase)) / pilot_amplitude);
        }
    }
    h.sort_taps();
    return h;
}

namespace {

// LSMR (Fong & Saunders 2011) on the operator that embeds data-region
// coefficients, twisted-convolves with h, and reads the full frame.
struct DataOperator {
    const DDFilter& h;
    const FrameLayout& layout;
    DDFrame x_frame;
    DDFrame scratch;

    explicit DataOperator(const DDFilter& h_, const FrameLayout& layout_)
        : h(h_), layout(layout_), x_frame(layout_.grid), scratch(layout_.grid) {}

    void apply(const cvec& x, cvec& y_full) {
        std::fill(x_frame.symbols().begin(), x_frame.symbols().end(), cd(0.0, 0.0));
        for (size_t i = 0; i < x.size(); ++i) {
            const auto [k, l] = layout.data_region[i];
            x_frame.at(k, l) = x[i];
        }
        twisted_convolve_into(h, x_frame, scratch);
        y_full = scratch.symbols();
    }

    void apply_adjoint(const cvec& y_full, cvec& x) {
        scratch.symbols() = y_full;
        twisted_adjoint_into(h, scratch, x_frame);
        x.resize(layout.data_region.size());
        for (size_t i = 0; i < x.size(); ++i) {
            const auto [k, l] = layout.data_region[i];
            x[i] = x_frame.at(k, l);
        }
    }
};

double vec_norm(const cvec& v) { return std::sqrt(energy(v)); }

void scale_vec(cvec& v, double s) {
    for (cd& x : v) x *= s;
}

} // namespace

EqualizeResult lsmr_equalize(const DDFrame& rx_frame, const DDFilter& h_est, const FrameLayout& layout,
                             double pilot_amplitude, double noise_var, int max_iter, double tol) {
    if (!(rx_frame.grid() == h_est.grid)) throw std::invalid_argument("lsmr_equalize: grid mismatch");
    if (noise_var < 0.0) throw std::invalid_argument("lsmr_equalize: noise_var must be >= 0");

    const size_t n_out = rx_frame.symbols().size();
    const size_t n_data = layout.data_region.size();

    // Cancel the known pilot contribution.
    DDFrame pilot_frame(layout.grid);
    pilot_frame.at(layout.pilot_k, layout.pilot_l) = pilot_amplitude;
    DDFrame pilot_rx = twisted_convolve(h_est, pilot_frame);
    cvec b(n_out);
    for (size_t i = 0; i < n_out; ++i) b[i] = rx_frame.symbols()[i] - pilot_rx.symbols()[i];

    DataOperator op(h_est, layout);
    const double damp = std::sqrt(noise_var);

    EqualizeResult res;
    res.data.assign(n_data, cd(0.0, 0.0));

    cvec u = b;
    double beta = vec_norm(u);
    if (beta > 0.0) scale_vec(u, 1.0 / beta);
    cvec v(n_data, cd(0.0, 0.0));
    double alpha = 0.0;
    if (beta > 0.0) {
        op.apply_adjoint(u, v);
        alpha = vec_norm(v);
        if (alpha > 0.0) scale_vec(v, 1.0 / alpha);
    }

    double zetabar = alpha * beta;
    double alphabar = alpha;
    double rho = 1.0, rhobar = 1.0, cbar = 1.0, sbar = 0.0;
    cvec h_vec = v;
    cvec hbar(n_data, cd(0.0, 0.0));

    // Residual-norm bookkeeping (per the published recurrences).
    double betadd = beta, betad = 0.0;
    double rhodold = 1.0, tautildeold = 0.0, thetatilde = 0.0, zeta = 0.0, dsq = 0.0;
    const double normb = beta;
    double norma2 = alpha * alpha;
    double normr = beta;
    double normar = alpha * beta;

    cvec au(n_out), av(n_data);

    if (normar != 0.0) {
        for (int iter = 1; iter <= max_iter; ++iter) {
            res.iterations = iter;

            // Golub-Kahan bidiagonalization step.
            op.apply(v, au);
            for (size_t i = 0; i < n_out; ++i) u[i] = au[i] - alpha * u[i];
            beta = vec_norm(u);
            if (beta > 0.0) scale_vec(u, 1.0 / beta);
            op.apply_adjoint(u, av);
            for (size_t i = 0; i < n_data; ++i) v[i] = av[i] - beta * v[i];
            alpha = vec_norm(v);
            if (alpha > 0.0) scale_vec(v, 1.0 / alpha);

            // Fold the damping into the rotation chain.
            const double alphahat = std::hypot(alphabar, damp);
            const double chat = alphabar / alphahat;
            const double shat = damp / alphahat;

            const double rhoold = rho;
            rho = std::hypot(alphahat, beta);
            const double c = alphahat / rho;
            const double s = beta / rho;
            const double thetanew = s * alpha;
            alphabar = c * alpha;

            const double rhobarold = rhobar;
            const double zetaold = zeta;
            const double thetabar = sbar * rho;
            const double rhotemp = cbar * rho;
            rhobar = std::hypot(cbar * rho, thetanew);
            cbar = cbar * rho / rhobar;
            sbar = thetanew / rhobar;
            zeta = cbar * zetabar;
            zetabar = -sbar * zetabar;

            // Solution updates.
            const double hbar_coeff = thetabar * rho / (rhoold * rhobarold);
            for (size_t i = 0; i < n_data; ++i) hbar[i] = h_vec[i] - hbar_coeff * hbar[i];
            const double x_coeff = zeta / (rho * rhobar);
            for (size_t i = 0; i < n_data; ++i) res.data[i] += x_coeff * hbar[i];
            const double h_coeff = thetanew / rho;
            for (size_t i = 0; i < n_data; ++i) h_vec[i] = v[i] - h_coeff * h_vec[i];

            // Residual estimates.
            const double betaacute = chat * betadd;
            const double betacheck = -shat * betadd;
            const double betahat = c * betaacute;
            betadd = -s * betaacute;

            const double thetatildeold = thetatilde;
            const double rhotildeold = std::hypot(rhodold, thetabar);
            const double ctildeold = rhodold / rhotildeold;
            const double stildeold = thetabar / rhotildeold;
            thetatilde = stildeold * rhobar;
            rhodold = ctildeold * rhobar;
            betad = -stildeold * betad + ctildeold * betahat;

            tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold;
            const double taud = (zeta - thetatilde * tautildeold) / rhodold;
            dsq += betacheck * betacheck;
            normr = std::sqrt(dsq + (betad - taud) * (betad - taud) + betadd * betadd);

            norma2 += beta * beta;
            const double norma = std::sqrt(norma2);
            norma2 += alpha * alpha;
            normar = std::abs(zetabar);

            double normx = 0.0;
            for (const cd& x : res.data) normx += std::norm(x);
            normx = std::sqrt(normx);

            (void)rhotemp;
            if (normar <= tol * norma * normr || normr <= tol * normb + tol * norma * normx) {
                res.converged = true;
                break;
            }
        }
    } else {
        res.converged = true; // b (or A'b) is zero: x = 0 is the solution
    }

    // Exact residual for the soft-output quality estimate.
    op.apply(res.data, au);
    double r2 = 0.0;
    for (size_t i = 0; i < n_out; ++i) r2 += std::norm(b[i] - au[i]);
    res.residual_norm = std::sqrt(r2);
    const size_t dof = n_out > n_data ? n_out - n_data : 1;
    res.noise_var_eff = r2 / static_cast<double>(dof);
    return res;
}

} // namespace ddlink::otfs
