#pragma once

#include "ddlink/link.hpp"

#include <iosfwd>

namespace ddlink::sweep {

enum class Waveform { kOtfs, kOfdm };
const char* waveform_name(Waveform wf);

struct OtfsSearchSpace {
    std::vector<double> nu_p;
    std::vector<double> pdr_db;
    std::vector<otfs::LayoutVariant> layouts;
    std::vector<int> mcs_ids;
};

struct OfdmSearchSpace {
    std::vector<double> delta_f;
    std::vector<double> boost_db;
    std::vector<int> dmrs_density;
    std::vector<int> mcs_ids;
};

/// Full experiment description: channel grid, resource, and the per-cell
/// configuration search spaces for both waveforms.
struct SweepSpec {
    std::vector<double> tau_max_list; // seconds
    std::vector<double> nu_max_list;  // Hz
    double snr_db = 12.0;
    double duration = 1e-3;
    double bw_otfs = 672e3;
    double bw_ofdm = 720e3;
    int n_frames = 200;
    uint64_t seed = 1;
    double bler_gate = 0.1;
    int threads = 1; // 0 = hardware concurrency
    int oversample = 4;
    chan::DopplerModel doppler_model = chan::DopplerModel::kJakes;
    bool early_stop = true;
    OtfsSearchSpace otfs;
    OfdmSearchSpace ofdm;

    void validate() const; // throws ConfigError
};

/// Reduced default lists sized for a single workstation run.
SweepSpec desk_spec();
/// The full evaluation setup (complete search lists and channel grids).
SweepSpec paper_spec();

/// Applies `key = value` lines from a config file on top of `base`.
/// Unknown keys and malformed values throw ConfigError.
SweepSpec parse_config_file(const std::string& path, const SweepSpec& base);
SweepSpec parse_config(std::istream& in, const SweepSpec& base);

/// Outcome of one per-cell, per-waveform configuration search.
struct BestConfig {
    bool feasible = false;     // some candidate passed the BLER gate
    double se = 0.0;           // best effective SE (0 when infeasible)
    std::string descriptor = "none";
    double bler = 1.0;
    double bler_lo = 0.0;
    double bler_hi = 1.0;
    int evaluated = 0; // candidates actually simulated
    int skipped = 0;   // infeasible or dominance-pruned candidates
};

/**
 * Exhaustive effective-SE maximization over the waveform's configuration
 * product set for one (tau_max, nu_max) cell. Infeasible candidates are
 * skipped; candidates whose SE ceiling cannot beat the current best are
 * pruned (the argmax is unchanged). Deterministic for a fixed spec.
 */
BestConfig optimize_cell(const SweepSpec& spec, double tau_max, double nu_max, Waveform wf);

struct CellResult {
    double tau_max = 0.0;
    double nu_max = 0.0;
    BestConfig otfs;
    BestConfig ofdm;
};

struct SweepResult {
    std::vector<CellResult> cells; // tau-major, matching the spec lists
};

/// Runs every cell for both waveforms, parallel across (cell, waveform)
/// tasks. Results are independent of the thread count.
SweepResult run_sweep(const SweepSpec& spec);

/// Fixed-column CSV: header row, comma separated, \n line endings, 6
/// significant digits. ratio is "inf" when only OFDM is infeasible and
/// "nan" when both waveforms are.
void write_csv(const SweepResult& result, std::ostream& out);
std::string csv_string(const SweepResult& result);

} // namespace ddlink::sweep
