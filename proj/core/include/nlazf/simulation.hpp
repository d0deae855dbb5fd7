#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlazf/metrics.hpp"
#include "nlazf/pa_model.hpp"
#include "nlazf/precoder.hpp"
#include "nlazf/rng.hpp"
#include "nlazf/types.hpp"

namespace nlazf {

enum class PrecoderKind { zf, nlazf };

std::string to_string(PrecoderKind kind);
PrecoderKind precoder_kind_from_string(const std::string& name);

/// Full description of a sweep experiment. A SweepResult is a pure function
/// of this struct; the seed fixes every random draw.
struct SimConfig {
    int m = 2;  // BS antennas, even
    int k = 2;  // users; the solvers support exactly 2
    int n_realizations = 1000;
    std::vector<double> snr_grid_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40};
    std::vector<double> backoff_db = {0.0, 7.0};
    // illustrative weak-coupling default, not a fitted amplifier
    PACoefficients pa_nominal{cxd(1.0, 0.0), cxd(-0.05, 0.01)};
    double pa_tolerance_fraction = 0.10;
    std::vector<PrecoderKind> precoders = {PrecoderKind::zf, PrecoderKind::nlazf};
    double tol = 1e-4;
    int max_iter = 100;
    std::uint64_t seed = 12345;
    double es_total = 1.0;
    double cap_db = 300.0;             // dB ceiling for serialized SIR/SDR
    double max_failure_fraction = 0.01;
    double zf_max_condition = 1e12;

    bool operator==(const SimConfig& other) const;
};

/// Throws std::invalid_argument naming the offending key.
void validate(const SimConfig& config);

/// One (precoder, backoff, snr) aggregate. dB means are averages of
/// per-realization per-user dB values; linear means are kept alongside.
struct SweepCell {
    PrecoderKind precoder = PrecoderKind::zf;
    double backoff_db = 0.0;
    double snr_db = 0.0;
    double mean_sindr_db = 0.0;
    double mean_sir_db = 0.0;
    double mean_sdr_db = 0.0;
    double mean_sindr_linear = 0.0;
    double mean_sir_linear = 0.0;
    double mean_sdr_linear = 0.0;
    double convergence_rate = 0.0;
    double mean_iterations = 0.0;
    int n_realizations = 0;
    int n_failures = 0;
    bool capped = false;  // some contributing sample hit the dB cap
};

struct SweepResult {
    SimConfig config;
    std::vector<SweepCell> cells;  // precoder-major, then backoff, then snr

    const SweepCell& cell(PrecoderKind p, double backoff, double snr) const;
};

/// K x M channel with IID CN(0,1) entries (unit power per entry), drawn
/// row-major from the stream.
Channel draw_channel(int users, int antennas, Rng& rng);

/// Per-antenna PA coefficients a1*(1+u), a3*(1+v) with u, v independent
/// Uniform(-fraction, +fraction), drawn per antenna (a1 deviation first).
PAArray perturb_pa(const PACoefficients& nominal, double fraction, int antennas, Rng& rng);

/// Transmit energies scaled by 10^(-backoff_db/10). The SNR axis stays tied
/// to the pre-backoff reference energy, so back-off costs received power.
PowerAllocation apply_backoff(const PowerAllocation& power, double backoff_db);

/// Runs the Monte Carlo sweep. Realization r always uses the substream seed
/// derived from (config.seed, r) and results are aggregated in realization
/// order, so the output is identical for any thread count.
SweepResult run_sweep(const SimConfig& config, int threads = 1);

}  // namespace nlazf
