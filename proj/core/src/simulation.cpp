#include "nlazf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nlazf {

std::string to_string(PrecoderKind kind) {
    return kind == PrecoderKind::zf ? "zf" : "nlazf";
}

PrecoderKind precoder_kind_from_string(const std::string& name) {
    if (name == "zf") return PrecoderKind::zf;
    if (name == "nlazf") return PrecoderKind::nlazf;
    throw std::invalid_argument("unknown precoder '" + name + "' (expected zf or nlazf)");
}

bool SimConfig::operator==(const SimConfig& other) const {
    return m == other.m && k == other.k && n_realizations == other.n_realizations &&
           snr_grid_db == other.snr_grid_db && backoff_db == other.backoff_db &&
           pa_nominal.a1() == other.pa_nominal.a1() &&
           pa_nominal.a3() == other.pa_nominal.a3() &&
           pa_tolerance_fraction == other.pa_tolerance_fraction &&
           precoders == other.precoders && tol == other.tol && max_iter == other.max_iter &&
           seed == other.seed && es_total == other.es_total && cap_db == other.cap_db &&
           max_failure_fraction == other.max_failure_fraction &&
           zf_max_condition == other.zf_max_condition;
}

void validate(const SimConfig& config) {
    auto fail = [](const std::string& message) { throw std::invalid_argument(message); };
    if (config.m < 2 || config.m % 2 != 0) fail("M must be even and >= 2");
    if (config.k != 2) fail("K must be 2");
    if (config.n_realizations < 1) fail("n_realizations must be >= 1");
    if (config.snr_grid_db.empty()) fail("snr_grid_db must not be empty");
    if (config.backoff_db.empty()) fail("backoff_db must not be empty");
    for (double b : config.backoff_db)
        if (b < 0.0) fail("backoff_db entries must be >= 0");
    if (!(config.pa_tolerance_fraction >= 0.0 && config.pa_tolerance_fraction < 1.0))
        fail("pa_tolerance_fraction must be in [0, 1)");
    if (config.precoders.empty()) fail("precoders must not be empty");
    if (!(config.tol > 0.0)) fail("tol must be positive");
    if (config.max_iter < 1) fail("max_iter must be >= 1");
    if (!(config.es_total > 0.0)) fail("es_total must be positive");
    if (!(config.cap_db > 0.0)) fail("cap_db must be positive");
    if (!(config.max_failure_fraction >= 0.0 && config.max_failure_fraction <= 1.0))
        fail("max_failure_fraction must be in [0, 1]");
    if (!(config.zf_max_condition > 1.0)) fail("zf_max_condition must be > 1");
}

const SweepCell& SweepResult::cell(PrecoderKind p, double backoff, double snr) const {
    for (const SweepCell& c : cells)
        if (c.precoder == p && c.backoff_db == backoff && c.snr_db == snr) return c;
    throw std::out_of_range("SweepResult: no such cell");
}

Channel draw_channel(int users, int antennas, Rng& rng) {
    Eigen::MatrixXcd h(users, antennas);
    for (;;) {
        for (Eigen::Index k = 0; k < users; ++k)
            for (Eigen::Index m = 0; m < antennas; ++m) h(k, m) = rng.standard_complex_normal();
        try {
            return Channel(h);
        } catch (const std::invalid_argument&) {
            // rank-deficient draw; probability zero under CN(0,1), redraw
        }
    }
}

PAArray perturb_pa(const PACoefficients& nominal, double fraction, int antennas, Rng& rng) {
    detail::require(fraction >= 0.0 && fraction < 1.0, "perturb_pa: fraction must be in [0, 1)");
    std::vector<PACoefficients> coeffs;
    coeffs.reserve(antennas);
    for (int m = 0; m < antennas; ++m) {
        const double u = rng.uniform(-fraction, fraction);
        const double v = rng.uniform(-fraction, fraction);
        coeffs.emplace_back(nominal.a1() * (1.0 + u), nominal.a3() * (1.0 + v));
    }
    return PAArray(std::move(coeffs));
}

PowerAllocation apply_backoff(const PowerAllocation& power, double backoff_db) {
    detail::require(backoff_db >= 0.0, "apply_backoff: backoff_db must be >= 0");
    return power.scaled(std::pow(10.0, -backoff_db / 10.0));
}

namespace {

/// Per-realization outcome for one (precoder, backoff) pair. The SNR axis is
/// applied later: signal/interference/distortion do not depend on N0.
struct PairOutcome {
    bool ok = false;
    int iterations = 0;
    std::vector<SindrTerms> terms;
};

struct RealizationOutcome {
    std::vector<PairOutcome> pairs;  // precoder-major, then backoff
};

RealizationOutcome simulate_realization(const SimConfig& config, std::uint64_t realization) {
    Rng rng(substream_seed(config.seed, realization));
    const Channel h = draw_channel(config.k, config.m, rng);
    const PAArray pa = perturb_pa(config.pa_nominal, config.pa_tolerance_fraction, config.m, rng);
    const PowerAllocation nominal = PowerAllocation::equal_split(config.es_total, config.k);

    RealizationOutcome outcome;
    outcome.pairs.reserve(config.precoders.size() * config.backoff_db.size());
    for (PrecoderKind kind : config.precoders) {
        for (double backoff : config.backoff_db) {
            const PowerAllocation power = apply_backoff(nominal, backoff);
            PairOutcome pair;
            try {
                if (kind == PrecoderKind::zf) {
                    const Precoder w = naive_zf(h, power, config.zf_max_condition);
                    pair.terms = sindr_terms(h, w, pa);
                    pair.ok = true;
                } else {
                    const SolverReport report =
                        nla_zf_block(h, pa, power, config.tol, config.max_iter);
                    pair.iterations = report.iterations;
                    if (report.converged) {
                        pair.terms = sindr_terms(h, report.precoder, pa);
                        pair.ok = true;
                    }
                }
            } catch (const DegenerateChannel&) {
                pair.ok = false;
            }
            outcome.pairs.push_back(std::move(pair));
        }
    }
    return outcome;
}

double clamp_db(double linear, double cap_db, bool& capped) {
    double db = to_db(linear);
    if (!(db <= cap_db)) {  // also catches +inf and NaN from 0/0
        capped = true;
        return cap_db;
    }
    if (db < -cap_db) {
        capped = true;
        return -cap_db;
    }
    return db;
}

}  // namespace

SweepResult run_sweep(const SimConfig& config, int threads) {
    validate(config);
    detail::require(threads >= 1, "run_sweep: threads must be >= 1");

    const int n = config.n_realizations;
    std::vector<RealizationOutcome> slab(n);

    const int workers = std::min(threads, n);
    if (workers == 1) {
        for (int r = 0; r < n; ++r) slab[r] = simulate_realization(config, r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (int r = t; r < n; r += workers)
                    slab[r] = simulate_realization(config, r);
            });
        for (std::thread& thread : pool) thread.join();
    }

    SweepResult result;
    result.config = config;
    const double cap_linear = std::pow(10.0, config.cap_db / 10.0);

    std::size_t pair_index = 0;
    for (PrecoderKind kind : config.precoders) {
        for (double backoff : config.backoff_db) {
            // count convergence once per (precoder, backoff); identical for all SNRs
            int n_ok = 0;
            long long iter_sum = 0;
            for (int r = 0; r < n; ++r) {
                const PairOutcome& pair = slab[r].pairs[pair_index];
                if (pair.ok) {
                    ++n_ok;
                    iter_sum += pair.iterations;
                }
            }
            for (double snr : config.snr_grid_db) {
                SweepCell cell;
                cell.precoder = kind;
                cell.backoff_db = backoff;
                cell.snr_db = snr;
                cell.n_realizations = n;
                cell.n_failures = n - n_ok;
                cell.convergence_rate = static_cast<double>(n_ok) / n;
                cell.mean_iterations = n_ok > 0 ? static_cast<double>(iter_sum) / n_ok : 0.0;

                const double n0 = config.es_total * std::pow(10.0, -snr / 10.0);
                double sum_sindr_db = 0.0, sum_sir_db = 0.0, sum_sdr_db = 0.0;
                double sum_sindr = 0.0, sum_sir = 0.0, sum_sdr = 0.0;
                for (int r = 0; r < n; ++r) {
                    const PairOutcome& pair = slab[r].pairs[pair_index];
                    if (!pair.ok) continue;
                    for (const SindrTerms& t : pair.terms) {
                        const double sindr = t.signal / (t.interference + t.distortion + n0);
                        const double sir = t.interference == 0.0
                                               ? std::numeric_limits<double>::infinity()
                                               : t.signal / t.interference;
                        const double sdr = t.distortion == 0.0
                                               ? std::numeric_limits<double>::infinity()
                                               : t.signal / t.distortion;
                        sum_sindr_db += clamp_db(sindr, config.cap_db, cell.capped);
                        sum_sir_db += clamp_db(sir, config.cap_db, cell.capped);
                        sum_sdr_db += clamp_db(sdr, config.cap_db, cell.capped);
                        sum_sindr += std::min(sindr, cap_linear);
                        sum_sir += std::min(sir, cap_linear);
                        sum_sdr += std::min(sdr, cap_linear);
                    }
                }
                const double count = static_cast<double>(n_ok) * config.k;
                if (count > 0) {
                    cell.mean_sindr_db = sum_sindr_db / count;
                    cell.mean_sir_db = sum_sir_db / count;
                    cell.mean_sdr_db = sum_sdr_db / count;
                    cell.mean_sindr_linear = sum_sindr / count;
                    cell.mean_sir_linear = sum_sir / count;
                    cell.mean_sdr_linear = sum_sdr / count;
                }
                result.cells.push_back(cell);
            }
            ++pair_index;
        }
    }
    return result;
}

}  // namespace nlazf
