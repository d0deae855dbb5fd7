#include "nlazf/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nlazf {

using nlohmann::json;

std::string tool_version() {
#ifdef NLAZF_VERSION
    return NLAZF_VERSION;
#else
    return "unknown";
#endif
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

json complex_to_json(cxd z) { return json::array({z.real(), z.imag()}); }

cxd complex_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(key + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key + ": wrong type");
    }
}

std::vector<PrecoderKind> parse_precoders(const json& j) {
    std::vector<PrecoderKind> kinds;
    if (!j.is_array()) throw ConfigError("precoders: expected an array of names");
    for (const json& entry : j) {
        if (!entry.is_string()) throw ConfigError("precoders: expected an array of names");
        try {
            kinds.push_back(precoder_kind_from_string(entry.get<std::string>()));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("precoders: ") + err.what());
        }
    }
    return kinds;
}

std::vector<PrecoderKind> precoders_from_flag(const std::string& flag) {
    if (flag == "both") return {PrecoderKind::zf, PrecoderKind::nlazf};
    try {
        return {precoder_kind_from_string(flag)};
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("precoder: ") + err.what());
    }
}

SimConfig config_from_json(const json& j, const ConfigOverrides& overrides) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    SimConfig defaults;
    SimConfig config;
    config.m = get_or(j, "M", defaults.m);
    config.k = get_or(j, "K", defaults.k);
    config.n_realizations = get_or(j, "n_realizations", defaults.n_realizations);
    config.snr_grid_db = get_or(j, "snr_grid_db", defaults.snr_grid_db);
    config.backoff_db = get_or(j, "backoff_db", defaults.backoff_db);
    if (j.contains("pa")) {
        const json& pa = j.at("pa");
        if (!pa.is_object()) throw ConfigError("pa: expected an object with a1 and a3");
        if (!pa.contains("a1") || !pa.contains("a3"))
            throw ConfigError("pa: both a1 and a3 are required");
        try {
            config.pa_nominal = PACoefficients(complex_from_json(pa.at("a1"), "pa.a1"),
                                               complex_from_json(pa.at("a3"), "pa.a3"));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("pa.a1: ") + err.what());
        }
    }
    config.pa_tolerance_fraction =
        get_or(j, "pa_tolerance_fraction", defaults.pa_tolerance_fraction);
    if (j.contains("precoders")) config.precoders = parse_precoders(j.at("precoders"));
    config.tol = get_or(j, "tol", defaults.tol);
    config.max_iter = get_or(j, "max_iter", defaults.max_iter);
    config.seed = get_or(j, "seed", defaults.seed);
    config.es_total = get_or(j, "es_total", defaults.es_total);
    config.cap_db = get_or(j, "cap_db", defaults.cap_db);
    config.max_failure_fraction =
        get_or(j, "max_failure_fraction", defaults.max_failure_fraction);
    config.zf_max_condition = get_or(j, "zf_max_condition", defaults.zf_max_condition);

    if (overrides.m) config.m = *overrides.m;
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.tol) config.tol = *overrides.tol;
    if (overrides.precoder) config.precoders = precoders_from_flag(*overrides.precoder);

    try {
        validate(config);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    return config;
}

json config_to_json(const SimConfig& config) {
    json j;
    j["M"] = config.m;
    j["K"] = config.k;
    j["n_realizations"] = config.n_realizations;
    j["snr_grid_db"] = config.snr_grid_db;
    j["backoff_db"] = config.backoff_db;
    j["pa"] = {{"a1", complex_to_json(config.pa_nominal.a1())},
               {"a3", complex_to_json(config.pa_nominal.a3())}};
    j["pa_tolerance_fraction"] = config.pa_tolerance_fraction;
    json names = json::array();
    for (PrecoderKind kind : config.precoders) names.push_back(to_string(kind));
    j["precoders"] = names;
    j["tol"] = config.tol;
    j["max_iter"] = config.max_iter;
    j["seed"] = config.seed;
    j["es_total"] = config.es_total;
    j["cap_db"] = config.cap_db;
    j["max_failure_fraction"] = config.max_failure_fraction;
    j["zf_max_condition"] = config.zf_max_condition;
    return j;
}

json parse_json_text(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(what + ": malformed JSON");
    return j;
}

}  // namespace

SimConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
    return parse_config_text(read_text_file(path), overrides);
}

SimConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides) {
    return config_from_json(parse_json_text(text, "config"), overrides);
}

std::string config_to_json_text(const SimConfig& config) { return config_to_json(config).dump(2); }

std::string sweep_csv_text(const SweepResult& result, bool linear_output) {
    std::ostringstream out;
    out << "precoder,backoff_db,snr_db,mean_sindr_db,mean_sir_db,mean_sdr_db,"
           "convergence_rate,mean_iterations,n_realizations,capped";
    if (linear_output) out << ",mean_sindr_linear,mean_sir_linear,mean_sdr_linear";
    out << "\n";
    for (const SweepCell& c : result.cells) {
        out << to_string(c.precoder) << ',' << format_double(c.backoff_db) << ','
            << format_double(c.snr_db) << ',' << format_double(c.mean_sindr_db) << ','
            << format_double(c.mean_sir_db) << ',' << format_double(c.mean_sdr_db) << ','
            << format_double(c.convergence_rate) << ',' << format_double(c.mean_iterations)
            << ',' << c.n_realizations << ',' << (c.capped ? 1 : 0);
        if (linear_output)
            out << ',' << format_double(c.mean_sindr_linear) << ','
                << format_double(c.mean_sir_linear) << ',' << format_double(c.mean_sdr_linear);
        out << "\n";
    }
    return out.str();
}

std::string table_csv_text(const SweepResult& result) {
    // Table-1 layout: one SIR/SDR row per (precoder, backoff); SIR and SDR do
    // not depend on N0, so the SNR average equals any single cell's value.
    std::ostringstream out;
    out << "precoder,backoff_db,mean_sir_db,mean_sdr_db,capped\n";
    for (PrecoderKind kind : result.config.precoders) {
        for (double backoff : result.config.backoff_db) {
            double sir = 0.0, sdr = 0.0;
            bool capped = false;
            int count = 0;
            for (const SweepCell& c : result.cells) {
                if (c.precoder != kind || c.backoff_db != backoff) continue;
                sir += c.mean_sir_db;
                sdr += c.mean_sdr_db;
                capped = capped || c.capped;
                ++count;
            }
            out << to_string(kind) << ',' << format_double(backoff) << ','
                << format_double(sir / count) << ',' << format_double(sdr / count) << ','
                << (capped ? 1 : 0) << "\n";
        }
    }
    return out.str();
}

std::string manifest_text(const SweepResult& result, const ManifestInfo& info) {
    json j;
    j["tool_version"] = tool_version();
    j["config"] = config_to_json(result.config);
    j["threads"] = info.threads;
    j["wall_clock_seconds"] = info.wall_clock_seconds;
    j["artifacts"] = {{"sweep_csv", info.sweep_csv_path}, {"table_csv", info.table_csv_path}};
    json cells = json::array();
    for (const SweepCell& c : result.cells) {
        cells.push_back({{"precoder", to_string(c.precoder)},
                         {"backoff_db", c.backoff_db},
                         {"snr_db", c.snr_db},
                         {"convergence_rate", c.convergence_rate},
                         {"mean_iterations", c.mean_iterations},
                         {"n_realizations", c.n_realizations},
                         {"n_failures", c.n_failures},
                         {"capped", c.capped}});
    }
    j["cells"] = std::move(cells);
    return j.dump(2);
}

SimConfig manifest_config(const std::string& manifest_json_text) {
    const json j = parse_json_text(manifest_json_text, "manifest");
    if (!j.contains("config")) throw ConfigError("manifest: missing config section");
    return config_from_json(j.at("config"), {});
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

SolveSpec parse_solve_config(const std::string& path) {
    return parse_solve_config_text(read_text_file(path));
}

SolveSpec parse_solve_config_text(const std::string& text) {
    const json j = parse_json_text(text, "solve config");
    if (!j.is_object()) throw ConfigError("solve config root must be a JSON object");
    if (!j.contains("channel")) throw ConfigError("channel: required");
    if (!j.contains("pa_array")) throw ConfigError("pa_array: required");

    SolveSpec spec;
    const json& rows = j.at("channel");
    if (!rows.is_array() || rows.empty()) throw ConfigError("channel: expected rows of [re, im]");
    const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
    if (cols == 0) throw ConfigError("channel: expected rows of [re, im]");
    spec.channel.resize(rows.size(), cols);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!rows[k].is_array() || rows[k].size() != cols)
            throw ConfigError("channel: ragged rows");
        for (std::size_t m = 0; m < cols; ++m)
            spec.channel(k, m) = complex_from_json(rows[k][m], "channel entry");
    }

    for (const json& entry : j.at("pa_array")) {
        if (!entry.is_object() || !entry.contains("a1") || !entry.contains("a3"))
            throw ConfigError("pa_array: entries need a1 and a3");
        try {
            spec.pa.emplace_back(complex_from_json(entry.at("a1"), "pa_array.a1"),
                                 complex_from_json(entry.at("a3"), "pa_array.a3"));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("pa_array.a1: ") + err.what());
        }
    }

    spec.power = get_or(j, "power", std::vector<double>(rows.size(), 0.5));
    spec.tol = get_or(j, "tol", spec.tol);
    if (j.contains("max_iter")) spec.max_iter = get_or(j, "max_iter", 100);
    spec.algorithm = get_or(j, "algorithm", spec.algorithm);
    if (spec.algorithm != 1 && spec.algorithm != 2)
        throw ConfigError("algorithm: must be 1 or 2");
    if (j.contains("eps")) spec.eps = get_or(j, "eps", 0.0);
    return spec;
}

}  // namespace nlazf
