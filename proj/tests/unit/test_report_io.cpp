#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlazf/report_io.hpp"

using namespace nlazf;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

SweepResult tiny_sweep() {
    SimConfig config;
    config.n_realizations = 8;
    config.snr_grid_db = {0.0, 10.0};
    config.backoff_db = {0.0, 7.0};
    config.seed = 7;
    return run_sweep(config);
}

}  // namespace

TEST_CASE("parse_config") {
    SUBCASE("empty object resolves to the documented defaults") {
        const SimConfig config = parse_config_text("{}");
        const SimConfig defaults;
        CHECK(config == defaults);
        CHECK(config.seed == 12345);  // default seed, echoed in the manifest
    }

    SUBCASE("flag overrides take precedence over file values") {
        ConfigOverrides overrides;
        overrides.m = 2;
        const SimConfig config = parse_config_text(R"({"M": 8})", overrides);
        CHECK(config.m == 2);
    }

    SUBCASE("semantic violations name the key") {
        CHECK_THROWS_WITH_AS(parse_config_text(R"({"M": 3})"),
                             doctest::Contains("M must be even"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config_text(R"({"tol": -1})"),
                             doctest::Contains("tol"), ConfigError);
    }

    SUBCASE("schema violations name the key") {
        CHECK_THROWS_WITH_AS(parse_config_text(R"({"n_realizations": "many"})"),
                             doctest::Contains("n_realizations"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config_text(R"({"pa": {"a1": [1, 0]}})"),
                             doctest::Contains("pa"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config_text(R"({"precoders": ["mrt"]})"),
                             doctest::Contains("precoders"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
    }

    SUBCASE("missing file raises ConfigError") {
        CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
    }

    SUBCASE("precoder flag accepts both") {
        ConfigOverrides overrides;
        overrides.precoder = "both";
        const SimConfig config = parse_config_text(R"({"precoders": ["zf"]})", overrides);
        CHECK(config.precoders.size() == 2);
    }

    SUBCASE("config text round-trips to an identical config") {
        SimConfig config = parse_config_text("{}");
        config.seed = 991;
        config.snr_grid_db = {-3.25, 17.125, 0.1};  // 0.1 is not exactly representable
        config.tol = 3.1e-5;
        const SimConfig back = parse_config_text(config_to_json_text(config));
        CHECK(back == config);
    }
}

TEST_CASE("format_double round-trips at full precision") {
    for (double value : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, 3.0, 0.0}) {
        const std::string text = format_double(value);
        CHECK(std::strtod(text.c_str(), nullptr) == value);
    }
}

TEST_CASE("sweep csv") {
    const SweepResult result = tiny_sweep();

    SUBCASE("cardinality and header") {
        const auto rows = parse_csv(sweep_csv_text(result));
        // 2 precoders x 2 backoffs x 2 snrs + header
        CHECK(rows.size() == 9);
        CHECK(rows[0][0] == "precoder");
        CHECK(rows[0].size() == 10);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() == 10);
    }

    SUBCASE("values parse back exactly") {
        const auto rows = parse_csv(sweep_csv_text(result));
        const SweepCell& cell = result.cells.front();
        CHECK(rows[1][0] == "zf");
        CHECK(std::strtod(rows[1][3].c_str(), nullptr) == cell.mean_sindr_db);
        CHECK(std::strtod(rows[1][4].c_str(), nullptr) == cell.mean_sir_db);
        CHECK(std::strtod(rows[1][5].c_str(), nullptr) == cell.mean_sdr_db);
    }

    SUBCASE("linear columns appear behind the flag") {
        const auto rows = parse_csv(sweep_csv_text(result, true));
        CHECK(rows[0].size() == 13);
        CHECK(rows[0][10] == "mean_sindr_linear");
    }

    SUBCASE("identical runs give byte-identical text") {
        const SweepResult again = tiny_sweep();
        CHECK(sweep_csv_text(result) == sweep_csv_text(again));
    }
}

TEST_CASE("table csv has the summary layout") {
    const SweepResult result = tiny_sweep();
    const auto rows = parse_csv(table_csv_text(result));
    CHECK(rows.size() == 5);  // header + 2 precoders x 2 backoffs
    CHECK(rows[0][0] == "precoder");
    CHECK(rows[1][0] == "zf");
    CHECK(rows[3][0] == "nlazf");
}

TEST_CASE("manifest embeds a round-trippable config") {
    const SweepResult result = tiny_sweep();
    ManifestInfo info;
    info.sweep_csv_path = "out/sweep.csv";
    info.table_csv_path = "out/table.csv";
    info.threads = 3;
    info.wall_clock_seconds = 1.25;
    const std::string manifest = manifest_text(result, info);
    const SimConfig back = manifest_config(manifest);
    CHECK(back == result.config);
    CHECK(manifest.find("tool_version") != std::string::npos);
    CHECK(manifest.find("out/sweep.csv") != std::string::npos);
}

TEST_CASE("write and read text files") {
    const auto path = temp_file("nlazf_io_test.txt");
    write_text_file(path.string(), "hello\n");
    CHECK(read_text_file(path.string()) == "hello\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_text_file("/nonexistent_dir/x.txt", "y"), IoError);
}

TEST_CASE("parse_solve_config") {
    const std::string text = R"({
        "channel": [[[1.0, 0.0], [0.5, -0.2]], [[0.1, 0.3], [1.2, 0.0]]],
        "pa_array": [{"a1": [1.0, 0.0], "a3": [-0.05, 0.01]},
                     {"a1": [0.95, 0.0], "a3": [-0.04, 0.0]}],
        "power": [0.5, 0.5],
        "tol": 1e-5,
        "algorithm": 1,
        "eps": 1e-6
    })";
    const SolveSpec spec = parse_solve_config_text(text);
    CHECK(spec.channel.rows() == 2);
    CHECK(spec.channel(0, 1) == cxd(0.5, -0.2));
    CHECK(spec.pa.size() == 2);
    CHECK(spec.tol == 1e-5);
    CHECK(spec.algorithm == 1);
    CHECK(spec.eps == 1e-6);
    CHECK_FALSE(spec.max_iter.has_value());

    CHECK_THROWS_WITH_AS(parse_solve_config_text(R"({"pa_array": []})"),
                         doctest::Contains("channel"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_solve_config_text(R"({"channel": [[[1,0]]], "pa_array": [],
                          "algorithm": 3})"),
                         doctest::Contains("algorithm"), ConfigError);
}

TEST_CASE("sweep csv cardinality for the standard grid") {
    SimConfig config;  // 11 SNR points, 2 precoders, 2 backoffs
    config.n_realizations = 2;
    config.seed = 5;
    const auto rows = parse_csv(sweep_csv_text(run_sweep(config)));
    CHECK(rows.size() == 45);  // 44 data rows + header
}

TEST_CASE("infinite ratios are capped and flagged") {
    SimConfig config;  // beta = 0: interference and distortion are exactly zero
    config.n_realizations = 3;
    config.snr_grid_db = {10.0};
    config.backoff_db = {0.0};
    config.pa_nominal = PACoefficients({1.0, 0.0}, {0.0, 0.0});
    config.pa_tolerance_fraction = 0.0;
    config.seed = 6;
    const SweepResult result = run_sweep(config);
    for (const SweepCell& cell : result.cells) {
        CHECK(cell.capped);
        // distortion is exactly zero, so SDR reports +inf and caps exactly;
        // interference is a floating-point residual, so SIR sits at or just
        // below the cap
        CHECK(cell.mean_sdr_db == config.cap_db);
        CHECK(cell.mean_sir_db >= config.cap_db - 25.0);
        CHECK(cell.mean_sir_db <= config.cap_db);
    }
    const auto rows = parse_csv(sweep_csv_text(result));
    CHECK(rows[1][9] == "1");
}
