#include "nsar/io.hpp"
#include "nsar/replication.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nsar;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected nsar::Error";
    return Errc::io_error;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::size_t count_fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nsar_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.7), "0.7");
    EXPECT_EQ(format_double(1250.0), "1250");
    EXPECT_EQ(format_double(1.3514824480614946e-06), "1.3514824480614946e-06");
}

TEST(Csv, HeaderAndOneRow) {
    ExperimentConfig c;
    c.trials = 10;
    const auto e = run_experiment(c);
    const auto csv = to_csv({{c, e}});
    EXPECT_EQ(count_lines(csv), 2u);
    const auto header = csv.substr(0, csv.find('\n'));
    EXPECT_EQ(header, "setup_id,K,M,algorithm,p,T,trials,errors,p_hat,ci_low,ci_high,master_seed,wall_ms");
    const auto row = csv.substr(header.size() + 1, csv.size() - header.size() - 2);
    EXPECT_EQ(count_fields(row), csv_columns.size());
    EXPECT_EQ(row.rfind("1,50,2,SAR,1,1250,10,", 0), 0u) << row;
}

TEST(Csv, UniHasEmptyExponent) {
    ExperimentConfig c;
    c.algorithm = AlgorithmSpec::uni();
    c.trials = 5;
    const auto csv = to_csv({{c, run_experiment(c)}});
    EXPECT_NE(csv.find(",UNI,,1250,"), std::string::npos);
    const auto j = to_json({c, run_experiment(c)});
    EXPECT_TRUE(j["p"].is_null());
    EXPECT_EQ(j["T"], 1250);
}

TEST(Csv, RerunIsByteIdenticalWithoutWallTime) {
    ExperimentConfig c;
    c.setup_id = 6;
    c.algorithm = AlgorithmSpec::nsar(1.3);
    c.trials = 200;
    const auto a = to_csv({{c, run_experiment(c, 1)}});
    const auto b = to_csv({{c, run_experiment(c, 4)}});
    EXPECT_EQ(strip_wall_time(a), strip_wall_time(b));
    EXPECT_EQ(count_fields(strip_wall_time(a).substr(0, strip_wall_time(a).find('\n'))), csv_columns.size() - 1);
}

TEST(Persist, WritesCsvAndJsonLines) {
    const auto dir = temp_dir("persist");
    ExperimentConfig c;
    c.trials = 3;
    const std::vector<ResultRow> rows = {{c, run_experiment(c)}, {c, run_experiment(c)}};
    persist(rows, dir / "r.csv", dir / "r.jsonl");
    EXPECT_EQ(count_lines(read_file(dir / "r.csv")), 3u);
    const auto jsonl = read_file(dir / "r.jsonl");
    EXPECT_EQ(count_lines(jsonl), 2u);
    const auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
    EXPECT_EQ(first["algorithm"], "SAR");
    EXPECT_EQ(first["trials"], 3);
    EXPECT_EQ(code_of([&] { persist(rows, dir / "missing" / "r.csv"); }), Errc::io_error);
}

TEST(ParseConfig, MinimalSetupConfig) {
    const auto configs =
        parse_config(R"({"setups": 1, "k": 50, "m": 2, "algorithms": ["sar"], "trials": 100})");
    ASSERT_EQ(configs.size(), 1u);
    EXPECT_EQ(configs[0].setup_id, 1);
    EXPECT_EQ(configs[0].m, 2u);
    EXPECT_EQ(configs[0].algorithm, AlgorithmSpec::sar());
    EXPECT_EQ(configs[0].trials, 100u);
    EXPECT_TRUE(configs[0].budget.ceil_h1);
    EXPECT_EQ(configs[0].master_seed, 7u);
}

TEST(ParseConfig, FullGridOrder) {
    const auto configs = parse_config(R"({
        "setups": [1, 2, 3, 4, 5, 6], "k": 50, "m": [2, 4],
        "algorithms": [{"name": "nsar", "p": 0.7}, {"name": "nsar", "p": 0.85}, {"name": "nsar", "p": 1.1},
                       {"name": "nsar", "p": 1.2}, {"name": "nsar", "p": 1.3}, "sar", "uni"],
        "trials": 4000, "budget": "ceil-H1", "seed": 7})");
    ASSERT_EQ(configs.size(), 84u);
    EXPECT_EQ(configs[0].setup_id, 1);
    EXPECT_EQ(configs[0].m, 2u);
    EXPECT_EQ(configs[0].algorithm, AlgorithmSpec::nsar(0.7));
    EXPECT_EQ(configs[7].m, 4u);
    EXPECT_EQ(configs[14].setup_id, 2);
    EXPECT_EQ(configs[83].algorithm, AlgorithmSpec::uni());
    EXPECT_EQ(configs, benchmark_grid(4000, 7));
}

TEST(ParseConfig, ExplicitMeans) {
    const auto configs = parse_config(
        R"({"means": [0.9, 0.5, 0.1], "kind": "point-mass", "m": 1, "algorithms": [{"name": "nsar", "p": 2}],
            "budget": 12, "trials": 5, "beta_instances": "per-trial"})");
    ASSERT_EQ(configs.size(), 1u);
    EXPECT_EQ(configs[0].setup_id, 0);
    EXPECT_EQ(configs[0].k, 3u);
    EXPECT_EQ(configs[0].kind, ArmKind::point_mass);
    EXPECT_FALSE(configs[0].budget.ceil_h1);
    EXPECT_EQ(configs[0].budget.t, 12u);
    EXPECT_EQ(run_experiment(configs[0]).errors, 0u);
}

TEST(ParseConfig, Errors) {
    const auto bad = [](const char* text) { return code_of([&] { parse_config(text); }); };
    EXPECT_EQ(bad("{"), Errc::bad_config);
    EXPECT_EQ(bad("[]"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": ["sar"], "extra": 1})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": [{"name": "sar", "q": 1}]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "means": [0.5, 0.4], "m": 1, "algorithms": ["sar"]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"k": 50, "m": 2, "algorithms": ["sar"]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 9, "k": 50, "m": 2, "algorithms": ["sar"]})"), Errc::bad_setup_id);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": [{"name": "nsar"}]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": [{"name": "nsar", "p": 2.5}]})"), Errc::bad_exponent);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": [{"name": "sar", "p": 1}]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": ["lucb"]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": []})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": ["sar"], "trials": 0})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": ["sar"], "budget": "H2"})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": 2, "algorithms": ["sar"], "budget": -5})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"setups": 1, "k": 50, "m": "two", "algorithms": ["sar"]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"means": [0.5, 0.4], "k": 3, "m": 1, "algorithms": ["sar"]})"), Errc::bad_config);
    EXPECT_EQ(bad(R"({"means": [0.5, 0.4], "kind": "gauss", "m": 1, "algorithms": ["sar"]})"), Errc::bad_config);
    EXPECT_EQ(code_of([] { load_config("/nonexistent/config.json"); }), Errc::bad_config);
}

TEST(Replication, BenchmarkGridShape) {
    const auto grid = benchmark_grid(4000, 7);
    EXPECT_EQ(grid.size(), 84u);
    std::vector<ResultRow> rows;
    for (const auto& c : grid) rows.push_back({c, estimate_error(1, 10)});
    EXPECT_EQ(count_lines(to_csv(rows)), 85u);
    EXPECT_EQ(panels(rows).size(), 12u);
    for (const auto& [key, panel] : panels(rows)) EXPECT_EQ(panel.size(), 7u);
}

TEST(Replication, WilsonComparison) {
    EXPECT_EQ(compare(estimate_error(10, 1000), estimate_error(100, 1000)), Comparison::lower);
    EXPECT_EQ(compare(estimate_error(100, 1000), estimate_error(10, 1000)), Comparison::higher);
    EXPECT_EQ(compare(estimate_error(100, 1000), estimate_error(105, 1000)), Comparison::overlap);
    EXPECT_EQ(algorithm_label(AlgorithmSpec::nsar(0.85)), "NSAR(p=0.85)");
    EXPECT_EQ(algorithm_label(AlgorithmSpec::uni()), "UNI");
}
