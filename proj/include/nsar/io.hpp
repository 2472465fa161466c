#pragma once
/*
Experiment batches from JSON, results to CSV and JSON lines.

Config schema (unknown keys are rejected):

  {
    "setups": [1, 2, 3, 4, 5, 6],      exactly one of "setups" / "means"
    "means": [0.9, 0.5, 0.1],
    "kind": "bernoulli",               or "point-mass"; explicit means only
    "k": 50,                           required with "setups"
    "m": [2, 4],                       integer or list
    "algorithms": [{"name": "nsar", "p": 0.7}, {"name": "sar"}, {"name": "uni"}],
    "trials": 4000,
    "budget": "ceil-H1",               or a positive integer
    "seed": 7,
    "beta_instances": "fixed"          or "per-trial"
  }

One ExperimentConfig is produced per (setup, M, algorithm), in that nesting
order.
*/

#include "nsar/error.hpp"
#include "nsar/harness.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace nsar {

struct ResultRow {
    ExperimentConfig config;
    ErrorEstimate estimate;
};

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error(Errc::io_error, "cannot format number");
    return std::string(buf.data(), end);
}

inline constexpr std::array<std::string_view, 13> csv_columns = {
    "setup_id", "K", "M", "algorithm", "p", "T", "trials", "errors", "p_hat", "ci_low", "ci_high", "master_seed",
    "wall_ms"};

namespace detail {

inline std::string p_field(const AlgorithmSpec& a) {
    return a.kind == AlgorithmKind::uni ? std::string() : format_double(a.p);
}

inline std::string csv_row(const ResultRow& row) {
    const auto& c = row.config;
    const auto& e = row.estimate;
    std::ostringstream out;
    out << c.setup_id << ',' << c.k << ',' << c.m << ',' << c.algorithm.name() << ',' << p_field(c.algorithm) << ','
        << (e.t ? std::to_string(*e.t) : std::string()) << ',' << e.trials << ',' << e.errors << ','
        << format_double(e.p_hat) << ',' << format_double(e.ci_low) << ',' << format_double(e.ci_high) << ','
        << c.master_seed << ',' << format_double(e.wall_ms);
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(Errc::io_error, "write to " + path.string() + " failed");
}

} // namespace detail

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string text;
    for (std::size_t i = 0; i < csv_columns.size(); ++i) {
        if (i) text += ',';
        text += csv_columns[i];
    }
    text += '\n';
    for (const auto& row : rows) text += detail::csv_row(row) + '\n';
    return text;
}

inline nlohmann::json to_json(const ResultRow& row) {
    const auto& c = row.config;
    const auto& e = row.estimate;
    nlohmann::json j;
    j["setup_id"] = c.setup_id;
    j["K"] = c.k;
    j["M"] = c.m;
    j["algorithm"] = c.algorithm.name();
    j["p"] = c.algorithm.kind == AlgorithmKind::uni ? nlohmann::json(nullptr) : nlohmann::json(c.algorithm.p);
    j["T"] = e.t ? nlohmann::json(*e.t) : nlohmann::json(nullptr);
    j["trials"] = e.trials;
    j["errors"] = e.errors;
    j["p_hat"] = e.p_hat;
    j["ci_low"] = e.ci_low;
    j["ci_high"] = e.ci_high;
    j["master_seed"] = c.master_seed;
    j["wall_ms"] = e.wall_ms;
    return j;
}

inline std::string to_jsonl(const std::vector<ResultRow>& rows) {
    std::string text;
    for (const auto& row : rows) text += to_json(row).dump() + '\n';
    return text;
}

/// Writes the CSV and, when `jsonl_path` is non-empty, the JSON-lines mirror.
inline void persist(const std::vector<ResultRow>& rows, const std::filesystem::path& csv_path,
                    const std::filesystem::path& jsonl_path = {}) {
    detail::write_file(csv_path, to_csv(rows));
    if (!jsonl_path.empty()) detail::write_file(jsonl_path, to_jsonl(rows));
}

/// CSV text with the wall_ms column blanked; equal for reruns of the same seed.
inline std::string strip_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        const auto cut = line.rfind(',');
        out += (cut == std::string::npos ? line : line.substr(0, cut)) + '\n';
    }
    return out;
}

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, std::string_view where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key))
            throw Error(Errc::bad_config, "unknown field \"" + key + "\" in " + std::string(where));
}

inline AlgorithmSpec parse_algorithm(nlohmann::json j) {
    if (j.is_string()) j = nlohmann::json{{"name", j}};
    if (!j.is_object()) throw Error(Errc::bad_config, "algorithm entries must be objects or names");
    reject_unknown(j, {"name", "p"}, "algorithm");
    const auto name = j.at("name").get<std::string>();
    if (name == "nsar" || name == "NSAR") {
        if (!j.contains("p")) throw Error(Errc::bad_config, "NSAR needs \"p\"");
        const auto p = j.at("p").get<double>();
        check_exponent(p);
        return AlgorithmSpec::nsar(p);
    }
    if (j.contains("p")) throw Error(Errc::bad_config, "\"p\" is only valid for NSAR");
    if (name == "sar" || name == "SAR") return AlgorithmSpec::sar();
    if (name == "uni" || name == "UNI") return AlgorithmSpec::uni();
    throw Error(Errc::bad_config, "unknown algorithm \"" + name + "\"");
}

inline std::uint64_t unsigned_field(const nlohmann::json& j, std::string_view name) {
    if (!j.is_number_unsigned()) throw Error(Errc::bad_config, "\"" + std::string(name) + "\" must be a non-negative integer");
    return j.get<std::uint64_t>();
}

template <class T>
std::vector<T> one_or_many(const nlohmann::json& j) {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
}

} // namespace detail

inline std::vector<ExperimentConfig> parse_config(std::string_view text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::bad_config, ex.what());
    }
    try {
        if (!root.is_object()) throw Error(Errc::bad_config, "config must be a JSON object");
        detail::reject_unknown(root,
                               {"setups", "means", "kind", "k", "m", "algorithms", "trials", "budget", "seed",
                                "beta_instances"},
                               "config");
        if (root.contains("setups") == root.contains("means"))
            throw Error(Errc::bad_config, "give exactly one of \"setups\" and \"means\"");

        ExperimentConfig base;
        std::vector<int> setups;
        if (root.contains("means")) {
            base.setup_id = 0;
            base.means = root.at("means").get<std::vector<double>>();
            base.k = base.means.size();
            if (root.contains("k") && detail::unsigned_field(root.at("k"), "k") != base.k)
                throw Error(Errc::bad_config, "\"k\" disagrees with the length of \"means\"");
            if (root.contains("kind")) {
                const auto kind = root.at("kind").get<std::string>();
                if (kind == "bernoulli") base.kind = ArmKind::bernoulli;
                else if (kind == "point-mass") base.kind = ArmKind::point_mass;
                else throw Error(Errc::bad_config, "unknown kind \"" + kind + "\"");
            }
            setups = {0};
        } else {
            if (root.contains("kind")) throw Error(Errc::bad_config, "\"kind\" applies to explicit means only");
            setups = detail::one_or_many<int>(root.at("setups"));
            base.k = detail::unsigned_field(root.at("k"), "k");
            for (int id : setups)
                if (id < 1 || id > max_setup_id) throw Error(Errc::bad_setup_id, "setup ids must be 1..6");
        }

        std::vector<std::size_t> ms;
        for (const auto& m : detail::one_or_many<nlohmann::json>(root.at("m"))) ms.push_back(detail::unsigned_field(m, "m"));
        std::vector<AlgorithmSpec> algorithms;
        for (const auto& a : root.at("algorithms")) algorithms.push_back(detail::parse_algorithm(a));
        if (algorithms.empty()) throw Error(Errc::bad_config, "no algorithms given");

        if (root.contains("trials")) base.trials = detail::unsigned_field(root.at("trials"), "trials");
        if (base.trials < 1) throw Error(Errc::bad_config, "trials must be >= 1");
        if (root.contains("seed")) base.master_seed = detail::unsigned_field(root.at("seed"), "seed");
        if (root.contains("budget")) {
            const auto& b = root.at("budget");
            if (b.is_string()) {
                if (b.get<std::string>() != "ceil-H1") throw Error(Errc::bad_config, "budget must be \"ceil-H1\" or an integer");
                base.budget = Budget::from_h1();
            } else {
                base.budget = Budget::exact(detail::unsigned_field(b, "budget"));
            }
        }
        const auto beta_mode = root.value("beta_instances", std::string("fixed"));
        if (beta_mode == "fixed") base.beta_instances = BetaInstances::fixed;
        else if (beta_mode == "per-trial") base.beta_instances = BetaInstances::per_trial;
        else throw Error(Errc::bad_config, "beta_instances must be \"fixed\" or \"per-trial\"");

        std::vector<ExperimentConfig> configs;
        for (int id : setups)
            for (std::size_t m : ms)
                for (const auto& algorithm : algorithms) {
                    ExperimentConfig c = base;
                    c.setup_id = id;
                    c.m = m;
                    c.algorithm = algorithm;
                    configs.push_back(std::move(c));
                }
        return configs;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::bad_config, ex.what());
    }
}

inline std::vector<ExperimentConfig> load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::bad_config, "cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace nsar
