#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pairs/cointegration.hpp"
#include "pairs/csv.hpp"
#include "pairs/error.hpp"
#include "pairs/series.hpp"

namespace pairs {

/// Pipeline settings. Defaults follow the reference strategy: entry z 1,
/// exit z 0, subsets of 2 to 4 instruments, 95% confidence.
struct RunConfig {
    std::vector<std::pair<std::string, std::filesystem::path>> prices;   // file order
    std::vector<std::pair<std::string, std::filesystem::path>> macros;   // file order = weight order
    std::map<std::string, std::filesystem::path> oracles;                // indicator id -> month,direction CSV
    std::map<std::string, double> costs;

    double entry_z = 1.0;
    double exit_z = 0.0;
    std::size_t min_subset_size = 2;
    std::size_t max_subset_size = 4;
    std::size_t max_var_lag = 8;
    DeterministicCase johansen_case = DeterministicCase::RestrictedConstant;
    double confidence = 0.95;
    std::size_t min_overlap = 30;
    std::size_t zscore_window = 0;  // 0: full-sample z-scores

    double flat_epsilon = 0.0;
    std::string train_end = "2007-12";
    std::size_t classifier_epochs = 200;
    double classifier_regularization = 1e-3;

    double grid_step = 0.25;
    double mean_reversion_floor = 0.0;
    std::size_t optimizer_iterations = 60;
    std::size_t optimizer_restarts = 2;

    std::uint64_t seed = 0;
    std::vector<std::string> subset;
    std::filesystem::path out_dir = "out";
};

namespace detail {

inline double config_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!csv::try_parse_double(value, v) || !std::isfinite(v))
        fail(ErrorCode::Validation, "config key '" + key + "' expects a number, got '" + value + "'");
    return v;
}

inline std::uint64_t config_count(const std::string& key, const std::string& value) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorCode::Validation, "config key '" + key + "' expects a non-negative integer, got '" + value + "'");
    return std::stoull(value);
}

inline std::vector<std::string> id_list(const std::string& value) {
    std::vector<std::string> ids;
    for (auto& s : csv::split(value, ',')) {
        if (!s.empty()) ids.push_back(s);
    }
    return ids;
}

}  // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value,
                             const std::filesystem::path& base_dir) {
    using namespace detail;
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    auto suffix = [&](std::string_view prefix) { return key.substr(prefix.size()); };

    if (key.rfind("price.", 0) == 0) {
        c.prices.emplace_back(suffix("price."), resolve(value));
    } else if (key.rfind("macro.", 0) == 0) {
        c.macros.emplace_back(suffix("macro."), resolve(value));
    } else if (key.rfind("oracle.", 0) == 0) {
        c.oracles[suffix("oracle.")] = resolve(value);
    } else if (key.rfind("cost.", 0) == 0) {
        c.costs[suffix("cost.")] = config_real(key, value);
    } else if (key == "entry_z") {
        c.entry_z = config_real(key, value);
    } else if (key == "exit_z") {
        c.exit_z = config_real(key, value);
    } else if (key == "min_subset_size") {
        c.min_subset_size = config_count(key, value);
    } else if (key == "max_subset_size") {
        c.max_subset_size = config_count(key, value);
    } else if (key == "max_var_lag") {
        c.max_var_lag = config_count(key, value);
    } else if (key == "johansen_case") {
        if (value == "restricted_constant") c.johansen_case = DeterministicCase::RestrictedConstant;
        else if (value == "unrestricted_constant") c.johansen_case = DeterministicCase::UnrestrictedConstant;
        else fail(ErrorCode::Validation, "unknown johansen_case '" + value + "'");
    } else if (key == "confidence") {
        c.confidence = config_real(key, value);
    } else if (key == "min_overlap") {
        c.min_overlap = config_count(key, value);
    } else if (key == "zscore_window") {
        c.zscore_window = config_count(key, value);
    } else if (key == "flat_epsilon") {
        c.flat_epsilon = config_real(key, value);
    } else if (key == "train_end") {
        c.train_end = value;
    } else if (key == "classifier_epochs") {
        c.classifier_epochs = config_count(key, value);
    } else if (key == "classifier_regularization") {
        c.classifier_regularization = config_real(key, value);
    } else if (key == "grid_step") {
        c.grid_step = config_real(key, value);
    } else if (key == "mean_reversion_floor") {
        c.mean_reversion_floor = config_real(key, value);
    } else if (key == "optimizer_iterations") {
        c.optimizer_iterations = config_count(key, value);
    } else if (key == "optimizer_restarts") {
        c.optimizer_restarts = config_count(key, value);
    } else if (key == "seed") {
        c.seed = config_count(key, value);
    } else if (key == "subset") {
        c.subset = id_list(value);
    } else if (key == "out") {
        c.out_dir = resolve(value);
    } else {
        fail(ErrorCode::Validation, "unknown config key '" + key + "'");
    }
}

inline void validate_config(const RunConfig& c) {
    if (c.confidence != 0.95) fail(ErrorCode::Validation, "only the 95% confidence level is tabulated");
    if (!(c.entry_z > 0.0) || !(c.exit_z < c.entry_z))
        fail(ErrorCode::Validation, "need entry_z > 0 and exit_z < entry_z");
    if (c.min_subset_size < 2 || c.min_subset_size > c.max_subset_size || c.max_subset_size > 4)
        fail(ErrorCode::Validation, "subset sizes must satisfy 2 <= min <= max <= 4");
    if (c.max_var_lag < 1) fail(ErrorCode::Validation, "max_var_lag must be at least 1");
    if (c.flat_epsilon < 0.0) fail(ErrorCode::Validation, "flat_epsilon must be non-negative");
    if (c.mean_reversion_floor < 0.0 || c.mean_reversion_floor > 1.0)
        fail(ErrorCode::Validation, "mean_reversion_floor must lie in [0, 1]");
    for (const auto& [id, cost] : c.costs) {
        if (!(cost >= 0.0)) fail(ErrorCode::Validation, "cost for " + id + " must be non-negative");
    }
    parse_month(c.train_end);
}

/// Parses `key = value` lines; `#` starts a comment. Relative paths resolve
/// against the config file's directory.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig c;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        start = end == std::string::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorCode::Validation, "config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(csv::trim(trimmed.substr(0, eq)));
        const std::string value(csv::trim(trimmed.substr(eq + 1)));
        set_config_value(c, key, value, base_dir);
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    return parse_config(text, path.parent_path());
}

/// Canonical echo of every effective setting, one `key=value` per line.
inline std::string format_config(const RunConfig& c) {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    for (const auto& [id, p] : c.prices) kv("price." + id, p.generic_string());
    for (const auto& [id, p] : c.macros) kv("macro." + id, p.generic_string());
    for (const auto& [id, p] : c.oracles) kv("oracle." + id, p.generic_string());
    for (const auto& [id, v] : c.costs) kv("cost." + id, format_real(v));
    kv("entry_z", format_real(c.entry_z));
    kv("exit_z", format_real(c.exit_z));
    kv("min_subset_size", std::to_string(c.min_subset_size));
    kv("max_subset_size", std::to_string(c.max_subset_size));
    kv("max_var_lag", std::to_string(c.max_var_lag));
    kv("johansen_case", to_string(c.johansen_case));
    kv("confidence", format_real(c.confidence));
    kv("min_overlap", std::to_string(c.min_overlap));
    kv("zscore_window", std::to_string(c.zscore_window));
    kv("flat_epsilon", format_real(c.flat_epsilon));
    kv("train_end", c.train_end);
    kv("classifier_epochs", std::to_string(c.classifier_epochs));
    kv("classifier_regularization", format_real(c.classifier_regularization));
    kv("grid_step", format_real(c.grid_step));
    kv("mean_reversion_floor", format_real(c.mean_reversion_floor));
    kv("optimizer_iterations", std::to_string(c.optimizer_iterations));
    kv("optimizer_restarts", std::to_string(c.optimizer_restarts));
    kv("seed", std::to_string(c.seed));
    kv("subset", csv::join(c.subset, ","));
    return out;
}

/// 64-bit FNV-1a; stable across platforms, used for manifest fingerprints.
inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Reads an `instrument,cost` CSV into a cost map.
inline std::map<std::string, double> load_cost_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || csv::split(lines.front()) != std::vector<std::string>{"instrument", "cost"})
        fail(ErrorCode::Parse, path.string() + ": line 1: expected header 'instrument,cost'");
    std::map<std::string, double> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const auto f = csv::split(lines[i]);
        double v = 0.0;
        if (f.size() != 2 || f[0].empty() || !csv::try_parse_double(f[1], v))
            fail(ErrorCode::Parse, path.string() + ": line " + std::to_string(i + 1) + ": malformed row");
        if (!(v >= 0.0)) fail(ErrorCode::Validation, path.string() + ": line " + std::to_string(i + 1) + ": negative cost");
        out[f[0]] = v;
    }
    return out;
}

}  // namespace pairs
