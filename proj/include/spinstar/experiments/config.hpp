#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "../errors.hpp"
#include "../model.hpp"

namespace spinstar::experiments {

enum class Experiment {
    corr_time,
    corr_fraction_qjsd,
    corr_fraction_mi,
    lhs_time,
    bound_time,
    bound_fraction,
    time_fraction_surface,
    violation_map,
};

struct ExperimentInfo {
    Experiment id;
    std::string_view name;
    std::string_view figure;
    std::string_view summary;
};

inline constexpr std::array<ExperimentInfo, 8> kExperiments{{
    {Experiment::corr_time, "corr_time", "Fig. 1a", "sqrt(QJSD) correlations of system and one unit vs time and c"},
    {Experiment::corr_fraction_qjsd, "corr_fraction_qjsd", "Fig. 1b", "sqrt(QJSD) correlations vs fraction and c at gs = pi/4"},
    {Experiment::corr_fraction_mi, "corr_fraction_mi", "Fig. 1c", "mutual information vs fraction and c at gs = pi/4"},
    {Experiment::lhs_time, "lhs_time", "Fig. 3", "distinguishability revival vs time and theta, gt = pi/2"},
    {Experiment::bound_time, "bound_time", "Fig. 4", "backflow bound terms vs time and theta, whole environment"},
    {Experiment::bound_fraction, "bound_fraction", "Fig. 5", "backflow bound terms vs fraction and theta at gs = pi/4"},
    {Experiment::time_fraction_surface, "time_fraction_surface", "Fig. 6", "environment change and correlations vs time and fraction"},
    {Experiment::violation_map, "violation_map", "Fig. 7", "lhs minus bound vs fraction and theta at gs = pi/4"},
}};

inline const ExperimentInfo& info(Experiment e) {
    return *std::find_if(kExperiments.begin(), kExperiments.end(), [e](const auto& i) { return i.id == e; });
}

inline Experiment parse_experiment(std::string_view name) {
    for (const auto& i : kExperiments)
        if (i.name == name) return i.id;
    throw UsageError("experiment", "unknown experiment '" + std::string(name) + "'");
}

struct ExperimentConfig {
    Experiment experiment = Experiment::corr_fraction_qjsd;
    int n_units = 8;
    double p = 0.5;
    std::vector<double> c_values; ///< empty selects the preset values
    int theta_points = 65;
    int time_points = 129;
    int c_points = 21;               ///< c sweep resolution for the correlation presets
    double theta = std::numbers::pi / 4; ///< second initial state for time_fraction_surface
    std::filesystem::path output_path = "spinstar-out";
    bool emit_plots = false;

    /// c values actually swept: explicit ones, else the preset.
    std::vector<double> effective_c_values() const {
        if (!c_values.empty()) return c_values;
        switch (experiment) {
        case Experiment::corr_time:
        case Experiment::corr_fraction_qjsd:
        case Experiment::corr_fraction_mi: {
            std::vector<double> cs;
            const double top = ModelParams::max_coherence(p);
            for (int i = 0; i < c_points; ++i) cs.push_back(top * i / (c_points - 1));
            return cs;
        }
        case Experiment::lhs_time: return {0.0};
        case Experiment::bound_time: return {0.5, 0.0};
        case Experiment::bound_fraction: return {0.5, 1.0 / 3.0, 0.0};
        case Experiment::time_fraction_surface: return {0.5};
        case Experiment::violation_map: return {1.0 / 3.0};
        }
        return {};
    }

    void validate() const {
        if (n_units < 1 || n_units > kMaxDenseUnits)
            throw ConfigError("n", "must lie in [1, " + std::to_string(kMaxDenseUnits) + "], got " + std::to_string(n_units));
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p", "must lie in [0, 1]");
        if (theta_points < 2) throw ConfigError("theta_points", "needs at least 2 points");
        if (time_points < 2) throw ConfigError("time_points", "needs at least 2 points");
        if (c_points < 2) throw ConfigError("c_points", "needs at least 2 points");
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ConfigError("theta", "must lie in [0, pi]");
        const double top = ModelParams::max_coherence(p);
        for (double c : c_values)
            if (!(std::abs(c) <= top + 1e-12)) {
                std::ostringstream os;
                os << "value " << c << " violates |c| <= sqrt(p(1-p)) = " << top;
                throw ConfigError("c", os.str());
            }
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char ch) { return std::isspace(ch) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

inline double parse_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw UsageError(key, "malformed number '" + value + "'");
    return out;
}

inline int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_real(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(key, "expected an integer, got '" + value + "'");
    return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw UsageError(key, "expected a boolean, got '" + value + "'");
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(key, item));
    }
    if (out.empty()) throw UsageError(key, "empty list");
    return out;
}

inline void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "experiment") cfg.experiment = parse_experiment(value);
    else if (key == "n") cfg.n_units = parse_int(key, value);
    else if (key == "p") cfg.p = parse_real(key, value);
    else if (key == "c") cfg.c_values = parse_reals(key, value);
    else if (key == "out") cfg.output_path = value;
    else if (key == "plots") cfg.emit_plots = parse_bool(key, value);
    else if (key == "theta_points") cfg.theta_points = parse_int(key, value);
    else if (key == "time_points") cfg.time_points = parse_int(key, value);
    else if (key == "c_points") cfg.c_points = parse_int(key, value);
    else if (key == "theta") cfg.theta = parse_real(key, value);
    else throw UsageError(key, "unknown key");
}

} // namespace detail

/// Applies a flat `key = value` config file (# starts a comment) on top of `cfg`.
inline void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config", "cannot read '" + path.string() + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config", path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        detail::apply(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

/// Builds a config from the arguments following `run`. Precedence: flags, then
/// the --config file, then defaults. Throws UsageError naming the offending key.
inline ExperimentConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"spinstar run"};
    app.allow_extras(false);
    std::string positional, experiment, out, config_file;
    std::string n, p, theta_points, time_points, c_points, theta;
    std::vector<std::string> cs;
    bool plots = false;
    app.add_option("experiment_name", positional);
    auto* o_experiment = app.add_option("--experiment", experiment);
    auto* o_n = app.add_option("--n", n);
    auto* o_p = app.add_option("--p", p);
    auto* o_c = app.add_option("--c", cs)->expected(1, -1)->delimiter(',');
    auto* o_out = app.add_option("--out", out);
    auto* o_plots = app.add_flag("--plots", plots);
    app.add_option("--config", config_file);
    auto* o_theta_points = app.add_option("--theta-points", theta_points);
    auto* o_time_points = app.add_option("--time-points", time_points);
    auto* o_c_points = app.add_option("--c-points", c_points);
    auto* o_theta = app.add_option("--theta", theta);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError("", e.what());
    }

    ExperimentConfig cfg;
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    if (!positional.empty() && !experiment.empty() && positional != experiment)
        throw UsageError("experiment", "given twice with different values");
    if (!positional.empty()) cfg.experiment = parse_experiment(positional);
    if (o_experiment->count()) cfg.experiment = parse_experiment(experiment);
    if (o_n->count()) detail::apply(cfg, "n", n);
    if (o_p->count()) detail::apply(cfg, "p", p);
    if (o_c->count()) {
        cfg.c_values.clear();
        for (const auto& c : cs) cfg.c_values.push_back(detail::parse_real("c", c));
    }
    if (o_out->count()) cfg.output_path = out;
    if (o_plots->count()) cfg.emit_plots = true;
    if (o_theta_points->count()) detail::apply(cfg, "theta_points", theta_points);
    if (o_time_points->count()) detail::apply(cfg, "time_points", time_points);
    if (o_c_points->count()) detail::apply(cfg, "c_points", c_points);
    if (o_theta->count()) detail::apply(cfg, "theta", theta);

    try {
        cfg.validate();
    } catch (const UsageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw UsageError(e.key(), e.detail());
    }
    return cfg;
}

} // namespace spinstar::experiments
