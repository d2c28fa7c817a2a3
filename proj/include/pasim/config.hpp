#ifndef PASIM_CONFIG_HPP
#define PASIM_CONFIG_HPP

/// @file
/// Flat `key = value` configuration files (`#` starts a comment) and their mapping onto
/// SystemParams. Every error names the key it concerns.

#include "pasim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pasim
{

class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key))
    {
    }

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

using ConfigMap = std::map<std::string, std::string>;

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;)
    {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

/// Parses config text. Repeating a key within one file is an error.
inline ConfigMap parse_config_text(std::string_view text)
{
    ConfigMap out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not of the form key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty())
            throw ConfigError("", "line " + std::to_string(line_no) + " has an empty key");
        if (out.contains(key))
            throw ConfigError(key, "appears more than once");
        out[key] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

inline ConfigMap load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Applies one `key=value` override; later overrides win.
inline void apply_override(ConfigMap& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError(std::string(assignment), "override must be key=value");
    const std::string key(trim(assignment.substr(0, eq)));
    if (key.empty())
        throw ConfigError("", "override has an empty key");
    cfg[key] = std::string(trim(assignment.substr(eq + 1)));
}

// --------------------------------------------------------------------------------------------

inline double parse_double(const std::string& key, std::string_view text)
{
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
        throw ConfigError(key, "expected a finite number, got '" + std::string(text) + "'");
    return v;
}

inline long long parse_integer(const std::string& key, std::string_view text)
{
    text = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

/// Comma-separated numbers; an empty value is an empty list.
inline std::vector<double> parse_double_list(const std::string& key, std::string_view text)
{
    std::vector<double> out;
    if (trim(text).empty())
        return out;
    for (auto item : split(text, ','))
        out.push_back(parse_double(key, item));
    return out;
}

inline std::vector<long long> parse_integer_list(const std::string& key, std::string_view text)
{
    std::vector<long long> out;
    if (trim(text).empty())
        return out;
    for (auto item : split(text, ','))
        out.push_back(parse_integer(key, item));
    return out;
}

inline Vec3 parse_xyz(const std::string& key, std::string_view text)
{
    const auto parts = split(text, ',');
    if (parts.size() != 3)
        throw ConfigError(key, "expected three comma-separated coordinates");
    return {parse_double(key, parts[0]), parse_double(key, parts[1]), parse_double(key, parts[2])};
}

inline const std::set<std::string>& scenario_keys()
{
    static const std::set<std::string> keys{
        "fc_hz",       "n_eff",          "alpha_np_per_m", "waveguide_length_m", "pa_height_m",
        "num_positions", "num_slots",    "nr_rx_antennas", "noise_dbm",          "rcs_mean_m2",
        "gamma_th_db", "pt_dbm",         "rmin_bps_hz",    "user_xyz",           "target_xyz",
        "feed_xyz",    "rx_array_xyz"};
    return keys;
}

/// Builds SystemParams from the scenario keys; absent keys keep their default values.
/// Keys outside the scenario set are ignored here.
inline SystemParams params_from_config(const ConfigMap& cfg)
{
    SystemParams p = default_params();
    auto get = [&](const char* key) -> const std::string* {
        const auto it = cfg.find(key);
        return it == cfg.end() ? nullptr : &it->second;
    };
    auto positive = [&](const char* key, double& field) {
        if (const auto* v = get(key))
        {
            field = parse_double(key, *v);
            if (!(field > 0.0))
                throw ConfigError(key, "must be positive");
        }
    };
    auto count = [&](const char* key, int& field, int minimum) {
        if (const auto* v = get(key))
        {
            const long long n = parse_integer(key, *v);
            if (n < minimum || n > 1'000'000)
                throw ConfigError(key, "must be an integer >= " + std::to_string(minimum));
            field = static_cast<int>(n);
        }
    };

    positive("fc_hz", p.carrier_frequency);
    positive("n_eff", p.effective_refractive_index);
    if (const auto* v = get("alpha_np_per_m"))
    {
        p.waveguide_attenuation = parse_double("alpha_np_per_m", *v);
        if (p.waveguide_attenuation < 0.0)
            throw ConfigError("alpha_np_per_m", "must be nonnegative");
    }
    positive("waveguide_length_m", p.waveguide_length);
    if (const auto* v = get("pa_height_m"))
        p.pa_height = parse_double("pa_height_m", *v);
    count("num_positions", p.num_positions, 2);
    count("num_slots", p.num_slots, 1);
    count("nr_rx_antennas", p.rx_antennas, 1);
    if (const auto* v = get("noise_dbm"))
        p.noise_power = dbm_to_watts(parse_double("noise_dbm", *v));
    positive("rcs_mean_m2", p.rcs_mean);
    if (const auto* v = get("gamma_th_db"))
        p.snr_threshold = db_to_linear(parse_double("gamma_th_db", *v));
    if (const auto* v = get("pt_dbm"))
        p.transmit_power = dbm_to_watts(parse_double("pt_dbm", *v));
    if (const auto* v = get("rmin_bps_hz"))
    {
        p.min_rate = parse_double("rmin_bps_hz", *v);
        if (p.min_rate < 0.0)
            throw ConfigError("rmin_bps_hz", "must be nonnegative");
    }
    if (const auto* v = get("user_xyz"))
        p.user_pos = parse_xyz("user_xyz", *v);
    if (const auto* v = get("target_xyz"))
        p.target_pos = parse_xyz("target_xyz", *v);
    if (const auto* v = get("feed_xyz"))
        p.feed_pos = parse_xyz("feed_xyz", *v);
    if (const auto* v = get("rx_array_xyz"))
        p.rx_array_pos = parse_xyz("rx_array_xyz", *v);

    if (p.num_slots > p.num_positions)
        throw ConfigError("num_slots", "must not exceed num_positions (" + std::to_string(p.num_positions) + ")");
    p.pa_positions = uniform_pa_grid(p.num_positions, p.waveguide_length, p.pa_height);
    try
    {
        validate_params(p);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("scenario", e.what());
    }
    return p;
}

} // namespace pasim

#endif // PASIM_CONFIG_HPP
