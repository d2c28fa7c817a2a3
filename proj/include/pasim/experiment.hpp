#ifndef PASIM_EXPERIMENT_HPP
#define PASIM_EXPERIMENT_HPP

/// @file
/// Experiment tuples (scheme, T, R_min, power, seed), their evaluation, and CSV output.

#include "pasim/baselines.hpp"
#include "pasim/config.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace pasim
{

enum class Scheme
{
    proposed,
    fixed_pa,
    antenna_selection,
    oracle
};

inline std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::proposed: return "proposed";
    case Scheme::fixed_pa: return "fixed_pa";
    case Scheme::antenna_selection: return "antenna_selection";
    case Scheme::oracle: return "oracle";
    }
    return "?";
}

inline std::string to_string(SurrogateMode m) { return m == SurrogateMode::corrected ? "corrected" : "paper"; }

struct ExperimentSpec
{
    SystemParams base = default_params();
    std::vector<Scheme> schemes{Scheme::proposed};
    SurrogateMode surrogate_mode = SurrogateMode::corrected;
    std::vector<double> power_sweep_dbm;
    std::vector<double> rmin_list;
    std::vector<int> t_list;
    std::vector<std::uint64_t> seeds{0};
    std::uint64_t mc_samples = 0;
    std::string output_path;
    SCAConfig sca;
    RcsModel baseline_rcs = RcsModel::correlated;
    bool wall_clock = false; ///< off keeps repeated runs byte-identical
    unsigned workers = 1;
};

inline std::vector<double> default_power_sweep()
{
    std::vector<double> out;
    for (int dbm = 0; dbm <= 40; dbm += 2)
        out.push_back(dbm);
    return out;
}

inline const std::set<std::string>& experiment_keys()
{
    static const std::set<std::string> keys{"scheme",     "surrogate_mode", "mc_samples", "seeds",
                                            "power_sweep_dbm", "rmin_list", "t_list",     "rho0",
                                            "sca_eps",    "output_csv",     "relaxation", "baseline_rcs_model",
                                            "wall_clock", "workers"};
    return keys;
}

/// Builds an experiment from a config map. Absent sweep lists collapse to the scenario's own
/// value, except the power list when `power_sweep` is set (sweep command), which defaults to
/// 0..40 dBm in 2 dB steps. Present-but-empty lists stay empty.
inline ExperimentSpec experiment_from_config(const ConfigMap& cfg, bool power_sweep)
{
    for (const auto& [key, value] : cfg)
        if (!scenario_keys().contains(key) && !experiment_keys().contains(key))
            throw ConfigError(key, "unknown key");

    ExperimentSpec spec;
    spec.base = params_from_config(cfg);
    auto get = [&](const char* key) -> const std::string* {
        const auto it = cfg.find(key);
        return it == cfg.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("scheme"))
    {
        spec.schemes.clear();
        for (auto name : split(*v, ','))
        {
            if (name == "proposed")
                spec.schemes.push_back(Scheme::proposed);
            else if (name == "fixed_pa")
                spec.schemes.push_back(Scheme::fixed_pa);
            else if (name == "antenna_selection")
                spec.schemes.push_back(Scheme::antenna_selection);
            else if (name == "oracle")
                spec.schemes.push_back(Scheme::oracle);
            else if (!name.empty())
                throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "'");
        }
    }
    if (const auto* v = get("surrogate_mode"))
    {
        if (*v == "corrected")
            spec.surrogate_mode = SurrogateMode::corrected;
        else if (*v == "paper")
            spec.surrogate_mode = SurrogateMode::paper;
        else
            throw ConfigError("surrogate_mode", "expected corrected or paper");
    }
    spec.sca.surrogate_mode = spec.surrogate_mode;
    if (const auto* v = get("relaxation"))
    {
        if (*v == "power_sum")
            spec.sca.relaxation = Relaxation::power_sum;
        else if (*v == "coherent")
            spec.sca.relaxation = Relaxation::coherent;
        else
            throw ConfigError("relaxation", "expected power_sum or coherent");
    }
    if (const auto* v = get("baseline_rcs_model"))
    {
        if (*v == "correlated")
            spec.baseline_rcs = RcsModel::correlated;
        else if (*v == "iid")
            spec.baseline_rcs = RcsModel::iid;
        else
            throw ConfigError("baseline_rcs_model", "expected correlated or iid");
    }
    if (const auto* v = get("mc_samples"))
    {
        const auto n = parse_integer("mc_samples", *v);
        if (n < 0)
            throw ConfigError("mc_samples", "must be >= 0");
        spec.mc_samples = static_cast<std::uint64_t>(n);
    }
    if (const auto* v = get("seeds"))
    {
        spec.seeds.clear();
        for (auto s : parse_integer_list("seeds", *v))
        {
            if (s < 0)
                throw ConfigError("seeds", "seeds must be nonnegative");
            spec.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    const double pt_dbm = watts_to_dbm(spec.base.transmit_power);
    if (const auto* v = get("power_sweep_dbm"))
        spec.power_sweep_dbm = parse_double_list("power_sweep_dbm", *v);
    else
        spec.power_sweep_dbm = power_sweep ? default_power_sweep() : std::vector<double>{pt_dbm};
    if (const auto* v = get("rmin_list"))
    {
        spec.rmin_list = parse_double_list("rmin_list", *v);
        for (double r : spec.rmin_list)
            if (r < 0.0)
                throw ConfigError("rmin_list", "rates must be nonnegative");
    }
    else
        spec.rmin_list = {spec.base.min_rate};
    if (const auto* v = get("t_list"))
    {
        for (auto t : parse_integer_list("t_list", *v))
        {
            if (t < 1 || t > spec.base.num_positions)
                throw ConfigError("t_list", "each T must lie in [1, num_positions]");
            spec.t_list.push_back(static_cast<int>(t));
        }
    }
    else
        spec.t_list = {spec.base.num_slots};
    if (const auto* v = get("rho0"))
    {
        spec.sca.penalty_init = parse_double("rho0", *v);
        if (!(spec.sca.penalty_init > 0.0))
            throw ConfigError("rho0", "must be positive");
    }
    if (const auto* v = get("sca_eps"))
    {
        spec.sca.sca_tolerance = parse_double("sca_eps", *v);
        if (!(spec.sca.sca_tolerance > 0.0))
            throw ConfigError("sca_eps", "must be positive");
    }
    if (const auto* v = get("output_csv"))
        spec.output_path = *v;
    if (const auto* v = get("wall_clock"))
    {
        const auto flag = parse_integer("wall_clock", *v);
        if (flag != 0 && flag != 1)
            throw ConfigError("wall_clock", "expected 0 or 1");
        spec.wall_clock = flag == 1;
    }
    if (const auto* v = get("workers"))
    {
        const auto w = parse_integer("workers", *v);
        if (w < 1 || w > 256)
            throw ConfigError("workers", "must lie in [1, 256]");
        spec.workers = static_cast<unsigned>(w);
    }
    return spec;
}

// --------------------------------------------------------------------------------------------

struct ExperimentTuple
{
    Scheme scheme;
    int T;
    double rmin;
    double pt_dbm;
    std::uint64_t seed;
};

struct ExperimentRow
{
    ExperimentTuple tuple;
    SurrogateMode surrogate_mode = SurrogateMode::corrected;
    int M = 0;
    double outage_closed = 1.0;
    double outage_chernoff = 1.0;
    double chernoff_s = 0.0;
    std::optional<double> outage_mc;
    std::optional<double> mc_stderr;
    double rate_sum = 0.0;
    bool feasible = false;
    int sca_iters = 0;
    std::vector<int> selected; ///< 0-based
    std::optional<double> wall_ms;
};

/// Tuples in output order: scheme, T, R_min, power, seed (last varies fastest).
inline std::vector<ExperimentTuple> expand_tuples(const ExperimentSpec& spec)
{
    std::vector<ExperimentTuple> out;
    for (auto scheme : spec.schemes)
        for (int T : spec.t_list)
            for (double r : spec.rmin_list)
                for (double pt : spec.power_sweep_dbm)
                    for (auto seed : spec.seeds)
                        out.push_back({scheme, T, r, pt, seed});
    return out;
}

inline ExperimentRow run_tuple(const ExperimentSpec& spec, const ExperimentTuple& tup)
{
    const auto start = std::chrono::steady_clock::now();
    SystemParams p = spec.base;
    p.num_slots = tup.T;
    p.min_rate = tup.rmin;
    p.transmit_power = dbm_to_watts(tup.pt_dbm);

    OptimizationResult res;
    switch (tup.scheme)
    {
    case Scheme::proposed: res = optimize(p, spec.sca, tup.seed); break;
    case Scheme::fixed_pa: res = fixed_pa_baseline(p, {BaselineKind::fixed_pa, spec.baseline_rcs, {}}); break;
    case Scheme::antenna_selection:
        res = antenna_selection_baseline(p, {BaselineKind::antenna_selection, spec.baseline_rcs, {}}, spec.sca,
                                         tup.seed);
        break;
    case Scheme::oracle: res = exhaustive_oracle(p); break;
    }

    ExperimentRow row;
    row.tuple = tup;
    row.surrogate_mode = spec.surrogate_mode;
    row.M = p.num_positions;
    OutageOptions opt;
    opt.rcs_model = res.rcs_model;
    opt.surrogate = spec.surrogate_mode;
    opt.mc_samples = spec.mc_samples;
    opt.seed = tup.seed;
    bool degenerate = false;
    for (double g : res.slot_psi)
        degenerate = degenerate || !(g > 0.0);
    if (!degenerate)
    {
        const auto rep = evaluate_outage(res.slot_psi, p.rcs_mean, p.snr_threshold, opt);
        row.outage_closed = rep.exact_cdf;
        row.outage_chernoff = rep.chernoff_bound;
        row.chernoff_s = rep.chernoff_s;
        row.outage_mc = rep.mc_estimate;
        row.mc_stderr = rep.mc_stderr;
    }
    else if (spec.mc_samples > 0)
    {
        row.outage_mc = 1.0;
        row.mc_stderr = 0.0;
    }
    row.rate_sum = res.achieved_rate;
    row.feasible = res.feasible;
    row.sca_iters = res.iterations;
    row.selected = res.schedule.selected_positions();
    if (spec.wall_clock)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
}

/// Runs every tuple; with several workers tuples run concurrently but rows keep tuple order.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec)
{
    const auto tuples = expand_tuples(spec);
    std::vector<ExperimentRow> rows(tuples.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(tuples.size())));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < tuples.size(); ++i)
            rows[i] = run_tuple(spec, tuples[i]);
        return rows;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try
                {
                    for (std::size_t i = w; i < tuples.size(); i += workers)
                        rows[i] = run_tuple(spec, tuples[i]);
                }
                catch (...)
                {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

// --------------------------------------------------------------------------------------------

inline const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols{
        "scheme",        "surrogate_mode", "T",          "M",         "rmin_bps_hz",     "pt_dbm",
        "seed",          "outage_closed",  "outage_chernoff", "chernoff_s", "outage_mc", "mc_stderr",
        "rate_sum_bps_hz", "feasible",     "sca_iters",  "selected_positions", "wall_ms"};
    return cols;
}

/// Nine significant digits.
inline std::string format_number(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows)
{
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : rows)
    {
        std::string positions;
        for (std::size_t i = 0; i < r.selected.size(); ++i)
            positions += (i ? ";" : "") + std::to_string(r.selected[i] + 1);
        out << to_string(r.tuple.scheme) << ',' << to_string(r.surrogate_mode) << ',' << r.tuple.T << ',' << r.M
            << ',' << format_number(r.tuple.rmin) << ',' << format_number(r.tuple.pt_dbm) << ',' << r.tuple.seed
            << ',' << format_number(r.outage_closed) << ',' << format_number(r.outage_chernoff) << ','
            << format_number(r.chernoff_s) << ',' << opt(r.outage_mc) << ',' << opt(r.mc_stderr) << ','
            << format_number(r.rate_sum) << ',' << (r.feasible ? "true" : "false") << ',' << r.sca_iters << ','
            << positions << ',' << opt(r.wall_ms) << '\n';
    }
}

} // namespace pasim

#endif // PASIM_EXPERIMENT_HPP
