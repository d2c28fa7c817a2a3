#ifndef PASIM_VALIDATION_HPP
#define PASIM_VALIDATION_HPP

/// @file
/// Self-check suite run by the `validate` command. Each property reports pass/fail with a
/// short detail line. The functions under test can be swapped through ValidationHooks so the
/// suite's own sensitivity can be exercised.

#include "pasim/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace pasim::validation
{

struct ValidationHooks
{
    std::function<double(double, std::span<const double>, double, double)> chernoff_log =
        [](double s, std::span<const double> psi, double omega, double threshold) {
            return chernoff_log_lower(s, psi, omega, threshold);
        };
    std::function<double(std::span<const double>, double)> outage_cdf = [](std::span<const double> rates,
                                                                             double x) {
        return hypoexp_cdf(rates, x).value;
    };
};

struct PropertyResult
{
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationReport
{
    std::vector<PropertyResult> results;

    bool all_passed() const
    {
        return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    }
};

/// Scenario with user and target drawn in a 16 m square under the waveguide and power in [0, 30] dBm.
inline SystemParams random_params(std::mt19937_64& rng, int M, int T, double min_rate)
{
    std::uniform_real_distribution<double> xy(-8.0, 8.0);
    std::uniform_real_distribution<double> dbm(0.0, 30.0);
    SystemParams p = default_params();
    p.num_positions = M;
    p.num_slots = T;
    p.min_rate = min_rate;
    p.pa_positions = uniform_pa_grid(M, p.waveguide_length, p.pa_height);
    p.user_pos = {xy(rng), xy(rng), 0.0};
    p.target_pos = {xy(rng), xy(rng), 0.0};
    p.transmit_power = dbm_to_watts(dbm(rng));
    return p;
}

/// Random binary schedule with distinct positions.
inline SelectionSchedule random_binary_schedule(std::mt19937_64& rng, int T, int M)
{
    std::vector<int> perm(static_cast<std::size_t>(M));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.resize(static_cast<std::size_t>(T));
    return SelectionSchedule::from_positions(perm, M);
}

/// Rates for distinct-vs-robust agreement: log-uniform in [0.1, 10], pairwise relative gap >= 0.25,
/// evaluated where the CDF lies in [0.01, 0.99].
inline std::pair<std::vector<double>, double> separated_rates(std::mt19937_64& rng, int T)
{
    std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
    std::vector<double> rates;
    while (static_cast<int>(rates.size()) < T)
    {
        const double r = std::exp(u(rng));
        bool ok = true;
        for (double q : rates)
            ok = ok && std::abs(r - q) / std::max(r, q) >= 0.25;
        if (ok)
            rates.push_back(r);
    }
    double mean = 0.0;
    for (double r : rates)
        mean += 1.0 / r;
    std::uniform_real_distribution<double> scale(0.2, 2.0);
    double x = scale(rng) * mean;
    for (int k = 0; k < 60; ++k)
    {
        const double f = hypoexp_cdf_robust(rates, x);
        if (f < 0.01)
            x *= 1.5;
        else if (f > 0.99)
            x /= 1.5;
        else
            break;
    }
    return {rates, x};
}

inline double central_difference_error(std::span<const double> row, const ChannelVector& h, const SystemParams& p)
{
    const auto g = rate_gradient(row, h, p);
    std::vector<double> b(row.begin(), row.end());
    const double step = 1e-6;
    double worst = 0.0;
    double scale = 0.0;
    for (double v : g)
        scale = std::max(scale, std::abs(v));
    for (std::size_t m = 0; m < b.size(); ++m)
    {
        const double keep = b[m];
        b[m] = keep + step;
        const double up = comm_rate(comm_snr(b, h, p));
        b[m] = keep - step;
        const double down = comm_rate(comm_snr(b, h, p));
        b[m] = keep;
        const double fd = (up - down) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - g[m]) / std::max(std::abs(g[m]), 1e-3 * scale));
    }
    return worst;
}

namespace detail
{

template <class F>
PropertyResult check(const std::string& name, F&& body)
{
    PropertyResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try
    {
        std::ostringstream detail;
        r.passed = body(detail);
        r.detail = detail.str();
    }
    catch (const std::exception& e)
    {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace detail

/// Runs every property; `on_result` (if set) sees each result as soon as it is known.
inline ValidationReport run_validation(const ValidationHooks& hooks = {},
                                       const std::function<void(const PropertyResult&)>& on_result = {})
{
    ValidationReport report;
    auto add = [&](PropertyResult r) {
        if (on_result)
            on_result(r);
        report.results.push_back(std::move(r));
    };

    add(detail::check("cdf_reference_values", [&](std::ostream& d) {
        const std::vector<double> distinct{1.0, 2.0};
        const std::vector<double> equal{1.0, 1.0};
        const double want_distinct = 1.0 - 2.0 * std::exp(-1.0) + std::exp(-2.0);
        const double want_equal = 1.0 - 2.0 * std::exp(-1.0);
        const double e1 = std::abs(hypoexp_cdf_distinct(distinct, 1.0) - want_distinct);
        const double e2 = std::abs(hypoexp_cdf_robust(equal, 1.0) - want_equal);
        const double e3 = std::abs(hooks.outage_cdf(distinct, 1.0) - want_distinct);
        d << "errors " << e1 << ", " << e2 << ", " << e3;
        return e1 <= 1e-7 && e2 <= 1e-7 && e3 <= 1e-7;
    }));

    add(detail::check("cdf_paths_agree", [&](std::ostream& d) {
        std::mt19937_64 rng(11);
        double worst = 0.0;
        for (int i = 0; i < 300; ++i)
        {
            const auto [rates, x] = separated_rates(rng, 1 + i % 6);
            const double a = hypoexp_cdf_distinct(rates, x);
            const double b = hypoexp_cdf_robust(rates, x);
            worst = std::max(worst, std::abs(a - b) / b);
        }
        d << "max relative difference " << worst;
        return worst <= 1e-9;
    }));

    add(detail::check("cdf_matches_monte_carlo", [&](std::ostream& d) {
        std::mt19937_64 rng(12);
        int agree = 0;
        const int n = 12;
        for (int i = 0; i < n; ++i)
        {
            const int T = 2 << (i % 3);
            const auto p = random_params(rng, 20, T, 0.0);
            const auto pr = make_problem(p);
            const auto s = random_binary_schedule(rng, T, 20);
            const auto psi = slot_psi(pr, s.weights, Relaxation::coherent);
            const auto rates = rates_from_psi(psi, p.rcs_mean);
            const double exact = hooks.outage_cdf(rates.rates, p.snr_threshold);
            const auto mc = mc_outage_psi(psi, p.rcs_mean, p.snr_threshold, 200000, 1000 + i, RcsModel::iid);
            agree += std::abs(exact - mc.estimate) <= std::max(3.29 * mc.std_error, 1e-4) ? 1 : 0;
        }
        d << agree << "/" << n << " within 3.29 standard errors";
        return agree >= n - 1;
    }));

    add(detail::check("chernoff_dominates_exact", [&](std::ostream& d) {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> lg(-2.0, 1.0);
        int violations = 0;
        for (int i = 0; i < 300; ++i)
        {
            const int T = 1 + i % 8;
            std::vector<double> psi(static_cast<std::size_t>(T));
            for (auto& g : psi)
                g = std::pow(10.0, lg(rng));
            const double omega = 1.0;
            const double threshold = std::pow(10.0, lg(rng) + 0.5);
            const auto rates = rates_from_psi(psi, omega);
            const double exact = hypoexp_cdf(rates.rates, threshold).value;
            for (int k = 1; k <= 20; ++k)
            {
                const double s = 0.2 * k / threshold * T;
                const double bound = std::exp(hooks.chernoff_log(s, psi, omega, threshold));
                violations += bound < exact - 1e-9 ? 1 : 0;
            }
        }
        d << violations << " violations in 6000 (instance, s) pairs";
        return violations == 0;
    }));

    add(detail::check("optimal_s_stationary", [&](std::ostream& d) {
        std::mt19937_64 rng(14);
        std::uniform_real_distribution<double> lg(-1.0, 1.0);
        double worst = 0.0;
        bool zero_ok = true;
        for (int i = 0; i < 200; ++i)
        {
            const int T = 1 + i % 8;
            std::vector<double> psi(static_cast<std::size_t>(T));
            double total = 0.0;
            for (auto& g : psi)
                total += (g = std::pow(10.0, lg(rng)));
            const double threshold = (i % 5 == 0) ? 1.5 * total : 0.3 * total;
            const auto opt = optimize_s(psi, 1.0, threshold, SurrogateMode::corrected);
            if (threshold >= total)
            {
                zero_ok = zero_ok && opt.s == 0.0 && std::exp(opt.log_bound) == 1.0;
                continue;
            }
            double deriv = threshold;
            for (double g : psi)
                deriv -= g / (1.0 + opt.s * g);
            worst = std::max(worst, std::abs(deriv) / threshold);
        }
        d << "max relative derivative residual " << worst << (zero_ok ? "" : "; s*=0 case wrong");
        return worst <= 1e-8 && zero_ok;
    }));

    add(detail::check("rate_gradient_matches_finite_difference", [&](std::ostream& d) {
        std::mt19937_64 rng(15);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i)
        {
            const auto p = random_params(rng, 20, 1, 0.0);
            const auto h = user_channel(p);
            std::vector<double> row(20);
            double sum = 0.0;
            for (auto& v : row)
                sum += (v = u(rng));
            for (auto& v : row)
                v /= sum;
            worst = std::max(worst, central_difference_error(row, h, p));
        }
        d << "max relative error " << worst;
        return worst <= 1e-5;
    }));

    add(detail::check("sca_monotone", [&](std::ostream& d) {
        std::mt19937_64 rng(16);
        double worst = 0.0;
        bool converged = true;
        for (int i = 0; i < 4; ++i)
        {
            const auto p = random_params(rng, 10, 3, 0.0);
            const auto pr = make_problem(p);
            SCAConfig cfg;
            cfg.relaxation = i % 2 ? Relaxation::coherent : Relaxation::power_sum;
            const auto b0 = initial_schedule(3, 10, cfg.init_jitter, i);
            const auto psi = slot_psi(pr, b0.weights, cfg.relaxation);
            double total = 0.0;
            for (double g : psi)
                total += g;
            const double s = std::max(optimize_s(psi, p.rcs_mean, p.snr_threshold).s, 1e-3 / total);
            const auto inner = sca_inner(s, b0, cfg.penalty_init, cfg, pr);
            for (std::size_t k = 1; k < inner.trace.size(); ++k)
                worst = std::max(worst, inner.trace[k] - inner.trace[k - 1]);
            converged = converged && inner.converged;
        }
        d << "largest increase " << worst << (converged ? "" : "; not converged");
        return worst <= 1e-8 && converged;
    }));

    add(detail::check("oracle_lower_bounds_optimizer", [&](std::ostream& d) {
        std::mt19937_64 rng(17);
        int bad = 0;
        for (int i = 0; i < 5; ++i)
        {
            const auto p = random_params(rng, 10, 3, i % 2 ? 0.5 : 0.0);
            const auto pr = make_problem(p);
            const auto oracle = exhaustive_oracle(pr);
            const auto opt = optimize(pr, SCAConfig{}, i);
            bad += (opt.exact_outage < oracle.exact_outage - 1e-12 || !opt.feasible) ? 1 : 0;
        }
        d << bad << " of 5 instances below the oracle or infeasible";
        return bad == 0;
    }));

    add(detail::check("schedules_satisfy_constraints", [&](std::ostream& d) {
        auto p = default_params();
        p.num_slots = 3;
        p.num_positions = 10;
        p.pa_positions = uniform_pa_grid(10, p.waveguide_length, p.pa_height);
        const auto prop = optimize(p, SCAConfig{});
        const auto fixed = fixed_pa_baseline(p);
        const auto as = antenna_selection_baseline(p);
        const auto oracle = exhaustive_oracle(p);
        const bool ok = validate_schedule(prop.schedule, p).empty() && validate_schedule(as.schedule, p).empty() &&
                        validate_schedule(oracle.schedule, p).empty() &&
                        validate_schedule(fixed.schedule, p, {1e-9, true}).empty();
        d << (ok ? "all schedules valid" : "constraint violation");
        return ok;
    }));

    add(detail::check("fixed_pa_diversity_loss", [&](std::ostream& d) {
        int bad = 0;
        int checked = 0;
        for (int T = 2; T <= 8; T += 2)
            for (double threshold = 0.01; threshold <= 0.5 * T; threshold *= 1.3)
            {
                const double corr = repeated_position_outage(1.0, T, 1.0, threshold, RcsModel::correlated);
                const double iid = repeated_position_outage(1.0, T, 1.0, threshold, RcsModel::iid);
                if (corr >= 1.0 - std::exp(-1.0))
                    continue;
                ++checked;
                bad += corr > iid ? 0 : 1;
            }
        d << bad << " of " << checked << " grid points without diversity loss";
        return bad == 0 && checked > 0;
    }));

    add(detail::check("scheme_ordering_default", [&](std::ostream& d) {
        const auto p = default_params();
        const double prop = optimize(p, SCAConfig{}).exact_outage;
        const double fixed = fixed_pa_baseline(p).exact_outage;
        const double as = antenna_selection_baseline(p).exact_outage;
        d << "proposed " << prop << ", fixed " << fixed << ", selection " << as;
        return prop <= fixed + 1e-12 && fixed <= as + 1e-12;
    }));

    add(detail::check("monte_carlo_partition_invariant", [&](std::ostream& d) {
        const std::vector<double> psi{0.5, 1.5, 3.0};
        const auto one = mc_outage_psi(psi, 1.0, 2.0, 100001, 5, RcsModel::iid, 1);
        const auto three = mc_outage_psi(psi, 1.0, 2.0, 100001, 5, RcsModel::iid, 3);
        d << one.estimate << " vs " << three.estimate;
        return one.estimate == three.estimate;
    }));

    return report;
}

} // namespace pasim::validation

#endif // PASIM_VALIDATION_HPP
