#ifndef PASIM_BASELINES_HPP
#define PASIM_BASELINES_HPP

/// @file
/// Reference schemes: one fixed PA position for every slot, antenna selection on a
/// conventional half-wavelength ULA, and exhaustive enumeration over position subsets.

#include "pasim/sca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pasim
{

enum class BaselineKind
{
    fixed_pa,
    antenna_selection
};

struct BaselineSpec
{
    BaselineKind kind = BaselineKind::fixed_pa;
    RcsModel rcs_model = RcsModel::correlated; ///< neither baseline changes the look angle across slots
    std::optional<Vec3> ula_center;            ///< [5, 0, pa_height] when unset

    Vec3 center(const SystemParams& p) const { return ula_center.value_or(Vec3{5.0, 0.0, p.pa_height}); }
    static double element_spacing(const SystemParams& p) { return p.wavelength() / 2.0; }
};

/// Outage of T slots sharing one radar gain psi.
inline double repeated_position_outage(double psi, int T, double rcs_mean, double threshold, RcsModel model)
{
    if (!(psi > 0.0))
        return 1.0;
    if (model == RcsModel::correlated)
        return -std::expm1(-threshold / (T * psi * rcs_mean));
    const std::vector<double> rates(static_cast<std::size_t>(T), 1.0 / (psi * rcs_mean));
    return hypoexp_cdf_robust(rates, threshold);
}

/// Best single position used in all T slots, by exhaustive search.
inline OptimizationResult fixed_pa_baseline(const SystemParams& p, const BaselineSpec& spec = {})
{
    const auto pr = make_problem(p);
    const int T = pr.slots();
    const int M = pr.positions();

    int best = -1;
    double best_outage = 2.0;
    int fallback = 0;
    for (int m = 0; m < M; ++m)
    {
        if (pr.position_rate(m) > pr.position_rate(fallback))
            fallback = m;
        if (T * pr.position_rate(m) < p.min_rate - rate_tolerance)
            continue;
        const double out = repeated_position_outage(pr.position_psi(m), T, p.rcs_mean, p.snr_threshold,
                                                    spec.rcs_model);
        if (best < 0 || out < best_outage ||
            (out == best_outage && pr.position_psi(m) > pr.position_psi(best)))
        {
            best = m;
            best_outage = out;
        }
    }

    OptimizationResult res;
    const int chosen = best >= 0 ? best : fallback;
    res.schedule.weights = Eigen::MatrixXd::Zero(T, M);
    res.schedule.weights.col(chosen).setOnes();
    res.schedule.mode = ScheduleMode::binary;
    res.relaxed_schedule = res.schedule;
    res.rcs_model = spec.rcs_model;
    res.slot_psi.assign(static_cast<std::size_t>(T), pr.position_psi(chosen));
    res.achieved_rate = T * pr.position_rate(chosen);
    res.exact_outage = repeated_position_outage(pr.position_psi(chosen), T, p.rcs_mean, p.snr_threshold,
                                                spec.rcs_model);
    res.feasible = best >= 0;
    if (!res.feasible)
        res.diagnostics = "no single position reaches R_min " + std::to_string(p.min_rate);
    return res;
}

/// Element m (1-based) at center + (m - ceil(M/2)) * lambda/2 along x.
inline std::vector<Vec3> ula_positions(const SystemParams& p, const BaselineSpec& spec)
{
    const int M = p.num_positions;
    const Vec3 c = spec.center(p);
    const double spacing = BaselineSpec::element_spacing(p);
    const int mid = (M + 1) / 2;
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(M));
    for (int m = 1; m <= M; ++m)
        out.push_back({c.x + (m - mid) * spacing, c.y, c.z});
    return out;
}

/// Free-space channels of the ULA; both links carry the eta path-loss constant.
inline ScheduleProblem antenna_selection_problem(const SystemParams& p, const BaselineSpec& spec = {})
{
    validate_params(p);
    const auto elements = ula_positions(p, spec);
    ScheduleProblem pr;
    pr.params = p;
    pr.user = free_space_channel(p, elements, p.user_pos, p.eta(), ChannelKind::user);
    pr.target = free_space_channel(p, elements, p.target_pos, p.eta(), ChannelKind::target);
    pr.snr_scale = snr_scale(p);
    pr.sensing_scale = sensing_scale(p);
    return pr;
}

/// One ULA element per slot chosen by the PA optimizer; outage under spec.rcs_model.
inline OptimizationResult antenna_selection_baseline(const SystemParams& p, const BaselineSpec& spec = {},
                                                     const SCAConfig& cfg = {}, std::uint64_t seed = 0)
{
    const auto pr = antenna_selection_problem(p, spec);
    auto res = optimize(pr, cfg, seed);
    res.rcs_model = spec.rcs_model;
    if (spec.rcs_model == RcsModel::correlated)
    {
        const double total = std::accumulate(res.slot_psi.begin(), res.slot_psi.end(), 0.0);
        res.exact_outage = total > 0.0 ? -std::expm1(-p.snr_threshold / (total * p.rcs_mean)) : 1.0;
    }
    return res;
}

inline constexpr double oracle_max_subsets = 2e5;

inline double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// Minimum exact (iid) outage over all T-subsets of positions whose rate sum reaches R_min.
/// Slots take the subset in ascending position order; ties keep the lexicographically first subset.
inline OptimizationResult exhaustive_oracle(const ScheduleProblem& pr)
{
    const int T = pr.slots();
    const int M = pr.positions();
    if (T > M)
        throw std::invalid_argument("exhaustive_oracle: num_slots exceeds num_positions");
    if (binomial(M, T) > oracle_max_subsets)
        throw std::invalid_argument("exhaustive_oracle: C(" + std::to_string(M) + ", " + std::to_string(T) +
                                    ") subsets exceed the enumeration guard; reduce num_positions or num_slots");

    std::vector<double> rate(static_cast<std::size_t>(M)), lambda(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
    {
        rate[static_cast<std::size_t>(m)] = pr.position_rate(m);
        lambda[static_cast<std::size_t>(m)] = 1.0 / (pr.position_psi(m) * pr.params.rcs_mean);
    }

    std::vector<int> subset(static_cast<std::size_t>(T));
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<int> best;
    double best_outage = 2.0;
    std::vector<double> rates(static_cast<std::size_t>(T));
    for (;;)
    {
        double total = 0.0;
        for (int m : subset)
            total += rate[static_cast<std::size_t>(m)];
        if (total >= pr.params.min_rate - rate_tolerance)
        {
            for (int t = 0; t < T; ++t)
                rates[static_cast<std::size_t>(t)] = lambda[static_cast<std::size_t>(subset[static_cast<std::size_t>(t)])];
            const double out = hypoexp_cdf(rates, pr.params.snr_threshold).value;
            if (out < best_outage)
            {
                best_outage = out;
                best = subset;
            }
        }
        // next combination in lexicographic order
        int i = T - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == M - T + i)
            --i;
        if (i < 0)
            break;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < T; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }

    OptimizationResult res;
    res.feasible = !best.empty();
    if (!res.feasible)
    {
        std::vector<int> order(static_cast<std::size_t>(M));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return rate[static_cast<std::size_t>(a)] > rate[static_cast<std::size_t>(b)];
        });
        best.assign(order.begin(), order.begin() + T);
        std::sort(best.begin(), best.end());
        res.diagnostics = "no subset reaches R_min " + std::to_string(pr.params.min_rate);
    }
    res.schedule = SelectionSchedule::from_positions(best, M);
    res.relaxed_schedule = res.schedule;
    res.slot_psi = slot_psi(pr, res.schedule.weights, Relaxation::coherent);
    res.achieved_rate = schedule_rate(pr, res.schedule);
    res.exact_outage = schedule_outage(pr, res.schedule);
    return res;
}

inline OptimizationResult exhaustive_oracle(const SystemParams& p) { return exhaustive_oracle(make_problem(p)); }

} // namespace pasim

#endif // PASIM_BASELINES_HPP
