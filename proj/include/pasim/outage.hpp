#ifndef PASIM_OUTAGE_HPP
#define PASIM_OUTAGE_HPP

/// @file
/// Radar outage probability of an activation schedule: exact hypoexponential CDF
/// (closed form and a phase-type evaluation that tolerates repeated rates),
/// Chernoff bounds with their optimal parameter, and Monte Carlo estimation.

#include "pasim/channel.hpp"
#include "pasim/rng.hpp"
#include "pasim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pasim
{

/// Raised when a closed-form evaluation cancels beyond its accuracy budget.
class AccuracyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Exponential rates lambda_t = 1 / (psi(t) Omega) of the per-slot echo SNRs.
struct RateVector
{
    std::vector<double> rates;
    bool near_duplicate = false; ///< some pair closer than the duplicate threshold
};

inline constexpr double duplicate_rate_gap = 1e-8;

/// Smallest |l_i - l_j| / max(l_i, l_j) over all pairs; +inf for fewer than two rates.
inline double min_relative_gap(std::span<const double> rates)
{
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rates.size(); ++i)
        for (std::size_t j = i + 1; j < rates.size(); ++j)
            gap = std::min(gap, std::abs(rates[i] - rates[j]) / std::max(rates[i], rates[j]));
    return gap;
}

inline RateVector rates_from_psi(std::span<const double> psi, double rcs_mean)
{
    RateVector out;
    out.rates.reserve(psi.size());
    for (double g : psi)
    {
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::domain_error("rates_from_psi: radar gain must be positive (schedule blanks the target)");
        out.rates.push_back(1.0 / (g * rcs_mean));
    }
    out.near_duplicate = min_relative_gap(out.rates) < duplicate_rate_gap;
    return out;
}

/// psi(t) for every row of a schedule.
inline std::vector<double> psi_per_slot(const SelectionSchedule& s, const ChannelVector& h_e, const SystemParams& p)
{
    std::vector<double> psi(static_cast<std::size_t>(s.slots()));
    std::vector<double> row(static_cast<std::size_t>(s.positions()));
    const double theta = target_angle(p);
    for (int t = 0; t < s.slots(); ++t)
    {
        for (int m = 0; m < s.positions(); ++m)
            row[static_cast<std::size_t>(m)] = s.weights(t, m);
        psi[static_cast<std::size_t>(t)] = sensing_gain(row, h_e, p, theta);
    }
    return psi;
}

inline RateVector rates_from_schedule(const SelectionSchedule& s, const ChannelVector& h_e, const SystemParams& p)
{
    return rates_from_psi(psi_per_slot(s, h_e, p), p.rcs_mean);
}

// --------------------------------------------------------------------------------------------

namespace detail
{

inline void check_rates(std::span<const double> rates, double x, const char* who)
{
    if (rates.empty())
        throw std::invalid_argument(std::string(who) + ": empty rate vector");
    for (double l : rates)
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::invalid_argument(std::string(who) + ": rates must be positive and finite");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(who) + ": evaluation point must be finite and >= 0");
}

struct DistinctSum
{
    double value;      ///< unclamped 1 - sum
    double abs_terms;  ///< sum of |terms|, drives the cancellation estimate
};

inline DistinctSum distinct_sum(std::span<const double> rates, double x)
{
    double sum = 0.0;
    double abs_terms = 0.0;
    for (std::size_t t = 0; t < rates.size(); ++t)
    {
        // prod_m lambda_m / (lambda_t prod_{m!=t}(lambda_m - lambda_t)) = prod_{m!=t} lambda_m / (lambda_m - lambda_t)
        double coef = 1.0;
        for (std::size_t m = 0; m < rates.size(); ++m)
            if (m != t)
                coef *= rates[m] / (rates[m] - rates[t]);
        const double term = coef * std::exp(-rates[t] * x);
        sum += term;
        abs_terms += std::abs(term);
    }
    return {1.0 - sum, abs_terms};
}

} // namespace detail

/// Closed-form CDF of a sum of independent exponentials with pairwise distinct rates.
inline double hypoexp_cdf_distinct(std::span<const double> rates, double x)
{
    detail::check_rates(rates, x, "hypoexp_cdf_distinct");
    if (min_relative_gap(rates) < duplicate_rate_gap)
        throw std::invalid_argument("hypoexp_cdf_distinct: near-duplicate rates, use hypoexp_cdf_robust");
    const auto [value, abs_terms] = detail::distinct_sum(rates, x);
    (void)abs_terms;
    if (value < -1e-9 || value > 1.0 + 1e-9)
        throw AccuracyError("hypoexp_cdf_distinct: cancellation pushed the CDF outside [0, 1]");
    return std::clamp(value, 0.0, 1.0);
}

/// Phase-type CDF 1 - e1^T exp(xQ) 1 for the bidiagonal generator Q (diagonal -lambda_t,
/// superdiagonal lambda_t). Evaluated by uniformization: the absorption probability is a
/// Poisson mixture of the embedded chain's absorption-within-k-steps probabilities, a sum of
/// nonnegative terms, so the result keeps its relative accuracy even deep in the lower tail.
/// Repeated rates need no special handling.
inline double hypoexp_cdf_robust(std::span<const double> rates, double x)
{
    detail::check_rates(rates, x, "hypoexp_cdf_robust");
    if (x == 0.0)
        return 0.0;
    const std::size_t T = rates.size();
    const double lam_max = *std::max_element(rates.begin(), rates.end());
    const double a = lam_max * x;
    if (a > 1e8)
        throw AccuracyError("hypoexp_cdf_robust: rate spread too stiff for uniformization");

    std::vector<double> advance(T), stay(T);
    for (std::size_t i = 0; i < T; ++i)
    {
        advance[i] = rates[i] / lam_max;
        stay[i] = (lam_max - rates[i]) / lam_max;
    }
    std::vector<double> phase(T, 0.0);
    phase[0] = 1.0;
    double absorbed = 0.0;
    double sum = 0.0;
    const double log_a = std::log(a);
    const auto max_steps = static_cast<std::size_t>(a + 50.0 * std::sqrt(a) + 100.0) + T;
    for (std::size_t k = 1; k <= max_steps; ++k)
    {
        absorbed += phase[T - 1] * advance[T - 1];
        for (std::size_t i = T - 1; i > 0; --i)
            phase[i] = phase[i] * stay[i] + phase[i - 1] * advance[i - 1];
        phase[0] *= stay[0];

        const double kd = static_cast<double>(k);
        const double w = std::exp(-a + kd * log_a - std::lgamma(kd + 1.0));
        sum += w * absorbed;
        if (k >= T && kd > a)
        {
            const double r = a / (kd + 1.0);
            const double tail = w * r / (1.0 - r); // bounds the remaining Poisson mass
            if (tail <= 1e-17 * sum || (sum == 0.0 && tail < std::numeric_limits<double>::min()))
                break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

struct CdfValue
{
    double value;
    bool used_robust_path;
};

/// Closed form when the rates are well separated and its cancellation estimate stays within
/// relative 1e-9 of the result; phase-type evaluation otherwise.
inline CdfValue hypoexp_cdf(std::span<const double> rates, double x)
{
    detail::check_rates(rates, x, "hypoexp_cdf");
    if (min_relative_gap(rates) >= duplicate_rate_gap)
    {
        const auto [value, abs_terms] = detail::distinct_sum(rates, x);
        const double err = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + abs_terms) * rates.size();
        if (value >= 0.0 && value <= 1.0 && err <= 1e-9 * value)
            return {value, false};
    }
    return {hypoexp_cdf_robust(rates, x), true};
}

// --------------------------------------------------------------------------------------------

enum class SurrogateMode
{
    corrected, ///< lower-tail Chernoff bound, E[e^{-sX}]
    paper      ///< upper-tail form E[e^{+sX}], defined while s psi Omega < 1
};

/// Lower-tail Chernoff log-bound s Gamma_th - sum log(1 + s psi Omega); valid for every s >= 0.
inline double chernoff_log_lower(double s, std::span<const double> psi, double rcs_mean, double threshold)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("chernoff_log_lower: s must be >= 0");
    double acc = s * threshold;
    for (double g : psi)
        acc -= std::log1p(s * g * rcs_mean);
    return acc;
}

/// -s Gamma_th - sum log(1 - s psi Omega), defined while s psi Omega < 1 for every slot.
inline double chernoff_log_paper(double s, std::span<const double> psi, double rcs_mean, double threshold)
{
    double acc = -s * threshold;
    for (double g : psi)
    {
        const double u = s * g * rcs_mean;
        if (!(u < 1.0))
            throw std::domain_error("chernoff_log_paper: s psi Omega must stay below 1");
        acc -= std::log1p(-u);
    }
    return acc;
}

struct ChernoffOptimum
{
    double s;
    double log_bound;
};

namespace detail
{

inline ChernoffOptimum optimize_s_lower(std::span<const double> psi, double rcs_mean, double threshold)
{
    double total = 0.0;
    for (double g : psi)
        total += g * rcs_mean;
    if (threshold >= total)
        return {0.0, 0.0};
    // root of h(s) = sum w/(1+s w) - Gamma_th; h(0) > 0, h(T/Gamma_th) < 0
    auto h = [&](double s) {
        double acc = -threshold;
        for (double g : psi)
            acc += g * rcs_mean / (1.0 + s * g * rcs_mean);
        return acc;
    };
    auto dh = [&](double s) {
        double acc = 0.0;
        for (double g : psi)
        {
            const double w = g * rcs_mean;
            acc -= w * w / ((1.0 + s * w) * (1.0 + s * w));
        }
        return acc;
    };
    double lo = 0.0;
    double hi = static_cast<double>(psi.size()) / threshold;
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it)
    {
        const double next = s - h(s) / dh(s);
        if (!(next >= lo && next <= hi))
            break;
        s = next;
    }
    return {s, chernoff_log_lower(s, psi, rcs_mean, threshold)};
}

inline ChernoffOptimum optimize_s_paper(std::span<const double> psi, double rcs_mean, double threshold)
{
    double w_max = 0.0;
    for (double g : psi)
        w_max = std::max(w_max, g * rcs_mean);
    const double upper = (1.0 - 1e-9) / w_max;
    auto f = [&](double s) { return chernoff_log_paper(s, psi, rcs_mean, threshold); };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0;
    double b = upper;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 300 && b - a > 1e-13 * upper; ++it)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double s = 0.5 * (a + b);
    return {s, f(s)};
}

} // namespace detail

/// Minimizer of the Chernoff log-bound over s for fixed gains.
/// Corrected mode returns s* = 0 (bound 1) when Gamma_th >= sum psi Omega, otherwise the
/// stationary point found by bisection. Paper mode runs a golden-section search over
/// (0, (1 - 1e-9) / max psi Omega).
inline ChernoffOptimum optimize_s(std::span<const double> psi, double rcs_mean, double threshold,
                                  SurrogateMode mode = SurrogateMode::corrected)
{
    if (psi.empty())
        throw std::invalid_argument("optimize_s: no slots");
    for (double g : psi)
        if (!(g > 0.0))
            throw std::invalid_argument("optimize_s: radar gains must be positive");
    return mode == SurrogateMode::corrected ? detail::optimize_s_lower(psi, rcs_mean, threshold)
                                            : detail::optimize_s_paper(psi, rcs_mean, threshold);
}

// --------------------------------------------------------------------------------------------

enum class RcsModel
{
    iid,       ///< one RCS draw per slot
    correlated ///< one draw shared by all slots
};

struct McEstimate
{
    double estimate;
    double std_error; ///< binomial standard error sqrt(p(1-p)/n)
};

/// Fraction of samples with sum_t psi(t)|Sigma_e(t)|^2 < Gamma_th. Sample i, slot t draws from
/// counter i*T + t (iid) or i (correlated), so the result is identical for any worker count.
inline McEstimate mc_outage_psi(std::span<const double> psi, double rcs_mean, double threshold,
                                std::uint64_t n_samples, std::uint64_t seed, RcsModel model,
                                unsigned workers = 1)
{
    if (n_samples < 1)
        throw std::invalid_argument("mc_outage: need at least one sample");
    const CounterRng rng(seed);
    const std::uint64_t T = psi.size();
    double psi_sum = 0.0;
    for (double g : psi)
        psi_sum += g;

    auto count_range = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = begin; i < end; ++i)
        {
            double total = 0.0;
            if (model == RcsModel::iid)
                for (std::uint64_t t = 0; t < T; ++t)
                    total += psi[t] * rng.exponential(i * T + t, rcs_mean);
            else
                total = psi_sum * rng.exponential(i, rcs_mean);
            hits += total < threshold ? 1 : 0;
        }
        return hits;
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(n_samples, 64))));
    std::uint64_t hits = 0;
    if (workers == 1)
        hits = count_range(0, n_samples);
    else
    {
        std::vector<std::uint64_t> partial(workers, 0);
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (n_samples + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w)
        {
            const std::uint64_t begin = std::min<std::uint64_t>(n_samples, w * chunk);
            const std::uint64_t end = std::min<std::uint64_t>(n_samples, begin + chunk);
            pool.emplace_back([&, w, begin, end] { partial[w] = count_range(begin, end); });
        }
        pool.clear();
        hits = std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
    }
    const double n = static_cast<double>(n_samples);
    const double p_hat = static_cast<double>(hits) / n;
    return {p_hat, std::sqrt(p_hat * (1.0 - p_hat) / n)};
}

inline McEstimate mc_outage(const SelectionSchedule& s, const ChannelVector& h_e, const SystemParams& p,
                            std::uint64_t n_samples, std::uint64_t seed, RcsModel model, unsigned workers = 1)
{
    const auto psi = psi_per_slot(s, h_e, p);
    return mc_outage_psi(psi, p.rcs_mean, p.snr_threshold, n_samples, seed, model, workers);
}

// --------------------------------------------------------------------------------------------

struct OutageReport
{
    double exact_cdf = 0.0;
    double chernoff_bound = 1.0;
    double chernoff_s = 0.0;
    std::optional<double> mc_estimate;
    std::optional<double> mc_stderr;
    bool used_robust_path = false;
};

struct OutageOptions
{
    RcsModel rcs_model = RcsModel::iid;
    SurrogateMode surrogate = SurrogateMode::corrected;
    std::uint64_t mc_samples = 0; ///< 0 disables Monte Carlo
    std::uint64_t seed = 0;
};

/// Exact, bounded and (optionally) simulated outage for per-slot radar gains. Under the
/// correlated RCS model the accumulated SNR is a single exponential with mean sum psi Omega.
inline OutageReport evaluate_outage(std::span<const double> psi, double rcs_mean, double threshold,
                                    const OutageOptions& opt = {})
{
    OutageReport r;
    std::vector<double> gains(psi.begin(), psi.end());
    if (opt.rcs_model == RcsModel::correlated)
        gains = {std::accumulate(psi.begin(), psi.end(), 0.0)};
    const auto rates = rates_from_psi(gains, rcs_mean);
    const auto cdf = hypoexp_cdf(rates.rates, threshold);
    r.exact_cdf = cdf.value;
    r.used_robust_path = cdf.used_robust_path;
    const auto opt_s = optimize_s(gains, rcs_mean, threshold, opt.surrogate);
    r.chernoff_s = opt_s.s;
    r.chernoff_bound = std::min(1.0, std::exp(opt_s.log_bound));
    if (opt.mc_samples > 0)
    {
        const auto mc = mc_outage_psi(psi, rcs_mean, threshold, opt.mc_samples, opt.seed, opt.rcs_model);
        r.mc_estimate = mc.estimate;
        r.mc_stderr = mc.std_error;
    }
    return r;
}

} // namespace pasim

#endif // PASIM_OUTAGE_HPP
