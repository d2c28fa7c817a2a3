#ifndef PASIM_SCA_HPP
#define PASIM_SCA_HPP

/// @file
/// Outage-minimizing PA activation: Chernoff surrogate of the outage, successive convex
/// approximation over relaxed schedules with a penalty that drives them to binary, and a
/// final rounding step that restores the rate constraint when it can.
///
/// Two relaxations of the per-slot gains are supported. `power_sum` evaluates a relaxed row as
/// sum_m |h_m|^2 b_m, which equals |h^H b|^2 whenever the row is one-hot; the sensing term is then
/// convex without further approximation. `coherent` keeps |h^H b|^2 on relaxed rows and replaces
/// it by its tangent plane (a global minorant) inside -log(1 + s Omega psi). Both give a
/// majorize-minimize scheme for the corrected surrogate.

#include "pasim/barrier.hpp"
#include "pasim/channel.hpp"
#include "pasim/outage.hpp"
#include "pasim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pasim
{

/// Slack allowed when checking the accumulated rate against R_min.
inline constexpr double rate_tolerance = 1e-9;

enum class Relaxation
{
    power_sum,
    coherent
};

struct SCAConfig
{
    double sca_tolerance = 1e-4;
    int max_sca_iters = 200;
    double penalty_init = 1e-2;
    double penalty_growth = 5.0;
    int penalty_rounds = 10;
    double binarization_tol = 1e-3;
    double subproblem_kkt_tol = 1e-6;
    SurrogateMode surrogate_mode = SurrogateMode::corrected;
    int s_grid_size = 64;
    Relaxation relaxation = Relaxation::power_sum;
    double slack_cost = 1e6;       ///< price of the elastic slack on the linearized rate constraint
    double s_floor_ratio = 1e-3;   ///< b-steps use s >= s_floor_ratio / sum(psi Omega)
    double init_jitter = 1e-3;     ///< weight of the seeded permutation mixed into the uniform start
    int max_alternations = 20;     ///< s-update / inner-SCA rounds per penalty weight

    void validate() const
    {
        if (!(sca_tolerance > 0.0 && penalty_init > 0.0 && binarization_tol > 0.0 && subproblem_kkt_tol > 0.0))
            throw std::invalid_argument("SCAConfig: tolerances and initial penalty must be positive");
        if (!(penalty_growth > 1.0))
            throw std::invalid_argument("SCAConfig: penalty_growth must exceed 1");
        if (max_sca_iters < 1 || penalty_rounds < 1 || s_grid_size < 1 || max_alternations < 1)
            throw std::invalid_argument("SCAConfig: iteration limits must be positive");
        if (!(init_jitter >= 0.0 && init_jitter < 1.0))
            throw std::invalid_argument("SCAConfig: init_jitter must lie in [0, 1)");
    }
};

/// Channels and constants one scheduling run works on.
struct ScheduleProblem
{
    SystemParams params;
    ChannelVector user;
    ChannelVector target;
    double snr_scale = 0.0;     ///< p_t / sigma^2
    double sensing_scale = 0.0; ///< p_t beta0^2 N_R / (sigma^2 d_er^2)

    int slots() const { return params.num_slots; }
    int positions() const { return static_cast<int>(user.size()); }

    /// Exact per-slot rate when position m is active alone.
    double position_rate(int m) const { return std::log2(1.0 + snr_scale * std::norm(user[m])); }
    double position_psi(int m) const { return sensing_scale * std::norm(target[m]); }
};

inline ScheduleProblem make_problem(const SystemParams& p)
{
    validate_params(p);
    return {p, user_channel(p), target_channel(p), snr_scale(p), sensing_scale(p)};
}

namespace detail
{

inline std::span<const double> row_span(std::vector<double>& buf, const Eigen::MatrixXd& w, int t)
{
    buf.resize(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index m = 0; m < w.cols(); ++m)
        buf[static_cast<std::size_t>(m)] = w(t, m);
    return buf;
}

inline double row_power(const ChannelVector& h, const Eigen::MatrixXd& w, int t, Relaxation relax)
{
    if (relax == Relaxation::power_sum)
    {
        double acc = 0.0;
        for (Eigen::Index m = 0; m < w.cols(); ++m)
            acc += std::norm(h[static_cast<std::size_t>(m)]) * w(t, m);
        return acc;
    }
    cplx z{0.0, 0.0};
    for (Eigen::Index m = 0; m < w.cols(); ++m)
        z += std::conj(h[static_cast<std::size_t>(m)]) * w(t, m);
    return std::norm(z);
}

} // namespace detail

/// psi(t) of every row under the chosen relaxation (exact for binary rows in both).
inline std::vector<double> slot_psi(const ScheduleProblem& pr, const Eigen::MatrixXd& b, Relaxation relax)
{
    std::vector<double> psi(static_cast<std::size_t>(b.rows()));
    for (int t = 0; t < b.rows(); ++t)
        psi[static_cast<std::size_t>(t)] = pr.sensing_scale * detail::row_power(pr.target, b, t, relax);
    return psi;
}

inline std::vector<double> slot_rate(const ScheduleProblem& pr, const Eigen::MatrixXd& b, Relaxation relax)
{
    std::vector<double> r(static_cast<std::size_t>(b.rows()));
    for (int t = 0; t < b.rows(); ++t)
        r[static_cast<std::size_t>(t)] = std::log2(1.0 + pr.snr_scale * detail::row_power(pr.user, b, t, relax));
    return r;
}

/// Exact accumulated rate sum_t log2(1 + gamma(t)).
inline double schedule_rate(const ScheduleProblem& pr, const SelectionSchedule& s)
{
    const auto r = slot_rate(pr, s.weights, Relaxation::coherent);
    return std::accumulate(r.begin(), r.end(), 0.0);
}

// --------------------------------------------------------------------------------------------

/// First-order model value + gradient^T (b - b0) of one slot.
struct SlotTangent
{
    double value = 0.0;
    std::vector<double> gradient;

    double eval(std::span<const double> b, std::span<const double> b0) const
    {
        double acc = value;
        for (std::size_t m = 0; m < gradient.size(); ++m)
            acc += gradient[m] * (b[m] - b0[m]);
        return acc;
    }
};

/// Tangent of each slot's rate at b0. The coherent gradient is the exact derivative of
/// log2(1 + (p_t/sigma^2)|h_u^H b|^2).
inline std::vector<SlotTangent> linearize_rate(const SelectionSchedule& b0, const ScheduleProblem& pr,
                                               Relaxation relax = Relaxation::coherent)
{
    std::vector<SlotTangent> out(static_cast<std::size_t>(b0.slots()));
    std::vector<double> buf;
    for (int t = 0; t < b0.slots(); ++t)
    {
        auto& tan = out[static_cast<std::size_t>(t)];
        const double power = detail::row_power(pr.user, b0.weights, t, relax);
        const double gamma = pr.snr_scale * power;
        tan.value = std::log2(1.0 + gamma);
        if (relax == Relaxation::coherent)
        {
            const auto row = detail::row_span(buf, b0.weights, t);
            const cplx z = effective_gain(row, pr.user);
            tan.gradient.resize(row.size());
            const double scale = 2.0 * pr.snr_scale / ((1.0 + gamma) * std::numbers::ln2);
            for (std::size_t m = 0; m < row.size(); ++m)
                tan.gradient[m] = scale * std::real(z * pr.user[m]);
        }
        else
        {
            tan.gradient.resize(pr.user.size());
            for (std::size_t m = 0; m < pr.user.size(); ++m)
                tan.gradient[m] = pr.snr_scale * std::norm(pr.user[m]) / ((1.0 + gamma) * std::numbers::ln2);
        }
    }
    return out;
}

/// Tangent planes of |h_e^H b(t)|^2 at b0; each is a global minorant of the convex quadratic.
inline std::vector<SlotTangent> linearize_sensing_gain(const SelectionSchedule& b0, const ChannelVector& h_e)
{
    std::vector<SlotTangent> out(static_cast<std::size_t>(b0.slots()));
    std::vector<double> buf;
    for (int t = 0; t < b0.slots(); ++t)
    {
        const auto row = detail::row_span(buf, b0.weights, t);
        const cplx z = effective_gain(row, h_e);
        auto& tan = out[static_cast<std::size_t>(t)];
        tan.value = std::norm(z);
        tan.gradient.resize(row.size());
        for (std::size_t m = 0; m < row.size(); ++m)
            tan.gradient[m] = 2.0 * std::real(z * h_e[m]);
    }
    return out;
}

/// Binarization penalty f(b) = sum b(1 - b) and its tangent at b0, which majorizes f.
struct PenaltyModel
{
    double value = 0.0;
    Eigen::MatrixXd gradient; ///< 1 - 2 b0
    Eigen::MatrixXd anchor;   ///< b0

    double eval_linear(const Eigen::MatrixXd& b) const { return value + (gradient.array() * (b - anchor).array()).sum(); }
};

inline double binarization_penalty(const Eigen::MatrixXd& b) { return (b.array() * (1.0 - b.array())).sum(); }

inline PenaltyModel penalty_and_linearization(const Eigen::MatrixXd& b0)
{
    if ((b0.array() < 0.0).any() || (b0.array() > 1.0).any())
        throw std::invalid_argument("penalty_and_linearization: entries must lie in [0, 1]");
    return {binarization_penalty(b0), (1.0 - 2.0 * b0.array()).matrix(), b0};
}

/// True penalized Chernoff objective at (s, b): corrected mode
/// s Gamma_th - sum log(1 + s Omega psi_t(b)) + rho f(b); paper mode uses the upper-tail form.
inline double penalized_bound(double s, const Eigen::MatrixXd& b, double rho, const ScheduleProblem& pr,
                              const SCAConfig& cfg)
{
    const auto psi = slot_psi(pr, b, cfg.relaxation);
    const double omega = pr.params.rcs_mean;
    const double gth = pr.params.snr_threshold;
    double bound = 0.0;
    if (cfg.surrogate_mode == SurrogateMode::corrected)
        bound = chernoff_log_lower(s, psi, omega, gth);
    else
    {
        bound = -s * gth;
        for (double g : psi)
        {
            const double u = s * g * omega;
            if (!(u < 1.0))
                return std::numeric_limits<double>::infinity();
            bound -= std::log1p(-u);
        }
    }
    return bound + rho * binarization_penalty(b);
}

// --------------------------------------------------------------------------------------------

struct SubproblemResult
{
    SelectionSchedule schedule;
    double slack = 0.0;         ///< elastic violation of the linearized rate constraint
    double surrogate = 0.0;     ///< convex surrogate value at the solution (without slack cost)
    double kkt_residual = 0.0;
    int newton_iterations = 0;
};

namespace detail
{

struct BuiltSubproblem
{
    convex::ConvexProgram prog;
    double constant = 0.0; ///< objective terms dropped from the program
};

inline BuiltSubproblem build_subproblem(double s, const SelectionSchedule& b0, double rho, const SCAConfig& cfg,
                                        const ScheduleProblem& pr)
{
    const int T = b0.slots();
    const int M = b0.positions();
    const int n = T * M + 1;
    const int slack = T * M;
    auto id = [M](int t, int m) { return t * M + m; };
    const double omega = pr.params.rcs_mean;
    const double gth = pr.params.snr_threshold;
    const double a = s * omega * pr.sensing_scale;
    const bool corrected = cfg.surrogate_mode == SurrogateMode::corrected;

    BuiltSubproblem out;
    auto& prog = out.prog;
    prog.n = n;
    prog.linear = Eigen::VectorXd::Zero(n);

    // rho * linearized penalty
    const auto pen = penalty_and_linearization(b0.weights);
    double pen_const = pen.value;
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < M; ++m)
        {
            prog.linear[id(t, m)] = rho * pen.gradient(t, m);
            pen_const -= pen.gradient(t, m) * b0.weights(t, m);
        }
    prog.linear[slack] = cfg.slack_cost;
    out.constant = rho * pen_const + (corrected ? s * gth : -s * gth);

    // sensing term, one per slot
    std::vector<SlotTangent> tangents;
    if (corrected && cfg.relaxation == Relaxation::coherent)
        tangents = linearize_sensing_gain(b0, pr.target);
    for (int t = 0; t < T; ++t)
    {
        convex::AffineForm u;
        u.offset = 1.0;
        if (corrected)
        {
            for (int m = 0; m < M; ++m)
            {
                u.idx.push_back(id(t, m));
                if (cfg.relaxation == Relaxation::power_sum)
                    u.coef.push_back(a * std::norm(pr.target[static_cast<std::size_t>(m)]));
                else
                {
                    const auto& tan = tangents[static_cast<std::size_t>(t)];
                    u.coef.push_back(a * tan.gradient[static_cast<std::size_t>(m)]);
                    u.offset -= a * tan.gradient[static_cast<std::size_t>(m)] * b0.weights(t, m);
                }
            }
            if (cfg.relaxation == Relaxation::coherent)
                u.offset += a * tangents[static_cast<std::size_t>(t)].value;
            auto guard = u;
            guard.offset -= 1e-9;
            prog.objective_logs.push_back(std::move(u));
            prog.inequalities.push_back(std::move(guard));
        }
        else if (cfg.relaxation == Relaxation::power_sum)
        {
            for (int m = 0; m < M; ++m)
            {
                u.idx.push_back(id(t, m));
                u.coef.push_back(-a * std::norm(pr.target[static_cast<std::size_t>(m)]));
            }
            auto c5 = u;
            c5.offset = 1.0 - 1e-6;
            prog.objective_logs.push_back(std::move(u));
            prog.inequalities.push_back(std::move(c5));
        }
        else
        {
            // 1 - a |h^H b|^2 with |h^H b|^2 = (Re h . b)^2 + (Im h . b)^2
            convex::QuadraticCap cap;
            cap.cap = 1.0;
            cap.dirs.assign(2, std::vector<double>(static_cast<std::size_t>(M)));
            const double sa = std::sqrt(a);
            for (int m = 0; m < M; ++m)
            {
                cap.idx.push_back(id(t, m));
                cap.dirs[0][static_cast<std::size_t>(m)] = sa * pr.target[static_cast<std::size_t>(m)].real();
                cap.dirs[1][static_cast<std::size_t>(m)] = sa * pr.target[static_cast<std::size_t>(m)].imag();
            }
            auto c5 = cap;
            c5.cap = 1.0 - 1e-6;
            prog.objective_caps.push_back(std::move(cap));
            prog.cap_constraints.push_back(std::move(c5));
        }
    }

    // b >= 0 (b <= 1 follows from the row sums) and slack >= 0
    for (int i = 0; i < n; ++i)
        prog.inequalities.push_back({{i}, {1.0}, 0.0});

    // each position at most once; with T == M every column is saturated and becomes an equality
    const bool square = T == M;
    if (!square)
        for (int m = 0; m < M; ++m)
        {
            convex::AffineForm col;
            col.offset = 1.0;
            for (int t = 0; t < T; ++t)
            {
                col.idx.push_back(id(t, m));
                col.coef.push_back(-1.0);
            }
            prog.inequalities.push_back(std::move(col));
        }

    // linearized accumulated rate + slack >= R_min
    const auto rate = linearize_rate(b0, pr, cfg.surrogate_mode == SurrogateMode::paper ? Relaxation::coherent
                                                                                        : cfg.relaxation);
    convex::AffineForm rate_row;
    rate_row.offset = -pr.params.min_rate;
    for (int t = 0; t < T; ++t)
    {
        const auto& tan = rate[static_cast<std::size_t>(t)];
        rate_row.offset += tan.value;
        for (int m = 0; m < M; ++m)
        {
            rate_row.idx.push_back(id(t, m));
            rate_row.coef.push_back(tan.gradient[static_cast<std::size_t>(m)]);
            rate_row.offset -= tan.gradient[static_cast<std::size_t>(m)] * b0.weights(t, m);
        }
    }
    rate_row.idx.push_back(slack);
    rate_row.coef.push_back(1.0);
    prog.inequalities.push_back(std::move(rate_row));

    const int eq_rows = T + (square ? M - 1 : 0);
    prog.eq_matrix = Eigen::MatrixXd::Zero(eq_rows, n);
    prog.eq_rhs = Eigen::VectorXd::Ones(eq_rows);
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < M; ++m)
            prog.eq_matrix(t, id(t, m)) = 1.0;
    if (square)
        for (int m = 0; m + 1 < M; ++m)
            for (int t = 0; t < T; ++t)
                prog.eq_matrix(T + m, id(t, m)) = 1.0;
    return out;
}

inline Eigen::VectorXd starting_point(const convex::ConvexProgram& prog, const SelectionSchedule& b0)
{
    const int T = b0.slots();
    const int M = b0.positions();
    const int slack = T * M;
    const auto& rate_row = prog.inequalities.back();
    for (double theta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1.0})
    {
        Eigen::VectorXd x(prog.n);
        for (int t = 0; t < T; ++t)
            for (int m = 0; m < M; ++m)
                x[t * M + m] = (1.0 - theta) * b0.weights(t, m) + theta / M;
        x[slack] = 0.0;
        x[slack] = std::max(0.0, -rate_row.eval(x)) + 1.0;
        if (prog.strictly_feasible(x))
            return x;
    }
    throw std::runtime_error("solve_subproblem: no strictly feasible starting point");
}

} // namespace detail

/// Convex surrogate at fixed s around b0, solved by the barrier method.
inline SubproblemResult solve_subproblem(double s, const SelectionSchedule& b0, double rho, const SCAConfig& cfg,
                                         const ScheduleProblem& pr)
{
    if (b0.slots() != pr.slots() || b0.positions() != pr.positions())
        throw std::invalid_argument("solve_subproblem: schedule dimensions do not match the problem");
    auto built = detail::build_subproblem(s, b0, rho, cfg, pr);
    const auto x0 = detail::starting_point(built.prog, b0);
    const auto sol = convex::solve(built.prog, x0);

    const int T = b0.slots();
    const int M = b0.positions();
    SubproblemResult out;
    out.schedule.weights.resize(T, M);
    out.schedule.mode = ScheduleMode::relaxed;
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < M; ++m)
            out.schedule.weights(t, m) = sol.x[t * M + m];
    out.slack = sol.x[T * M];
    out.surrogate = sol.objective - cfg.slack_cost * out.slack + built.constant;
    out.kkt_residual = sol.kkt_residual;
    out.newton_iterations = sol.newton_iterations;
    return out;
}

struct InnerResult
{
    SelectionSchedule schedule;
    std::vector<double> trace; ///< penalized bound at the start point and after every iteration
    int iterations = 0;
    bool converged = false;
    double max_kkt_residual = 0.0;
};

/// Re-linearize and re-solve at fixed s until the schedule moves less than the tolerance.
inline InnerResult sca_inner(double s, const SelectionSchedule& b_init, double rho, const SCAConfig& cfg,
                             const ScheduleProblem& pr)
{
    InnerResult out;
    out.schedule = b_init;
    out.trace.push_back(penalized_bound(s, b_init.weights, rho, pr, cfg));
    for (int it = 0; it < cfg.max_sca_iters; ++it)
    {
        auto sub = solve_subproblem(s, out.schedule, rho, cfg, pr);
        const double change = (sub.schedule.weights - out.schedule.weights).norm();
        out.schedule = std::move(sub.schedule);
        out.trace.push_back(penalized_bound(s, out.schedule.weights, rho, pr, cfg));
        out.max_kkt_residual = std::max(out.max_kkt_residual, sub.kkt_residual);
        out.iterations = it + 1;
        if (change < cfg.sca_tolerance)
        {
            out.converged = true;
            break;
        }
    }
    return out;
}

// --------------------------------------------------------------------------------------------

struct RoundingResult
{
    SelectionSchedule schedule;
    bool rate_feasible = false;
    int swaps = 0;
};

/// Greedy assignment by descending weight (one position per slot, each position once), then
/// rate repair by swapping a selected position for an unused one while that raises the rate.
inline RoundingResult round_schedule(const SelectionSchedule& b, const ScheduleProblem& pr, int max_swaps = 100)
{
    const int T = b.slots();
    const int M = b.positions();
    if (T > M)
        throw std::invalid_argument("round_schedule: more slots than positions");
    struct Entry
    {
        double w;
        int t;
        int m;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(T * M));
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < M; ++m)
            entries.push_back({b.weights(t, m), t, m});
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.w > y.w; });

    std::vector<int> chosen(static_cast<std::size_t>(T), -1);
    std::vector<bool> used(static_cast<std::size_t>(M), false);
    int assigned = 0;
    for (const auto& e : entries)
    {
        if (assigned == T)
            break;
        if (chosen[static_cast<std::size_t>(e.t)] >= 0 || used[static_cast<std::size_t>(e.m)])
            continue;
        chosen[static_cast<std::size_t>(e.t)] = e.m;
        used[static_cast<std::size_t>(e.m)] = true;
        ++assigned;
    }

    RoundingResult out;
    double total = 0.0;
    for (int m : chosen)
        total += pr.position_rate(m);
    const double r_min = pr.params.min_rate;
    while (total < r_min && out.swaps < max_swaps)
    {
        double best_gain = 0.0;
        int best_t = -1;
        int best_m = -1;
        for (int t = 0; t < T; ++t)
            for (int m = 0; m < M; ++m)
            {
                if (used[static_cast<std::size_t>(m)])
                    continue;
                const double gain = pr.position_rate(m) - pr.position_rate(chosen[static_cast<std::size_t>(t)]);
                if (gain > best_gain)
                {
                    best_gain = gain;
                    best_t = t;
                    best_m = m;
                }
            }
        if (best_t < 0)
            break;
        used[static_cast<std::size_t>(chosen[static_cast<std::size_t>(best_t)])] = false;
        used[static_cast<std::size_t>(best_m)] = true;
        chosen[static_cast<std::size_t>(best_t)] = best_m;
        total += best_gain;
        ++out.swaps;
    }
    out.schedule = SelectionSchedule::from_positions(chosen, M);
    out.rate_feasible = schedule_rate(pr, out.schedule) >= r_min - rate_tolerance;
    return out;
}

// --------------------------------------------------------------------------------------------

struct OptimizationResult
{
    SelectionSchedule schedule;         ///< binary
    SelectionSchedule relaxed_schedule;
    double s_star = 0.0;
    std::vector<double> surrogate_trace; ///< trace of the last inner SCA run
    std::vector<double> slot_psi;        ///< radar gain of each slot under the binary schedule
    RcsModel rcs_model = RcsModel::iid;  ///< model exact_outage was evaluated under
    double exact_outage = 1.0;
    double achieved_rate = 0.0;
    bool feasible = false;
    int iterations = 0;                  ///< subproblems solved in total
    double max_kkt_residual = 0.0;
    std::string diagnostics;
};

/// Uniform start mixed with a seeded partial permutation; feasible for every T <= M.
inline SelectionSchedule initial_schedule(int T, int M, double jitter, std::uint64_t seed)
{
    auto s = SelectionSchedule::uniform(T, M);
    if (jitter <= 0.0)
        return s;
    std::mt19937_64 rng(seed);
    std::vector<int> perm(static_cast<std::size_t>(M));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    s.weights *= (1.0 - jitter);
    for (int t = 0; t < T; ++t)
        s.weights(t, perm[static_cast<std::size_t>(t)]) += jitter;
    return s;
}

inline bool is_binarized(const Eigen::MatrixXd& b, double tol)
{
    return (b.array().min(1.0 - b.array()).abs() <= tol).all();
}

/// Exact iid-RCS outage of a binary schedule.
inline double schedule_outage(const ScheduleProblem& pr, const SelectionSchedule& s)
{
    const auto psi = slot_psi(pr, s.weights, Relaxation::coherent);
    for (double g : psi)
        if (!(g > 0.0))
            return 1.0;
    const auto rates = rates_from_psi(psi, pr.params.rcs_mean);
    return hypoexp_cdf(rates.rates, pr.params.snr_threshold).value;
}

namespace detail
{

inline void finish(OptimizationResult& res, const ScheduleProblem& pr)
{
    const auto rounded = round_schedule(res.relaxed_schedule, pr);
    res.schedule = rounded.schedule;
    res.achieved_rate = schedule_rate(pr, res.schedule);
    res.slot_psi = slot_psi(pr, res.schedule.weights, Relaxation::coherent);
    res.exact_outage = schedule_outage(pr, res.schedule);
    res.feasible = res.achieved_rate >= pr.params.min_rate - rate_tolerance;
    if (!res.feasible)
        res.diagnostics = "rate repair exhausted: achieved " + std::to_string(res.achieved_rate) +
                          " < R_min " + std::to_string(pr.params.min_rate);
}

} // namespace detail

/// Minimize the Chernoff surrogate of the outage subject to the rate constraint, then round.
inline OptimizationResult optimize(const ScheduleProblem& pr, const SCAConfig& cfg, std::uint64_t seed = 0)
{
    cfg.validate();
    const int T = pr.slots();
    const int M = pr.positions();
    if (T > M)
        throw std::invalid_argument("optimize: num_slots exceeds num_positions");
    const double omega = pr.params.rcs_mean;
    const double gth = pr.params.snr_threshold;

    OptimizationResult res;

    // Best achievable binary rate: the T highest per-position rates.
    std::vector<double> rates(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
        rates[static_cast<std::size_t>(m)] = pr.position_rate(m);
    std::vector<double> sorted = rates;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double max_rate = std::accumulate(sorted.begin(), sorted.begin() + T, 0.0);
    if (max_rate < pr.params.min_rate - rate_tolerance)
    {
        // No binary schedule meets R_min; report the rate-maximizing one.
        std::vector<int> order(static_cast<std::size_t>(M));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return rates[static_cast<std::size_t>(x)] > rates[static_cast<std::size_t>(y)];
        });
        order.resize(static_cast<std::size_t>(T));
        res.relaxed_schedule = SelectionSchedule::from_positions(order, M);
        detail::finish(res, pr);
        res.diagnostics = "R_min " + std::to_string(pr.params.min_rate) + " exceeds the best achievable rate " +
                          std::to_string(max_rate);
        return res;
    }

    SelectionSchedule b = initial_schedule(T, M, cfg.init_jitter, seed);
    if (cfg.surrogate_mode == SurrogateMode::corrected)
    {
        double rho = cfg.penalty_init;
        double s_used = 0.0;
        for (int round = 0; round < cfg.penalty_rounds; ++round)
        {
            for (int alt = 0; alt < cfg.max_alternations; ++alt)
            {
                const auto psi = slot_psi(pr, b.weights, cfg.relaxation);
                const double total = std::accumulate(psi.begin(), psi.end(), 0.0) * omega;
                const auto best_s = optimize_s(psi, omega, gth, SurrogateMode::corrected);
                res.s_star = best_s.s;
                s_used = std::max(best_s.s, cfg.s_floor_ratio / total);
                auto inner = sca_inner(s_used, b, rho, cfg, pr);
                res.iterations += inner.iterations;
                res.max_kkt_residual = std::max(res.max_kkt_residual, inner.max_kkt_residual);
                res.surrogate_trace = std::move(inner.trace);
                const double change = (inner.schedule.weights - b.weights).norm();
                b = std::move(inner.schedule);
                if (change < cfg.sca_tolerance)
                    break;
            }
            if (is_binarized(b.weights, cfg.binarization_tol))
                break;
            rho *= cfg.penalty_growth;
        }
        res.relaxed_schedule = b;
    }
    else
    {
        double w_max = 0.0;
        for (int m = 0; m < M; ++m)
            w_max = std::max(w_max, pr.position_psi(m) * omega);
        const double s_upper = (1.0 - 1e-9) / w_max;
        double best = std::numeric_limits<double>::infinity();
        res.relaxed_schedule = b;
        for (int k = 1; k <= cfg.s_grid_size; ++k)
        {
            const double s = s_upper * k / (cfg.s_grid_size + 1.0);
            auto inner = sca_inner(s, b, cfg.penalty_init, cfg, pr);
            res.iterations += inner.iterations;
            res.max_kkt_residual = std::max(res.max_kkt_residual, inner.max_kkt_residual);
            const double f = inner.trace.back();
            if (f < best)
            {
                best = f;
                res.s_star = s;
                res.relaxed_schedule = inner.schedule;
                res.surrogate_trace = std::move(inner.trace);
            }
        }
    }
    detail::finish(res, pr);
    return res;
}

inline OptimizationResult optimize(const SystemParams& p, const SCAConfig& cfg, std::uint64_t seed = 0)
{
    return optimize(make_problem(p), cfg, seed);
}

} // namespace pasim

#endif // PASIM_SCA_HPP
