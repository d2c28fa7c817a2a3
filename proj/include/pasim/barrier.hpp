#ifndef PASIM_BARRIER_HPP
#define PASIM_BARRIER_HPP

/// @file
/// Small dense log-barrier interior-point solver for the convex subproblems of the
/// scheduler. Objectives are a linear part plus -log terms of affine and concave-quadratic
/// functions; inequalities are of the same two kinds; equalities are linear.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pasim::convex
{

/// u(x) = offset + sum_k coef[k] * x[idx[k]].
struct AffineForm
{
    std::vector<int> idx;
    std::vector<double> coef;
    double offset = 0.0;

    double eval(const Eigen::VectorXd& x) const
    {
        double u = offset;
        for (std::size_t k = 0; k < idx.size(); ++k)
            u += coef[k] * x[idx[k]];
        return u;
    }
};

/// u(x) = cap - sum_j (dir_j . x[idx])^2, concave.
struct QuadraticCap
{
    std::vector<int> idx;
    std::vector<std::vector<double>> dirs;
    double cap = 1.0;

    double project(std::size_t j, const Eigen::VectorXd& x) const
    {
        double acc = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k)
            acc += dirs[j][k] * x[idx[k]];
        return acc;
    }

    double eval(const Eigen::VectorXd& x) const
    {
        double u = cap;
        for (std::size_t j = 0; j < dirs.size(); ++j)
        {
            const double v = project(j, x);
            u -= v * v;
        }
        return u;
    }
};

/// minimize  c^T x - sum log(objective_logs) - sum log(objective_caps)
/// s.t.      inequalities(x) >= 0, cap_constraints(x) >= 0, A x = b.
struct ConvexProgram
{
    int n = 0;
    Eigen::VectorXd linear;
    std::vector<AffineForm> objective_logs;
    std::vector<QuadraticCap> objective_caps;
    std::vector<AffineForm> inequalities;
    std::vector<QuadraticCap> cap_constraints;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;

    int num_inequalities() const { return static_cast<int>(inequalities.size() + cap_constraints.size()); }

    /// True objective (no barrier); +inf outside the domain of the log terms.
    double objective(const Eigen::VectorXd& x) const
    {
        double f = linear.dot(x);
        for (const auto& t : objective_logs)
        {
            const double u = t.eval(x);
            if (!(u > 0.0))
                return std::numeric_limits<double>::infinity();
            f -= std::log(u);
        }
        for (const auto& t : objective_caps)
        {
            const double u = t.eval(x);
            if (!(u > 0.0))
                return std::numeric_limits<double>::infinity();
            f -= std::log(u);
        }
        return f;
    }

    bool strictly_feasible(const Eigen::VectorXd& x) const
    {
        for (const auto& t : inequalities)
            if (!(t.eval(x) > 0.0))
                return false;
        for (const auto& t : cap_constraints)
            if (!(t.eval(x) > 0.0))
                return false;
        return std::isfinite(objective(x));
    }
};

struct BarrierOptions
{
    double mu_initial = 10.0;
    double mu_shrink = 0.1;
    double gap_target = 1e-8;      ///< stop once (#inequalities) * mu <= gap_target
    double centering_tol = 1e-14;  ///< Newton stops at decrement^2 / 2 <= centering_tol * max(mu, 1e-3)
    int max_newton_per_stage = 100;
    double armijo = 0.25;
    double backtrack = 0.5;
};

struct BarrierResult
{
    Eigen::VectorXd x;
    double objective = 0.0;
    double mu = 0.0;
    double kkt_residual = 0.0; ///< (#inequalities) * mu + decrement^2 / 2 at exit, or the equality residual if larger
    int newton_iterations = 0;
    bool converged = false;
};

namespace detail
{

class BarrierFunction
{
public:
    BarrierFunction(const ConvexProgram& prog, double mu) : prog_(prog), mu_(mu) {}

    double value(const Eigen::VectorXd& x) const
    {
        double f = prog_.objective(x);
        if (!std::isfinite(f))
            return f;
        for (const auto& t : prog_.inequalities)
        {
            const double u = t.eval(x);
            if (!(u > 0.0))
                return std::numeric_limits<double>::infinity();
            f -= mu_ * std::log(u);
        }
        for (const auto& t : prog_.cap_constraints)
        {
            const double u = t.eval(x);
            if (!(u > 0.0))
                return std::numeric_limits<double>::infinity();
            f -= mu_ * std::log(u);
        }
        return f;
    }

    void gradient_hessian(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& H) const
    {
        g = prog_.linear;
        H.setZero(prog_.n, prog_.n);
        for (const auto& t : prog_.objective_logs)
            add_affine(t, 1.0, x, g, H);
        for (const auto& t : prog_.objective_caps)
            add_cap(t, 1.0, x, g, H);
        for (const auto& t : prog_.inequalities)
            add_affine(t, mu_, x, g, H);
        for (const auto& t : prog_.cap_constraints)
            add_cap(t, mu_, x, g, H);
    }

private:
    // -w log(u):  grad = -w a / u,  hess = w a a^T / u^2
    static void add_affine(const AffineForm& t, double w, const Eigen::VectorXd& x, Eigen::VectorXd& g,
                           Eigen::MatrixXd& H)
    {
        const double u = t.eval(x);
        const double gs = -w / u;
        const double hs = w / (u * u);
        const std::size_t k = t.idx.size();
        for (std::size_t i = 0; i < k; ++i)
        {
            g[t.idx[i]] += gs * t.coef[i];
            for (std::size_t j = 0; j < k; ++j)
                H(t.idx[i], t.idx[j]) += hs * t.coef[i] * t.coef[j];
        }
    }

    // u = cap - sum_j v_j^2,  grad u = -2 sum_j v_j d_j,  hess u = -2 sum_j d_j d_j^T
    // -w log(u): grad = -w grad u / u, hess = w (-hess u / u + grad u grad u^T / u^2)
    static void add_cap(const QuadraticCap& t, double w, const Eigen::VectorXd& x, Eigen::VectorXd& g,
                        Eigen::MatrixXd& H)
    {
        const double u = t.eval(x);
        const std::size_t k = t.idx.size();
        std::vector<double> du(k, 0.0);
        for (std::size_t j = 0; j < t.dirs.size(); ++j)
        {
            const double v = t.project(j, x);
            for (std::size_t i = 0; i < k; ++i)
                du[i] -= 2.0 * v * t.dirs[j][i];
        }
        for (std::size_t i = 0; i < k; ++i)
            g[t.idx[i]] -= w * du[i] / u;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t l = 0; l < k; ++l)
            {
                double curv = 0.0;
                for (std::size_t j = 0; j < t.dirs.size(); ++j)
                    curv += t.dirs[j][i] * t.dirs[j][l];
                H(t.idx[i], t.idx[l]) += w * (2.0 * curv / u + du[i] * du[l] / (u * u));
            }
    }

    const ConvexProgram& prog_;
    double mu_;
};

} // namespace detail

/// Barrier method from a strictly feasible x0 with A x0 = b.
inline BarrierResult solve(const ConvexProgram& prog, Eigen::VectorXd x0, const BarrierOptions& opt = {})
{
    if (x0.size() != prog.n || prog.linear.size() != prog.n)
        throw std::invalid_argument("barrier::solve: dimension mismatch");
    if (!prog.strictly_feasible(x0))
        throw std::invalid_argument("barrier::solve: starting point is not strictly feasible");

    const Eigen::MatrixXd& A = prog.eq_matrix;
    const auto p = A.rows();
    BarrierResult res;
    res.x = std::move(x0);

    Eigen::VectorXd g(prog.n);
    Eigen::MatrixXd H(prog.n, prog.n);
    const int m = prog.num_inequalities();
    const Eigen::LDLT<Eigen::MatrixXd> eq_gram(A * A.transpose());
    double mu = m > 0 ? opt.mu_initial : 0.0;
    bool all_centered = true;
    double last_decrement2 = 0.0;

    for (;;)
    {
        const detail::BarrierFunction phi(prog, mu);
        double value = phi.value(res.x);
        bool centered = false;
        for (int it = 0; it < opt.max_newton_per_stage; ++it)
        {
            phi.gradient_hessian(res.x, g, H);
            ++res.newton_iterations;

            // Jacobi scaling keeps the factorization stable when barrier curvature spans many decades.
            const Eigen::VectorXd d = H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
            Eigen::MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();
            Eigen::LLT<Eigen::MatrixXd> llt(Hs);
            // Rank-one barrier terms can swamp the diagonal after scaling; a small ridge restores definiteness.
            for (double ridge = 1e-14; llt.info() != Eigen::Success; ridge *= 100.0)
            {
                if (ridge > 1e-2)
                    throw std::runtime_error("barrier::solve: Hessian is not positive definite");
                Hs.diagonal().array() += ridge;
                llt.compute(Hs);
            }

            // Newton step of the equality-constrained problem via the Schur complement.
            const Eigen::VectorXd gs = d.cwiseProduct(g);
            Eigen::VectorXd step = -llt.solve(gs);
            if (p > 0)
            {
                const Eigen::MatrixXd As = A * d.asDiagonal();
                const Eigen::MatrixXd Y = llt.solve(As.transpose());
                const Eigen::MatrixXd S = As * Y;
                const Eigen::VectorXd nu = S.ldlt().solve(As * step);
                step -= Y * nu;
            }
            step = d.cwiseProduct(step);
            // Ill-conditioned Hessians leak into A step; remove that component so A x stays on b.
            if (p > 0)
                step -= A.transpose() * eq_gram.solve(A * step);

            const double slope = g.dot(step);
            const double decrement2 = -slope;
            last_decrement2 = std::max(decrement2, 0.0);
            if (decrement2 / 2.0 <= opt.centering_tol * std::max(mu, 1e-3))
            {
                centered = true;
                break;
            }

            double t = 1.0;
            Eigen::VectorXd trial = res.x + step;
            double trial_value = phi.value(trial);
            int halvings = 0;
            while (!(trial_value <= value + opt.armijo * t * slope) && halvings < 80)
            {
                t *= opt.backtrack;
                trial = res.x + t * step;
                trial_value = phi.value(trial);
                ++halvings;
            }
            if (!(trial_value <= value + opt.armijo * t * slope))
            {
                // No representable decrease left; the point is centered to working precision.
                centered = true;
                break;
            }
            res.x = std::move(trial);
            value = trial_value;
        }
        all_centered = all_centered && centered;
        if (m == 0 || m * mu <= opt.gap_target)
            break;
        mu *= opt.mu_shrink;
    }

    // Suboptimality certificate: duality gap of the last stage plus the remaining Newton decrement.
    double residual = m * mu + last_decrement2 / 2.0;
    if (p > 0)
        residual = std::max(residual, (A * res.x - prog.eq_rhs).lpNorm<Eigen::Infinity>());
    res.kkt_residual = residual;
    res.mu = mu;
    res.objective = prog.objective(res.x);
    res.converged = all_centered;
    return res;
}

} // namespace pasim::convex

#endif // PASIM_BARRIER_HPP
