#ifndef PASIM_SCENARIO_HPP
#define PASIM_SCENARIO_HPP

/// @file
/// Physical parameters, geometry, unit conversions and the activation schedule
/// of a pinching-antenna ISAC link.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pasim
{

/// Point or displacement in meters.
struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// All constants of one scenario. Powers in W, lengths in m, thresholds linear.
struct SystemParams
{
    double carrier_frequency = 30e9;
    double speed_of_light = 2.998e8;
    double effective_refractive_index = 1.4;
    double waveguide_attenuation = 0.18; ///< amplitude attenuation, Np/m
    double waveguide_length = 10.0;
    double pa_height = 3.0;
    int num_positions = 20;
    int num_slots = 4;
    int rx_antennas = 8;
    double noise_power = 1e-12;
    double rcs_mean = 1.0;
    double snr_threshold = 10.0;
    double transmit_power = 0.1;
    double min_rate = 0.5; ///< accumulated over all slots, bits/s/Hz
    Vec3 user_pos{2.0, 2.0, 0.0};
    Vec3 target_pos{6.0, -3.0, 0.0};
    Vec3 feed_pos{0.0, 0.0, 3.0};
    Vec3 rx_array_pos{0.0, 0.0, 3.0};
    std::vector<Vec3> pa_positions;

    double wavelength() const { return speed_of_light / carrier_frequency; }
    double guided_wavelength() const { return wavelength() / effective_refractive_index; }
    /// Free-space path-loss constant c / (4 pi f_c).
    double eta() const { return speed_of_light / (4.0 * std::numbers::pi * carrier_frequency); }
    /// Reference-distance path loss of the echo link; tied to eta.
    double beta0() const { return eta(); }
};

/// Uniform grid x_m = (m-1) * D_x / (M-1), both endpoints included.
inline std::vector<Vec3> uniform_pa_grid(int num_positions, double waveguide_length, double pa_height)
{
    if (num_positions < 2)
        throw std::invalid_argument("uniform_pa_grid: need at least two positions");
    std::vector<Vec3> grid;
    grid.reserve(static_cast<std::size_t>(num_positions));
    const double step = waveguide_length / static_cast<double>(num_positions - 1);
    for (int m = 0; m < num_positions; ++m)
        grid.push_back({step * m, 0.0, pa_height});
    return grid;
}

/// Throws std::invalid_argument naming the first broken invariant.
inline void validate_params(const SystemParams& p)
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid parameters: " + what); };
    if (!(p.carrier_frequency > 0.0) || !(p.speed_of_light > 0.0))
        fail("carrier frequency and speed of light must be positive");
    if (!(p.effective_refractive_index > 0.0))
        fail("effective refractive index must be positive");
    if (!(p.waveguide_attenuation >= 0.0) || !std::isfinite(p.waveguide_attenuation))
        fail("waveguide attenuation must be finite and nonnegative");
    if (!(p.waveguide_length > 0.0))
        fail("waveguide length must be positive");
    if (p.num_positions < 2)
        fail("num_positions must be >= 2");
    if (p.num_slots < 1)
        fail("num_slots must be >= 1");
    if (p.num_slots > p.num_positions)
        fail("num_slots must not exceed num_positions");
    if (p.rx_antennas < 1)
        fail("rx_antennas must be >= 1");
    if (!(p.noise_power > 0.0) || !(p.transmit_power > 0.0))
        fail("noise and transmit power must be positive");
    if (!(p.rcs_mean > 0.0) || !(p.snr_threshold > 0.0))
        fail("rcs_mean and snr_threshold must be positive");
    if (!(p.min_rate >= 0.0) || !std::isfinite(p.min_rate))
        fail("min_rate must be finite and nonnegative");
    for (const Vec3* v : {&p.user_pos, &p.target_pos, &p.feed_pos, &p.rx_array_pos})
        if (!v->finite())
            fail("positions must be finite");
    if (p.pa_positions.size() != static_cast<std::size_t>(p.num_positions))
        fail("pa_positions size must equal num_positions");
    for (const auto& pos : p.pa_positions)
    {
        if (!pos.finite() || pos.y != 0.0 || pos.z != p.pa_height)
            fail("PA positions must lie on the waveguide (y = 0, z = pa_height)");
        if (pos.x < 0.0 || pos.x > p.waveguide_length)
            fail("PA position outside [0, waveguide_length]");
    }
}

/// Reference scenario with the uniform PA grid.
inline SystemParams default_params()
{
    SystemParams p;
    p.noise_power = dbm_to_watts(-90.0);
    p.snr_threshold = db_to_linear(10.0);
    p.transmit_power = dbm_to_watts(20.0);
    p.pa_positions = uniform_pa_grid(p.num_positions, p.waveguide_length, p.pa_height);
    return p;
}

// --------------------------------------------------------------------------------------------

enum class ScheduleMode
{
    relaxed,
    binary
};

/// T x M activation weights b_m(t); row t is slot t, column m is PA position m.
struct SelectionSchedule
{
    Eigen::MatrixXd weights;
    ScheduleMode mode = ScheduleMode::relaxed;

    int slots() const { return static_cast<int>(weights.rows()); }
    int positions() const { return static_cast<int>(weights.cols()); }

    static SelectionSchedule uniform(int slots, int positions)
    {
        return {Eigen::MatrixXd::Constant(slots, positions, 1.0 / positions), ScheduleMode::relaxed};
    }

    /// Binary schedule activating `selected[t]` (0-based) in slot t.
    static SelectionSchedule from_positions(const std::vector<int>& selected, int positions)
    {
        SelectionSchedule s{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(selected.size()), positions),
                            ScheduleMode::binary};
        for (std::size_t t = 0; t < selected.size(); ++t)
        {
            if (selected[t] < 0 || selected[t] >= positions)
                throw std::out_of_range("from_positions: position index out of range");
            s.weights(static_cast<Eigen::Index>(t), selected[t]) = 1.0;
        }
        return s;
    }

    /// Argmax of each row (lowest index on ties).
    std::vector<int> selected_positions() const
    {
        std::vector<int> out(static_cast<std::size_t>(slots()));
        for (int t = 0; t < slots(); ++t)
        {
            Eigen::Index idx = 0;
            weights.row(t).maxCoeff(&idx);
            out[static_cast<std::size_t>(t)] = static_cast<int>(idx);
        }
        return out;
    }
};

enum class Constraint
{
    row_sum,        ///< exactly one activation per slot
    column_sum,     ///< each position used at most once
    box,            ///< 0 <= b <= 1
    integrality     ///< binary mode entries in {0, 1}
};

struct Violation
{
    Constraint constraint;
    int index; ///< slot for row_sum, position for column_sum, flat t*M+m otherwise
    double value;
};

struct ScheduleCheck
{
    double tolerance = 1e-9;
    /// Fixed-position baselines reuse one position in every slot.
    bool allow_position_reuse = false;
};

/// Lists every violated schedule invariant; empty means feasible.
inline std::vector<Violation> validate_schedule(const SelectionSchedule& s, const SystemParams& p,
                                                const ScheduleCheck& check = {})
{
    if (s.slots() != p.num_slots || s.positions() != p.num_positions)
    {
        std::ostringstream msg;
        msg << "validate_schedule: schedule is " << s.slots() << "x" << s.positions() << ", expected "
            << p.num_slots << "x" << p.num_positions;
        throw std::invalid_argument(msg.str());
    }
    std::vector<Violation> out;
    const double tol = check.tolerance;
    const int M = s.positions();
    for (int t = 0; t < s.slots(); ++t)
    {
        for (int m = 0; m < M; ++m)
        {
            const double b = s.weights(t, m);
            if (!(b >= 0.0 && b <= 1.0))
                out.push_back({Constraint::box, t * M + m, b});
            if (s.mode == ScheduleMode::binary && b != 0.0 && b != 1.0)
                out.push_back({Constraint::integrality, t * M + m, b});
        }
        const double row = s.weights.row(t).sum();
        if (std::abs(row - 1.0) > tol)
            out.push_back({Constraint::row_sum, t, row});
    }
    if (!check.allow_position_reuse)
        for (int m = 0; m < M; ++m)
        {
            const double col = s.weights.col(m).sum();
            if (col > 1.0 + tol)
                out.push_back({Constraint::column_sum, m, col});
        }
    return out;
}

inline bool is_feasible(const SelectionSchedule& s, const SystemParams& p, const ScheduleCheck& check = {})
{
    return validate_schedule(s, p, check).empty();
}

} // namespace pasim

#endif // PASIM_SCENARIO_HPP
