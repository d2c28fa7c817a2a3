#ifndef PASIM_CHANNEL_HPP
#define PASIM_CHANNEL_HPP

/// @file
/// Composite user/target channel vectors over the candidate PA positions and the
/// deterministic per-slot gains derived from them.

#include "pasim/scenario.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace pasim
{

using cplx = std::complex<double>;

enum class ChannelKind
{
    user,
    target
};

struct ChannelVector
{
    std::vector<cplx> gains;
    ChannelKind kind = ChannelKind::user;

    std::size_t size() const { return gains.size(); }
    const cplx& operator[](std::size_t i) const { return gains[i]; }
};

namespace detail
{

// eta_or_one * e^{-j k r} / r * e^{(-alpha - j k_g) w}, r = free-space distance, w = in-guide distance.
inline cplx pa_element(const SystemParams& p, const Vec3& endpoint, const Vec3& pa, double numerator)
{
    const double r = distance(endpoint, pa);
    if (!(r > 0.0))
        throw std::invalid_argument("channel: endpoint coincides with a PA position");
    const double w = distance(p.feed_pos, pa);
    const double k = 2.0 * std::numbers::pi / p.wavelength();
    const double kg = 2.0 * std::numbers::pi / p.guided_wavelength();
    const cplx free_space = numerator * std::polar(1.0 / r, -k * r);
    const cplx guided = std::polar(std::exp(-p.waveguide_attenuation * w), -kg * w);
    return free_space * guided;
}

} // namespace detail

/// User channel over all candidate positions (free-space term carries eta).
inline ChannelVector user_channel(const SystemParams& p)
{
    ChannelVector h{{}, ChannelKind::user};
    h.gains.reserve(p.pa_positions.size());
    for (const auto& pa : p.pa_positions)
        h.gains.push_back(detail::pa_element(p, p.user_pos, pa, p.eta()));
    return h;
}

/// Target channel over all candidate positions. The free-space numerator is 1, not eta.
inline ChannelVector target_channel(const SystemParams& p)
{
    ChannelVector h{{}, ChannelKind::target};
    h.gains.reserve(p.pa_positions.size());
    for (const auto& pa : p.pa_positions)
        h.gains.push_back(detail::pa_element(p, p.target_pos, pa, 1.0));
    return h;
}

/// Free-space-only channel from fixed antennas at `elements` (no waveguide feed).
inline ChannelVector free_space_channel(const SystemParams& p, std::span<const Vec3> elements, const Vec3& endpoint,
                                        double numerator, ChannelKind kind)
{
    const double k = 2.0 * std::numbers::pi / p.wavelength();
    ChannelVector h{{}, kind};
    h.gains.reserve(elements.size());
    for (const auto& e : elements)
    {
        const double r = distance(endpoint, e);
        if (!(r > 0.0))
            throw std::invalid_argument("channel: endpoint coincides with an antenna");
        h.gains.push_back(numerator * std::polar(1.0 / r, -k * r));
    }
    return h;
}

/// h^H b for a real activation row.
inline cplx effective_gain(std::span<const double> b_row, const ChannelVector& h)
{
    if (b_row.size() != h.size())
        throw std::invalid_argument("effective_gain: row length does not match channel length");
    cplx acc{0.0, 0.0};
    for (std::size_t m = 0; m < b_row.size(); ++m)
        acc += std::conj(h[m]) * b_row[m];
    return acc;
}

inline double snr_scale(const SystemParams& p) { return p.transmit_power / p.noise_power; }

/// Communication SNR (p_t / sigma^2) |h_u^H b|^2.
inline double comm_snr(std::span<const double> b_row, const ChannelVector& h_u, const SystemParams& p)
{
    return snr_scale(p) * std::norm(effective_gain(b_row, h_u));
}

inline double comm_rate(double gamma)
{
    if (gamma < 0.0)
        throw std::invalid_argument("comm_rate: negative SNR");
    return std::log2(1.0 + gamma);
}

/// Half-wavelength ULA response [1, e^{j pi sin theta}, ...].
inline std::vector<cplx> steering_vector(double theta, int num_antennas)
{
    std::vector<cplx> a(static_cast<std::size_t>(num_antennas));
    const double phase = std::numbers::pi * std::sin(theta);
    for (int n = 0; n < num_antennas; ++n)
        a[static_cast<std::size_t>(n)] = std::polar(1.0, phase * n);
    return a;
}

/// Azimuth of the target seen from the receive array, measured from the array (x) axis.
inline double target_angle(const SystemParams& p)
{
    const Vec3 d = p.target_pos - p.rx_array_pos;
    return std::atan2(d.y, d.x);
}

inline double echo_distance(const SystemParams& p)
{
    const double d = distance(p.target_pos, p.rx_array_pos);
    if (!(d > 0.0))
        throw std::invalid_argument("sensing: target coincides with the receive array");
    return d;
}

/// Constant factor of the radar gain: p_t beta0^2 N_R / (sigma^2 d_er^2).
inline double sensing_scale(const SystemParams& p)
{
    const double d = echo_distance(p);
    return p.transmit_power * p.beta0() * p.beta0() * p.rx_antennas / (p.noise_power * d * d);
}

/// Radar gain psi for one slot, formed through the matched receive beamformer
/// u = a_r(theta) / ||a_r(theta)||.
inline double sensing_gain(std::span<const double> b_row, const ChannelVector& h_e, const SystemParams& p,
                           double theta)
{
    const double d = echo_distance(p);
    const auto a = steering_vector(theta, p.rx_antennas);
    double a_norm2 = 0.0;
    for (const auto& v : a)
        a_norm2 += std::norm(v);
    // u^H a = ||a||; g = beta0 / d * a * (h^H b)
    const cplx uhg = std::sqrt(a_norm2) * (p.beta0() / d) * effective_gain(b_row, h_e);
    return snr_scale(p) * std::norm(uhg);
}

inline double sensing_gain(std::span<const double> b_row, const ChannelVector& h_e, const SystemParams& p)
{
    return sensing_gain(b_row, h_e, p, target_angle(p));
}

/// Exact gradient of log2(1 + gamma(b)) with respect to the real row b.
inline std::vector<double> rate_gradient(std::span<const double> b_row, const ChannelVector& h_u,
                                         const SystemParams& p)
{
    const cplx z = effective_gain(b_row, h_u);
    const double k = snr_scale(p);
    const double gamma = k * std::norm(z);
    const double scale = 2.0 * k / ((1.0 + gamma) * std::numbers::ln2);
    std::vector<double> g(b_row.size());
    // d|z|^2 / d b_m = 2 Re(z h_m) since dz/db_m = conj(h_m)
    for (std::size_t m = 0; m < g.size(); ++m)
        g[m] = scale * std::real(z * h_u[m]);
    return g;
}

} // namespace pasim

#endif // PASIM_CHANNEL_HPP
