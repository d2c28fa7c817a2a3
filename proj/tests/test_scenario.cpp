#include "pasim/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pasim;

TEST(Conversions, DbmAndDb)
{
    EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
    EXPECT_NEAR(dbm_to_watts(-90.0), 1e-12, 1e-24);
    EXPECT_NEAR(db_to_linear(10.0), 10.0, 1e-12);
    EXPECT_NEAR(watts_to_dbm(dbm_to_watts(17.5)), 17.5, 1e-12);
}

TEST(DefaultParams, ReferenceScenario)
{
    const auto p = default_params();
    EXPECT_NEAR(p.noise_power, 1e-12, 1e-24);
    EXPECT_NEAR(p.snr_threshold, 10.0, 1e-12);
    EXPECT_EQ(p.num_positions, 20);
    EXPECT_EQ(p.rx_antennas, 8);
    EXPECT_DOUBLE_EQ(p.carrier_frequency, 30e9);
    EXPECT_DOUBLE_EQ(p.waveguide_attenuation, 0.18);
    EXPECT_EQ(p.user_pos, (Vec3{2.0, 2.0, 0.0}));
    EXPECT_EQ(p.target_pos, (Vec3{6.0, -3.0, 0.0}));
    EXPECT_EQ(p.feed_pos, (Vec3{0.0, 0.0, 3.0}));
    EXPECT_EQ(p.rx_array_pos, (Vec3{0.0, 0.0, 3.0}));
    EXPECT_NO_THROW(validate_params(p));
}

TEST(DefaultParams, PathLossConstantUsesFixedSpeedOfLight)
{
    const auto p = default_params();
    const double expected = 2.998e8 / (4.0 * std::numbers::pi * 30e9);
    EXPECT_NEAR(p.eta(), expected, 1e-18);
    EXPECT_NEAR(p.eta(), 7.952442e-4, 1e-9);
    EXPECT_DOUBLE_EQ(p.beta0(), p.eta());
    EXPECT_NEAR(p.wavelength(), 2.998e8 / 30e9, 1e-15);
    EXPECT_NEAR(p.guided_wavelength(), p.wavelength() / 1.4, 1e-15);
}

TEST(PaGrid, UniformWithEndpoints)
{
    const auto grid = uniform_pa_grid(20, 10.0, 3.0);
    ASSERT_EQ(grid.size(), 20u);
    EXPECT_DOUBLE_EQ(grid.front().x, 0.0);
    EXPECT_DOUBLE_EQ(grid.back().x, 10.0);
    for (std::size_t m = 1; m < grid.size(); ++m)
    {
        EXPECT_GT(grid[m].x, grid[m - 1].x);
        EXPECT_NEAR(grid[m].x - grid[m - 1].x, 10.0 / 19.0, 1e-12);
        EXPECT_EQ(grid[m].y, 0.0);
        EXPECT_EQ(grid[m].z, 3.0);
    }
}

TEST(ValidateParams, RejectsBrokenInvariants)
{
    auto p = default_params();
    p.num_slots = 21;
    EXPECT_THROW(validate_params(p), std::invalid_argument);
    p = default_params();
    p.noise_power = 0.0;
    EXPECT_THROW(validate_params(p), std::invalid_argument);
    p = default_params();
    p.pa_positions[3].y = 0.5;
    EXPECT_THROW(validate_params(p), std::invalid_argument);
    p = default_params();
    p.pa_positions[3].x = 11.0;
    EXPECT_THROW(validate_params(p), std::invalid_argument);
    p = default_params();
    p.rx_antennas = 0;
    EXPECT_THROW(validate_params(p), std::invalid_argument);
}

TEST(ValidateSchedule, IdentityBinaryIsFeasible)
{
    const auto p = default_params();
    const auto s = SelectionSchedule::from_positions({0, 1, 2, 3}, p.num_positions);
    EXPECT_TRUE(validate_schedule(s, p).empty());
    EXPECT_EQ(s.selected_positions(), (std::vector<int>{0, 1, 2, 3}));
}

TEST(ValidateSchedule, UniformRelaxedIsFeasible)
{
    const auto p = default_params();
    EXPECT_TRUE(is_feasible(SelectionSchedule::uniform(p.num_slots, p.num_positions), p));
}

TEST(ValidateSchedule, ReportsShortRow)
{
    const auto p = default_params();
    auto s = SelectionSchedule::uniform(p.num_slots, p.num_positions);
    s.weights.row(2) *= 0.9;
    const auto v = validate_schedule(s, p);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].constraint, Constraint::row_sum);
    EXPECT_EQ(v[0].index, 2);
    EXPECT_NEAR(v[0].value, 0.9, 1e-12);
    EXPECT_EQ(validate_schedule(s, p).size(), v.size());
}

TEST(ValidateSchedule, ReportsReusedPositionUnlessAllowed)
{
    const auto p = default_params();
    const auto s = SelectionSchedule::from_positions({5, 5, 5, 5}, p.num_positions);
    const auto v = validate_schedule(s, p);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].constraint, Constraint::column_sum);
    EXPECT_EQ(v[0].index, 5);
    EXPECT_TRUE(validate_schedule(s, p, {1e-9, true}).empty());
}

TEST(ValidateSchedule, BinaryModeRequiresIntegrality)
{
    const auto p = default_params();
    auto s = SelectionSchedule::uniform(p.num_slots, p.num_positions);
    s.mode = ScheduleMode::binary;
    const auto v = validate_schedule(s, p);
    EXPECT_EQ(v.size(), static_cast<std::size_t>(p.num_slots * p.num_positions));
    for (const auto& x : v)
        EXPECT_EQ(x.constraint, Constraint::integrality);
}

TEST(ValidateSchedule, BoxViolation)
{
    const auto p = default_params();
    auto s = SelectionSchedule::from_positions({0, 1, 2, 3}, p.num_positions);
    s.mode = ScheduleMode::relaxed;
    s.weights(0, 0) = 1.5;
    s.weights(0, 4) = -0.5;
    const auto v = validate_schedule(s, p);
    int boxes = 0;
    for (const auto& x : v)
        boxes += x.constraint == Constraint::box ? 1 : 0;
    EXPECT_EQ(boxes, 2);
}

TEST(ValidateSchedule, DimensionMismatchThrows)
{
    const auto p = default_params();
    EXPECT_THROW(validate_schedule(SelectionSchedule::uniform(3, p.num_positions), p), std::invalid_argument);
    EXPECT_THROW(validate_schedule(SelectionSchedule::uniform(p.num_slots, 7), p), std::invalid_argument);
}

TEST(SelectionSchedule, FromPositionsRejectsOutOfRange)
{
    EXPECT_THROW(SelectionSchedule::from_positions({0, 20}, 20), std::out_of_range);
    EXPECT_THROW(SelectionSchedule::from_positions({-1}, 20), std::out_of_range);
}
