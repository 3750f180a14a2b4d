// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "urllc/core/config.hpp"
#include "urllc/core/rng.hpp"

namespace urllc {

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

/// Node positions of one factory hall. Actuators are stored cell-major:
/// actuator (c, k) has flat index c * actuators_per_cell + k.
struct Layout
{
    double hall_side_m = 0.0;
    int actuators_per_cell = 0;
    std::vector<Point> controller_positions;
    std::vector<Point> actuator_positions;
    bool wraparound = false;

    int num_cells() const noexcept
    {
        return static_cast<int>(controller_positions.size());
    }
    int num_actuators() const noexcept
    {
        return static_cast<int>(actuator_positions.size());
    }
    int cell_of(int actuator) const noexcept { return actuator / actuators_per_cell; }

    /// Euclidean distance, or shortest distance on the torus when wraparound.
    double distance(Point const& a, Point const& b) const noexcept
    {
        double dx = std::abs(a.x - b.x);
        double dy = std::abs(a.y - b.y);
        if (wraparound)
        {
            dx = std::min(dx, hall_side_m - dx);
            dy = std::min(dy, hall_side_m - dy);
        }
        return std::hypot(dx, dy);
    }
};

namespace detail {

inline Layout build_grid(ScenarioConfig const& cfg, double pitch, bool wraparound,
                         RandomStream& rng)
{
    int const side = exact_sqrt(cfg.num_cells);
    if (side < 0)
        throw ConfigError("num_cells must be a perfect square for grid layouts");
    double const w = cfg.cell_side_m;

    Layout out;
    out.hall_side_m = side * pitch;
    out.actuators_per_cell = cfg.actuators_per_cell;
    out.wraparound = wraparound;
    out.controller_positions.reserve(cfg.num_cells);
    out.actuator_positions.reserve(cfg.num_actuators());

    // Row-major over cells: cell index c = row * side + col, x along col.
    for (int c = 0; c < cfg.num_cells; ++c)
    {
        double const x0 = (c % side) * pitch;
        double const y0 = (c / side) * pitch;
        out.controller_positions.push_back({x0 + 0.5 * w, y0 + 0.5 * w});
        for (int k = 0; k < cfg.actuators_per_cell; ++k)
        {
            double const x = x0 + w * rng.uniform();
            double const y = y0 + w * rng.uniform();
            out.actuator_positions.push_back({x, y});
        }
    }
    return out;
}

}  // namespace detail

/// Square hall tiled by sqrt(C) x sqrt(C) adjacent cells; controllers at cell
/// centres, actuators uniform inside their cell.
inline Layout build_dense_grid(ScenarioConfig const& cfg, RandomStream& rng)
{
    if (cfg.layout_kind != LayoutKind::dense_grid)
        throw ConfigError("build_dense_grid requires layout_kind = dense_grid");
    return detail::build_grid(cfg, cfg.cell_side_m, false, rng);
}

/// Cells separated by D on a torus of side sqrt(C) * D.
inline Layout build_wraparound_grid(ScenarioConfig const& cfg, RandomStream& rng)
{
    if (cfg.layout_kind != LayoutKind::wraparound_grid)
        throw ConfigError("build_wraparound_grid requires layout_kind = wraparound_grid");
    if (cfg.cell_separation_m < cfg.cell_side_m)
        throw ConfigError("cell_separation_m must be >= cell_side_m");
    return detail::build_grid(cfg, cfg.cell_separation_m, true, rng);
}

inline Layout build_layout(ScenarioConfig const& cfg, RandomStream& rng)
{
    return cfg.layout_kind == LayoutKind::dense_grid ? build_dense_grid(cfg, rng)
                                                     : build_wraparound_grid(cfg, rng);
}

/// CSV with columns kind,cell,index,x_m,y_m. Controllers have index -1.
inline void write_layout_csv(std::ostream& os, Layout const& layout)
{
    os << "kind,cell,index,x_m,y_m\n";
    auto const old_prec = os.precision(10);
    for (int c = 0; c < layout.num_cells(); ++c)
    {
        auto const& p = layout.controller_positions[c];
        os << "controller," << c << ",-1," << p.x << ',' << p.y << '\n';
    }
    for (int a = 0; a < layout.num_actuators(); ++a)
    {
        auto const& p = layout.actuator_positions[a];
        os << "actuator," << layout.cell_of(a) << ',' << a % layout.actuators_per_cell << ','
           << p.x << ',' << p.y << '\n';
    }
    os.precision(old_prec);
}

}  // namespace urllc
