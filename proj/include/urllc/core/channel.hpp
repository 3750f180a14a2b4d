// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "urllc/core/config.hpp"
#include "urllc/core/layout.hpp"
#include "urllc/core/rng.hpp"

namespace urllc {

using Complex = std::complex<double>;

//---------------------------------------------------------------------------//
// WINNER II A1 indoor link model

namespace detail {

inline constexpr double kFreqTermDb = -4.436974992327127;  // 20 log10(0.6)

inline double path_loss_db_from_log10(double log10_d, bool los) noexcept
{
    return los ? 18.7 * log10_d + 46.8 + kFreqTermDb : 36.8 * log10_d + 43.8 + kFreqTermDb;
}

inline double los_probability_from_log10(double log10_d) noexcept
{
    double const inner = 1.24 - 0.61 * log10_d;
    double const p = 1.0 - 0.9 * std::cbrt(1.0 - inner * inner * inner);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace detail

/// Probability that a link of length d metres has a line-of-sight component.
inline double los_probability(double d) noexcept
{
    if (d <= 2.5)
        return 1.0;
    return detail::los_probability_from_log10(std::log10(d));
}

/// Path loss in dB at 3 GHz (includes the 20 log10(0.6) frequency term).
inline double path_loss_db(double d, bool los)
{
    if (!(d > 0))
        throw std::domain_error("path_loss_db: distance must be positive");
    return detail::path_loss_db_from_log10(std::log10(d), los);
}

/*!
 * One small-scale coefficient e^{j theta} (a + b r e^{j psi}) with
 * a^2 = kappa/(kappa+1), b^2 = 1/(kappa+1), r^2 ~ Exp(1), and theta, psi
 * uniform. The scatter term b r e^{j(theta+psi)} is a circularly-symmetric
 * complex normal independent of theta, so this is a e^{j theta} + b h_bar.
 * The power does not depend on theta.
 */
struct SmallScale
{
    double los_amp = 0.0;
    double scatter_amp = 1.0;
    double r = 0.0;
    double psi = 0.0;
    double theta = 0.0;

    double power() const noexcept
    {
        double const x = scatter_amp * r;
        if (los_amp == 0.0)
            return x * x;
        return los_amp * los_amp + x * x + 2.0 * los_amp * x * std::cos(psi);
    }

    Complex amplitude() const noexcept
    {
        return std::polar(1.0, theta) * (los_amp + std::polar(scatter_amp * r, psi));
    }
};

/// Samples a unit-power small-scale coefficient: Rician with K-factor
/// `k_factor_linear` for LOS links, Rayleigh otherwise. Always consumes four
/// 32-bit words.
template<class Stream>
SmallScale sample_small_scale(bool los, double k_factor_linear, Stream& rng)
{
    SmallScale s;
    s.theta = 2.0 * std::numbers::pi * rng.uniform32();
    s.r = std::sqrt(-std::log(rng.uniform()));
    s.psi = 2.0 * std::numbers::pi * rng.uniform32();
    if (los && k_factor_linear > 0.0)
    {
        if (std::isinf(k_factor_linear))
        {
            s.los_amp = 1.0;
            s.scatter_amp = 0.0;
        }
        else
        {
            s.los_amp = std::sqrt(k_factor_linear / (k_factor_linear + 1.0));
            s.scatter_amp = std::sqrt(1.0 / (k_factor_linear + 1.0));
        }
    }
    return s;
}

template<class Stream>
Complex draw_small_scale(bool los, double k_factor_linear, Stream& rng)
{
    return sample_small_scale(los, k_factor_linear, rng).amplitude();
}

/// One drawn link with its large-scale diagnostics.
struct LinkGain
{
    Complex amplitude{};
    bool los = false;
    double path_loss_db = 0.0;
    double shadow_db = 0.0;

    double power() const noexcept { return std::norm(amplitude); }
};

/// Constants needed to draw a link; captured once per scenario.
struct LinkModel
{
    ChannelMode mode = ChannelMode::distance;
    double min_distance_m = 1.0;
    double k_factor_linear = 0.0;
    double shadow_std_los_db = 3.0;
    double shadow_std_nlos_db = 4.0;

    static LinkModel from(ScenarioConfig const& cfg) noexcept
    {
        return {cfg.channel_mode, cfg.min_distance_m, cfg.k_factor_linear(),
                cfg.shadow_std_los_db, cfg.shadow_std_nlos_db};
    }

    /// Large-scale state and small-scale sample of a link of (unclamped)
    /// length d, drawn from its own stream. `draw` and `draw_power` consume
    /// the stream identically.
    struct Sample
    {
        bool los = true;
        double path_loss_db = 0.0;
        double shadow_db = 0.0;
        SmallScale small_scale;

        double amplitude_scale() const noexcept
        {
            return std::exp(-(path_loss_db + shadow_db) * (std::numbers::ln10 / 20.0));
        }
    };

    Sample sample(double d, RandomStream& rng) const
    {
        Sample s;
        if (mode == ChannelMode::distance)
        {
            d = std::max(d, min_distance_m);
            double const l = std::log10(d);
            double const p_los = d <= 2.5 ? 1.0 : detail::los_probability_from_log10(l);
            s.los = rng.uniform32() < p_los;
            double const z = std::sqrt(-2.0 * std::log(rng.uniform()))
                             * std::cos(2.0 * std::numbers::pi * rng.uniform32());
            s.shadow_db = (s.los ? shadow_std_los_db : shadow_std_nlos_db) * z;
            s.path_loss_db = detail::path_loss_db_from_log10(l, s.los);
        }
        s.small_scale = sample_small_scale(s.los, k_factor_linear, rng);
        return s;
    }

    LinkGain draw(double d, RandomStream& rng) const
    {
        auto const s = sample(d, rng);
        return {s.amplitude_scale() * s.small_scale.amplitude(), s.los, s.path_loss_db,
                s.shadow_db};
    }

    /// |draw(d, rng).amplitude|^2 up to rounding, without the phase work.
    double draw_power(double d, RandomStream& rng) const
    {
        auto const s = sample(d, rng);
        double const scale = s.amplitude_scale();
        return scale * scale * s.small_scale.power();
    }
};

//---------------------------------------------------------------------------//
/*!
 * Complete set of link gains for one transmission period.
 *
 * Gains are either held in dense matrices or generated from counter-based
 * streams keyed by the link (controller-actuator pair, or unordered actuator
 * pair). Generated realizations store controller powers eagerly and produce
 * everything else on access; h(a, b) and h(b, a) are the same value on every
 * call. The same g entries serve both phases of the period.
 */
class ChannelRealization
{
  public:
    ChannelRealization() = default;

    /// Explicit gains: g is (C*K) x C row-major, h is (C*K) x (C*K) row-major.
    static ChannelRealization from_gains(int num_cells, int actuators_per_cell,
                                         std::vector<Complex> g, std::vector<Complex> h)
    {
        ChannelRealization ch;
        ch.init_shape(num_cells, actuators_per_cell);
        auto const n = static_cast<std::size_t>(ch.num_actuators_);
        if (g.size() != n * static_cast<std::size_t>(num_cells) || h.size() != n * n)
            throw std::invalid_argument("ChannelRealization: gain matrix shape mismatch");
        ch.g_ = std::move(g);
        ch.h_dense_ = std::move(h);
        ch.fill_g_power();
        ch.h_power_dense_.resize(ch.h_dense_.size());
        std::transform(ch.h_dense_.begin(), ch.h_dense_.end(), ch.h_power_dense_.begin(),
                       [](Complex z) { return std::norm(z); });
        return ch;
    }

    /// Convenience for tests: gains given as real powers (zero phase).
    static ChannelRealization from_powers(int num_cells, int actuators_per_cell,
                                          std::vector<double> const& g_power,
                                          std::vector<double> const& h_power)
    {
        std::vector<Complex> g(g_power.size());
        std::vector<Complex> h(h_power.size());
        std::transform(g_power.begin(), g_power.end(), g.begin(),
                       [](double p) { return Complex{std::sqrt(p), 0.0}; });
        std::transform(h_power.begin(), h_power.end(), h.begin(),
                       [](double p) { return Complex{std::sqrt(p), 0.0}; });
        auto ch = from_gains(num_cells, actuators_per_cell, std::move(g), std::move(h));
        // Keep the given powers bit-exact: sqrt then square can round.
        ch.g_power_ = g_power;
        ch.h_power_dense_ = h_power;
        return ch;
    }

    /// Random realization for one trial; `trial_key` addresses every link.
    static ChannelRealization draw(ScenarioConfig const& cfg,
                                   std::shared_ptr<Layout const> layout,
                                   std::uint64_t trial_key)
    {
        ChannelRealization ch;
        ch.init_shape(cfg.num_cells, cfg.actuators_per_cell);
        ch.model_ = LinkModel::from(cfg);
        ch.key_ = trial_key;
        ch.generated_ = true;
        if (cfg.channel_mode == ChannelMode::distance)
        {
            if (!layout || layout->num_cells() != cfg.num_cells
                || layout->num_actuators() != cfg.num_actuators())
                throw std::invalid_argument("ChannelRealization: layout does not match config");
        }
        ch.layout_ = std::move(layout);
        ch.g_power_.resize(static_cast<std::size_t>(ch.num_actuators_) * ch.num_cells_);
        for (int a = 0; a < ch.num_actuators_; ++a)
            for (int i = 0; i < ch.num_cells_; ++i)
            {
                auto rng = ch.controller_stream(a, i);
                ch.g_power_[ch.g_index(a, i)] =
                    ch.model_.draw_power(ch.controller_distance(a, i), rng);
            }
        return ch;
    }

    int num_cells() const noexcept { return num_cells_; }
    int actuators_per_cell() const noexcept { return actuators_per_cell_; }
    int num_actuators() const noexcept { return num_actuators_; }
    int cell_of(int actuator) const noexcept { return actuator / actuators_per_cell_; }

    /// Gain from controller i to actuator a.
    Complex g(int a, int i) const
    {
        if (!generated())
            return g_[g_index(a, i)];
        return controller_link(a, i).amplitude;
    }
    double g_power(int a, int i) const noexcept { return g_power_[g_index(a, i)]; }

    /// Gain from actuator b to actuator a (a != b).
    Complex h(int a, int b) const
    {
        if (!generated())
            return h_dense_[static_cast<std::size_t>(a) * num_actuators_ + b];
        return actuator_link(a, b).amplitude;
    }
    double h_power(int a, int b) const
    {
        if (!generated())
            return h_power_dense_[static_cast<std::size_t>(a) * num_actuators_ + b];
        auto rng = actuator_stream(a, b);
        return model_.draw_power(actuator_distance(a, b), rng);
    }

    /// True for realizations drawn from a trial key (gains generated on access).
    bool generated() const noexcept { return generated_; }

    /// Re-draws controller link (a, i) with diagnostics. Generated channels only.
    LinkGain controller_link(int a, int i) const
    {
        auto rng = controller_stream(a, i);
        return model_.draw(controller_distance(a, i), rng);
    }

    /// Draws actuator link {a, b} with diagnostics. Generated channels only.
    LinkGain actuator_link(int a, int b) const
    {
        auto rng = actuator_stream(a, b);
        return model_.draw(actuator_distance(a, b), rng);
    }

    /// Dense copy of h (diagonal left at zero). Intended for small networks.
    std::vector<Complex> h_matrix() const
    {
        auto const n = static_cast<std::size_t>(num_actuators_);
        std::vector<Complex> out(n * n);
        for (int a = 0; a < num_actuators_; ++a)
            for (int b = 0; b < num_actuators_; ++b)
                if (a != b)
                    out[a * n + b] = h(a, b);
        return out;
    }

    /// Dense copy of g, (C*K) x C row-major.
    std::vector<Complex> g_matrix() const
    {
        std::vector<Complex> out(g_power_.size());
        for (int a = 0; a < num_actuators_; ++a)
            for (int i = 0; i < num_cells_; ++i)
                out[g_index(a, i)] = g(a, i);
        return out;
    }

  private:
    int num_cells_ = 0;
    int actuators_per_cell_ = 0;
    int num_actuators_ = 0;
    std::vector<Complex> g_;
    std::vector<double> g_power_;
    std::vector<Complex> h_dense_;
    std::vector<double> h_power_dense_;
    LinkModel model_;
    std::uint64_t key_ = 0;
    std::shared_ptr<Layout const> layout_;
    bool generated_ = false;

    void init_shape(int c, int k)
    {
        if (c < 1 || k < 1)
            throw std::invalid_argument("ChannelRealization: empty network");
        num_cells_ = c;
        actuators_per_cell_ = k;
        num_actuators_ = c * k;
    }
    std::size_t g_index(int a, int i) const noexcept
    {
        return static_cast<std::size_t>(a) * num_cells_ + i;
    }
    RandomStream controller_stream(int a, int i) const noexcept
    {
        return {key_, StreamTag::controller_link, static_cast<std::uint64_t>(a) * num_cells_ + i};
    }
    RandomStream actuator_stream(int a, int b) const noexcept
    {
        auto const lo = static_cast<std::uint64_t>(std::min(a, b));
        auto const hi = static_cast<std::uint64_t>(std::max(a, b));
        return {key_, StreamTag::actuator_link, lo * static_cast<std::uint64_t>(num_actuators_) + hi};
    }
    double controller_distance(int a, int i) const noexcept
    {
        if (model_.mode != ChannelMode::distance)
            return 0.0;
        return layout_->distance(layout_->actuator_positions[a], layout_->controller_positions[i]);
    }
    double actuator_distance(int a, int b) const noexcept
    {
        if (model_.mode != ChannelMode::distance)
            return 0.0;
        return layout_->distance(layout_->actuator_positions[a], layout_->actuator_positions[b]);
    }
    void fill_g_power()
    {
        g_power_.resize(g_.size());
        std::transform(g_.begin(), g_.end(), g_power_.begin(),
                       [](Complex z) { return std::norm(z); });
    }
};

/// Draws the channels of one period; see ChannelRealization::draw.
inline ChannelRealization draw_channels(ScenarioConfig const& cfg,
                                        std::shared_ptr<Layout const> layout,
                                        std::uint64_t trial_key)
{
    return ChannelRealization::draw(cfg, std::move(layout), trial_key);
}

}  // namespace urllc
