// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace urllc {

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A block of four 32-bit outputs is a pure function of a 64-bit key and a
 * 128-bit counter, so any random quantity can be addressed directly by
 * (key, counter) without replaying a sequential stream.
 */
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round)
        {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(Counter const& c, Key const& k) noexcept
    {
        std::uint64_t const p0 = std::uint64_t{kMul0} * c[0];
        std::uint64_t const p1 = std::uint64_t{kMul1} * c[2];
        auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto const lo0 = static_cast<std::uint32_t>(p0);
        auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto const lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// SplitMix64 finalizer; used to derive stream keys from (seed, index).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic child seed for substream `index` of `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept
{
    return mix64(parent ^ mix64(index + 0x632BE59BD9B4E019ull));
}

/// Address spaces inside one trial key, so that independent quantities never
/// share counters.
enum class StreamTag : std::uint32_t
{
    layout = 1,
    controller_link = 2,
    actuator_link = 3,
    synthetic = 4,
};

//---------------------------------------------------------------------------//
/*!
 * Random stream addressed by (key, tag, id).
 *
 * Satisfies UniformRandomBitGenerator. Two streams constructed with the same
 * address produce the same sequence regardless of what other streams were
 * consumed before, which is what makes lazily generated channels and
 * parallel trials reproducible.
 */
class RandomStream
{
  public:
    using result_type = std::uint32_t;

    RandomStream(std::uint64_t key, StreamTag tag, std::uint64_t id) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)}
        , ctr_{0u, static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32),
               static_cast<std::uint32_t>(tag)}
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        if (used_ == 4)
        {
            block_ = Philox4x32::generate(ctr_, key_);
            ++ctr_[0];
            used_ = 0;
        }
        return block_[used_++];
    }

    /// Uniform double on (0, 1), 53 bits of resolution. Never returns 0 or 1.
    double uniform() noexcept
    {
        std::uint64_t const hi = (*this)() >> 5;  // 27 bits
        std::uint64_t const lo = (*this)() >> 6;  // 26 bits
        std::uint64_t const bits = (hi << 26) | lo;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Uniform double on (0, 1) from a single 32-bit word.
    double uniform32() noexcept
    {
        return (static_cast<double>((*this)()) + 0.5) * 0x1.0p-32;
    }

    /// Standard normal variate (Box-Muller; the second variate is cached).
    double normal() noexcept
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double const r = std::sqrt(-2.0 * std::log(uniform()));
        double const phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

  private:
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter block_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace urllc
