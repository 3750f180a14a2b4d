// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "urllc/protocols/protocols.hpp"

namespace urllc::testing {

/*!
 * Exact failure probability of a benchmark protocol under the i.i.d. outage
 * model, by enumerating every outcome of every link that can influence the
 * result.
 *
 * Each link is independently "up" with probability 1 - p. A message reaches
 * a receiver iff at least one of the links carrying it is up. Controller
 * links are enumerated jointly; for each controller outcome, every
 * actuator-pair link between a phase-1 failure and one of its relays is
 * enumerated too. Pair links are reciprocal, so a pair that appears in both
 * directions is a single variable. Links that cannot change the outcome are
 * summed out (their probabilities add to one).
 *
 * Independent of the closed forms: nothing here is factored by cell or by
 * relay count.
 */
inline double enumerate_failure(Protocol protocol, int num_cells, int per_cell, double p)
{
    int const n = num_cells * per_cell;
    bool const all_bands = protocol != Protocol::orth_occupy_cows;
    int const g_links = all_bands ? n * num_cells : n;
    if (g_links > 24)
        throw std::invalid_argument("enumerate_failure: network too large");

    auto g_up = [&](std::uint32_t mask, int a, int i) {
        int const bit = all_bands ? a * num_cells + i : a;
        return (mask >> bit & 1u) != 0;
    };

    double total = 0.0;
    for (std::uint32_t gm = 0; gm < (1u << g_links); ++gm)
    {
        double weight = 1.0;
        for (int b = 0; b < g_links; ++b)
            weight *= (gm >> b & 1u) ? 1.0 - p : p;

        // Phase 1: who holds which message.
        std::vector<std::uint8_t> own_ok(n);
        std::vector<std::vector<int>> holders(num_cells);
        for (int a = 0; a < n; ++a)
        {
            int const c = a / per_cell;
            switch (protocol)
            {
                case Protocol::orth_occupy_cows:
                    own_ok[a] = g_up(gm, a, c);
                    if (own_ok[a])
                        holders[c].push_back(a);
                    break;
                case Protocol::occupy_cow:
                    own_ok[a] = g_up(gm, a, c);
                    for (int i = 0; i < num_cells; ++i)
                        if (g_up(gm, a, i))
                            holders[i].push_back(a);
                    break;
                case Protocol::comp_occupy_cow:
                {
                    bool any = false;
                    for (int i = 0; i < num_cells; ++i)
                        any = any || g_up(gm, a, i);
                    own_ok[a] = any;
                    if (any)
                        holders[0].push_back(a);  // the one joint message
                    break;
                }
                default: throw std::invalid_argument("enumerate_failure: benchmark protocols only");
            }
        }

        // Phase 2 needs one up link from a relay of the missing message.
        std::vector<std::pair<int, int>> links;
        std::vector<std::vector<int>> needs(n);
        for (int a = 0; a < n; ++a)
        {
            if (own_ok[a])
                continue;
            int const msg = protocol == Protocol::comp_occupy_cow ? 0 : a / per_cell;
            for (int r : holders[msg])
            {
                auto const key = std::minmax(a, r);
                std::size_t idx = 0;
                while (idx < links.size() && links[idx] != std::pair<int, int>(key))
                    ++idx;
                if (idx == links.size())
                    links.emplace_back(key);
                needs[a].push_back(static_cast<int>(idx));
            }
        }
        if (links.size() > 20)
            throw std::invalid_argument("enumerate_failure: too many pair links");

        double fail_mass = 0.0;
        for (std::uint32_t hm = 0; hm < (1u << links.size()); ++hm)
        {
            bool network_ok = true;
            for (int a = 0; a < n && network_ok; ++a)
            {
                if (own_ok[a])
                    continue;
                bool rescued = false;
                for (int idx : needs[a])
                    rescued = rescued || (hm >> idx & 1u);
                network_ok = rescued;
            }
            if (network_ok)
                continue;
            double w = 1.0;
            for (std::size_t b = 0; b < links.size(); ++b)
                w *= (hm >> b & 1u) ? 1.0 - p : p;
            fail_mass += w;
        }
        total += weight * fail_mass;
    }
    return total;
}

}  // namespace urllc::testing
