// Copyright 2026 The wbcluster Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wbc/flow/hash.hpp"
#include "wbc/link/link_model.hpp"
#include "wbc/sim/rng.hpp"

#include <doctest.h>

#include <array>
#include <numeric>
#include <set>

using namespace wbc;
using namespace wbc::link;
using namespace std::chrono_literals;

TEST_CASE("radio defaults")
{
    const RadioParams r;
    CHECK(r.channel_width_mhz == 80);
    CHECK(r.chains == 2);
    CHECK(r.streams == 4);
    CHECK(r.tx_power_dbm == 30);
    CHECK(r.snr_db == 36);
    CHECK(r.per == 0.005);
    CHECK(r.mcs_index == 8);
    CHECK(r.modulation == "256QAM");
    CHECK(r.mtu_bytes == 1472);
    CHECK(r.phy_mbps == 1000);
    CHECK_NOTHROW(r.validate());
}

TEST_CASE("radio validation")
{
    RadioParams r;
    r.per = 1.5;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = RadioParams{};
    r.duty_cycle = 0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = RadioParams{};
    r.efficiency = 1.01;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = RadioParams{};
    r.phy_mbps = -1;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("mac rate is the exact product")
{
    CHECK(mac_rate(1000, 1.0, 1.0) == 1000);
    CHECK(mac_rate(1000, 0.5, 0.8) == 400);
    CHECK_THROWS_AS(mac_rate(1000, 0.0, 0.8), std::invalid_argument);
    CHECK_THROWS_AS(mac_rate(1000, 0.5, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(mac_rate(0, 0.5, 0.8), std::invalid_argument);
}

TEST_CASE("link rates conform for random radios")
{
    sim::Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        RadioParams r;
        r.phy_mbps = 1 + rng.uniform01() * 2000;
        r.duty_cycle = 0.01 + rng.uniform01() * 0.99;
        r.efficiency = 0.01 + rng.uniform01() * 0.99;
        r.per = rng.uniform01();
        const auto l = LinkRates::from(r);
        CHECK(l.conforms());
        CHECK(l.mac_tx == l.phy_tx * l.duty_cycle_tx * l.mac_efficiency_tx);
        CHECK(l.mac_rx == l.phy_rx * l.duty_cycle_rx * l.mac_efficiency_rx);
        const double g = effective_goodput(l, r.per);
        CHECK(g <= l.mac_tx);
        CHECK(l.mac_tx <= l.phy_tx);
        CHECK(g >= 0);
    }
    LinkRates bad = LinkRates::from(RadioParams{});
    bad.mac_tx += 1e-9;
    CHECK_FALSE(bad.conforms());
}

TEST_CASE("effective goodput")
{
    const auto l = LinkRates::from(RadioParams{});
    CHECK(l.mac_tx == 400);
    CHECK(effective_goodput(l, 0) == 400);
    CHECK(effective_goodput(l, 0.005) == doctest::Approx(398).epsilon(1e-12));
    CHECK(effective_goodput(l, 1) == 0);
}

TEST_CASE("aggregate throughput sums goodput under saturating load")
{
    const double g = effective_goodput(LinkRates::from(RadioParams{}), 0.005);
    const std::vector<double> four(4, g);
    CHECK(aggregate_throughput(four, 1e9) == doctest::Approx(4 * g));
    CHECK(aggregate_throughput(std::span(four).first(3), 1e9) == doctest::Approx(3 * g));
    CHECK(aggregate_throughput({}, 1e9) == 0);
    CHECK(aggregate_throughput(four, 100) == 100);
}

TEST_CASE("aggregate is monotone in membership")
{
    sim::Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> g(rng.between(1, 6));
        for (auto& x : g) {
            x = rng.uniform01() * 500;
        }
        const double full = aggregate_throughput(g, 1e9);
        for (std::size_t drop = 0; drop < g.size(); ++drop) {
            auto less = g;
            less.erase(less.begin() + static_cast<std::ptrdiff_t>(drop));
            CHECK(aggregate_throughput(less, 1e9) <= full);
        }
    }
}

TEST_CASE("window-limited rate")
{
    CHECK(window_limited_mbps(65536, 10ms) == doctest::Approx(65536 * 8 / 0.01 / 1e6));
    CHECK(window_limited_mbps(65536, 10ms) <= 52.43);
    CHECK_THROWS_AS(window_limited_mbps(65536, 0ms), std::invalid_argument);
}

TEST_CASE("iperf generator")
{
    IperfConfig cfg;
    SUBCASE("fifty distinct window-limited connections")
    {
        const auto flows = iperf_generator(cfg);
        REQUIRE(flows.size() == 50);
        std::set<flow::FlowKey> keys;
        for (const auto& f : flows) {
            keys.insert(f.key.canonical());
            CHECK(f.key.protocol == flow::Protocol::tcp);
            CHECK(f.offered_mbps == doctest::Approx(window_limited_mbps(65536, cfg.rtt)));
        }
        CHECK(keys.size() == 50);
    }
    SUBCASE("one connection with 10 ms RTT")
    {
        cfg.connections = 1;
        cfg.rtt = 10ms;
        const auto flows = iperf_generator(cfg);
        REQUIRE(flows.size() == 1);
        CHECK(flows[0].offered_mbps <= 52.43);
    }
    SUBCASE("zero duration is empty")
    {
        cfg.duration = 0s;
        CHECK(iperf_generator(cfg).empty());
    }
    SUBCASE("spread over four equal-weight links")
    {
        const auto flows = iperf_generator(cfg);
        const auto hash = flow::HashConfig::uniform(4);
        std::array<int, 4> per_link{};
        for (const auto& f : flows) {
            ++per_link[flow::symmetric_hash(f.key, hash)];
        }
        CHECK(std::accumulate(per_link.begin(), per_link.end(), 0) == 50);
        // Binomial(50, 1/4): mean 12.5, sd about 3.1.
        for (int n : per_link) {
            CHECK(n >= 3);
            CHECK(n <= 22);
        }
    }
}
