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

#pragma once

#include "wbc/common.hpp"
#include "wbc/flow/flow_key.hpp"
#include "wbc/sim/time.hpp"

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wbc::link {

using namespace std::chrono_literals;

/// Radio configuration of one unit. Only phy_mbps, duty_cycle, efficiency
/// and per feed the rate model; the RF fields are carried as metadata.
struct RadioParams {
    double channel_width_mhz = 80;
    int chains = 2;
    int streams = 4;
    double tx_power_dbm = 30;
    double tx_antenna_gain_dbi = 10;
    double rx_antenna_gain_dbi = 10;
    double snr_db = 36;
    double per = 0.005;
    double evm_db = -17;
    int mcs_index = 8;
    std::string modulation = "256QAM";
    int mtu_bytes = 1472;
    double frequency_ghz = 5;

    double phy_mbps = 1000;
    double duty_cycle = 0.5;
    double efficiency = 0.8;

    /// Throws std::invalid_argument for per outside [0,1], non-positive PHY
    /// rate, or duty cycle / efficiency outside (0,1].
    void validate() const;
};

/// Exact product phy x cycle x efficiency. Throws std::invalid_argument when
/// phy <= 0 or a fraction is outside (0,1].
double mac_rate(double phy_mbps, double cycle, double efficiency);

struct LinkRates {
    double phy_tx = 0;
    double phy_rx = 0;
    double duty_cycle_tx = 1;
    double duty_cycle_rx = 1;
    double mac_efficiency_tx = 1;
    double mac_efficiency_rx = 1;
    double mac_tx = 0;
    double mac_rx = 0;

    /// Symmetric link built from one radio's parameters.
    static LinkRates from(const RadioParams& radio);

    /// mac == phy x cycle x efficiency in both directions, compared exactly.
    bool conforms() const noexcept;
};

/// mac_tx x (1 - per).
double effective_goodput(const LinkRates& link, double per);

/// Sum of the active members' goodput, capped by the offered load.
double aggregate_throughput(std::span<const double> member_goodput, double offered_mbps);

/// Window-limited TCP rate in Mbps. Zero RTT is rejected.
double window_limited_mbps(std::uint32_t window_bytes, sim::Duration rtt);

struct IperfConfig {
    int connections = 50;
    std::uint32_t window_bytes = 65536;
    sim::Duration rtt = 2ms;
    sim::Duration duration = 60s;
    Ipv4 client_base{10, 1, 0, 0};
    Ipv4 server{10, 2, 0, 1};
    std::uint16_t server_port = 5001;
};

struct TrafficFlow {
    flow::FlowKey key;  ///< client -> server
    double offered_mbps = 0;
};

/// One TCP flow per connection, each from a distinct client address. Empty
/// when duration or connection count is zero.
std::vector<TrafficFlow> iperf_generator(const IperfConfig& config);

}  // namespace wbc::link
