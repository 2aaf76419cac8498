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

#include "wbc/link/link_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace wbc::link {

namespace {

bool is_fraction(double f)
{
    return f > 0.0 && f <= 1.0;
}

}  // namespace

void RadioParams::validate() const
{
    if (!(per >= 0.0 && per <= 1.0)) {
        throw std::invalid_argument("per must be in [0,1]");
    }
    if (!(phy_mbps > 0.0)) {
        throw std::invalid_argument("phy rate must be positive");
    }
    if (!is_fraction(duty_cycle)) {
        throw std::invalid_argument("duty_cycle must be in (0,1]");
    }
    if (!is_fraction(efficiency)) {
        throw std::invalid_argument("efficiency must be in (0,1]");
    }
}

double mac_rate(double phy_mbps, double cycle, double efficiency)
{
    if (!(phy_mbps > 0.0)) {
        throw std::invalid_argument("phy rate must be positive");
    }
    if (!is_fraction(cycle) || !is_fraction(efficiency)) {
        throw std::invalid_argument("duty cycle and efficiency must be in (0,1]");
    }
    return phy_mbps * cycle * efficiency;
}

LinkRates LinkRates::from(const RadioParams& radio)
{
    radio.validate();
    LinkRates l;
    l.phy_tx = l.phy_rx = radio.phy_mbps;
    l.duty_cycle_tx = l.duty_cycle_rx = radio.duty_cycle;
    l.mac_efficiency_tx = l.mac_efficiency_rx = radio.efficiency;
    l.mac_tx = mac_rate(l.phy_tx, l.duty_cycle_tx, l.mac_efficiency_tx);
    l.mac_rx = mac_rate(l.phy_rx, l.duty_cycle_rx, l.mac_efficiency_rx);
    return l;
}

bool LinkRates::conforms() const noexcept
{
    return mac_tx == phy_tx * duty_cycle_tx * mac_efficiency_tx && mac_rx == phy_rx * duty_cycle_rx * mac_efficiency_rx;
}

double effective_goodput(const LinkRates& link, double per)
{
    if (!(per >= 0.0 && per <= 1.0)) {
        throw std::invalid_argument("per must be in [0,1]");
    }
    return link.mac_tx * (1.0 - per);
}

double aggregate_throughput(std::span<const double> member_goodput, double offered_mbps)
{
    double sum = 0.0;
    for (double g : member_goodput) {
        sum += g;
    }
    return std::min(sum, std::max(offered_mbps, 0.0));
}

double window_limited_mbps(std::uint32_t window_bytes, sim::Duration rtt)
{
    if (rtt.count() <= 0) {
        throw std::invalid_argument("rtt must be positive");
    }
    // bits per microsecond is Mbps.
    return static_cast<double>(window_bytes) * 8.0 / static_cast<double>(rtt.count());
}

std::vector<TrafficFlow> iperf_generator(const IperfConfig& config)
{
    std::vector<TrafficFlow> out;
    if (config.duration.count() <= 0 || config.connections <= 0) {
        return out;
    }
    const double rate = window_limited_mbps(config.window_bytes, config.rtt);
    out.reserve(static_cast<std::size_t>(config.connections));
    for (int i = 0; i < config.connections; ++i) {
        // Odd stride walks the low 16 bits without repeats.
        const auto host = static_cast<std::uint32_t>((i * 40503 + 1) & 0xFFFF);
        flow::FlowKey key{Ipv4{config.client_base.value + host}, config.server,
                          static_cast<std::uint16_t>(40000 + i), config.server_port, flow::Protocol::tcp};
        out.push_back(TrafficFlow{key, rate});
    }
    return out;
}

}  // namespace wbc::link
