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

#include "wbc/flow/flow_key.hpp"

#include <tuple>

namespace wbc::flow {

const char* to_string(Protocol p) noexcept
{
    switch (p) {
    case Protocol::tcp:
        return "tcp";
    case Protocol::udp:
        return "udp";
    case Protocol::icmp:
        return "icmp";
    case Protocol::dns:
        return "dns";
    }
    return "?";
}

std::uint8_t ip_protocol_number(Protocol p) noexcept
{
    switch (p) {
    case Protocol::tcp:
        return kIpProtoTcp;
    case Protocol::icmp:
        return kIpProtoIcmp;
    case Protocol::udp:
    case Protocol::dns:
        return kIpProtoUdp;
    }
    return 0;
}

std::optional<Protocol> classify(std::uint8_t ip_proto, std::uint16_t src_port, std::uint16_t dst_port) noexcept
{
    switch (ip_proto) {
    case kIpProtoTcp:
        return Protocol::tcp;
    case kIpProtoIcmp:
        return Protocol::icmp;
    case kIpProtoUdp:
        return (src_port == kDnsPort || dst_port == kDnsPort) ? Protocol::dns : Protocol::udp;
    default:
        return std::nullopt;
    }
}

FlowKey FlowKey::canonical() const noexcept
{
    if (std::tie(dst_ip, dst_port) < std::tie(src_ip, src_port)) {
        return reversed();
    }
    return *this;
}

FlowKey FlowKey::reversed() const noexcept
{
    return FlowKey{dst_ip, src_ip, dst_port, src_port, protocol};
}

wire::IpLayerConnInfo FlowKey::ip_info() const noexcept
{
    return wire::IpLayerConnInfo{src_ip, dst_ip, ip_protocol_number(protocol)};
}

wire::UpperLayerConnInfo FlowKey::upper_info(wire::TcpState state) const
{
    wire::UpperLayerConnInfo u;
    u.src_port = src_port;
    u.dst_port = dst_port;
    u.tcp_state = state;
    return u;
}

std::optional<FlowKey> FlowKey::from_wire(const wire::IpLayerConnInfo& ip, std::uint16_t src_port,
                                          std::uint16_t dst_port)
{
    auto proto = classify(ip.protocol, src_port, dst_port);
    if (!proto) {
        return std::nullopt;
    }
    return FlowKey{ip.src_ip, ip.dst_ip, src_port, dst_port, *proto};
}

std::string FlowKey::to_string() const
{
    return std::string(flow::to_string(protocol)) + " " + src_ip.to_string() + ":" + std::to_string(src_port) +
           " > " + dst_ip.to_string() + ":" + std::to_string(dst_port);
}

}  // namespace wbc::flow
