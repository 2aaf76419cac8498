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
#include "wbc/wire/message.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace wbc::flow {

enum class Protocol : std::uint8_t { tcp, udp, icmp, dns };

inline constexpr std::uint8_t kIpProtoIcmp = 1;
inline constexpr std::uint8_t kIpProtoTcp = 6;
inline constexpr std::uint8_t kIpProtoUdp = 17;
inline constexpr std::uint16_t kDnsPort = 53;

const char* to_string(Protocol p) noexcept;
std::uint8_t ip_protocol_number(Protocol p) noexcept;

/// Maps an IP protocol number and ports back to a Protocol. UDP with either
/// port 53 is DNS. Returns nullopt for anything else.
std::optional<Protocol> classify(std::uint8_t ip_proto, std::uint16_t src_port, std::uint16_t dst_port) noexcept;

struct FlowKey {
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::tcp;

    /// Orders the (ip, port) endpoints so key(a->b) == key(b->a).
    FlowKey canonical() const noexcept;
    FlowKey reversed() const noexcept;

    /// ICMP and DNS skip the owner lookup.
    bool short_lived() const noexcept { return protocol == Protocol::icmp || protocol == Protocol::dns; }

    wire::IpLayerConnInfo ip_info() const noexcept;
    /// Ports of this key with the given TCP state and sequence numbers.
    wire::UpperLayerConnInfo upper_info(wire::TcpState state) const;

    /// Inverse of ip_info()/upper_info(). nullopt for unknown protocols.
    static std::optional<FlowKey> from_wire(const wire::IpLayerConnInfo& ip, std::uint16_t src_port,
                                            std::uint16_t dst_port);

    std::string to_string() const;

    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

}  // namespace wbc::flow
