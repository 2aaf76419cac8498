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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wbc::wire {

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderSize = 6;
inline constexpr std::size_t kComponentHeaderSize = 4;
inline constexpr std::size_t kSerialLength = 16;
inline constexpr std::size_t kMaxNameLength = 32;
inline constexpr std::size_t kMaxOpaqueState = 1024;

enum class MessageType : std::uint16_t {
    keepalive = 1,
    replication = 4,
    election_request = 7,
    election_response = 8,
    force_secondary = 9,
    forced_leave = 10,
    owner_query = 11,
    owner_reply = 12,
    state_update = 13,
    ccl_ping = 14,
    ccl_pong = 15,
    config_sync = 16,
};

enum class ComponentType : std::uint16_t {
    selection_info = 2,
    radio_info = 3,
    ip_layer_conn_info = 5,
    upper_layer_conn_info = 6,
    owner_info = 17,
    probe = 18,
    leave_reason = 19,
    config = 20,
};

const char* to_string(MessageType type) noexcept;

enum class WireRole : std::uint8_t { primary_standby = 1, secondary = 2, primary = 3 };
enum class InterfaceMode : std::uint8_t { spanned_etherchannel = 0, individual = 1 };
enum class RadioType : std::uint8_t { access_point = 0, station = 1 };
enum class TcpState : std::uint8_t { none = 0, syn_sent = 1, established = 2, fin_wait = 3, closed = 4 };
enum class OwnerStatus : std::uint8_t { found = 0, unknown = 1, owner_down = 2 };
enum class LeaveReason : std::uint8_t {
    keepalive_miss = 1,
    iface_9s = 2,
    iface_500ms = 3,
    all_ifaces = 4,
    mode_mismatch = 5,
    administrative = 6,
};

const char* to_string(InterfaceMode mode) noexcept;
const char* to_string(RadioType type) noexcept;
const char* to_string(TcpState state) noexcept;
const char* to_string(LeaveReason reason) noexcept;

/// Fixed-width, space-padded serial number.
class Serial {
public:
    Serial() { bytes_.fill(' '); }
    /// Throws std::invalid_argument if longer than 16 bytes.
    explicit Serial(std::string_view text);

    static Serial from_raw(const std::array<char, kSerialLength>& raw);

    const std::array<char, kSerialLength>& raw() const noexcept { return bytes_; }
    std::string_view view() const noexcept { return {bytes_.data(), bytes_.size()}; }
    /// Without trailing padding.
    std::string trimmed() const;

    friend bool operator==(const Serial&, const Serial&) = default;

private:
    std::array<char, kSerialLength> bytes_{};
};

struct SelectionInfo {
    std::uint8_t priority = 100;  ///< 1 (highest) .. 100
    Serial serial;
    std::string name;  ///< at most 32 bytes
    WireRole role = WireRole::secondary;

    friend bool operator==(const SelectionInfo&, const SelectionInfo&) = default;
};

struct RadioInfo {
    InterfaceMode mode = InterfaceMode::spanned_etherchannel;
    RadioType radio_type = RadioType::access_point;
    std::int16_t snr_centi_db = 0;  ///< dB x 100
    std::uint16_t load_balancing_weight = 1;

    friend bool operator==(const RadioInfo&, const RadioInfo&) = default;
};

struct IpLayerConnInfo {
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::uint8_t protocol = 0;

    friend bool operator==(const IpLayerConnInfo&, const IpLayerConnInfo&) = default;
};

struct UpperLayerConnInfo {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    TcpState tcp_state = TcpState::none;
    std::uint32_t seq_num = 0;
    std::uint32_t ack_num = 0;
    std::vector<std::uint8_t> opaque_state;

    friend bool operator==(const UpperLayerConnInfo&, const UpperLayerConnInfo&) = default;
};

struct OwnerInfo {
    UnitId owner{};
    OwnerStatus status = OwnerStatus::found;

    friend bool operator==(const OwnerInfo&, const OwnerInfo&) = default;
};

struct ProbeInfo {
    std::uint32_t sequence = 0;
    std::uint64_t sent_at_us = 0;

    friend bool operator==(const ProbeInfo&, const ProbeInfo&) = default;
};

struct InterfaceRole {
    std::string interface_name;
    std::string role;

    friend bool operator==(const InterfaceRole&, const InterfaceRole&) = default;
};

struct ConfigInfo {
    std::uint32_t version = 0;
    std::string cluster_name;
    std::vector<InterfaceRole> interface_roles;

    friend bool operator==(const ConfigInfo&, const ConfigInfo&) = default;
};

struct Keepalive {
    SelectionInfo selection;
    RadioInfo radio;
    friend bool operator==(const Keepalive&, const Keepalive&) = default;
};

struct ElectionRequest {
    SelectionInfo selection;
    friend bool operator==(const ElectionRequest&, const ElectionRequest&) = default;
};

struct ElectionResponse {
    SelectionInfo selection;
    friend bool operator==(const ElectionResponse&, const ElectionResponse&) = default;
};

struct ForceSecondary {
    SelectionInfo selection;
    friend bool operator==(const ForceSecondary&, const ForceSecondary&) = default;
};

struct ForcedLeave {
    SelectionInfo selection;
    LeaveReason reason = LeaveReason::administrative;
    friend bool operator==(const ForcedLeave&, const ForcedLeave&) = default;
};

/// Connection state handed from a backup owner to whoever takes the flow over,
/// or between organizers when backups are rehomed (owner set in that case).
struct Replication {
    IpLayerConnInfo ip;
    std::optional<UpperLayerConnInfo> upper;
    std::optional<OwnerInfo> owner;
    friend bool operator==(const Replication&, const Replication&) = default;
};

struct StateUpdate {
    IpLayerConnInfo ip;
    UpperLayerConnInfo upper;
    friend bool operator==(const StateUpdate&, const StateUpdate&) = default;
};

struct OwnerQuery {
    IpLayerConnInfo ip;
    std::optional<UpperLayerConnInfo> upper;
    friend bool operator==(const OwnerQuery&, const OwnerQuery&) = default;
};

struct OwnerReply {
    IpLayerConnInfo ip;
    std::optional<UpperLayerConnInfo> upper;
    OwnerInfo owner;
    friend bool operator==(const OwnerReply&, const OwnerReply&) = default;
};

struct CclPing {
    ProbeInfo probe;
    friend bool operator==(const CclPing&, const CclPing&) = default;
};

struct CclPong {
    ProbeInfo probe;
    friend bool operator==(const CclPong&, const CclPong&) = default;
};

struct ConfigSync {
    ConfigInfo config;
    friend bool operator==(const ConfigSync&, const ConfigSync&) = default;
};

using Message = std::variant<Keepalive, ElectionRequest, ElectionResponse, ForceSecondary, ForcedLeave,
                             Replication, StateUpdate, OwnerQuery, OwnerReply, CclPing, CclPong, ConfigSync>;

MessageType type_of(const Message& msg) noexcept;

}  // namespace wbc::wire
