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

#include "wbc/wire/codec.hpp"

#include <algorithm>
#include <optional>

namespace wbc::wire {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v)
    {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v)
    {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    void u64(std::uint64_t v)
    {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void text(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

    /// Opens a TLV; the length is patched by end_component().
    std::size_t begin_component(ComponentType type)
    {
        u16(static_cast<std::uint16_t>(type));
        const std::size_t at = out_.size();
        u16(0);
        return at;
    }
    void end_component(std::size_t length_at)
    {
        const std::size_t len = out_.size() - length_at - 2;
        out_[length_at] = static_cast<std::uint8_t>(len >> 8);
        out_[length_at + 1] = static_cast<std::uint8_t>(len);
    }

    std::vector<std::uint8_t>& buffer() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    bool has(std::size_t n) const { return in_.size() - pos_ >= n; }
    std::size_t remaining() const { return in_.size() - pos_; }

    std::uint8_t u8() { return in_[pos_++]; }
    std::uint16_t u16()
    {
        const auto v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32()
    {
        const std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::uint64_t u64()
    {
        const std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    std::span<const std::uint8_t> take(std::size_t n)
    {
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::string text(std::size_t n)
    {
        auto s = take(n);
        return std::string(s.begin(), s.end());
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

// ---- validation -------------------------------------------------------------

void check_selection(const SelectionInfo& s)
{
    if (s.priority < 1 || s.priority > 100) {
        throw ValidationError("unit_priority", "must be in 1-100, got " + std::to_string(s.priority));
    }
    if (s.name.size() > kMaxNameLength) {
        throw ValidationError("name", "longer than 32 bytes");
    }
    if (s.role != WireRole::primary_standby && s.role != WireRole::secondary && s.role != WireRole::primary) {
        throw ValidationError("role", "unknown role code");
    }
}

void check_radio(const RadioInfo& r)
{
    if (r.mode != InterfaceMode::spanned_etherchannel && r.mode != InterfaceMode::individual) {
        throw ValidationError("mode", "unknown mode code");
    }
    if (r.radio_type != RadioType::access_point && r.radio_type != RadioType::station) {
        throw ValidationError("radio_type", "unknown radio type code");
    }
    if (r.snr_centi_db < -10000 || r.snr_centi_db > 10000) {
        throw ValidationError("snr", "outside -100..+100 dB");
    }
}

void check_upper(const UpperLayerConnInfo& u)
{
    if (static_cast<std::uint8_t>(u.tcp_state) > static_cast<std::uint8_t>(TcpState::closed)) {
        throw ValidationError("tcp_state", "unknown state code");
    }
    if (u.opaque_state.size() > kMaxOpaqueState) {
        throw ValidationError("opaque_state", "longer than 1024 bytes");
    }
}

void check_owner(const OwnerInfo& o)
{
    if (static_cast<std::uint8_t>(o.status) > static_cast<std::uint8_t>(OwnerStatus::owner_down)) {
        throw ValidationError("owner_status", "unknown status code");
    }
}

bool valid_leave_reason(std::uint8_t code) { return code >= 1 && code <= 6; }

void check_config(const ConfigInfo& c)
{
    if (c.cluster_name.size() > 255) {
        throw ValidationError("cluster_name", "longer than 255 bytes");
    }
    if (c.interface_roles.size() > 255) {
        throw ValidationError("interface_roles", "more than 255 entries");
    }
    for (const auto& r : c.interface_roles) {
        if (r.interface_name.size() > 255 || r.role.size() > 255) {
            throw ValidationError("interface_roles", "entry longer than 255 bytes");
        }
    }
}

// ---- component encoders -------------------------------------------------------

void put(Writer& w, const SelectionInfo& s)
{
    const auto at = w.begin_component(ComponentType::selection_info);
    w.u8(s.priority);
    w.u8(static_cast<std::uint8_t>(s.role));
    w.text(s.serial.view());
    w.u8(static_cast<std::uint8_t>(s.name.size()));
    w.text(s.name);
    w.end_component(at);
}

void put(Writer& w, const RadioInfo& r)
{
    const auto at = w.begin_component(ComponentType::radio_info);
    w.u8(static_cast<std::uint8_t>(r.mode));
    w.u8(static_cast<std::uint8_t>(r.radio_type));
    w.u16(static_cast<std::uint16_t>(r.snr_centi_db));
    w.u16(r.load_balancing_weight);
    w.end_component(at);
}

void put(Writer& w, const IpLayerConnInfo& ip)
{
    const auto at = w.begin_component(ComponentType::ip_layer_conn_info);
    w.u32(ip.src_ip.value);
    w.u32(ip.dst_ip.value);
    w.u8(ip.protocol);
    w.end_component(at);
}

void put(Writer& w, const UpperLayerConnInfo& u)
{
    const auto at = w.begin_component(ComponentType::upper_layer_conn_info);
    w.u16(u.src_port);
    w.u16(u.dst_port);
    w.u8(static_cast<std::uint8_t>(u.tcp_state));
    w.u32(u.seq_num);
    w.u32(u.ack_num);
    w.u16(static_cast<std::uint16_t>(u.opaque_state.size()));
    w.bytes(u.opaque_state);
    w.end_component(at);
}

void put(Writer& w, const OwnerInfo& o)
{
    const auto at = w.begin_component(ComponentType::owner_info);
    w.u8(to_underlying(o.owner));
    w.u8(static_cast<std::uint8_t>(o.status));
    w.end_component(at);
}

void put(Writer& w, const ProbeInfo& p)
{
    const auto at = w.begin_component(ComponentType::probe);
    w.u32(p.sequence);
    w.u64(p.sent_at_us);
    w.end_component(at);
}

void put(Writer& w, LeaveReason reason)
{
    const auto at = w.begin_component(ComponentType::leave_reason);
    w.u8(static_cast<std::uint8_t>(reason));
    w.end_component(at);
}

void put(Writer& w, const ConfigInfo& c)
{
    const auto at = w.begin_component(ComponentType::config);
    w.u32(c.version);
    w.u8(static_cast<std::uint8_t>(c.cluster_name.size()));
    w.text(c.cluster_name);
    w.u8(static_cast<std::uint8_t>(c.interface_roles.size()));
    for (const auto& r : c.interface_roles) {
        w.u8(static_cast<std::uint8_t>(r.interface_name.size()));
        w.text(r.interface_name);
        w.u8(static_cast<std::uint8_t>(r.role.size()));
        w.text(r.role);
    }
    w.end_component(at);
}

// ---- component decoders ------------------------------------------------------
//
// Each parser receives exactly the component body and must consume all of it.

struct Fail {
    DecodeError error;
};

template <class T>
using Parsed = std::variant<T, Fail>;

Parsed<SelectionInfo> parse_selection(Reader r)
{
    if (!r.has(2 + kSerialLength + 1)) {
        return Fail{DecodeError::truncated};
    }
    SelectionInfo s;
    s.priority = r.u8();
    const std::uint8_t role = r.u8();
    std::array<char, kSerialLength> raw{};
    auto serial = r.take(kSerialLength);
    std::copy(serial.begin(), serial.end(), raw.begin());
    s.serial = Serial::from_raw(raw);
    const std::uint8_t name_len = r.u8();
    if (!r.has(name_len)) {
        return Fail{DecodeError::truncated};
    }
    s.name = r.text(name_len);
    if (r.remaining() != 0) {
        return Fail{DecodeError::length_mismatch};
    }
    if (s.priority < 1 || s.priority > 100) {
        return Fail{DecodeError::priority_out_of_range};
    }
    if (role < 1 || role > 3 || name_len > kMaxNameLength) {
        return Fail{DecodeError::invalid_field};
    }
    s.role = static_cast<WireRole>(role);
    return s;
}

Parsed<RadioInfo> parse_radio(Reader r)
{
    if (r.remaining() != 6) {
        return Fail{r.remaining() < 6 ? DecodeError::truncated : DecodeError::length_mismatch};
    }
    const std::uint8_t mode = r.u8();
    const std::uint8_t type = r.u8();
    const auto snr = static_cast<std::int16_t>(r.u16());
    const std::uint16_t weight = r.u16();
    if (mode > 1 || type > 1 || snr < -10000 || snr > 10000) {
        return Fail{DecodeError::invalid_field};
    }
    return RadioInfo{static_cast<InterfaceMode>(mode), static_cast<RadioType>(type), snr, weight};
}

Parsed<IpLayerConnInfo> parse_ip(Reader r)
{
    if (r.remaining() != 9) {
        return Fail{r.remaining() < 9 ? DecodeError::truncated : DecodeError::length_mismatch};
    }
    IpLayerConnInfo ip;
    ip.src_ip = Ipv4{r.u32()};
    ip.dst_ip = Ipv4{r.u32()};
    ip.protocol = r.u8();
    return ip;
}

Parsed<UpperLayerConnInfo> parse_upper(Reader r)
{
    if (!r.has(15)) {
        return Fail{DecodeError::truncated};
    }
    UpperLayerConnInfo u;
    u.src_port = r.u16();
    u.dst_port = r.u16();
    const std::uint8_t state = r.u8();
    u.seq_num = r.u32();
    u.ack_num = r.u32();
    const std::uint16_t len = r.u16();
    if (!r.has(len)) {
        return Fail{DecodeError::truncated};
    }
    auto blob = r.take(len);
    u.opaque_state.assign(blob.begin(), blob.end());
    if (r.remaining() != 0) {
        return Fail{DecodeError::length_mismatch};
    }
    if (state > static_cast<std::uint8_t>(TcpState::closed) || len > kMaxOpaqueState) {
        return Fail{DecodeError::invalid_field};
    }
    u.tcp_state = static_cast<TcpState>(state);
    return u;
}

Parsed<OwnerInfo> parse_owner(Reader r)
{
    if (r.remaining() != 2) {
        return Fail{r.remaining() < 2 ? DecodeError::truncated : DecodeError::length_mismatch};
    }
    const auto owner = static_cast<UnitId>(r.u8());
    const std::uint8_t status = r.u8();
    if (status > static_cast<std::uint8_t>(OwnerStatus::owner_down)) {
        return Fail{DecodeError::invalid_field};
    }
    return OwnerInfo{owner, static_cast<OwnerStatus>(status)};
}

Parsed<ProbeInfo> parse_probe(Reader r)
{
    if (r.remaining() != 12) {
        return Fail{r.remaining() < 12 ? DecodeError::truncated : DecodeError::length_mismatch};
    }
    ProbeInfo p;
    p.sequence = r.u32();
    p.sent_at_us = r.u64();
    return p;
}

Parsed<LeaveReason> parse_reason(Reader r)
{
    if (r.remaining() != 1) {
        return Fail{r.remaining() < 1 ? DecodeError::truncated : DecodeError::length_mismatch};
    }
    const std::uint8_t code = r.u8();
    if (!valid_leave_reason(code)) {
        return Fail{DecodeError::invalid_field};
    }
    return static_cast<LeaveReason>(code);
}

Parsed<ConfigInfo> parse_config(Reader r)
{
    ConfigInfo c;
    if (!r.has(5)) {
        return Fail{DecodeError::truncated};
    }
    c.version = r.u32();
    const std::uint8_t name_len = r.u8();
    if (!r.has(name_len + 1u)) {
        return Fail{DecodeError::truncated};
    }
    c.cluster_name = r.text(name_len);
    const std::uint8_t count = r.u8();
    for (std::uint8_t i = 0; i < count; ++i) {
        InterfaceRole entry;
        if (!r.has(1)) {
            return Fail{DecodeError::truncated};
        }
        const std::uint8_t iface_len = r.u8();
        if (!r.has(iface_len + 1u)) {
            return Fail{DecodeError::truncated};
        }
        entry.interface_name = r.text(iface_len);
        const std::uint8_t role_len = r.u8();
        if (!r.has(role_len)) {
            return Fail{DecodeError::truncated};
        }
        entry.role = r.text(role_len);
        c.interface_roles.push_back(std::move(entry));
    }
    if (r.remaining() != 0) {
        return Fail{DecodeError::length_mismatch};
    }
    return c;
}

/// Known components collected from one message body.
struct Components {
    std::optional<SelectionInfo> selection;
    std::optional<RadioInfo> radio;
    std::optional<IpLayerConnInfo> ip;
    std::optional<UpperLayerConnInfo> upper;
    std::optional<OwnerInfo> owner;
    std::optional<ProbeInfo> probe;
    std::optional<LeaveReason> reason;
    std::optional<ConfigInfo> config;
    std::size_t unknown = 0;
};

template <class T, class F>
std::optional<DecodeError> store(std::optional<T>& slot, F&& parse, Reader body)
{
    if (slot) {
        return DecodeError::invalid_field;  // duplicate component
    }
    auto parsed = parse(body);
    if (auto* fail = std::get_if<Fail>(&parsed)) {
        return fail->error;
    }
    slot = std::move(std::get<T>(parsed));
    return std::nullopt;
}

std::variant<Components, DecodeError> parse_components(std::span<const std::uint8_t> body)
{
    Components c;
    Reader r(body);
    while (r.remaining() > 0) {
        if (!r.has(kComponentHeaderSize)) {
            return DecodeError::truncated;
        }
        const std::uint16_t type = r.u16();
        const std::uint16_t len = r.u16();
        if (!r.has(len)) {
            return DecodeError::truncated;
        }
        Reader comp(r.take(len));
        std::optional<DecodeError> err;
        switch (static_cast<ComponentType>(type)) {
        case ComponentType::selection_info:
            err = store(c.selection, parse_selection, comp);
            break;
        case ComponentType::radio_info:
            err = store(c.radio, parse_radio, comp);
            break;
        case ComponentType::ip_layer_conn_info:
            err = store(c.ip, parse_ip, comp);
            break;
        case ComponentType::upper_layer_conn_info:
            err = store(c.upper, parse_upper, comp);
            break;
        case ComponentType::owner_info:
            err = store(c.owner, parse_owner, comp);
            break;
        case ComponentType::probe:
            err = store(c.probe, parse_probe, comp);
            break;
        case ComponentType::leave_reason:
            err = store(c.reason, parse_reason, comp);
            break;
        case ComponentType::config:
            err = store(c.config, parse_config, comp);
            break;
        default:
            ++c.unknown;
            break;
        }
        if (err) {
            return *err;
        }
    }
    return c;
}

/// Components that are well-formed but not part of the message type are
/// treated like unknown ones.
std::size_t count_extra(const Components& c, std::initializer_list<bool> expected_present)
{
    std::size_t present = 0;
    for (bool b : {c.selection.has_value(), c.radio.has_value(), c.ip.has_value(), c.upper.has_value(),
                   c.owner.has_value(), c.probe.has_value(), c.reason.has_value(), c.config.has_value()}) {
        present += b ? 1 : 0;
    }
    std::size_t used = 0;
    for (bool b : expected_present) {
        used += b ? 1 : 0;
    }
    return present - used;
}

DecodeResult assemble(MessageType type, Components c)
{
    auto missing = DecodeError::missing_component;
    auto done = [&](Message m, std::initializer_list<bool> used) -> DecodeResult {
        return Decoded{std::move(m), c.unknown + count_extra(c, used)};
    };
    switch (type) {
    case MessageType::keepalive:
        if (!c.selection || !c.radio) {
            return missing;
        }
        return done(Keepalive{*c.selection, *c.radio}, {true, true});
    case MessageType::election_request:
        if (!c.selection) {
            return missing;
        }
        return done(ElectionRequest{*c.selection}, {true});
    case MessageType::election_response:
        if (!c.selection) {
            return missing;
        }
        return done(ElectionResponse{*c.selection}, {true});
    case MessageType::force_secondary:
        if (!c.selection) {
            return missing;
        }
        return done(ForceSecondary{*c.selection}, {true});
    case MessageType::forced_leave:
        if (!c.selection || !c.reason) {
            return missing;
        }
        return done(ForcedLeave{*c.selection, *c.reason}, {true, true});
    case MessageType::replication:
        if (!c.ip) {
            return missing;
        }
        return done(Replication{*c.ip, c.upper, c.owner}, {true, c.upper.has_value(), c.owner.has_value()});
    case MessageType::state_update:
        if (!c.ip || !c.upper) {
            return missing;
        }
        return done(StateUpdate{*c.ip, *c.upper}, {true, true});
    case MessageType::owner_query:
        if (!c.ip) {
            return missing;
        }
        return done(OwnerQuery{*c.ip, c.upper}, {true, c.upper.has_value()});
    case MessageType::owner_reply:
        if (!c.ip || !c.owner) {
            return missing;
        }
        return done(OwnerReply{*c.ip, c.upper, *c.owner}, {true, c.upper.has_value(), true});
    case MessageType::ccl_ping:
        if (!c.probe) {
            return missing;
        }
        return done(CclPing{*c.probe}, {true});
    case MessageType::ccl_pong:
        if (!c.probe) {
            return missing;
        }
        return done(CclPong{*c.probe}, {true});
    case MessageType::config_sync:
        if (!c.config) {
            return missing;
        }
        return done(ConfigSync{*c.config}, {true});
    }
    return DecodeError::unknown_message_type;
}

bool known_type(std::uint16_t code)
{
    switch (static_cast<MessageType>(code)) {
    case MessageType::keepalive:
    case MessageType::replication:
    case MessageType::election_request:
    case MessageType::election_response:
    case MessageType::force_secondary:
    case MessageType::forced_leave:
    case MessageType::owner_query:
    case MessageType::owner_reply:
    case MessageType::state_update:
    case MessageType::ccl_ping:
    case MessageType::ccl_pong:
    case MessageType::config_sync:
        return true;
    }
    return false;
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Serial::Serial(std::string_view text)
{
    if (text.size() > kSerialLength) {
        throw std::invalid_argument("serial number longer than 16 bytes");
    }
    bytes_.fill(' ');
    std::copy(text.begin(), text.end(), bytes_.begin());
}

Serial Serial::from_raw(const std::array<char, kSerialLength>& raw)
{
    Serial s;
    s.bytes_ = raw;
    return s;
}

std::string Serial::trimmed() const
{
    std::string s(bytes_.begin(), bytes_.end());
    s.erase(s.find_last_not_of(' ') + 1);
    return s;
}

MessageType type_of(const Message& msg) noexcept
{
    return std::visit(Overloaded{
                          [](const Keepalive&) { return MessageType::keepalive; },
                          [](const ElectionRequest&) { return MessageType::election_request; },
                          [](const ElectionResponse&) { return MessageType::election_response; },
                          [](const ForceSecondary&) { return MessageType::force_secondary; },
                          [](const ForcedLeave&) { return MessageType::forced_leave; },
                          [](const Replication&) { return MessageType::replication; },
                          [](const StateUpdate&) { return MessageType::state_update; },
                          [](const OwnerQuery&) { return MessageType::owner_query; },
                          [](const OwnerReply&) { return MessageType::owner_reply; },
                          [](const CclPing&) { return MessageType::ccl_ping; },
                          [](const CclPong&) { return MessageType::ccl_pong; },
                          [](const ConfigSync&) { return MessageType::config_sync; },
                      },
                      msg);
}

void validate(const Message& msg)
{
    std::visit(Overloaded{
                   [](const Keepalive& m) {
                       check_selection(m.selection);
                       check_radio(m.radio);
                   },
                   [](const ElectionRequest& m) { check_selection(m.selection); },
                   [](const ElectionResponse& m) { check_selection(m.selection); },
                   [](const ForceSecondary& m) { check_selection(m.selection); },
                   [](const ForcedLeave& m) {
                       check_selection(m.selection);
                       if (!valid_leave_reason(static_cast<std::uint8_t>(m.reason))) {
                           throw ValidationError("reason", "unknown leave reason code");
                       }
                   },
                   [](const Replication& m) {
                       if (m.upper) {
                           check_upper(*m.upper);
                       }
                       if (m.owner) {
                           check_owner(*m.owner);
                       }
                   },
                   [](const StateUpdate& m) { check_upper(m.upper); },
                   [](const OwnerQuery& m) {
                       if (m.upper) {
                           check_upper(*m.upper);
                       }
                   },
                   [](const OwnerReply& m) {
                       if (m.upper) {
                           check_upper(*m.upper);
                       }
                       check_owner(m.owner);
                   },
                   [](const CclPing&) {},
                   [](const CclPong&) {},
                   [](const ConfigSync& m) { check_config(m.config); },
               },
               msg);
}

std::vector<std::uint8_t> encode(const Message& msg)
{
    validate(msg);
    Writer w;
    w.u16(static_cast<std::uint16_t>(type_of(msg)));
    w.u16(kProtocolVersion);
    w.u16(0);
    std::visit(Overloaded{
                   [&](const Keepalive& m) {
                       put(w, m.selection);
                       put(w, m.radio);
                   },
                   [&](const ElectionRequest& m) { put(w, m.selection); },
                   [&](const ElectionResponse& m) { put(w, m.selection); },
                   [&](const ForceSecondary& m) { put(w, m.selection); },
                   [&](const ForcedLeave& m) {
                       put(w, m.selection);
                       put(w, m.reason);
                   },
                   [&](const Replication& m) {
                       put(w, m.ip);
                       if (m.upper) {
                           put(w, *m.upper);
                       }
                       if (m.owner) {
                           put(w, *m.owner);
                       }
                   },
                   [&](const StateUpdate& m) {
                       put(w, m.ip);
                       put(w, m.upper);
                   },
                   [&](const OwnerQuery& m) {
                       put(w, m.ip);
                       if (m.upper) {
                           put(w, *m.upper);
                       }
                   },
                   [&](const OwnerReply& m) {
                       put(w, m.ip);
                       if (m.upper) {
                           put(w, *m.upper);
                       }
                       put(w, m.owner);
                   },
                   [&](const CclPing& m) { put(w, m.probe); },
                   [&](const CclPong& m) { put(w, m.probe); },
                   [&](const ConfigSync& m) { put(w, m.config); },
               },
               msg);
    auto& buf = w.buffer();
    const std::size_t body = buf.size() - kHeaderSize;
    if (body > 0xFFFF) {
        throw ValidationError("length", "message body exceeds 65535 bytes");
    }
    buf[4] = static_cast<std::uint8_t>(body >> 8);
    buf[5] = static_cast<std::uint8_t>(body);
    return std::move(buf);
}

DecodeResult decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHeaderSize) {
        return DecodeError::truncated;
    }
    Reader header(bytes.first(kHeaderSize));
    const std::uint16_t type = header.u16();
    const std::uint16_t version = header.u16();
    const std::uint16_t length = header.u16();
    if (version != kProtocolVersion) {
        return DecodeError::bad_version;
    }
    const std::size_t available = bytes.size() - kHeaderSize;
    if (length > available) {
        return DecodeError::truncated;
    }
    if (length < available) {
        return DecodeError::length_mismatch;
    }
    if (!known_type(type)) {
        return DecodeError::unknown_message_type;
    }
    auto parsed = parse_components(bytes.subspan(kHeaderSize, length));
    if (auto* err = std::get_if<DecodeError>(&parsed)) {
        return *err;
    }
    return assemble(static_cast<MessageType>(type), std::move(std::get<Components>(parsed)));
}

std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view text)
{
    std::vector<std::uint8_t> out;
    int pending = -1;
    for (char c : text) {
        int v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else if (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
            if (pending >= 0) {
                return {};
            }
            continue;
        } else {
            return {};
        }
        if (pending < 0) {
            pending = v;
        } else {
            out.push_back(static_cast<std::uint8_t>((pending << 4) | v));
            pending = -1;
        }
    }
    if (pending >= 0) {
        return {};
    }
    return out;
}

const char* to_string(DecodeError err) noexcept
{
    switch (err) {
    case DecodeError::truncated:
        return "truncated";
    case DecodeError::bad_version:
        return "bad-version";
    case DecodeError::length_mismatch:
        return "length-mismatch";
    case DecodeError::priority_out_of_range:
        return "priority-out-of-range";
    case DecodeError::unknown_message_type:
        return "unknown-message-type";
    case DecodeError::missing_component:
        return "missing-component";
    case DecodeError::invalid_field:
        return "invalid-field";
    }
    return "?";
}

const char* to_string(MessageType type) noexcept
{
    switch (type) {
    case MessageType::keepalive:
        return "CLUSTER_KEEPALIVE";
    case MessageType::replication:
        return "CLUSTER_REPLICATION";
    case MessageType::election_request:
        return "ELECTION_REQUEST";
    case MessageType::election_response:
        return "ELECTION_RESPONSE";
    case MessageType::force_secondary:
        return "FORCE_SECONDARY";
    case MessageType::forced_leave:
        return "FORCED_LEAVE";
    case MessageType::owner_query:
        return "OWNER_QUERY";
    case MessageType::owner_reply:
        return "OWNER_REPLY";
    case MessageType::state_update:
        return "STATE_UPDATE";
    case MessageType::ccl_ping:
        return "CCL_PING";
    case MessageType::ccl_pong:
        return "CCL_PONG";
    case MessageType::config_sync:
        return "CONFIG_SYNC";
    }
    return "?";
}

const char* to_string(InterfaceMode mode) noexcept
{
    return mode == InterfaceMode::individual ? "individual" : "spanned-etherchannel";
}

const char* to_string(RadioType type) noexcept
{
    return type == RadioType::station ? "station" : "access-point";
}

const char* to_string(TcpState state) noexcept
{
    switch (state) {
    case TcpState::none:
        return "n/a";
    case TcpState::syn_sent:
        return "syn-sent";
    case TcpState::established:
        return "established";
    case TcpState::fin_wait:
        return "fin-wait";
    case TcpState::closed:
        return "closed";
    }
    return "?";
}

const char* to_string(LeaveReason reason) noexcept
{
    switch (reason) {
    case LeaveReason::keepalive_miss:
        return "keepalive-miss";
    case LeaveReason::iface_9s:
        return "iface-9s";
    case LeaveReason::iface_500ms:
        return "iface-500ms";
    case LeaveReason::all_ifaces:
        return "all-ifaces";
    case LeaveReason::mode_mismatch:
        return "mode-mismatch";
    case LeaveReason::administrative:
        return "administrative";
    }
    return "?";
}

}  // namespace wbc::wire
