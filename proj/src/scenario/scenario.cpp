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

#include "wbc/scenario/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace wbc::scenario {

namespace {

using Fields = std::map<std::string, std::string>;

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) {
            out.emplace_back(piece);
        }
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> words(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string w; in >> w;) {
        out.push_back(std::move(w));
    }
    return out;
}

// Line-scoped helpers that throw with location.
struct Reader {
    int line = 0;

    [[noreturn]] void fail(const std::string& field, const std::string& message) const
    {
        throw ScenarioError(line, field, message);
    }

    double number(const std::string& field, std::string_view text) const
    {
        double v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size()) {
            fail(field, "expected a number, got '" + std::string(text) + "'");
        }
        return v;
    }

    long long integer(const std::string& field, std::string_view text, long long lo, long long hi) const
    {
        long long v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size()) {
            fail(field, "expected an integer, got '" + std::string(text) + "'");
        }
        if (v < lo || v > hi) {
            fail(field, "must be in " + std::to_string(lo) + "-" + std::to_string(hi));
        }
        return v;
    }

    double fraction(const std::string& field, std::string_view text, bool zero_ok) const
    {
        const double v = number(field, text);
        if (!(v <= 1.0 && (zero_ok ? v >= 0.0 : v > 0.0))) {
            fail(field, zero_ok ? "must be in [0,1]" : "must be in (0,1]");
        }
        return v;
    }

    sim::Duration duration(const std::string& field, std::string_view text, bool zero_ok = false) const
    {
        auto d = parse_duration(text);
        if (!d) {
            fail(field, "expected a duration such as 500ms or 9s, got '" + std::string(text) + "'");
        }
        if (d->count() < 0 || (!zero_ok && d->count() == 0)) {
            fail(field, "must be positive");
        }
        return *d;
    }

    bool flag(const std::string& field, std::string_view text) const
    {
        if (text == "true" || text == "on" || text == "yes" || text == "1") {
            return true;
        }
        if (text == "false" || text == "off" || text == "no" || text == "0") {
            return false;
        }
        fail(field, "expected on/off");
    }

    Ipv4 address(const std::string& field, std::string_view text) const
    {
        auto ip = Ipv4::parse(text);
        if (!ip) {
            fail(field, "invalid IPv4 address '" + std::string(text) + "'");
        }
        return *ip;
    }

    wire::InterfaceMode mode(const std::string& field, std::string_view text) const
    {
        if (text == "spanned" || text == "spanned-etherchannel") {
            return wire::InterfaceMode::spanned_etherchannel;
        }
        if (text == "individual") {
            return wire::InterfaceMode::individual;
        }
        fail(field, "expected spanned or individual");
    }

    Fields pairs(const std::vector<std::string>& tokens, std::size_t from) const
    {
        Fields out;
        for (std::size_t i = from; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string::npos || eq == 0) {
                fail(tokens[i], "expected key=value");
            }
            auto key = tokens[i].substr(0, eq);
            if (!out.emplace(key, tokens[i].substr(eq + 1)).second) {
                fail(key, "given twice");
            }
        }
        return out;
    }
};

const std::set<std::string> kUnitActions{"join",           "fail_unit",         "recover_unit", "manual_rejoin",
                                         "fail_interface", "recover_interface", "partition_ccl"};

void parse_cluster_line(const Reader& r, Scenario& s, const std::string& key, const std::string& value)
{
    auto& c = s.config;
    if (key == "name") {
        if (value.size() > 32) {
            r.fail(key, "at most 32 bytes");
        }
        c.cluster.name = value;
    } else if (key == "mode") {
        c.cluster.mode = r.mode(key, value);
        c.data_plane.mode = c.cluster.mode;
    } else if (key == "ccl_interface") {
        c.cluster.ccl_interface = value;
    } else if (key == "mgmt_interfaces") {
        c.cluster.mgmt_interfaces = split(value, ',');
    } else if (key == "data_interfaces") {
        c.data_interfaces.clear();
        c.cluster.data_interfaces.clear();
        for (const auto& item : split(value, ',')) {
            const auto colon = item.find(':');
            cluster::InterfaceSpec spec;
            spec.id = item.substr(0, colon);
            if (colon != std::string::npos) {
                auto kind = health::parse_interface_kind(item.substr(colon + 1));
                if (!kind) {
                    r.fail(key, "unknown interface kind '" + item.substr(colon + 1) + "'");
                }
                spec.kind = *kind;
            }
            c.cluster.data_interfaces.push_back(spec.id);
            c.data_interfaces.push_back(std::move(spec));
        }
    } else if (key == "interface_roles") {
        c.cluster.interface_roles.clear();
        for (const auto& item : split(value, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                r.fail(key, "expected iface:role");
            }
            c.cluster.interface_roles.push_back(wire::InterfaceRole{item.substr(0, colon), item.substr(colon + 1)});
        }
    } else if (key == "ip_pool") {
        c.cluster.ip_pool.clear();
        for (const auto& item : split(value, ',')) {
            const auto dash = item.find('-');
            if (dash == std::string::npos) {
                c.cluster.ip_pool.push_back(r.address(key, item));
                continue;
            }
            const auto lo = r.address(key, item.substr(0, dash));
            const auto hi = r.address(key, item.substr(dash + 1));
            if (hi < lo || hi.value - lo.value > 255) {
                r.fail(key, "range must be ascending and at most 256 addresses");
            }
            for (auto v = lo.value; v <= hi.value; ++v) {
                c.cluster.ip_pool.push_back(Ipv4{v});
            }
        }
    } else if (key == "main_cluster_ip") {
        c.cluster.main_cluster_ip = r.address(key, value);
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(r.integer(key, value, 0, std::numeric_limits<long long>::max()));
    } else if (key == "duration") {
        s.duration = r.duration(key, value);
    } else if (key == "keepalive_interval") {
        c.health.keepalive_interval = r.duration(key, value);
    } else if (key == "miss_threshold") {
        c.health.miss_threshold = static_cast<int>(r.integer(key, value, 1, 100));
    } else if (key == "rtt_probe_interval") {
        c.health.rtt_probe_interval = r.duration(key, value);
    } else if (key == "ccl_rtt_bound") {
        c.health.ccl_rtt_bound = r.duration(key, value);
    } else if (key == "sample_interval") {
        c.sample_interval = r.duration(key, value);
    } else if (key == "seq_randomization") {
        c.data_plane.seq_randomization = r.flag(key, value);
    } else if (key == "hash_fields") {
        auto f = flow::parse_hash_fields(value);
        if (!f) {
            r.fail(key, "expected src-dst-ip or src-dst-ip-port");
        }
        c.data_plane.hash_fields = *f;
    } else if (key == "rebalance") {
        c.data_plane.rebalance = r.flag(key, value);
    } else if (key == "rebalance_threshold") {
        c.data_plane.rebalance_threshold = r.number(key, value);
        if (!(c.data_plane.rebalance_threshold >= 1.0)) {
            r.fail(key, "must be at least 1");
        }
    } else if (key == "min_ports") {
        c.min_ports = static_cast<std::size_t>(r.integer(key, value, 1, 64));
    } else if (key == "rejoin_interval") {
        c.rejoin_interval = r.duration(key, value);
    } else if (key == "data_rejoin_attempts") {
        c.data_rejoin_attempts = static_cast<int>(r.integer(key, value, 0, 1000));
    } else {
        r.fail(key, "unknown cluster setting");
    }
}

cluster::UnitSpec parse_unit(const Reader& r, const std::vector<std::string>& tokens)
{
    cluster::UnitSpec u;
    u.label = tokens[0];
    u.identity.name = u.label;
    u.identity.serial = wire::Serial(u.label.size() <= wire::kSerialLength ? u.label : u.label.substr(0, 16));
    for (const auto& [key, value] : r.pairs(tokens, 1)) {
        if (key == "name") {
            if (value.empty() || value.size() > 32) {
                r.fail(key, "name must be 1-32 bytes");
            }
            u.identity.name = value;
        } else if (key == "serial") {
            if (value.size() > wire::kSerialLength) {
                r.fail(key, "serial must be at most 16 bytes");
            }
            u.identity.serial = wire::Serial(value);
        } else if (key == "priority") {
            u.identity.priority = static_cast<std::uint8_t>(r.integer(key, value, 1, 100));
        } else if (key == "radio") {
            if (value == "ap" || value == "access-point") {
                u.radio_type = wire::RadioType::access_point;
            } else if (value == "station" || value == "sta") {
                u.radio_type = wire::RadioType::station;
            } else {
                r.fail(key, "expected ap or station");
            }
        } else if (key == "phy") {
            u.radio.phy_mbps = r.number(key, value);
            if (!(u.radio.phy_mbps > 0)) {
                r.fail(key, "must be positive");
            }
        } else if (key == "duty_cycle") {
            u.radio.duty_cycle = r.fraction(key, value, false);
        } else if (key == "efficiency") {
            u.radio.efficiency = r.fraction(key, value, false);
        } else if (key == "per") {
            u.radio.per = r.fraction(key, value, true);
        } else if (key == "snr") {
            u.radio.snr_db = r.number(key, value);
        } else if (key == "evm") {
            u.radio.evm_db = r.number(key, value);
        } else if (key == "mcs") {
            u.radio.mcs_index = static_cast<int>(r.integer(key, value, 0, 31));
        } else if (key == "channel_width") {
            u.radio.channel_width_mhz = r.number(key, value);
        } else if (key == "tx_power") {
            u.radio.tx_power_dbm = r.number(key, value);
        } else if (key == "frequency") {
            u.radio.frequency_ghz = r.number(key, value);
        } else if (key == "weight") {
            u.weight = static_cast<std::uint16_t>(r.integer(key, value, 0, 65535));
        } else if (key == "mode") {
            u.mode = r.mode(key, value);
        } else if (key == "monitor_off") {
            u.unmonitored = split(value, ',');
        } else {
            r.fail(key, "unknown unit setting");
        }
    }
    return u;
}

void parse_channel(const Reader& r, Scenario& s, const std::vector<std::string>& tokens)
{
    sim::ChannelSpec* ch = nullptr;
    if (tokens[0] == "ccl") {
        ch = &s.config.ccl;
    } else if (tokens[0] == "data") {
        ch = &s.config.data;
    } else {
        r.fail(tokens[0], "unknown channel, expected ccl or data");
    }
    for (const auto& [key, value] : r.pairs(tokens, 1)) {
        if (key == "latency") {
            ch->base_latency = r.duration(key, value, true);
        } else if (key == "jitter") {
            ch->jitter = r.duration(key, value, true);
        } else if (key == "loss") {
            ch->loss_rate = r.fraction(key, value, true);
        } else {
            r.fail(key, "unknown channel setting");
        }
    }
}

Event parse_event(const Reader& r, const std::vector<std::string>& tokens)
{
    if (tokens.size() < 2) {
        r.fail("event", "expected '<time> <action> [args]'");
    }
    Event e;
    e.at = sim::SimTime::from(r.duration("time", tokens[0], true));
    e.action = tokens[1];
    e.args.assign(tokens.begin() + 2, tokens.end());
    e.line = r.line;
    const auto& known = known_actions();
    if (std::find(known.begin(), known.end(), e.action) == known.end()) {
        r.fail(e.action, "unknown action");
    }
    return e;
}

void check_event(const Reader& r, const Scenario& s, const Event& e)
{
    auto declared = [&](const std::string& label) {
        return std::any_of(s.units.begin(), s.units.end(), [&](const auto& u) { return u.label == label; });
    };
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (e.args.size() < lo || e.args.size() > hi) {
            r.fail(e.action, "expects " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
                                 " argument(s)");
        }
    };
    if (kUnitActions.count(e.action) != 0) {
        if (e.args.empty()) {
            r.fail(e.action, "missing unit");
        }
        if (!declared(e.args[0])) {
            r.fail(e.args[0], "undeclared unit");
        }
    }
    const auto& cl = s.config.cluster;
    if (e.action == "join" || e.action == "fail_unit" || e.action == "recover_unit" || e.action == "manual_rejoin") {
        need(1, 1);
    } else if (e.action == "fail_interface" || e.action == "recover_interface") {
        need(2, 2);
        const auto& iface = e.args[1];
        const bool data = std::any_of(s.config.data_interfaces.begin(), s.config.data_interfaces.end(),
                                      [&](const auto& d) { return d.id == iface; });
        const bool mgmt = std::find(cl.mgmt_interfaces.begin(), cl.mgmt_interfaces.end(), iface) !=
                          cl.mgmt_interfaces.end();
        if (!data && !mgmt && iface != cl.ccl_interface) {
            r.fail(iface, "unknown interface");
        }
    } else if (e.action == "partition_ccl") {
        need(1, 2);
        if (e.args.size() == 2) {
            r.flag("partition_ccl", e.args[1]);
        }
    } else if (e.action == "set_loss") {
        need(2, 2);
        if (e.args[0] != "all" && !declared(e.args[0])) {
            r.fail(e.args[0], "undeclared unit");
        }
        r.fraction("rate", e.args[1], true);
    } else if (e.action == "start_traffic") {
        for (const auto& [key, value] : r.pairs(e.args, 0)) {
            if (key == "connections") {
                r.integer(key, value, 0, 100000);
            } else if (key == "window") {
                r.integer(key, value, 1, 1 << 30);
            } else if (key == "rtt") {
                r.duration(key, value);
            } else {
                r.fail(key, "unknown traffic setting");
            }
        }
    } else if (e.action == "stop_traffic") {
        need(0, 0);
    } else if (e.action == "set_iface_role") {
        need(2, 2);
    }
}

}  // namespace

std::string Event::text() const
{
    std::string out = action;
    for (const auto& a : args) {
        out += ' ';
        out += a;
    }
    return out;
}

ScenarioError::ScenarioError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string{}) +
                         (field.empty() ? std::string{} : field + ": ") + message),
      line_(line), field_(std::move(field))
{
}

const std::vector<std::string>& known_actions()
{
    static const std::vector<std::string> actions{
        "join",          "fail_unit",    "recover_unit", "fail_interface", "recover_interface", "manual_rejoin",
        "start_traffic", "stop_traffic", "set_loss",     "partition_ccl",  "set_iface_role"};
    return actions;
}

std::optional<sim::Duration> parse_duration(std::string_view text)
{
    text = trim(text);
    std::size_t split_at = 0;
    while (split_at < text.size() && (std::isdigit(static_cast<unsigned char>(text[split_at])) != 0 ||
                                      text[split_at] == '.')) {
        ++split_at;
    }
    const auto num = text.substr(0, split_at);
    const auto unit = text.substr(split_at);
    double v = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (num.empty() || ec != std::errc{} || p != num.data() + num.size()) {
        return std::nullopt;
    }
    double scale = 0;
    if (unit.empty() || unit == "s") {
        scale = 1e6;
    } else if (unit == "ms") {
        scale = 1e3;
    } else if (unit == "us") {
        scale = 1;
    } else if (unit == "min") {
        scale = 60e6;
    } else if (unit == "h") {
        scale = 3600e6;
    } else {
        return std::nullopt;
    }
    const double us = v * scale;
    if (us > 9.0e18) {
        return std::nullopt;
    }
    return sim::Duration{static_cast<std::int64_t>(std::llround(us))};
}

Scenario parse_scenario(std::string_view text)
{
    Scenario s;
    std::string section;
    std::set<std::string> sections_seen;
    std::map<std::string, int> unit_lines;
    Reader r;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++r.line;
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                r.fail("section", "unterminated section header");
            }
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "cluster" && section != "units" && section != "channels" && section != "events") {
                r.fail(section, "unknown section");
            }
            if (!sections_seen.insert(section).second) {
                r.fail(section, "section given twice");
            }
            continue;
        }
        if (section.empty()) {
            r.fail("section", "content before the first section");
        }
        if (section == "cluster") {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                r.fail(std::string(line), "expected key = value");
            }
            parse_cluster_line(r, s, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
        } else if (section == "units") {
            auto tokens = words(line);
            if (unit_lines.count(tokens[0]) != 0) {
                r.fail(tokens[0], "unit declared twice");
            }
            unit_lines[tokens[0]] = r.line;
            s.units.push_back(parse_unit(r, tokens));
        } else if (section == "channels") {
            parse_channel(r, s, words(line));
        } else {
            s.events.push_back(parse_event(r, words(line)));
        }
    }

    if (s.units.empty()) {
        throw ScenarioError(0, "units", "at least one unit is required");
    }
    try {
        s.config.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(0, "cluster", e.what());
    }

    const auto spanned = static_cast<std::size_t>(
        std::count_if(s.config.data_interfaces.begin(), s.config.data_interfaces.end(), [](const auto& d) {
            return d.kind == health::InterfaceKind::spanned_etherchannel_member;
        }));
    for (std::size_t i = 0; i < s.units.size(); ++i) {
        const auto& u = s.units[i];
        Reader ur{unit_lines[u.label]};
        if (spanned * (i + 1) > flow::kMaxBundleLinks) {
            ur.fail(u.label, "bundle of " + std::to_string(spanned * s.units.size()) + " links exceeds max 6");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = s.units[j].identity;
            if (o.priority == u.identity.priority && o.name == u.identity.name && o.serial == u.identity.serial) {
                ur.fail(u.label, "same priority, name and serial as " + s.units[j].label);
            }
        }
        for (const auto& off : u.unmonitored) {
            if (std::none_of(s.config.data_interfaces.begin(), s.config.data_interfaces.end(),
                             [&](const auto& d) { return d.id == off; })) {
                ur.fail("monitor_off", "unknown data interface " + off);
            }
        }
    }
    if (s.units.size() > 255) {
        throw ScenarioError(0, "units", "at most 255 units");
    }

    for (const auto& e : s.events) {
        Reader er{e.line};
        check_event(er, s, e);
        if (e.at.since_start() > s.duration) {
            er.fail("time", "event after the scenario duration");
        }
    }
    std::stable_sort(s.events.begin(), s.events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError(0, path.string(), "cannot open scenario file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace wbc::scenario
