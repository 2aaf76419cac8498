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

#include "wbc/cluster/simulation.hpp"

#include "wbc/cluster/unit_agent.hpp"

#include <algorithm>
#include <stdexcept>

namespace wbc::cluster {

void SimulationConfig::validate() const
{
    cluster.validate();
    health.validate();
    ccl.validate();
    data.validate();
    if (sample_interval.count() <= 0) {
        throw std::invalid_argument("sample_interval must be positive");
    }
    if (data_interfaces.empty()) {
        throw std::invalid_argument("at least one data interface is required");
    }
    for (std::size_t i = 0; i < data_interfaces.size(); ++i) {
        const auto& id = data_interfaces[i].id;
        if (id == cluster.ccl_interface) {
            throw std::invalid_argument("CCL interface " + id + " cannot carry data");
        }
        for (std::size_t j = i + 1; j < data_interfaces.size(); ++j) {
            if (data_interfaces[j].id == id) {
                throw std::invalid_argument("duplicate data interface " + id);
            }
        }
    }
    if (min_ports == 0) {
        throw std::invalid_argument("min_ports must be at least 1");
    }
    if (rejoin_interval.count() <= 0) {
        throw std::invalid_argument("rejoin_interval must be positive");
    }
    if (data_rejoin_attempts < 0) {
        throw std::invalid_argument("data_rejoin_attempts must not be negative");
    }
    if (!(data_plane.rebalance_threshold >= 1.0)) {
        throw std::invalid_argument("rebalance_threshold must be at least 1");
    }
}

Simulation::Simulation(SimulationConfig config, std::vector<UnitSpec> units)
    : config_(std::move(config)), engine_(config_.seed), network_(engine_),
      data_plane_(config_.data_plane, engine_.rng(), &engine_.metrics()), main_ip_(config_.cluster.main_cluster_ip)
{
    config_.validate();
    if (units.empty() || units.size() > 255) {
        throw std::invalid_argument("a cluster needs between 1 and 255 units");
    }
    data_plane_.set_labeler([this](UnitId u) { return label(u); });
    for (std::size_t i = 0; i < units.size(); ++i) {
        units[i].radio.validate();
        const auto id = static_cast<UnitId>(i + 1);
        units_.emplace(id, std::make_unique<UnitAgent>(*this, id, std::move(units[i])));
        network_.attach(id, [this, id](UnitId from, std::span<const std::uint8_t> bytes) {
            at(id).on_message(from, bytes);
        });
        for (auto group : {sim::kElectionGroup, sim::kForceSecondaryGroup, sim::kKeepaliveGroup}) {
            network_.subscribe(id, group);
        }
        network_.set_up(id, false);
    }
}

Simulation::~Simulation() = default;

UnitAgent& Simulation::at(UnitId unit)
{
    auto it = units_.find(unit);
    if (it == units_.end()) {
        throw std::out_of_range("unknown unit " + std::to_string(to_underlying(unit)));
    }
    return *it->second;
}

const UnitAgent& Simulation::at(UnitId unit) const
{
    auto it = units_.find(unit);
    if (it == units_.end()) {
        throw std::out_of_range("unknown unit " + std::to_string(to_underlying(unit)));
    }
    return *it->second;
}

// Actions ------------------------------------------------------------------

void Simulation::join(UnitId unit)
{
    at(unit).join();
}

void Simulation::fail_unit(UnitId unit)
{
    at(unit).power_off();
    check_etherchannel();
    membership_changed();
}

void Simulation::recover_unit(UnitId unit)
{
    at(unit).recover();
}

void Simulation::fail_interface(UnitId unit, const std::string& iface)
{
    at(unit).set_interface(iface, false);
    check_etherchannel();
    membership_changed();
}

void Simulation::recover_interface(UnitId unit, const std::string& iface)
{
    at(unit).set_interface(iface, true);
    check_etherchannel();
    membership_changed();
}

void Simulation::manual_rejoin(UnitId unit)
{
    at(unit).manual_rejoin();
}

void Simulation::set_loss(std::optional<UnitId> unit, double rate)
{
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("loss rate must be in [0,1]");
    }
    if (unit) {
        at(*unit);
        loss_override_[*unit] = rate;
        return;
    }
    for (const auto& [id, agent] : units_) {
        loss_override_[id] = rate;
    }
}

void Simulation::partition_ccl(UnitId unit, bool on)
{
    if (on) {
        partitioned_.insert(unit);
    } else {
        partitioned_.erase(unit);
    }
    refresh_isolation(unit);
}

void Simulation::refresh_isolation(UnitId unit)
{
    network_.set_isolated(unit, partitioned_.count(unit) != 0 || !at(unit).ccl_up());
}

void Simulation::set_iface_role(const std::string& iface, const std::string& role)
{
    bool applied = false;
    for (auto& [id, agent] : units_) {
        if (agent->joined() && agent->role() == election::Role::primary) {
            agent->set_interface_role(iface, role);
            applied = true;
        }
    }
    if (!applied) {
        log().count("config.no_primary");
    }
}

void Simulation::run_until(sim::SimTime until)
{
    engine_.run(until);
}

// Queries ------------------------------------------------------------------

std::optional<UnitId> Simulation::find(const std::string& label) const
{
    for (const auto& [id, agent] : units_) {
        if (agent->spec().label == label) {
            return id;
        }
    }
    return std::nullopt;
}

const std::string& Simulation::label(UnitId unit) const
{
    return at(unit).spec().label;
}

std::vector<UnitId> Simulation::unit_ids() const
{
    std::vector<UnitId> out;
    for (const auto& [id, agent] : units_) {
        out.push_back(id);
    }
    return out;
}

const UnitAgent& Simulation::agent(UnitId unit) const
{
    return at(unit);
}

election::Role Simulation::role(UnitId unit) const
{
    return at(unit).role();
}

std::string Simulation::state(UnitId unit) const
{
    return at(unit).state();
}

std::vector<UnitId> Simulation::members() const
{
    std::vector<UnitId> out;
    for (const auto& [id, agent] : units_) {
        if (agent->joined()) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<UnitId> Simulation::lb_set() const
{
    std::vector<UnitId> out;
    for (const auto& [id, agent] : units_) {
        if (agent->joined() && agent->data_link_up()) {
            out.push_back(id);
        }
    }
    return out;
}

double Simulation::unit_goodput(UnitId unit) const
{
    const auto& radio = at(unit).spec().radio;
    return link::effective_goodput(link::LinkRates::from(radio), radio.per);
}

std::size_t Simulation::ordinal(UnitId unit) const
{
    return static_cast<std::size_t>(to_underlying(unit)) - 1;
}

// Agent services -----------------------------------------------------------

void Simulation::send(UnitId src, const sim::Destination& dest, const wire::Message& msg)
{
    sim::ChannelSpec channel = config_.ccl;
    if (auto it = loss_override_.find(src); it != loss_override_.end()) {
        channel.loss_rate = it->second;
    }
    log().count(std::string("msg.") + wire::to_string(wire::type_of(msg)));
    network_.send(src, dest, msg, channel);
}

void Simulation::bind_main_ip(UnitId unit)
{
    if (!main_ip_.transfer(unit)) {
        return;
    }
    metrics::MetricRow r;
    r.at = engine_.now();
    r.record = "main_ip";
    r.unit = label(unit);
    r.detail = main_ip_.address().to_string();
    log().add(std::move(r));
}

void Simulation::release_main_ip(UnitId unit)
{
    main_ip_.release(unit);
}

void Simulation::membership_changed()
{
    auto m = members();
    if (m != last_members_) {
        last_members_ = m;
        data_plane_.set_members(m, engine_.now());
        check_etherchannel();
    }
    auto lb = lb_set();
    if (lb != last_lb_) {
        if (traffic_active_) {
            for (auto u : lb) {
                if (std::find(last_lb_.begin(), last_lb_.end(), u) == last_lb_.end()) {
                    emit_link_rates(u);
                }
            }
        }
        last_lb_ = std::move(lb);
    }
}

void Simulation::report_interface(UnitId unit, const health::InterfaceState& iface)
{
    auto& reporter = at(unit);
    if (reporter.joined()) {
        if (reporter.role() == election::Role::primary) {
            reporter.on_member_interface(unit, iface);
        } else if (auto p = reporter.primary(); p && units_.count(*p) != 0) {
            auto& primary = at(*p);
            const bool reachable = !network_.is_isolated(unit) && !network_.is_isolated(*p);
            if (primary.joined() && primary.role() == election::Role::primary && reachable) {
                primary.on_member_interface(unit, iface);
            }
        }
    }
    check_etherchannel();
    membership_changed();
}

void Simulation::check_etherchannel()
{
    std::vector<health::InterfaceState> ports;
    bool any_member = false;
    for (const auto& [id, agent] : units_) {
        if (!agent->joined()) {
            continue;
        }
        any_member = true;
        for (const auto& i : agent->interfaces()) {
            if (agent->data_admin_down()) {
                auto down = i;
                down.up = false;
                ports.push_back(down);
            } else {
                ports.push_back(i);
            }
        }
    }
    const bool failed = any_member && health::echan_failed(ports, config_.min_ports);
    if (failed == echan_failed_) {
        return;
    }
    echan_failed_ = failed;
    metrics::MetricRow r;
    r.at = engine_.now();
    r.record = "echan_failed";
    r.unit = "cluster";
    r.value = failed ? 1.0 : 0.0;
    r.detail = failed ? "below-min-ports" : "restored";
    log().add(std::move(r));
}

// Traffic ------------------------------------------------------------------

void Simulation::emit_link_rates(UnitId unit)
{
    const auto& radio = at(unit).spec().radio;
    const auto l = link::LinkRates::from(radio);
    const double goodput = link::effective_goodput(l, radio.per);
    auto emit = [&](const char* dir, double phy, double cycle, double eff, double mac) {
        metrics::MetricRow r;
        r.at = engine_.now();
        r.record = "link_rates";
        r.unit = label(unit);
        r.phy_mbps = phy;
        r.duty_cycle = cycle;
        r.mac_efficiency = eff;
        r.mac_mbps = mac;
        r.goodput_mbps = goodput;
        r.detail = dir;
        log().add(std::move(r));
    };
    emit("tx", l.phy_tx, l.duty_cycle_tx, l.mac_efficiency_tx, l.mac_tx);
    emit("rx", l.phy_rx, l.duty_cycle_rx, l.mac_efficiency_rx, l.mac_rx);
}

flow::HashConfig Simulation::lb_hash(const std::vector<UnitId>& lb) const
{
    flow::HashConfig cfg;
    cfg.fields = config_.data_plane.hash_fields;
    cfg.weights.clear();
    for (auto u : lb) {
        cfg.weights.push_back(at(u).spec().weight);
    }
    return cfg;
}

void Simulation::start_traffic(const TrafficSpec& spec)
{
    link::IperfConfig ic;
    ic.connections = spec.connections;
    ic.window_bytes = spec.window_bytes;
    if (spec.rtt) {
        ic.rtt = *spec.rtt;
    } else if (config_.data.base_latency.count() > 0) {
        ic.rtt = config_.data.base_latency * 2;
    }
    traffic_ = link::iperf_generator(ic);
    traffic_active_ = true;
    const std::uint64_t epoch = ++traffic_epoch_;
    last_lb_ = lb_set();
    for (auto u : last_lb_) {
        emit_link_rates(u);
    }
    for (const auto& f : traffic_) {
        handshake(f);
    }
    engine_.schedule_after(config_.sample_interval, sim::EventKind::timer_expiry, [this, epoch] {
        if (epoch == traffic_epoch_) {
            sample();
        }
    });
}

void Simulation::stop_traffic()
{
    traffic_active_ = false;
    ++traffic_epoch_;
}

void Simulation::handshake(const link::TrafficFlow& f)
{
    const auto lb = lb_set();
    if (lb.empty()) {
        log().count("traffic.no_link");
        return;
    }
    const auto cfg = lb_hash(lb);
    const auto now = engine_.now();
    flow::Packet syn{f.key, flow::Segment::syn, static_cast<std::uint32_t>(engine_.rng().next()), 0};
    const auto out = data_plane_.on_packet(lb[flow::symmetric_hash(f.key, cfg)], syn, now);
    if (!out.delivered) {
        log().count("traffic.syn_dropped");
        return;
    }
    const auto reply_key = f.key.reversed();
    flow::Packet syn_ack{reply_key, flow::Segment::syn_ack, static_cast<std::uint32_t>(engine_.rng().next()),
                         out.rewritten_seq + 1};
    if (!data_plane_.on_packet(lb[flow::symmetric_hash(reply_key, cfg)], syn_ack, now).delivered) {
        log().count("traffic.syn_ack_dropped");
    }
}

void Simulation::sample()
{
    const auto now = engine_.now();
    const auto lb = lb_set();
    std::map<UnitId, double> offered;
    for (auto u : lb) {
        offered[u] = 0.0;
    }
    if (lb.empty()) {
        log().count("traffic.no_link", traffic_.size());
    } else {
        const auto cfg = lb_hash(lb);
        for (const auto& f : traffic_) {
            const auto arrival = lb[flow::symmetric_hash(f.key, cfg)];
            const auto out = data_plane_.on_packet(arrival, flow::Packet{f.key, flow::Segment::data, 0, 0}, now);
            if (out.delivered) {
                offered[arrival] += f.offered_mbps;
            } else {
                log().count("traffic.dropped");
            }
        }
    }
    double total_offered = 0.0;
    double total_delivered = 0.0;
    for (const auto& [u, load] : offered) {
        const double g = unit_goodput(u);
        const double delivered = std::min(load, g);
        total_offered += load;
        total_delivered += delivered;
        metrics::MetricRow r;
        r.at = now;
        r.record = "throughput";
        r.unit = label(u);
        r.offered_mbps = load;
        r.delivered_mbps = delivered;
        r.goodput_mbps = g;
        log().add(std::move(r));
    }
    metrics::MetricRow agg;
    agg.at = now;
    agg.record = "throughput";
    agg.unit = "cluster";
    agg.offered_mbps = total_offered;
    agg.delivered_mbps = total_delivered;
    log().add(std::move(agg));

    const std::uint64_t epoch = traffic_epoch_;
    engine_.schedule_after(config_.sample_interval, sim::EventKind::timer_expiry, [this, epoch] {
        if (epoch == traffic_epoch_) {
            sample();
        }
    });
}

}  // namespace wbc::cluster
