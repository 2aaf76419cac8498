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

#include "support/cluster.hpp"

#include "wbc/metrics/metrics_log.hpp"
#include "wbc/sim/engine.hpp"
#include "wbc/sim/network.hpp"

#include <doctest.h>

#include <charconv>
#include <sstream>

using namespace wbc;
using namespace wbc::sim;
using namespace std::chrono_literals;

namespace {

wire::Message ping(std::uint32_t seq)
{
    return wire::CclPing{wire::ProbeInfo{seq, 0}};
}

struct Fabric {
    Engine engine{99};
    Network net{engine};
    std::vector<std::pair<SimTime, std::pair<UnitId, UnitId>>> deliveries;

    explicit Fabric(int units)
    {
        for (int i = 1; i <= units; ++i) {
            const UnitId me{static_cast<std::uint8_t>(i)};
            net.attach(me, [this, me](UnitId from, std::span<const std::uint8_t>) {
                deliveries.push_back({engine.now(), {from, me}});
            });
            net.subscribe(me, kElectionGroup);
        }
    }
};

std::vector<TraceEntry> random_run(std::uint64_t seed)
{
    Engine e(seed);
    std::vector<TraceEntry> trace;
    e.record_trace(&trace);
    // Each event may spawn a follow-up at a random later time.
    std::function<void(int)> spawn = [&](int depth) {
        if (depth > 0) {
            e.schedule_after(Duration{static_cast<std::int64_t>(e.rng().below(1000))}, EventKind::timer_expiry,
                             [&, depth] { spawn(depth - 1); });
        }
    };
    for (int i = 0; i < 50000; ++i) {
        e.schedule(SimTime{e.rng().below(1'000'000)}, EventKind::scenario_injection, [&] { spawn(1); });
    }
    e.run(SimTime{10'000'000});
    return trace;
}

}  // namespace

TEST_CASE("time constants convert exactly to microseconds")
{
    CHECK(SimTime::from(9s).micros() == 9'000'000);
    CHECK(SimTime::from(90s).micros() == 90'000'000);
    CHECK(SimTime::from(500ms).micros() == 500'000);
    CHECK(SimTime::from(5min).micros() == 300'000'000);
    CHECK(SimTime::from(20ms).micros() == 20'000);
    CHECK(format_seconds(SimTime::from(109s)) == "109.000000");
    CHECK(format_seconds(SimTime{10'500'001}) == "10.500001");
    CHECK((SimTime{5} - 10us) == SimTime{0});
}

TEST_CASE("events pop by time, then in insertion order")
{
    Engine e(1);
    std::vector<int> order;
    e.schedule(SimTime{5}, EventKind::timer_expiry, [&] { order.push_back(1); });
    e.schedule(SimTime{5}, EventKind::timer_expiry, [&] { order.push_back(2); });
    e.schedule(SimTime{3}, EventKind::timer_expiry, [&] { order.push_back(3); });
    e.run(SimTime{10});
    CHECK(order == std::vector<int>{3, 1, 2});
    CHECK(e.now() == SimTime{5});
}

TEST_CASE("empty queue leaves the clock alone")
{
    Engine e(1);
    e.run(SimTime{1'000'000});
    CHECK(e.now() == SimTime{0});
    CHECK(e.processed() == 0);
}

TEST_CASE("run(0) with later events processes nothing")
{
    Engine e(1);
    bool fired = false;
    e.schedule(SimTime{1}, EventKind::timer_expiry, [&] { fired = true; });
    e.run(SimTime{0});
    CHECK_FALSE(fired);
    CHECK(e.pending() == 1);
}

TEST_CASE("scheduling in the past is an invariant violation")
{
    Engine e(1);
    e.schedule(SimTime{10}, EventKind::timer_expiry, [] {});
    e.run(SimTime{10});
    CHECK_THROWS_AS(e.schedule(SimTime{9}, EventKind::timer_expiry, [] {}), InvariantViolation);
    CHECK_NOTHROW(e.schedule(SimTime{10}, EventKind::timer_expiry, [] {}));
}

TEST_CASE("cancelled events do not fire")
{
    Engine e(1);
    int fired = 0;
    const auto id = e.schedule(SimTime{1}, EventKind::timer_expiry, [&] { ++fired; });
    e.schedule(SimTime{2}, EventKind::timer_expiry, [&] { ++fired; });
    e.cancel(id);
    e.run(SimTime{5});
    CHECK(fired == 1);
}

TEST_CASE("same seed replays the same event sequence; clock never goes back")
{
    const auto a = random_run(7);
    const auto b = random_run(7);
    CHECK(a.size() > 50000);
    CHECK(a == b);
    for (std::size_t i = 1; i < a.size(); ++i) {
        REQUIRE(a[i - 1].at <= a[i].at);
        if (a[i - 1].at == a[i].at) {
            CHECK(a[i - 1].seq < a[i].seq);
        }
    }
    CHECK(random_run(8) != a);
}

TEST_CASE("unicast with 1 ms latency arrives exactly 1 ms later")
{
    Fabric f(2);
    f.engine.schedule(SimTime{500}, EventKind::timer_expiry,
                      [&] { f.net.send(UnitId{1}, UnitId{2}, ping(1), ChannelSpec{1ms, 0us, 0.0}); });
    f.engine.run(SimTime{10'000});
    REQUIRE(f.deliveries.size() == 1);
    CHECK(f.deliveries[0].first == SimTime{1500});
}

TEST_CASE("multicast fans out to every subscriber but the sender")
{
    Fabric f(5);
    f.net.send(UnitId{1}, kElectionGroup, ping(1), ChannelSpec{1ms, 0us, 0.0});
    f.engine.run(SimTime{10'000});
    CHECK(f.deliveries.size() == 4);
    for (const auto& d : f.deliveries) {
        CHECK(d.second.first == UnitId{1});
        CHECK(d.second.second != UnitId{1});
    }
}

TEST_CASE("loss rate one half drops about half")
{
    Fabric f(2);
    for (int i = 0; i < 10000; ++i) {
        f.net.send(UnitId{1}, UnitId{2}, ping(i), ChannelSpec{1ms, 0us, 0.5});
    }
    f.engine.run(SimTime{10'000});
    const double fraction = static_cast<double>(f.deliveries.size()) / 10000.0;
    CHECK(fraction >= 0.48);
    CHECK(fraction <= 0.52);
}

TEST_CASE("jitter never delivers before the send")
{
    Fabric f(2);
    f.engine.schedule(SimTime{100}, EventKind::timer_expiry, [&] {
        for (int i = 0; i < 1000; ++i) {
            f.net.send(UnitId{1}, UnitId{2}, ping(i), ChannelSpec{1us, 50us, 0.0});
        }
    });
    f.engine.run(SimTime{10'000});
    REQUIRE(f.deliveries.size() == 1000);
    for (const auto& d : f.deliveries) {
        CHECK(d.first >= SimTime{100});
        CHECK(d.first <= SimTime{151});
    }
}

TEST_CASE("unknown destinations are dropped and counted")
{
    Fabric f(2);
    f.net.send(UnitId{1}, UnitId{42}, ping(1), ChannelSpec{});
    f.net.send(UnitId{1}, Ipv4{224, 9, 9, 9}, ping(1), ChannelSpec{});
    f.engine.run(SimTime{10});
    CHECK(f.net.counters().dropped_unreachable == 2);
    CHECK(f.engine.metrics().counter("net.dropped_unreachable") == 2);
    CHECK(f.deliveries.empty());
}

TEST_CASE("channel settings validation")
{
    CHECK_THROWS_AS((ChannelSpec{-1us, 0us, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChannelSpec{1us, 0us, 1.5}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ChannelSpec{1us, 0us, 1.0}.validate()));
}

TEST_CASE("sent equals delivered plus dropped once the queue drains")
{
    Fabric f(4);
    f.net.set_up(UnitId{3}, false);
    for (int i = 0; i < 3000; ++i) {
        const UnitId src{static_cast<std::uint8_t>(i % 4 + 1)};
        if (i % 3 == 0) {
            f.net.send(src, kElectionGroup, ping(i), ChannelSpec{1ms, 500us, 0.2});
        } else {
            f.net.send(src, UnitId{static_cast<std::uint8_t>((i + 1) % 5 + 1)}, ping(i), ChannelSpec{1ms, 0us, 0.2});
        }
    }
    f.engine.run(SimTime{1'000'000});
    const auto& c = f.net.counters();
    CHECK(c.sent == c.delivered + c.dropped());
    CHECK(c.delivered == f.deliveries.size());
    CHECK(c.dropped_down > 0);
    CHECK(c.dropped_loss > 0);
}

TEST_CASE("one join at 1 s: the unit is primary by 10 s")
{
    auto sim = testgen::simulation(R"(
[cluster]
ip_pool = 10.0.0.10-10.0.0.11

[units]
u1 priority=5

[events]
1s join u1
)");
    sim->run_until(testgen::at_s(10));
    CHECK(sim->state(*sim->find("u1")) == "primary");
    const auto t = testgen::transitions(*sim, "u1");
    REQUIRE_FALSE(t.empty());
    CHECK(t.back().new_state == "primary");
    CHECK(t.back().at == testgen::at_s(10));
}

TEST_CASE("identical runs produce byte-identical metrics")
{
    const std::string text = R"(
[cluster]
ip_pool = 10.0.0.10-10.0.0.17
seed = 21

[units]
u1 priority=1
u2 priority=2
u3 priority=3

[channels]
ccl latency=2ms jitter=1ms loss=0.05

[events]
0s join u1
1s join u2
2s join u3
12s start_traffic connections=20
30s fail_unit u1
)";
    auto dump = [&] {
        auto sim = testgen::simulation(text);
        sim->run_until(testgen::at_s(45));
        std::ostringstream out;
        sim->log().write_metrics_csv(out);
        sim->log().write_membership_csv(out);
        sim->log().write_flows_csv(out);
        return out.str();
    };
    const auto a = dump();
    CHECK(a.size() > 1000);
    CHECK(a == dump());
}

TEST_CASE("metric numbers print as the shortest round-tripping text")
{
    for (double v : {0.0, 1.0, 398.0, 0.1, 1.0 / 3.0, 1592.0000000000002, 1e-7, 123456789.125}) {
        const auto s = metrics::format_double(v);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(metrics::format_double(398.0) == "398");
    CHECK(metrics::format_double(0.5) == "0.5");
}

TEST_CASE("csv writers emit schema line, header, then rows")
{
    metrics::MetricsLog log;
    metrics::MetricRow r;
    r.at = SimTime{1'500'000};
    r.record = "rtt";
    r.unit = "u2";
    r.rtt_us = 4000;
    log.add(r);
    r.record = "event";
    r.rtt_us.reset();
    r.detail = "say \"a,b\"";
    log.add(r);
    log.count("x", 3);
    log.flush_counters(SimTime{2'000'000});
    std::ostringstream out;
    log.write_metrics_csv(out);
    const auto text = out.str();
    const std::string preamble = "# wbcluster metrics schema 1\n" + std::string(metrics::metrics_header()) + "\n";
    CHECK(text.rfind(preamble, 0) == 0);
    CHECK(text.find("1500000,rtt,u2,") != std::string::npos);
    CHECK(text.find("rtt,u2") != std::string::npos);
    CHECK(text.find("\"say \"\"a,b\"\"\"\n") != std::string::npos);
    CHECK(text.find("2000000,counter,") != std::string::npos);
    CHECK(log.counter("x") == 3);
    CHECK(log.counter("missing") == 0);
}
