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

#include "wbc/election/elector.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace wbc;
using namespace wbc::election;

namespace {

wire::SelectionInfo unit(std::uint8_t prio, std::string name, std::string serial = "S")
{
    wire::SelectionInfo s;
    s.priority = prio;
    s.name = std::move(name);
    s.serial = wire::Serial(serial);
    return s;
}

// Independent ranking key: (priority, name bytes, serial bytes) compared as
// unsigned octets.
bool oracle_less(const wire::SelectionInfo& a, const wire::SelectionInfo& b)
{
    if (a.priority != b.priority) {
        return a.priority < b.priority;
    }
    auto bytes = [](std::string_view s) {
        return std::vector<unsigned char>(s.begin(), s.end());
    };
    const auto an = bytes(a.name);
    const auto bn = bytes(b.name);
    if (an != bn) {
        return std::lexicographical_compare(an.begin(), an.end(), bn.begin(), bn.end());
    }
    const auto as = bytes(a.serial.view());
    const auto bs = bytes(b.serial.view());
    return std::lexicographical_compare(as.begin(), as.end(), bs.begin(), bs.end());
}

template <class T>
bool sends_to(const Effects& fx, const Ipv4& group)
{
    return std::any_of(fx.sends.begin(), fx.sends.end(), [&](const Send& s) {
        const auto* g = std::get_if<Ipv4>(&s.to);
        return g && *g == group && std::holds_alternative<T>(s.msg);
    });
}

constexpr UnitId A{1};
constexpr UnitId B{2};

}  // namespace

TEST_CASE("compare_units ranks lower priority number first")
{
    CHECK(compare_units(unit(1, "x"), unit(99, "a")).priority == 1);
    CHECK(compare_units(unit(99, "a"), unit(1, "x")).priority == 1);
}

TEST_CASE("compare_units breaks priority ties by name then serial")
{
    CHECK(compare_units(unit(10, "ap1"), unit(10, "ap2")).name == "ap1");
    CHECK(compare_units(unit(10, "ap", "B000"), unit(10, "ap", "A000")).serial.trimmed() == "A000");
    CHECK(compare_units(unit(10, "b", "A"), unit(10, "a", "Z")).name == "a");
}

TEST_CASE("compare_units rejects duplicate identities")
{
    CHECK_THROWS_AS(compare_units(unit(5, "a", "X"), unit(5, "a", "X")), DuplicateIdentity);
}

TEST_CASE("comparator matches the oracle and is a strict total order on a small domain")
{
    std::vector<wire::SelectionInfo> all;
    for (std::uint8_t p : {1, 2, 100}) {
        for (const char* n : {"", "a", "b", "ab", "\xff"}) {
            for (const char* s : {"A", "B", "AA"}) {
                all.push_back(unit(p, n, s));
            }
        }
    }
    for (const auto& a : all) {
        for (const auto& b : all) {
            if (&a == &b) {
                continue;
            }
            const bool ab = outranks(a, b);
            CHECK(ab == oracle_less(a, b));
            CHECK(ab != outranks(b, a));
            for (const auto& c : all) {
                if (&c == &a || &c == &b) {
                    continue;
                }
                if (ab && outranks(b, c)) {
                    CHECK(outranks(a, c));
                }
            }
        }
    }
}

TEST_CASE("recompute_primary2 picks the rank-2 member")
{
    SUBCASE("priorities 1, 2, 3")
    {
        std::vector<Member> m{{UnitId{1}, unit(1, "a")}, {UnitId{2}, unit(2, "b")}, {UnitId{3}, unit(3, "c")}};
        CHECK(recompute_primary2(m) == UnitId{2});
    }
    SUBCASE("single member has no standby")
    {
        std::vector<Member> m{{UnitId{1}, unit(1, "a")}};
        CHECK_FALSE(recompute_primary2(m).has_value());
    }
    SUBCASE("priorities 5, 5, 7 with names a, b, c")
    {
        std::vector<Member> m{{UnitId{3}, unit(7, "c")}, {UnitId{1}, unit(5, "a")}, {UnitId{2}, unit(5, "b")}};
        CHECK(recompute_primary2(m) == UnitId{2});
    }
}

TEST_CASE("first unit self-declares after the response timer and retries run out")
{
    Elector e(A, unit(10, "a"));
    auto fx = e.on_join(JoinMode::bootstrap);
    CHECK(sends_to<wire::ElectionRequest>(fx, sim::kElectionGroup));
    CHECK(fx.response_timer == TimerAction::arm);
    CHECK(fx.timer_delay == std::chrono::seconds(3));
    for (int retry = 0; retry < 2; ++retry) {
        fx = e.on_response_timeout();
        CHECK(sends_to<wire::ElectionRequest>(fx, sim::kElectionGroup));
        CHECK(e.role() == Role::unjoined);
    }
    fx = e.on_response_timeout();
    CHECK(fx.became_primary);
    CHECK(fx.outcome == JoinOutcome::joined_primary);
    CHECK(sends_to<wire::ForceSecondary>(fx, sim::kForceSecondaryGroup));
    CHECK(e.role() == Role::primary);
    CHECK(e.identity().role == wire::WireRole::primary);
}

TEST_CASE("rejoin mode treats silence as failure")
{
    Elector e(A, unit(10, "a"));
    e.on_join(JoinMode::rejoin);
    e.on_response_timeout();
    e.on_response_timeout();
    auto fx = e.on_response_timeout();
    CHECK(fx.outcome == JoinOutcome::failed_no_response);
    CHECK_FALSE(fx.became_primary);
    CHECK(e.role() == Role::unjoined);
}

TEST_CASE("only the primary answers election requests")
{
    Elector secondary(B, unit(50, "b"));
    secondary.on_join(JoinMode::bootstrap);
    CHECK_FALSE(secondary.on_election_request(A, unit(1, "a")).has_value());

    Elector primary(A, unit(10, "a"));
    primary.on_join(JoinMode::bootstrap);
    primary.on_response_timeout();
    primary.on_response_timeout();
    primary.on_response_timeout();
    auto reply = primary.on_election_request(B, unit(1, "z"));
    REQUIRE(reply.has_value());
    CHECK(std::get<UnitId>(reply->to) == B);
    CHECK(std::holds_alternative<wire::ElectionResponse>(reply->msg));
}

TEST_CASE("joiner that outranks the primary preempts it")
{
    Elector joiner(B, unit(1, "j"));
    joiner.on_join(JoinMode::bootstrap);
    auto primary_info = unit(10, "p");
    primary_info.role = wire::WireRole::primary;
    auto fx = joiner.on_election_response(A, primary_info);
    CHECK(fx.became_primary);
    CHECK(fx.response_timer == TimerAction::cancel);
    CHECK(sends_to<wire::ForceSecondary>(fx, sim::kForceSecondaryGroup));
    CHECK(joiner.role() == Role::primary);
}

TEST_CASE("lower-ranked joiner becomes secondary")
{
    Elector joiner(B, unit(50, "j"));
    joiner.on_join(JoinMode::bootstrap);
    auto fx = joiner.on_election_response(A, unit(10, "p"));
    CHECK(fx.outcome == JoinOutcome::joined_secondary);
    CHECK(joiner.role() == Role::secondary);
    CHECK(joiner.primary() == A);
}

TEST_CASE("equal priority with a larger name stays secondary")
{
    Elector joiner(B, unit(10, "zz"));
    joiner.on_join(JoinMode::bootstrap);
    joiner.on_election_response(A, unit(10, "aa"));
    CHECK(joiner.role() == Role::secondary);
}

TEST_CASE("primary that receives a higher-ranked force-secondary steps down")
{
    Elector p(A, unit(10, "p"));
    p.on_join(JoinMode::bootstrap);
    p.on_response_timeout();
    p.on_response_timeout();
    p.on_response_timeout();
    REQUIRE(p.role() == Role::primary);
    auto fx = p.on_force_secondary(B, unit(1, "new"));
    CHECK(fx.stepped_down);
    CHECK(p.role() == Role::secondary);
    CHECK(p.primary() == B);
}

TEST_CASE("primary reasserts itself against a lower-ranked claimant")
{
    Elector p(A, unit(1, "p"));
    p.on_join(JoinMode::bootstrap);
    p.on_response_timeout();
    p.on_response_timeout();
    p.on_response_timeout();
    auto fx = p.on_competing_primary(B, unit(50, "q"));
    CHECK_FALSE(fx.stepped_down);
    CHECK(sends_to<wire::ForceSecondary>(fx, sim::kForceSecondaryGroup));
    CHECK(p.role() == Role::primary);
}

TEST_CASE("secondary ignores force-secondary from a unit its primary outranks")
{
    Elector s(UnitId{3}, unit(50, "s"));
    s.on_join(JoinMode::bootstrap);
    s.on_election_response(A, unit(1, "p"));
    REQUIRE(s.primary() == A);
    s.on_force_secondary(B, unit(20, "q"));
    CHECK(s.primary() == A);
    s.on_force_secondary(UnitId{4}, unit(1, "a"));  // (1,"a") outranks (1,"p")
    CHECK(s.primary() == UnitId{4});
}

TEST_CASE("primary loss: rank-1 survivor takes over")
{
    SUBCASE("priorities 1, 2, 3 and unit 1 fails")
    {
        Elector two(UnitId{2}, unit(2, "b"));
        Elector three(UnitId{3}, unit(3, "c"));
        for (auto* e : {&two, &three}) {
            e->on_join(JoinMode::bootstrap);
            e->on_election_response(UnitId{1}, unit(1, "a"));
        }
        std::vector<Member> for_two{{UnitId{3}, unit(3, "c")}};
        std::vector<Member> for_three{{UnitId{2}, unit(2, "b")}};
        auto fx2 = two.on_primary_loss(for_two);
        auto fx3 = three.on_primary_loss(for_three);
        CHECK(fx2.became_primary);
        CHECK(fx2.successor == UnitId{2});
        CHECK(fx3.successor == UnitId{2});
        CHECK(two.role() == Role::primary);
        std::vector<Member> rest{{UnitId{3}, unit(3, "c")}, {UnitId{2}, unit(2, "b")}};
        CHECK(recompute_primary2(rest) == UnitId{3});
    }
    SUBCASE("two units, survivor is primary with no standby")
    {
        Elector two(UnitId{2}, unit(2, "b"));
        two.on_join(JoinMode::bootstrap);
        two.on_election_response(UnitId{1}, unit(1, "a"));
        auto fx = two.on_primary_loss({});
        CHECK(fx.became_primary);
        std::vector<Member> alone{{UnitId{2}, unit(2, "b")}};
        CHECK_FALSE(recompute_primary2(alone).has_value());
    }
    SUBCASE("no survivors at all")
    {
        CHECK_FALSE(elect_successor({}).has_value());
    }
}

TEST_CASE("repeated primary failure follows comparator order")
{
    sim::Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Member> members;
        for (int i = 0; i < 5; ++i) {
            members.push_back({UnitId{static_cast<std::uint8_t>(i + 1)},
                               unit(static_cast<std::uint8_t>(rng.between(1, 100)), std::string(1, char('a' + i)))});
        }
        auto expected = members;
        std::sort(expected.begin(), expected.end(),
                  [](const Member& a, const Member& b) { return oracle_less(a.info, b.info); });
        auto alive = members;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const auto next = elect_successor(alive);
            REQUIRE(next.has_value());
            CHECK(*next == expected[k].id);
            alive.erase(std::find_if(alive.begin(), alive.end(), [&](const Member& m) { return m.id == *next; }));
        }
    }
}

TEST_CASE("set_primary2 only toggles between secondary and primary-2")
{
    Elector s(B, unit(2, "b"));
    s.on_join(JoinMode::bootstrap);
    s.on_election_response(A, unit(1, "a"));
    s.set_primary2(true);
    CHECK(s.role() == Role::primary2);
    CHECK(s.identity().role == wire::WireRole::primary_standby);
    s.set_primary2(false);
    CHECK(s.role() == Role::secondary);
}
