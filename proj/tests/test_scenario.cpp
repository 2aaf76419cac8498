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

#include "wbc/metrics/metrics_log.hpp"
#include "wbc/scenario/runner.hpp"
#include "wbc/scenario/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace wbc;
using namespace wbc::scenario;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

const std::string kMinimal = R"(
[cluster]
duration = 10s

[units]
u1 priority=1

[events]
0s join u1
)";

ScenarioError error_for(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e;
    }
    FAIL("scenario was accepted");
    return ScenarioError(0, "", "");
}

struct Result {
    int rc = -1;
    std::string output;
};

Result cli(const std::string& args)
{
    const std::string cmd = std::string(WBC_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p) != nullptr) {
        r.output += buf.data();
    }
    const int status = pclose(p);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("wbc_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

TEST_CASE("minimal scenario is valid")
{
    const auto s = parse_scenario(kMinimal);
    CHECK(s.units.size() == 1);
    CHECK(s.events.size() == 1);
    CHECK(s.duration == 10s);
    CHECK(s.units[0].identity.priority == 1);
    CHECK(s.units[0].identity.name == "u1");
}

TEST_CASE("durations")
{
    CHECK(parse_duration("250ms") == 250ms);
    CHECK(parse_duration("9s") == 9s);
    CHECK(parse_duration("5min") == 5min);
    CHECK(parse_duration("1500us") == 1500us);
    CHECK(parse_duration("1h") == 1h);
    CHECK(parse_duration("2.5") == 2500ms);
    CHECK_FALSE(parse_duration("soon").has_value());
    CHECK_FALSE(parse_duration("-1s").has_value());
}

TEST_CASE("priority outside 1-100 is rejected with its location")
{
    std::string text = kMinimal;
    text.replace(text.find("priority=1"), 10, "priority=0");
    const auto e = error_for(text);
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("1-100") != std::string::npos);
    CHECK(std::string(e.what()).find("line 6") != std::string::npos);

    text.replace(text.find("priority=0"), 10, "priority=101");
    CHECK(std::string(error_for(text).what()).find("1-100") != std::string::npos);
}

TEST_CASE("a seven-link bundle is rejected citing the maximum of six")
{
    std::string units;
    for (int i = 1; i <= 7; ++i) {
        units += "u" + std::to_string(i) + " priority=" + std::to_string(i) + "\n";
    }
    const auto e = error_for("[cluster]\nip_pool = 10.0.0.10-10.0.0.20\n[units]\n" + units + "[events]\n0s join u1\n");
    CHECK(std::string(e.what()).find("max 6") != std::string::npos);

    const auto six = parse_scenario("[units]\n" + units.substr(0, units.rfind("u7")) + "[events]\n0s join u1\n");
    CHECK(six.units.size() == 6);
}

TEST_CASE("unknown actions and undeclared units are located")
{
    auto e = error_for(kMinimal + "5s explode u1\n");
    CHECK(e.line() == 10);
    CHECK(std::string(e.what()).find("explode") != std::string::npos);

    e = error_for(kMinimal + "5s fail_unit u9\n");
    CHECK(e.line() == 10);
    CHECK(std::string(e.what()).find("u9") != std::string::npos);

    e = error_for(kMinimal + "20s fail_unit u1\n");
    CHECK(e.line() == 10);
}

TEST_CASE("other invalid inputs")
{
    CHECK_THROWS_AS(parse_scenario("[bogus]\n"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("[units]\nu1 priority=1\nu1 priority=2\n"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("[units]\nu1 priority=1 name=x serial=s\nu2 priority=1 name=x serial=s\n"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario("[channels]\nccl loss=2\n"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("[cluster]\ndata_interfaces = ccl0:spanned\n"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("[units]\nu1 priority=1 per=1.5\n"), ScenarioError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.scn"), ScenarioError);
}

TEST_CASE("events are sorted by time, keeping file order within an instant")
{
    const auto s = parse_scenario(kMinimal + "5s fail_unit u1\n2s set_loss all 0.1\n5s recover_unit u1\n");
    std::vector<std::string> order;
    for (const auto& e : s.events) {
        order.push_back(e.action);
    }
    CHECK(order == std::vector<std::string>{"join", "set_loss", "fail_unit", "recover_unit"});
}

TEST_CASE("every documented action is known")
{
    const auto& known = known_actions();
    for (const char* a : {"join", "fail_unit", "recover_unit", "fail_interface", "recover_interface", "manual_rejoin",
                          "start_traffic", "stop_traffic", "set_loss", "partition_ccl"}) {
        CHECK(std::find(known.begin(), known.end(), a) != known.end());
    }
}

TEST_CASE("bundled scenarios load")
{
    for (const auto& entry : fs::directory_iterator(WBC_SCENARIOS)) {
        if (entry.path().extension() == ".scn") {
            CAPTURE(entry.path().string());
            CHECK_NOTHROW(load_scenario(entry.path()));
        }
    }
}

TEST_CASE("cli exit codes")
{
    TempDir dir("exit");
    const auto good = dir.write("good.scn", kMinimal);
    std::string bad_text = kMinimal;
    bad_text.replace(bad_text.find("priority=1"), 10, "priority=0");
    const auto bad = dir.write("bad.scn", bad_text);

    CHECK(cli("validate " + good.string()).rc == 0);
    const auto invalid = cli("validate " + bad.string());
    CHECK(invalid.rc == 2);
    CHECK(invalid.output.find("1-100") != std::string::npos);
    CHECK(cli("").rc == 1);
    CHECK(cli("frobnicate").rc == 1);
    CHECK(cli("simulate " + good.string()).rc == 1);
    CHECK(cli("simulate " + good.string() + " --out " + (dir.path / "o").string() + " --until -3").rc == 1);
    CHECK(cli("simulate " + bad.string() + " --out " + (dir.path / "o").string()).rc == 2);

    const auto schema = cli("schema");
    CHECK(schema.rc == 0);
    CHECK(schema.output.find(std::string(metrics::metrics_header())) != std::string::npos);
    CHECK(schema.output.find(std::string(metrics::membership_header())) != std::string::npos);
    CHECK(schema.output.find(std::string(metrics::flows_header())) != std::string::npos);
}

TEST_CASE("cli simulate writes all outputs and is deterministic")
{
    TempDir dir("det");
    const std::string scn = std::string(WBC_SCENARIOS) + "/primary_failover.scn";
    REQUIRE(cli("simulate " + scn + " --out " + (dir.path / "a").string()).rc == 0);
    REQUIRE(cli("simulate " + scn + " --out " + (dir.path / "b").string()).rc == 0);
    REQUIRE(cli("simulate " + scn + " --out " + (dir.path / "c").string() + " --seed 999").rc == 0);
    for (const char* f : {"metrics.csv", "membership.csv", "flows.csv", "summary.txt"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(dir.path / "a" / f));
        CHECK(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f));
    }
    CHECK(slurp(dir.path / "a" / "metrics.csv") != slurp(dir.path / "c" / "metrics.csv"));
    CHECK(slurp(dir.path / "a" / "metrics.csv").rfind("# wbcluster metrics schema 1\n", 0) == 0);
    CHECK(slurp(dir.path / "a" / "membership.csv").rfind("# wbcluster membership schema 1\n", 0) == 0);
    CHECK(slurp(dir.path / "a" / "flows.csv").rfind("# wbcluster flows schema 1\n", 0) == 0);
}

TEST_CASE("csv columns match the pinned schema")
{
    std::ifstream in(WBC_TEST_DATA "/schema/csv_columns.json");
    REQUIRE(in);
    const auto golden = nlohmann::json::parse(in);
    auto joined = [](const nlohmann::json& cols) {
        std::string out;
        for (const auto& c : cols) {
            out += (out.empty() ? "" : ",") + c.get<std::string>();
        }
        return out;
    };
    const auto& files = golden.at("files");
    CHECK(joined(files.at("metrics.csv")) == metrics::metrics_header());
    CHECK(joined(files.at("membership.csv")) == metrics::membership_header());
    CHECK(joined(files.at("flows.csv")) == metrics::flows_header());

    TempDir dir("pin");
    REQUIRE(cli("simulate " + std::string(WBC_SCENARIOS) + "/single_unit.scn --out " + dir.path.string()).rc == 0);
    const auto version = std::to_string(golden.at("version").get<int>());
    for (const auto& [file, cols] : files.items()) {
        CAPTURE(file);
        std::ifstream csv(dir.path / file);
        std::string first;
        std::string second;
        std::getline(csv, first);
        std::getline(csv, second);
        const auto tail = " schema " + version;
        CHECK(first.rfind("# wbcluster ", 0) == 0);
        REQUIRE(first.size() > tail.size());
        CHECK(first.compare(first.size() - tail.size(), tail.size(), tail) == 0);
        CHECK(second == joined(cols));
    }
}

TEST_CASE("every scenario event appears exactly once as an event row, and rows are time-ordered")
{
    TempDir dir("events");
    for (const auto& entry : fs::directory_iterator(WBC_SCENARIOS)) {
        if (entry.path().extension() != ".scn") {
            continue;
        }
        CAPTURE(entry.path().string());
        const auto scenario = load_scenario(entry.path());
        const auto out = dir.path / entry.path().stem();
        REQUIRE(cli("simulate " + entry.path().string() + " --out " + out.string()).rc == 0);
        const auto rows = csv_rows(slurp(out / "metrics.csv"));
        REQUIRE(rows.size() > 1);
        std::map<std::string, int> seen;
        std::uint64_t last = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto t = std::stoull(rows[i][0]);
            CHECK(t >= last);
            last = t;
            if (rows[i][1] == "event") {
                ++seen[rows[i][0] + " " + rows[i].back()];
            }
        }
        std::map<std::string, int> expected;
        for (const auto& e : scenario.events) {
            ++expected[std::to_string(e.at.micros()) + " " + e.text()];
        }
        CHECK(seen == expected);
    }
}

TEST_CASE("with_clustering aggregates four units; unit_removed steps down when a unit fails")
{
    TempDir dir("shape");
    auto aggregate = [](const std::string& metrics, double from, double to) {
        double last = 0;
        for (const auto& r : csv_rows(metrics)) {
            if (r[1] == "throughput" && r[2] == "cluster") {
                const double t = std::stod(r[0]) / 1e6;
                if (t >= from && t < to) {
                    last = std::stod(r[6]);
                }
            }
        }
        return last;
    };
    const std::string base = std::string(WBC_SCENARIOS) + "/";
    REQUIRE(cli("simulate " + base + "with_clustering.scn --out " + (dir.path / "w").string()).rc == 0);
    REQUIRE(cli("simulate " + base + "unit_removed.scn --out " + (dir.path / "r").string()).rc == 0);
    const double g = 1000 * 0.5 * 0.8 * (1 - 0.005);
    const auto with = slurp(dir.path / "w" / "metrics.csv");
    CHECK(aggregate(with, 30, 120) == doctest::Approx(4 * g));
    const auto removed = slurp(dir.path / "r" / "metrics.csv");
    CHECK(aggregate(removed, 30, 60) == doctest::Approx(4 * g));
    CHECK(aggregate(removed, 70, 120) == doctest::Approx(3 * g));
    const auto summary = slurp(dir.path / "w" / "summary.txt");
    CHECK(summary.find("steady_aggregate_mbps=1592") != std::string::npos);
}
