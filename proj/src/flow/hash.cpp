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

#include "wbc/flow/hash.hpp"

#include <numeric>
#include <stdexcept>

namespace wbc::flow {

const char* to_string(HashFields f) noexcept
{
    return f == HashFields::src_dst_ip ? "src-dst-ip" : "src-dst-ip-port";
}

std::optional<HashFields> parse_hash_fields(std::string_view text)
{
    if (text == "src-dst-ip") {
        return HashFields::src_dst_ip;
    }
    if (text == "src-dst-ip-port") {
        return HashFields::src_dst_ip_port;
    }
    return std::nullopt;
}

HashConfig HashConfig::uniform(std::size_t buckets, HashFields fields)
{
    HashConfig c;
    c.fields = fields;
    c.weights.assign(buckets, 1);
    return c;
}

void HashConfig::validate() const
{
    if (weights.empty() || weights.size() > kMaxBundleLinks) {
        throw std::invalid_argument("bucket count must be 1-" + std::to_string(kMaxBundleLinks) + ", got " +
                                    std::to_string(weights.size()));
    }
    if (std::accumulate(weights.begin(), weights.end(), std::uint64_t{0}) == 0) {
        throw std::invalid_argument("at least one link needs a non-zero weight");
    }
}

std::uint32_t flow_hash(const FlowKey& key, HashFields fields) noexcept
{
    const FlowKey k = key.canonical();
    std::uint32_t h = fmix32(k.src_ip.value ^ 0x9e3779b9U);
    h = fmix32(h ^ (k.dst_ip.value * 0x85ebca6bU + 0x27d4eb2fU));
    if (fields == HashFields::src_dst_ip_port) {
        h = fmix32(h ^ ((std::uint32_t{k.src_port} << 16) | k.dst_port));
    }
    return h;
}

std::size_t symmetric_hash(const FlowKey& key, const HashConfig& config)
{
    config.validate();
    const std::size_t n = config.bucket_count();
    if (n == 1) {
        return 0;
    }
    const std::uint64_t total = std::accumulate(config.weights.begin(), config.weights.end(), std::uint64_t{0});
    // Multiply-shift maps the 32-bit hash onto [0, total) without modulo bias.
    const std::uint64_t point = (std::uint64_t{flow_hash(key, config.fields)} * total) >> 32;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += config.weights[i];
        if (point < acc) {
            return i;
        }
    }
    return n - 1;
}

UnitId ring_target(const FlowKey& key, std::span<const UnitId> ring, HashFields fields)
{
    if (ring.empty()) {
        throw std::invalid_argument("no live members to organize flows");
    }
    return ring[flow_hash(key, fields) % ring.size()];
}

UnitId choose_organizer(const FlowKey& key, std::span<const UnitId> ring, UnitId proprietor, HashFields fields)
{
    if (ring.empty()) {
        throw std::invalid_argument("no live members to organize flows");
    }
    const std::size_t n = ring.size();
    const std::size_t idx = flow_hash(key, fields) % n;
    if (ring[idx] == proprietor && n >= 2) {
        return ring[(idx + 1) % n];
    }
    return ring[idx];
}

}  // namespace wbc::flow
