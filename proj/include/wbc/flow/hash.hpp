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
#include "wbc/flow/flow_key.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wbc::flow {

/// A bundle spans at most six links.
inline constexpr std::size_t kMaxBundleLinks = 6;

enum class HashFields : std::uint8_t { src_dst_ip, src_dst_ip_port };

const char* to_string(HashFields f) noexcept;
std::optional<HashFields> parse_hash_fields(std::string_view text);

struct HashConfig {
    HashFields fields = HashFields::src_dst_ip;
    std::vector<std::uint16_t> weights{1};  ///< one entry per link

    static HashConfig uniform(std::size_t buckets, HashFields fields = HashFields::src_dst_ip);

    std::size_t bucket_count() const noexcept { return weights.size(); }

    /// Throws std::invalid_argument for 0 or more than 6 buckets, or all-zero weights.
    void validate() const;
};

/// Murmur3 finalizer.
constexpr std::uint32_t fmix32(std::uint32_t h) noexcept
{
    h ^= h >> 16;
    h *= 0x85ebca6bU;
    h ^= h >> 13;
    h *= 0xc2b2ae35U;
    h ^= h >> 16;
    return h;
}

/// 32-bit hash of the canonical key, so both directions agree.
std::uint32_t flow_hash(const FlowKey& key, HashFields fields) noexcept;

/// Weighted bucket for a flow: bucket i receives weights[i] / sum(weights)
/// of the hash space.
std::size_t symmetric_hash(const FlowKey& key, const HashConfig& config);

/// ring[flow_hash % n]: the unit answering owner queries for a flow that has
/// no live proprietor. Throws std::invalid_argument on an empty ring.
UnitId ring_target(const FlowKey& key, std::span<const UnitId> ring, HashFields fields);

/// Backup owner for a flow. `ring` must be sorted by unit id. The proprietor
/// is skipped in favour of the next unit in the ring when there are at least
/// two members; a single member organizes its own flows.
UnitId choose_organizer(const FlowKey& key, std::span<const UnitId> ring, UnitId proprietor, HashFields fields);

}  // namespace wbc::flow
