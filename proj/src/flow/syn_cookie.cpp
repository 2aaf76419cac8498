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

#include "wbc/flow/syn_cookie.hpp"

#include <array>

namespace wbc::flow {

std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept
{
    std::uint8_t crc = 0;
    for (std::uint8_t b : bytes) {
        crc ^= b;
        for (int i = 0; i < 8; ++i) {
            crc = (crc & 0x80) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07) : static_cast<std::uint8_t>(crc << 1);
        }
    }
    return crc;
}

std::uint32_t encode_syn_cookie(UnitId proprietor, std::uint16_t salt) noexcept
{
    const std::array<std::uint8_t, 3> head{to_underlying(proprietor), static_cast<std::uint8_t>(salt >> 8),
                                           static_cast<std::uint8_t>(salt)};
    return (std::uint32_t{head[0]} << 24) | (std::uint32_t{head[1]} << 16) | (std::uint32_t{head[2]} << 8) |
           crc8(head);
}

std::optional<UnitId> decode_syn_cookie(std::uint32_t cookie) noexcept
{
    const std::array<std::uint8_t, 3> head{static_cast<std::uint8_t>(cookie >> 24),
                                           static_cast<std::uint8_t>(cookie >> 16),
                                           static_cast<std::uint8_t>(cookie >> 8)};
    if (crc8(head) != static_cast<std::uint8_t>(cookie)) {
        return std::nullopt;
    }
    return UnitId{head[0]};
}

}  // namespace wbc::flow
