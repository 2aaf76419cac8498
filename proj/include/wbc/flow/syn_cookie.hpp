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

#include <cstdint>
#include <optional>
#include <span>

namespace wbc::flow {

/// CRC-8, polynomial 0x07, init 0, no reflection.
std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept;

/// Cookie layout, most significant byte first:
///   [unit id][salt hi][salt lo][crc8 of the first three bytes]
std::uint32_t encode_syn_cookie(UnitId proprietor, std::uint16_t salt) noexcept;

/// nullopt when the checksum does not match.
std::optional<UnitId> decode_syn_cookie(std::uint32_t cookie) noexcept;

}  // namespace wbc::flow
