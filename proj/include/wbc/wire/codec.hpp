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

#include "wbc/wire/message.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wbc::wire {

/// Thrown by encode() when a field is outside its permitted range.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class DecodeError : std::uint8_t {
    truncated,
    bad_version,
    length_mismatch,
    priority_out_of_range,
    unknown_message_type,
    missing_component,
    invalid_field,
};

const char* to_string(DecodeError err) noexcept;

struct Decoded {
    Message message;
    std::size_t unknown_components = 0;
};

using DecodeResult = std::variant<Decoded, DecodeError>;

/// Big-endian header (type, version, body length) followed by TLV
/// components. The header length is always recomputed.
std::vector<std::uint8_t> encode(const Message& msg);

/// Never reads past the buffer or the declared length. Unknown component
/// types are skipped and counted.
DecodeResult decode(std::span<const std::uint8_t> bytes);

inline bool ok(const DecodeResult& r) noexcept { return std::holds_alternative<Decoded>(r); }

/// Throws ValidationError when a field is out of range.
void validate(const Message& msg);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Accepts whitespace between byte pairs; returns empty on malformed input.
std::vector<std::uint8_t> from_hex(std::string_view text);

}  // namespace wbc::wire
