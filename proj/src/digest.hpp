/**
 * Copyright 2026 The hotlive Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace hotlive {

/// 128-bit content digest. Used for block identities and partial-state hashes.
struct Digest {
    std::array<std::uint8_t, 16> bytes{};

    auto operator<=>(const Digest &) const = default;
    bool operator==(const Digest &) const = default;

    std::string hex() const;
    /// First 8 hex characters; for human-oriented output only.
    std::string short_hex() const { return hex().substr(0, 8); }
    static Digest from_hex(std::string_view text);
};

/// SHA-256 of `data`, truncated to the first 16 bytes.
Digest sha256_128(std::string_view data);

/// Appends `value` as 8 big-endian bytes.
void put_u64(std::string &out, std::uint64_t value);
/// Appends `value` as 4 big-endian bytes.
void put_u32(std::string &out, std::uint32_t value);
/// Appends a u32 length prefix followed by the raw bytes.
void put_field(std::string &out, std::string_view field);

struct DigestHash {
    std::size_t operator()(const Digest &d) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
        return h;
    }
};

} // namespace hotlive
