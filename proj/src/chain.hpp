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

#include "digest.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hotlive {

using SimTime = std::int64_t;      // milliseconds of simulated time
using ViewNumber = std::uint64_t;
using BlockDigest = Digest;

struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TwinTag : std::uint8_t { None, A, B };

/// Identity of one running instance. Twins share `index` and differ in `twin`.
struct ProcessId {
    std::uint32_t index = 0;
    TwinTag twin = TwinTag::None;

    auto operator<=>(const ProcessId &) const = default;
    bool operator==(const ProcessId &) const = default;

    std::string str() const;
    static ProcessId parse(std::string_view text);
};

struct Block {
    BlockDigest digest;
    BlockDigest parent;
    std::uint64_t height = 0;
    ViewNumber view = 0;
    std::string payload_tag;

    bool is_genesis() const { return height == 0; }
};

/// Bit-exact byte encoding that feeds the block digest:
///   u32 len=16 | parent digest | u32 len=8 | height (u64 BE)
///   | u32 len=8 | view (u64 BE) | u32 len | payload_tag bytes
std::string canonical_block_encoding(const BlockDigest &parent, std::uint64_t height, ViewNumber view,
                                     std::string_view payload_tag);

Block make_child(const Block &parent, ViewNumber view, std::string payload_tag);
Block make_genesis();

class BlockStore {
public:
    BlockStore();

    const BlockDigest &genesis() const { return genesis_; }
    const Block &get(const BlockDigest &digest) const;
    bool contains(const BlockDigest &digest) const { return blocks_.count(digest) != 0; }
    std::size_t size() const { return blocks_.size(); }

    /// Inserts a block whose parent is already stored. Re-inserting is a no-op.
    const Block &insert(Block block);

    /// True iff `b` lies on the ancestor path of `a` (reflexive).
    bool extends(const BlockDigest &a, const BlockDigest &b) const;
    /// True iff neither block extends the other.
    bool conflicts(const BlockDigest &a, const BlockDigest &b) const;

    /// Blocks strictly above `from` up to and including `to`, oldest first.
    /// Requires extends(to, from).
    std::vector<BlockDigest> path(const BlockDigest &from, const BlockDigest &to) const;

private:
    std::unordered_map<BlockDigest, Block, DigestHash> blocks_;
    BlockDigest genesis_;
};

enum class Phase : std::uint8_t { Prepare, PreCommit, Commit, Generic };
const char *to_string(Phase phase);

struct QuorumCertificate {
    BlockDigest block;
    ViewNumber view = 0;
    Phase phase = Phase::Generic;
    std::set<std::uint32_t> signers;

    bool operator==(const QuorumCertificate &) const = default;
};

/// The certificate every replica starts from.
QuorumCertificate genesis_qc(const BlockStore &store);

enum class ProtocolKind : std::uint8_t { HotStuff, TwoPhaseHotStuff, SyncHotStuff };
const char *to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(std::string_view text);

struct ProtocolConfig {
    std::uint32_t n = 4;
    std::uint32_t f = 1;
    ProtocolKind kind = ProtocolKind::HotStuff;

    /// 2f+1 for the partially synchronous variants, f+1 for Sync HotStuff.
    std::uint32_t quorum_size() const { return kind == ProtocolKind::SyncHotStuff ? f + 1 : 2 * f + 1; }

    /// Throws ConfigError unless n >= 3f+1 (n >= 2f+1 for Sync) and f >= 1.
    void validate() const;
    static ProtocolConfig make(ProtocolKind kind, std::uint32_t n, std::uint32_t f);
    static ProtocolConfig defaults(ProtocolKind kind);
};

struct Vote {
    ProcessId voter;
    BlockDigest block;
    ViewNumber view = 0;
    Phase phase = Phase::Generic;
};

/// Counts distinct signer indices (twins collapse to one) and returns a QC once
/// they reach quorum_size. Throws MalformedInput when votes disagree on
/// block, view or phase.
std::optional<QuorumCertificate> form_qc(std::span<const Vote> votes, const ProtocolConfig &config, Phase phase);

enum class MessageKind : std::uint8_t {
    NewView,
    Propose,
    VotePrepare,
    VotePreCommit,
    VoteCommit,
    QCAnnounce,
    Blame,
    BlameForward,
};
const char *to_string(MessageKind kind);
MessageKind parse_message_kind(std::string_view text);
bool is_vote(MessageKind kind);

struct Message {
    MessageKind kind = MessageKind::NewView;
    ProcessId sender;
    /// Unset for broadcast. A recipient with TwinTag::None addresses every
    /// instance carrying that index.
    std::optional<std::uint32_t> recipient;
    ViewNumber view = 0;
    std::optional<BlockDigest> block;
    std::optional<QuorumCertificate> qc;
    /// Blame certificate carried by BlameForward.
    std::set<std::uint32_t> blamers;
};

} // namespace hotlive
