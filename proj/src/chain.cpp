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

#include "chain.hpp"

#include <algorithm>
#include <charconv>

namespace hotlive {

std::string ProcessId::str() const {
    std::string out = std::to_string(index);
    if (twin == TwinTag::A) out.push_back('A');
    if (twin == TwinTag::B) out.push_back('B');
    return out;
}

ProcessId ProcessId::parse(std::string_view text) {
    ProcessId id;
    if (!text.empty() && (text.back() == 'A' || text.back() == 'B')) {
        id.twin = text.back() == 'A' ? TwinTag::A : TwinTag::B;
        text.remove_suffix(1);
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id.index);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw MalformedInput("bad process id '" + std::string(text) + "'");
    return id;
}

std::string canonical_block_encoding(const BlockDigest &parent, std::uint64_t height, ViewNumber view,
                                     std::string_view payload_tag) {
    std::string out;
    out.reserve(16 + 8 + 8 + payload_tag.size() + 16);
    put_field(out, std::string_view(reinterpret_cast<const char *>(parent.bytes.data()), parent.bytes.size()));
    put_u32(out, 8);
    put_u64(out, height);
    put_u32(out, 8);
    put_u64(out, view);
    put_field(out, payload_tag);
    return out;
}

Block make_child(const Block &parent, ViewNumber view, std::string payload_tag) {
    Block b;
    b.parent = parent.digest;
    b.height = parent.height + 1;
    b.view = view;
    b.payload_tag = std::move(payload_tag);
    b.digest = sha256_128(canonical_block_encoding(b.parent, b.height, b.view, b.payload_tag));
    return b;
}

Block make_genesis() {
    Block g;
    g.payload_tag = "genesis";
    g.digest = sha256_128(canonical_block_encoding(BlockDigest{}, 0, 0, g.payload_tag));
    g.parent = g.digest;
    return g;
}

BlockStore::BlockStore() {
    Block g = make_genesis();
    genesis_ = g.digest;
    blocks_.emplace(g.digest, std::move(g));
}

const Block &BlockStore::get(const BlockDigest &digest) const {
    auto it = blocks_.find(digest);
    if (it == blocks_.end()) throw LookupError("unknown block " + digest.hex());
    return it->second;
}

const Block &BlockStore::insert(Block block) {
    if (auto it = blocks_.find(block.digest); it != blocks_.end()) return it->second;
    const Block &parent = get(block.parent);
    if (block.height != parent.height + 1) throw MalformedInput("block height does not follow its parent");
    auto [it, inserted] = blocks_.emplace(block.digest, std::move(block));
    return it->second;
}

bool BlockStore::extends(const BlockDigest &a, const BlockDigest &b) const {
    const Block *cur = &get(a);
    const Block &target = get(b);
    while (cur->height > target.height) cur = &get(cur->parent);
    return cur->digest == target.digest;
}

bool BlockStore::conflicts(const BlockDigest &a, const BlockDigest &b) const {
    return !extends(a, b) && !extends(b, a);
}

std::vector<BlockDigest> BlockStore::path(const BlockDigest &from, const BlockDigest &to) const {
    if (!extends(to, from)) throw MalformedInput("path endpoints are not ancestor-related");
    std::vector<BlockDigest> out;
    const Block *cur = &get(to);
    const std::uint64_t stop = get(from).height;
    while (cur->height > stop) {
        out.push_back(cur->digest);
        cur = &get(cur->parent);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

const char *to_string(Phase phase) {
    switch (phase) {
    case Phase::Prepare: return "Prepare";
    case Phase::PreCommit: return "PreCommit";
    case Phase::Commit: return "Commit";
    case Phase::Generic: return "Generic";
    }
    return "?";
}

QuorumCertificate genesis_qc(const BlockStore &store) {
    return QuorumCertificate{store.genesis(), 0, Phase::Generic, {}};
}

const char *to_string(ProtocolKind kind) {
    switch (kind) {
    case ProtocolKind::HotStuff: return "hotstuff";
    case ProtocolKind::TwoPhaseHotStuff: return "two-phase";
    case ProtocolKind::SyncHotStuff: return "sync";
    }
    return "?";
}

ProtocolKind parse_protocol_kind(std::string_view text) {
    if (text == "hotstuff" || text == "basic") return ProtocolKind::HotStuff;
    if (text == "two-phase" || text == "2phase" || text == "2-phase") return ProtocolKind::TwoPhaseHotStuff;
    if (text == "sync") return ProtocolKind::SyncHotStuff;
    throw ConfigError("unknown protocol '" + std::string(text) + "'");
}

void ProtocolConfig::validate() const {
    if (f < 1) throw ConfigError("f must be at least 1");
    if (kind == ProtocolKind::SyncHotStuff) {
        if (n < 2 * f + 1) throw ConfigError("Sync HotStuff needs n >= 2f+1");
    } else if (n < 3 * f + 1) {
        throw ConfigError("HotStuff needs n >= 3f+1");
    }
}

ProtocolConfig ProtocolConfig::make(ProtocolKind kind, std::uint32_t n, std::uint32_t f) {
    ProtocolConfig c{n, f, kind};
    c.validate();
    return c;
}

ProtocolConfig ProtocolConfig::defaults(ProtocolKind kind) {
    return kind == ProtocolKind::SyncHotStuff ? make(kind, 3, 1) : make(kind, 4, 1);
}

std::optional<QuorumCertificate> form_qc(std::span<const Vote> votes, const ProtocolConfig &config, Phase phase) {
    if (votes.empty()) return std::nullopt;
    const Vote &first = votes.front();
    std::set<std::uint32_t> signers;
    for (const auto &v : votes) {
        if (v.block != first.block || v.view != first.view || v.phase != phase)
            throw MalformedInput("votes disagree on block, view or phase");
        signers.insert(v.voter.index);
    }
    if (signers.size() < config.quorum_size()) return std::nullopt;
    return QuorumCertificate{first.block, first.view, phase, std::move(signers)};
}

const char *to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::NewView: return "NewView";
    case MessageKind::Propose: return "Propose";
    case MessageKind::VotePrepare: return "VotePrepare";
    case MessageKind::VotePreCommit: return "VotePreCommit";
    case MessageKind::VoteCommit: return "VoteCommit";
    case MessageKind::QCAnnounce: return "QCAnnounce";
    case MessageKind::Blame: return "Blame";
    case MessageKind::BlameForward: return "BlameForward";
    }
    return "?";
}

MessageKind parse_message_kind(std::string_view text) {
    for (auto k : {MessageKind::NewView, MessageKind::Propose, MessageKind::VotePrepare, MessageKind::VotePreCommit,
                   MessageKind::VoteCommit, MessageKind::QCAnnounce, MessageKind::Blame,
                   MessageKind::BlameForward})
        if (text == to_string(k)) return k;
    throw MalformedInput("unknown message kind '" + std::string(text) + "'");
}

bool is_vote(MessageKind kind) {
    return kind == MessageKind::VotePrepare || kind == MessageKind::VotePreCommit || kind == MessageKind::VoteCommit;
}

} // namespace hotlive
