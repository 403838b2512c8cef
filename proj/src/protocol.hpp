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

#include "chain.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hotlive {

/// Timing knobs shared by every instance of one execution.
struct Timing {
    SimTime base_delay_ms = 10;    // fixed one-hop network delay
    SimTime delta_ms = 50;         // synchronous bound; also the delay-override unit is delta/2
    SimTime view_timeout_ms = 100; // pacemaker timeout for the partially synchronous variants
    SimTime sync_view_limit_ms = 800; // harness fallback when a Sync view never gathers f+1 blames

    bool operator==(const Timing &) const = default;
};

enum class EventKind : std::uint8_t { Prepared, Locked, Executed, EnteredView, BlameBroadcast, QuitView };
const char *to_string(EventKind kind);

struct ReplicaEvent {
    EventKind kind = EventKind::EnteredView;
    std::optional<BlockDigest> block;
    ViewNumber view = 0;
    SimTime time = 0;
};

enum class TimerKind : std::uint8_t { ViewTimeout, BlameTimeout, CommitTimeout, ViewChangeWait, ProposeSlot };

struct TimerRequest {
    TimerKind kind = TimerKind::ViewTimeout;
    SimTime fire_at = 0;
    ViewNumber view = 0;
    std::optional<BlockDigest> block;
};

/// The <prepared, locked, executed> triple monitors look at.
struct BlockTriple {
    BlockDigest prepared;
    BlockDigest lock;
    BlockDigest exec;

    bool operator==(const BlockTriple &) const = default;
};

struct ReplicaState {
    ProcessId id;
    ViewNumber view = 0;
    BlockDigest prepared;
    BlockDigest lock;
    BlockDigest exec;
    QuorumCertificate high_qc;
    QuorumCertificate locked_qc;
    std::set<BlockDigest> executed;
    std::uint64_t stale_dropped = 0;

    // Replica role, reset on every view change.
    std::optional<BlockDigest> voted;
    Phase stage = Phase::Prepare;
    bool stopped_voting = false;
    std::map<std::uint64_t, BlockDigest> proposals_by_height;
    std::map<std::uint64_t, BlockDigest> votes_by_height;

    // Leader role, reset on every view change.
    std::map<std::uint32_t, QuorumCertificate> reports;
    std::optional<BlockDigest> proposal;
    std::uint32_t proposal_count = 0;
    SimTime last_proposal_at = -1;
    SimTime slot_end = 0;
    std::map<std::pair<BlockDigest, Phase>, std::set<std::uint32_t>> vote_buffer;
    std::map<BlockDigest, QuorumCertificate> pending_qcs;

    // Sync HotStuff timers and blame bookkeeping.
    SimTime blame_deadline = 0;
    bool blame_sent = false;
    bool quitting = false;
    std::set<std::uint32_t> blamers;
    std::map<BlockDigest, SimTime> commit_deadlines;
    std::set<BlockDigest> observed;

    std::vector<Message> future;

    BlockTriple triple() const { return {prepared, lock, exec}; }
};

ReplicaState initial_state(ProcessId id, const BlockStore &store);

/// Everything a transition may read besides the replica's own state. The
/// store is append-only: proposing a block inserts it.
struct ReplicaContext {
    const ProtocolConfig &config;
    const Timing &timing;
    BlockStore &store;
    std::span<const std::uint32_t> leaders; // leaders[v-1] leads view v

    std::uint32_t leader_of(ViewNumber view) const;
};

struct ViewExit {
    ViewNumber view = 0;
    BlockTriple triple;
    SimTime time = 0;
};

struct Step {
    ReplicaState state;
    std::vector<Message> outbound;
    std::vector<ReplicaEvent> events;
    std::vector<TimerRequest> timers;
    /// Views this transition left, with the triple held at the moment of leaving.
    std::vector<ViewExit> exits;
};

/// Moves the replica into `view`: sends its lock report to the new leader,
/// arms the view's timers and replays buffered messages of that view.
Step enter_view(const ReplicaState &state, ViewNumber view, SimTime now, ReplicaContext &ctx);

/// Pure transition on one delivered message.
Step handle_message(const ReplicaState &state, const Message &msg, SimTime now, ReplicaContext &ctx);

/// Pure transition on one expired timer. Stale timers are no-ops.
Step on_timer(const ReplicaState &state, const TimerRequest &timer, SimTime now, ReplicaContext &ctx);

/// Voting rule of the partially synchronous variants: the proposal extends
/// the lock, or its justification is from a newer view than the lock's.
bool safe_to_vote(const Block &block, ViewNumber justify_view, const ReplicaState &state, const BlockStore &store);

/// Payload tag of the `counter`-th proposal made by `leader` in `view`.
std::string proposal_payload(const ProcessId &leader, ViewNumber view, std::uint32_t counter);

} // namespace hotlive
