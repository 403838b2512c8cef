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
#include "digest.hpp"
#include "protocol.hpp"
#include "simnet.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hotlive {

struct PartialProcessState {
    ProcessId id;
    BlockTriple triple;
};

/// Triples of the correct instances at one round boundary. The hash covers
/// the triples only, so equal configurations reached in different rounds or
/// scenarios share one graph vertex.
class PartialSystemState {
public:
    PartialSystemState() = default;
    PartialSystemState(ViewNumber round, std::map<ProcessId, BlockTriple> states);

    ViewNumber round() const { return round_; }
    const std::map<ProcessId, BlockTriple> &states() const { return states_; }
    const Digest &hash() const { return hash_; }
    std::vector<PartialProcessState> processes() const;

private:
    ViewNumber round_ = 0;
    std::map<ProcessId, BlockTriple> states_;
    Digest hash_{};
};

/// Restricts a round boundary to the correct instances.
PartialSystemState partial_state(const RoundBoundary &boundary);

struct HotOptions {
    std::uint32_t faulty_count = 1;
    bool credit_faulty = false; // count faulty instances as supporters of every lock
};

/// Hot when (i) two correct locks conflict, (ii) no locked block has quorum
/// support, and (iii) no correct replica executed anything since `prev`
/// (or since genesis when `prev` is null).
bool is_hot(const PartialSystemState &state, const PartialSystemState *prev, const BlockStore &store,
            const ProtocolConfig &config, const HotOptions &options = {});

struct TemperatureState {
    std::uint32_t temp = 0;
};

/// One step of the temperature counter. True exactly when the counter reaches `threshold`.
bool check_temperature(TemperatureState &t, bool hot, std::uint32_t threshold);

/// Hash-consed transition graph shared by every scenario of a campaign.
class StateTransitionGraph {
public:
    /// Adds `next` and the edge from `prev` (if any). The vertex's hot flag
    /// is the disjunction of every `hot` it was inserted with.
    void update(const PartialSystemState *prev, const PartialSystemState &next, bool hot);

    std::size_t vertex_count() const;
    std::size_t edge_count() const;
    bool contains(const Digest &v) const;
    bool hot(const Digest &v) const;

    /// Vertices lying on some cycle of the hot subgraph.
    std::set<Digest> hot_cyclic_vertices() const;

    /// Up to `cap` elementary cycles of the hot subgraph, one per distinct vertex set.
    std::vector<std::vector<Digest>> hot_lassos(std::size_t cap = 64) const;

    /// Sorted line format: "v <hash> hot=<0|1>" then "e <from> <to>".
    std::string export_text() const;

private:
    mutable std::mutex mu_;
    std::map<Digest, bool> hot_;
    std::map<Digest, std::set<Digest>> out_;
};

/// Adjacency-list form used by the lasso search.
struct PlainGraph {
    std::vector<std::vector<std::uint32_t>> adj;
    std::vector<bool> hot;
};

/// Elementary cycles through hot vertices only (self-loops included),
/// deduplicated by vertex set, at most `cap` of them.
std::vector<std::vector<std::uint32_t>> find_hot_lassos(const PlainGraph &g, std::size_t cap = 64);

/// Strongly connected hot vertices that lie on a hot cycle.
std::vector<bool> hot_cycle_members(const PlainGraph &g);

/// First instant at which `bound` ms pass without a commit, if it happens before `end`.
std::optional<SimTime> time_bound_check(std::vector<SimTime> commit_times, SimTime end, SimTime bound);

/// Two correct replicas executed conflicting blocks.
bool check_safety(const Execution &e);

/// True when a liveness verdict on this execution is spurious: no pair of
/// correct replicas ends with conflicting locks.
bool classify_false_positive(const Execution &e);

enum class Method : std::uint8_t { Temperature, Lasso, TimeBound };
const char *to_string(Method m);

struct Verdict {
    Method method = Method::Temperature;
    bool liveness = false;
    bool safety = false;
    std::optional<ViewNumber> round;   // round of detection
    std::optional<SimTime> at;         // simulated time of detection
    bool false_positive = false;
    std::string witness;
};

} // namespace hotlive
