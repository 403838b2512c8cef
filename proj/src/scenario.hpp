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
#include "protocol.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hotlive {

using PartitionSet = std::vector<std::vector<ProcessId>>;

struct RoundSpec {
    std::uint32_t leader = 1;
    PartitionSet partitions;
};

/// Extra delay for messages of one round. The unit is half a Delta.
struct DelayOverride {
    ViewNumber round = 1;
    ProcessId sender;
    std::optional<ProcessId> recipient; // unset: every recipient
    MessageKind kind = MessageKind::Propose;
    std::uint32_t half_deltas = 0;
};

enum class LeaderLaw : std::uint8_t { Uniform, RoundRobin };

/// A complete, replayable test case.
struct Scenario {
    ProtocolConfig config;
    Timing timing;
    std::uint32_t twin_index = 1;
    std::uint32_t rounds = 10;
    std::map<std::uint32_t, RoundSpec> schedule; // keyed by round, 1-based
    std::vector<DelayOverride> delays;
    std::uint64_t seed = 0;

    std::vector<std::uint32_t> leader_schedule() const;
};

/// All instance ids: n-1 singletons plus `twin_index` as A and B.
std::vector<ProcessId> instance_ids(std::uint32_t n, std::uint32_t twin_index);

Timing default_timing(ProtocolKind kind);

struct GeneratorConfig {
    ProtocolKind kind = ProtocolKind::HotStuff;
    std::uint32_t n = 4;
    std::uint32_t f = 1;
    std::uint32_t rounds = 10;
    std::uint32_t partitions_per_round = 2;
    bool delay_injection = false;
    LeaderLaw leader_law = LeaderLaw::Uniform;
    std::optional<Timing> timing;

    static GeneratorConfig defaults(ProtocolKind kind);
};

/// Half-Delta values a Propose delay may take: 0 .. 3 Delta.
inline constexpr std::uint32_t kMaxProposeHalfDeltas = 6;
/// Half-Delta values a vote delay may take: 0 .. 2 Delta.
inline constexpr std::uint32_t kMaxVoteHalfDeltas = 4;

/// Deterministic in (gcfg, seed). Throws ConfigError on a bad configuration.
Scenario generate(const GeneratorConfig &gcfg, std::uint64_t seed);

/// The 2-Phase HotStuff deadlock: a twinned leader locks a single correct
/// replica on B1, the next leader builds a conflicting B2 without it, and the
/// twin stays silent afterwards.
Scenario fixture_fig2();

/// Every violated constraint, human readable. Empty means valid.
std::vector<std::string> validate(const Scenario &s);

std::string to_text(const Scenario &s);
/// Throws MalformedInput with a line number on syntax errors.
Scenario parse_scenario(std::string_view text);

/// Derives the i-th child seed of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Uniform integer in [lo, hi] with a platform-independent reduction.
std::uint64_t uniform_int(std::mt19937_64 &rng, std::uint64_t lo, std::uint64_t hi);

} // namespace hotlive
