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
#include "scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

namespace hotlive {

/// Network behaviour in force for messages of one round (= view).
struct NetworkRule {
    ViewNumber round = 0;
    PartitionSet partitions;
    std::map<std::tuple<ProcessId, std::optional<ProcessId>, MessageKind>, std::uint32_t> delay_overrides;

    bool same_partition(const ProcessId &a, const ProcessId &b) const;
    std::uint32_t override_for(const ProcessId &from, const ProcessId &to, MessageKind kind) const;
};

NetworkRule network_rule(const Scenario &s, ViewNumber round);

/// Delivery time of `msg` from `from` to `to`, or nullopt when the round's
/// partition separates them. Self-delivery is immediate.
std::optional<SimTime> deliver(const Message &msg, const ProcessId &from, const ProcessId &to, const NetworkRule &rule,
                               SimTime now, const Timing &timing);

/// n-1 singleton replicas plus the twinned index as two instances.
std::vector<ReplicaState> instantiate_twins(const ProtocolConfig &config, std::uint32_t twin_index,
                                            const BlockStore &store);

struct LoggedEvent {
    ProcessId replica;
    ReplicaEvent event;
};

struct DeliveryRecord {
    ProcessId from;
    ProcessId to;
    MessageKind kind = MessageKind::NewView;
    ViewNumber view = 0;
    SimTime sent = 0;
    SimTime at = 0; // -1 when dropped
};

/// Per-round snapshot: each instance's triple at the moment it left the round's view.
struct RoundBoundary {
    ViewNumber round = 0;
    std::map<ProcessId, BlockTriple> replicas;
    SimTime completed_at = 0; // when the last instance left the view
    bool stalled = false;
};

struct Execution {
    Scenario scenario;
    BlockStore store;
    std::vector<ProcessId> instances;
    std::vector<ProcessId> correct; // non-twinned instances
    std::vector<LoggedEvent> events;
    std::vector<RoundBoundary> rounds;
    std::vector<DeliveryRecord> deliveries; // filled only when requested
    std::map<ProcessId, BlockTriple> final_triples;
    SimTime end_time = 0;
    std::uint64_t dropped_by_partition = 0;

    std::string event_log() const;
    std::string snapshot_log() const;
    std::vector<LoggedEvent> executed_by_correct() const;
};

std::string format_event(const LoggedEvent &e);

struct SimOptions {
    bool record_deliveries = false;
};

/// One deterministic run of a scenario. Events are ordered by (time, order of scheduling).
class Simulation {
public:
    explicit Simulation(const Scenario &scenario, SimOptions options = {});

    /// Processes events until every instance has left view `round`.
    /// Rounds must be run in order starting at 1.
    const RoundBoundary &run_round(ViewNumber round);
    Execution run();

    const Execution &execution() const { return exec_; }
    const ReplicaState &replica(std::size_t i) const { return states_.at(i); }

private:
    struct Pending {
        SimTime at;
        std::uint64_t seq;
        std::size_t target;
        std::optional<Message> msg;
        std::optional<TimerRequest> timer;
    };
    struct Later {
        bool operator()(const Pending &a, const Pending &b) const {
            return std::tie(a.at, a.seq) > std::tie(b.at, b.seq);
        }
    };

    bool done(std::size_t i) const { return states_[i].view > exec_.scenario.rounds; }
    void start();
    void apply(std::size_t i, Step step);
    void send(std::size_t from, const Message &m);
    bool step_once();

    Execution exec_;
    SimOptions options_;
    std::vector<std::uint32_t> leaders_;
    std::vector<NetworkRule> rules_;
    std::vector<ReplicaState> states_;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    std::uint64_t seq_ = 0;
    SimTime now_ = 0;
    bool started_ = false;
    ViewNumber next_round_ = 1;
    std::map<ViewNumber, std::map<ProcessId, std::pair<BlockTriple, SimTime>>> exits_;
};

} // namespace hotlive
