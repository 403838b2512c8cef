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

#include "simnet.hpp"

#include <gtest/gtest.h>

using namespace hotlive;

namespace {

Message msg(MessageKind kind, ProcessId sender, ViewNumber view) {
    Message m;
    m.kind = kind;
    m.sender = sender;
    m.view = view;
    return m;
}

NetworkRule two_groups() {
    NetworkRule rule;
    rule.round = 1;
    rule.partitions = {{ProcessId{1, TwinTag::A}, ProcessId{2}}, {ProcessId{1, TwinTag::B}, ProcessId{3}, ProcessId{4}}};
    return rule;
}

Scenario hotstuff(std::uint64_t seed) { return generate(GeneratorConfig::defaults(ProtocolKind::HotStuff), seed); }

} // namespace

TEST(Deliver, SamePartitionUsesBaseDelay) {
    Timing t;
    auto at = deliver(msg(MessageKind::Propose, ProcessId{2}, 1), ProcessId{2}, ProcessId{1, TwinTag::A}, two_groups(),
                      100, t);
    ASSERT_TRUE(at.has_value());
    EXPECT_EQ(*at, 110);
}

TEST(Deliver, CrossPartitionDrops) {
    Timing t;
    EXPECT_FALSE(deliver(msg(MessageKind::Propose, ProcessId{2}, 1), ProcessId{2}, ProcessId{3}, two_groups(), 0, t));
    EXPECT_FALSE(deliver(msg(MessageKind::VotePrepare, ProcessId{1, TwinTag::A}, 1), ProcessId{1, TwinTag::A},
                         ProcessId{1, TwinTag::B}, two_groups(), 0, t));
}

TEST(Deliver, SelfDeliveryIsImmediate) {
    Timing t;
    auto at = deliver(msg(MessageKind::VotePrepare, ProcessId{3}, 1), ProcessId{3}, ProcessId{3}, two_groups(), 40, t);
    EXPECT_EQ(at, std::optional<SimTime>(40));
}

TEST(Deliver, OverrideAddsHalfDeltas) {
    Timing t = default_timing(ProtocolKind::SyncHotStuff);
    NetworkRule rule = two_groups();
    rule.delay_overrides[{ProcessId{1, TwinTag::B}, std::nullopt, MessageKind::Propose}] = 6;
    auto at = deliver(msg(MessageKind::Propose, ProcessId{1, TwinTag::B}, 1), ProcessId{1, TwinTag::B}, ProcessId{4},
                      rule, 0, t);
    EXPECT_EQ(at, std::optional<SimTime>(0 + 10 + 150));
    // Other kinds from the same sender are unaffected.
    at = deliver(msg(MessageKind::VotePrepare, ProcessId{1, TwinTag::B}, 1), ProcessId{1, TwinTag::B}, ProcessId{4},
                 rule, 0, t);
    EXPECT_EQ(at, std::optional<SimTime>(10));
}

TEST(Deliver, RecipientSpecificOverrideWins) {
    Timing t;
    NetworkRule rule = two_groups();
    rule.delay_overrides[{ProcessId{3}, ProcessId{4}, MessageKind::NewView}] = 2;
    EXPECT_EQ(rule.override_for(ProcessId{3}, ProcessId{4}, MessageKind::NewView), 2u);
    EXPECT_EQ(rule.override_for(ProcessId{3}, ProcessId{1, TwinTag::B}, MessageKind::NewView), 0u);
    auto at = deliver(msg(MessageKind::NewView, ProcessId{3}, 1), ProcessId{3}, ProcessId{4}, rule, 5, t);
    EXPECT_EQ(at, std::optional<SimTime>(5 + 10 + 50));
}

TEST(NetworkRuleTest, BuiltFromScenario) {
    Scenario s = fixture_fig2();
    NetworkRule r1 = network_rule(s, 1);
    EXPECT_TRUE(r1.same_partition(ProcessId{1, TwinTag::A}, ProcessId{3}));
    EXPECT_FALSE(r1.same_partition(ProcessId{1, TwinTag::A}, ProcessId{2}));
    EXPECT_GT(r1.override_for(ProcessId{1, TwinTag::A}, ProcessId{4}, MessageKind::QCAnnounce), 0u);
    EXPECT_EQ(network_rule(s, 3).override_for(ProcessId{1, TwinTag::A}, ProcessId{4}, MessageKind::QCAnnounce), 0u);
}

TEST(Twins, InstantiateTwins) {
    BlockStore store;
    auto config = ProtocolConfig::make(ProtocolKind::HotStuff, 4, 1);
    auto states = instantiate_twins(config, 2, store);
    ASSERT_EQ(states.size(), 5u);
    std::set<ProcessId> ids;
    for (const auto &st : states) {
        ids.insert(st.id);
        EXPECT_EQ(st.triple(), (BlockTriple{store.genesis(), store.genesis(), store.genesis()}));
    }
    EXPECT_EQ(ids, (std::set<ProcessId>{ProcessId{1}, ProcessId{2, TwinTag::A}, ProcessId{2, TwinTag::B},
                                        ProcessId{3}, ProcessId{4}}));
}

TEST(Simulation, PartitionsAreEnforced) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Scenario s = hotstuff(seed);
        Execution e = Simulation(s, SimOptions{true}).run();
        ASSERT_FALSE(e.deliveries.empty());
        std::size_t dropped = 0;
        for (const auto &d : e.deliveries) {
            bool joined = d.from == d.to || network_rule(s, d.view).same_partition(d.from, d.to);
            if (d.at < 0) {
                ++dropped;
                EXPECT_FALSE(joined);
            } else {
                EXPECT_TRUE(joined) << d.from.str() << "->" << d.to.str() << " view " << d.view;
                EXPECT_GE(d.at, d.sent);
            }
        }
        EXPECT_EQ(dropped, e.dropped_by_partition);
    }
}

TEST(Simulation, SnapshotsCoverEveryInstanceAndRound) {
    Scenario s = hotstuff(4);
    Execution e = Simulation(s).run();
    ASSERT_EQ(e.rounds.size(), s.rounds);
    for (std::size_t i = 0; i < e.rounds.size(); ++i) {
        EXPECT_EQ(e.rounds[i].round, i + 1);
        EXPECT_EQ(e.rounds[i].replicas.size(), 5u);
        if (i) {
            EXPECT_GE(e.rounds[i].completed_at, e.rounds[i - 1].completed_at);
        }
    }
    EXPECT_EQ(e.correct.size(), 3u);
    for (const auto &id : e.correct) EXPECT_NE(id.index, s.twin_index);
}

TEST(Simulation, FailureFreeRoundLeavesIdenticalTriples) {
    Scenario s = hotstuff(8);
    std::vector<ProcessId> everyone = instance_ids(4, s.twin_index);
    ProcessId lone{s.twin_index, TwinTag::B};
    std::vector<ProcessId> rest;
    for (const auto &id : everyone)
        if (id != lone) rest.push_back(id);
    for (auto &[r, spec] : s.schedule) spec.partitions = {rest, {lone}};
    Execution e = Simulation(s).run();
    std::size_t agreeing = 0;
    for (const auto &b : e.rounds) {
        std::set<BlockDigest> execs;
        for (const auto &id : rest) execs.insert(b.replicas.at(id).exec);
        if (execs.size() == 1) ++agreeing;
    }
    EXPECT_GE(agreeing, e.rounds.size() / 2);
    std::set<BlockDigest> final_execs;
    for (const auto &id : e.correct) final_execs.insert(e.final_triples.at(id).exec);
    EXPECT_EQ(final_execs.size(), 1u);
}

TEST(Simulation, IsolatedRoundMakesNoProgress) {
    Scenario s = hotstuff(12);
    std::vector<std::vector<ProcessId>> singletons;
    for (const auto &id : instance_ids(4, s.twin_index)) singletons.push_back({id});
    s.schedule.at(4).partitions = singletons;
    ASSERT_TRUE(validate(s).empty());
    Execution e = Simulation(s).run();
    for (const auto &[id, triple] : e.rounds[3].replicas) {
        EXPECT_EQ(triple.exec, e.rounds[2].replicas.at(id).exec) << id.str();
        EXPECT_EQ(triple.lock, e.rounds[2].replicas.at(id).lock) << id.str();
    }
}

TEST(Simulation, RunIsDeterministic) {
    Scenario s = generate(GeneratorConfig::defaults(ProtocolKind::TwoPhaseHotStuff), 77);
    Execution a = Simulation(s).run();
    Execution b = Simulation(s).run();
    EXPECT_EQ(a.event_log(), b.event_log());
    EXPECT_EQ(a.snapshot_log(), b.snapshot_log());
    EXPECT_EQ(a.end_time, b.end_time);
}

TEST(Simulation, RoundByRoundMatchesRun) {
    Scenario s = hotstuff(21);
    Simulation step(s);
    for (ViewNumber r = 1; r <= s.rounds; ++r) EXPECT_EQ(step.run_round(r).round, r);
    Execution whole = Simulation(s).run();
    EXPECT_EQ(step.execution().snapshot_log(), whole.snapshot_log());
}

TEST(Simulation, RoundsOutOfOrderRejected) {
    Simulation sim(hotstuff(2));
    EXPECT_ANY_THROW(sim.run_round(2));
}

TEST(Simulation, InvalidScenarioRejected) {
    Scenario s = hotstuff(2);
    s.schedule.erase(5);
    EXPECT_THROW(Simulation{s}, ConfigError);
}

TEST(Format, EventLine) {
    BlockStore store;
    LoggedEvent e{ProcessId{3}, ReplicaEvent{EventKind::Executed, store.genesis(), 2, 120}};
    EXPECT_EQ(format_event(e), "t=120 replica=3 kind=Executed view=2 block=" + store.genesis().hex());
    LoggedEvent b{ProcessId{1, TwinTag::B}, ReplicaEvent{EventKind::BlameBroadcast, std::nullopt, 4, 7}};
    EXPECT_EQ(format_event(b), "t=7 replica=1B kind=BlameBroadcast view=4 block=-");
}
