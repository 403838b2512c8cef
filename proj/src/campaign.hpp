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

#include "monitor.hpp"
#include "scenario.hpp"
#include "simnet.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hotlive {

struct TimeBounds {
    double mean = 0;
    double stddev = 0;
    SimTime small = 0;
    SimTime mid = 0;
    SimTime large = 0;
    std::size_t samples = 0;

    std::array<SimTime, 3> all() const { return {small, mid, large}; }
};

/// Bounds from a list of commit-to-commit intervals.
TimeBounds bounds_from_samples(const std::vector<SimTime> &samples);

/// Distinct instants at which a correct replica executed a block nobody had executed before.
std::vector<SimTime> commit_times(const Execution &e);

/// Runs `count` failure-free executions (no partitions, the second twin
/// isolated) and derives the bounds from their commit intervals.
TimeBounds calibrate(ProtocolKind kind, std::uint32_t rounds, std::uint32_t count = 50, std::uint64_t seed = 7);

struct CampaignConfig {
    GeneratorConfig generator = GeneratorConfig::defaults(ProtocolKind::HotStuff);
    std::uint32_t scenario_count = 100;
    std::uint64_t master_seed = 1;
    std::vector<std::uint32_t> thresholds{5};
    bool temperature = true;
    bool lasso = true;
    bool time_bound = true;
    std::optional<TimeBounds> bounds; // calibrated when unset
    std::uint32_t calibration_count = 50;
    unsigned workers = 1;
    bool include_fixture = false;
    HotOptions hot;
    std::size_t lasso_cap = 64;

    void validate() const;
};

struct ScenarioOutcome {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    bool fixture = false;
    bool failed = false;
    std::string error;
    bool safety = false;
    bool false_positive = false; // classification of any liveness verdict on this run
    std::vector<Digest> state_hashes;
    std::vector<bool> hot;
    std::map<std::uint32_t, std::optional<ViewNumber>> temperature; // by threshold
    std::optional<ViewNumber> lasso;
    std::array<std::optional<SimTime>, 3> time_bound{};
    std::array<std::optional<ViewNumber>, 3> time_bound_round{};
    double sim_ms = 0;
    double temperature_ms = 0;
    double graph_ms = 0;
    double time_bound_ms = 0;
};

struct ReportRow {
    std::string method;
    std::string threshold;
    double runtime_ms = 0;
    double trace_len = 0;
    double pct_safety = 0;
    double pct_liveness = 0;
    double pct_false_pos = 0;
    std::size_t flagged = 0;
    std::size_t false_positives = 0;
};

struct VerdictRecord {
    std::string method;
    std::string threshold;
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    bool fixture = false;
    std::optional<ViewNumber> round;
    bool false_positive = false;
    std::string witness;
};

struct CampaignReport {
    CampaignConfig config;
    TimeBounds bounds;
    std::vector<ScenarioOutcome> outcomes;
    std::vector<ReportRow> rows;
    std::vector<VerdictRecord> verdicts;
    std::vector<std::vector<Digest>> lassos;
    std::shared_ptr<StateTransitionGraph> graph;
    std::size_t failed = 0;
    std::size_t safety_violations = 0;

    std::string table() const;
    std::string csv() const;
    std::string verdict_index() const;
    const ReportRow *row(const std::string &method, const std::string &threshold) const;
};

/// The scenario a campaign runs at position `index` (the fixture, when included, comes first).
Scenario campaign_scenario(const CampaignConfig &cfg, std::uint64_t index, bool &fixture);

CampaignReport run_campaign(const CampaignConfig &cfg);

struct ReplayOptions {
    std::vector<std::uint32_t> thresholds{5};
    bool lasso = true;
    std::optional<SimTime> time_bound;
    HotOptions hot;
};

struct ReplayResult {
    Execution execution;
    std::vector<PartialSystemState> states;
    std::vector<bool> hot;
    std::vector<Verdict> verdicts;
    std::string trace;    // event log, snapshots and verdict timeline
};

ReplayResult replay(const Scenario &scenario, const ReplayOptions &options);

std::string format_threshold(Method m, std::uint32_t tt, std::size_t bound_slot, const TimeBounds &b);

} // namespace hotlive
