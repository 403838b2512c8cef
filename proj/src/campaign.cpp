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

#include "campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace hotlive {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

PartialSystemState initial_system_state(const Scenario &s, const BlockStore &store) {
    std::map<ProcessId, BlockTriple> m;
    const BlockDigest g = store.genesis();
    for (const auto &id : instance_ids(s.config.n, s.twin_index))
        if (id.twin == TwinTag::None) m.emplace(id, BlockTriple{g, g, g});
    return PartialSystemState(0, std::move(m));
}

std::optional<ViewNumber> round_at(const Execution &e, SimTime t) {
    for (const auto &r : e.rounds)
        if (r.completed_at >= t) return r.round;
    if (e.rounds.empty()) return std::nullopt;
    return e.rounds.back().round;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

TimeBounds bounds_from_samples(const std::vector<SimTime> &samples) {
    TimeBounds b;
    b.samples = samples.size();
    if (samples.empty()) return b;
    double sum = std::accumulate(samples.begin(), samples.end(), 0.0);
    b.mean = sum / static_cast<double>(samples.size());
    double sq = 0;
    for (auto s : samples) sq += (s - b.mean) * (s - b.mean);
    b.stddev = std::sqrt(sq / static_cast<double>(samples.size()));
    b.small = static_cast<SimTime>(std::llround(b.mean));
    b.mid = static_cast<SimTime>(std::llround(b.mean + b.stddev));
    b.large = static_cast<SimTime>(std::llround(b.mean + 2 * b.stddev));
    return b;
}

std::vector<SimTime> commit_times(const Execution &e) {
    std::set<BlockDigest> seen;
    std::set<SimTime> times;
    for (const auto &ev : e.executed_by_correct())
        if (ev.event.block && seen.insert(*ev.event.block).second) times.insert(ev.event.time);
    return {times.begin(), times.end()};
}

TimeBounds calibrate(ProtocolKind kind, std::uint32_t rounds, std::uint32_t count, std::uint64_t seed) {
    if (rounds < 1 || count < 1) throw ConfigError("calibration needs at least one round and one run");
    GeneratorConfig g = GeneratorConfig::defaults(kind);
    g.rounds = rounds;
    g.delay_injection = false;
    std::vector<SimTime> samples;
    for (std::uint32_t i = 0; i < count; ++i) {
        Scenario s = generate(g, derive_seed(seed, i));
        ProcessId lone{s.twin_index, TwinTag::B};
        for (auto &[r, spec] : s.schedule) {
            std::vector<ProcessId> rest;
            for (const auto &id : instance_ids(s.config.n, s.twin_index))
                if (id != lone) rest.push_back(id);
            spec.partitions = {rest, {lone}};
        }
        Execution e = Simulation(s).run();
        SimTime last = 0;
        for (SimTime t : commit_times(e)) {
            samples.push_back(t - last);
            last = t;
        }
    }
    return bounds_from_samples(samples);
}

void CampaignConfig::validate() const {
    if (scenario_count < 1) throw ConfigError("scenario count must be at least 1");
    if (generator.rounds < 1) throw ConfigError("rounds must be at least 1");
    for (auto tt : thresholds)
        if (tt < 1) throw ConfigError("temperature thresholds must be positive");
    if (bounds && (bounds->small <= 0 || bounds->mid <= 0 || bounds->large <= 0))
        throw ConfigError("time bounds must be positive");
    if (workers < 1) throw ConfigError("need at least one worker");
    if (include_fixture && generator.n != 4) throw ConfigError("the fixture needs n = 4");
    ProtocolConfig::make(generator.kind, generator.n, generator.f);
}

Scenario campaign_scenario(const CampaignConfig &cfg, std::uint64_t index, bool &fixture) {
    fixture = cfg.include_fixture && index == 0;
    if (fixture) {
        Scenario s = fixture_fig2();
        s.config = ProtocolConfig::make(cfg.generator.kind, cfg.generator.n, cfg.generator.f);
        s.rounds = cfg.generator.rounds;
        auto base = s.schedule.at(static_cast<std::uint32_t>(std::min<std::uint64_t>(s.schedule.size(), 10)));
        for (std::uint32_t r = 1; r <= s.rounds; ++r) {
            if (!s.schedule.count(r)) {
                base.leader = (r % 2 == 1) ? 2 : 4;
                s.schedule[r] = base;
            }
        }
        for (auto it = s.schedule.begin(); it != s.schedule.end();)
            it = it->first > s.rounds ? s.schedule.erase(it) : std::next(it);
        std::erase_if(s.delays, [&](const DelayOverride &d) { return d.round > s.rounds; });
        if (cfg.generator.timing) s.timing = *cfg.generator.timing;
        return s;
    }
    return generate(cfg.generator, derive_seed(cfg.master_seed, index));
}

namespace {

ScenarioOutcome run_one(const CampaignConfig &cfg, const TimeBounds &bounds, std::uint64_t index,
                        StateTransitionGraph &graph) {
    ScenarioOutcome out;
    out.index = index;
    Scenario s = campaign_scenario(cfg, index, out.fixture);
    out.seed = out.fixture ? 0 : derive_seed(cfg.master_seed, index);

    auto t0 = Clock::now();
    Simulation sim(s);
    std::vector<PartialSystemState> states;
    for (ViewNumber r = 1; r <= s.rounds; ++r) states.push_back(partial_state(sim.run_round(r)));
    Execution e = sim.run();
    out.sim_ms = ms_since(t0);

    PartialSystemState init = initial_system_state(s, e.store);
    auto t1 = Clock::now();
    for (std::size_t i = 0; i < states.size(); ++i) {
        const PartialSystemState *prev = i == 0 ? &init : &states[i - 1];
        out.hot.push_back(is_hot(states[i], prev, e.store, s.config, cfg.hot));
        out.state_hashes.push_back(states[i].hash());
    }
    double hot_ms = ms_since(t1);

    if (cfg.temperature) {
        auto t2 = Clock::now();
        for (auto tt : cfg.thresholds) {
            TemperatureState temp;
            std::optional<ViewNumber> fired;
            for (std::size_t i = 0; i < out.hot.size(); ++i)
                if (check_temperature(temp, out.hot[i], tt) && !fired) fired = states[i].round();
            out.temperature[tt] = fired;
        }
        out.temperature_ms = hot_ms + ms_since(t2);
    }
    if (cfg.lasso) {
        auto t3 = Clock::now();
        for (std::size_t i = 0; i < states.size(); ++i)
            graph.update(i == 0 ? &init : &states[i - 1], states[i], out.hot[i]);
        out.graph_ms = hot_ms + ms_since(t3);
    }
    if (cfg.time_bound) {
        auto t4 = Clock::now();
        auto commits = commit_times(e);
        auto all = bounds.all();
        for (std::size_t k = 0; k < 3; ++k) {
            if (all[k] <= 0) continue;
            out.time_bound[k] = time_bound_check(commits, e.end_time, all[k]);
            if (out.time_bound[k]) out.time_bound_round[k] = round_at(e, *out.time_bound[k]);
        }
        out.time_bound_ms = ms_since(t4);
    }
    out.safety = check_safety(e);
    out.false_positive = classify_false_positive(e);
    return out;
}

} // namespace

std::string format_threshold(Method m, std::uint32_t tt, std::size_t slot, const TimeBounds &b) {
    switch (m) {
    case Method::Temperature: return "TT=" + std::to_string(tt);
    case Method::Lasso: return "-";
    case Method::TimeBound: {
        static const char *names[] = {"T_small", "T_mid", "T_large"};
        return std::string(names[slot]) + "=" + std::to_string(b.all()[slot]) + "ms";
    }
    }
    return "?";
}

CampaignReport run_campaign(const CampaignConfig &cfg) {
    cfg.validate();
    CampaignReport rep;
    rep.config = cfg;
    rep.graph = std::make_shared<StateTransitionGraph>();

    double calibration_ms = 0;
    if (cfg.bounds) {
        rep.bounds = *cfg.bounds;
    } else if (cfg.time_bound) {
        auto t = Clock::now();
        rep.bounds = calibrate(cfg.generator.kind, cfg.generator.rounds, cfg.calibration_count,
                               derive_seed(cfg.master_seed, ~std::uint64_t{0}));
        calibration_ms = ms_since(t);
    }

    const std::uint64_t total = cfg.scenario_count;
    rep.outcomes.resize(total);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next++; i < total; i = next++) {
            try {
                rep.outcomes[i] = run_one(cfg, rep.bounds, i, *rep.graph);
            } catch (const std::exception &ex) {
                ScenarioOutcome failed;
                failed.index = i;
                failed.fixture = cfg.include_fixture && i == 0;
                failed.seed = failed.fixture ? 0 : derive_seed(cfg.master_seed, i);
                failed.failed = true;
                failed.error = ex.what();
                rep.outcomes[i] = std::move(failed);
            }
        }
    };
    unsigned n = std::min<unsigned>(cfg.workers, static_cast<unsigned>(total));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();

    double lasso_search_ms = 0;
    std::set<Digest> cyclic;
    if (cfg.lasso) {
        auto t = Clock::now();
        cyclic = rep.graph->hot_cyclic_vertices();
        rep.lassos = rep.graph->hot_lassos(cfg.lasso_cap);
        lasso_search_ms = ms_since(t);
        for (auto &o : rep.outcomes)
            for (std::size_t i = 0; i < o.state_hashes.size(); ++i)
                if (o.hot[i] && cyclic.count(o.state_hashes[i])) {
                    o.lasso = i + 1;
                    break;
                }
    }

    std::size_t completed = 0;
    double sim_ms = 0;
    for (const auto &o : rep.outcomes) {
        if (o.failed) {
            ++rep.failed;
            continue;
        }
        ++completed;
        sim_ms += o.sim_ms;
        if (o.safety) ++rep.safety_violations;
    }
    double denom = completed ? static_cast<double>(completed) : 1.0;
    double pct_safety = 100.0 * static_cast<double>(rep.safety_violations) / denom;

    auto make_row = [&](Method m, std::uint32_t tt, std::size_t slot, double checker_ms, auto flagged_round) {
        ReportRow row;
        row.method = to_string(m);
        row.threshold = format_threshold(m, tt, slot, rep.bounds);
        row.runtime_ms = sim_ms + checker_ms;
        row.pct_safety = pct_safety;
        double rounds_sum = 0;
        for (const auto &o : rep.outcomes) {
            if (o.failed) continue;
            std::optional<ViewNumber> r = flagged_round(o);
            if (!r) continue;
            ++row.flagged;
            rounds_sum += static_cast<double>(*r);
            if (o.false_positive) ++row.false_positives;
            VerdictRecord v;
            v.method = row.method;
            v.threshold = row.threshold;
            v.index = o.index;
            v.seed = o.seed;
            v.fixture = o.fixture;
            v.round = r;
            v.false_positive = o.false_positive;
            if (m == Method::TimeBound) {
                v.witness = "t=" + std::to_string(*o.time_bound[slot]);
            } else {
                std::size_t end = *r, begin = m == Method::Temperature ? end - tt : end - 1;
                for (std::size_t i = begin; i < end; ++i)
                    v.witness += (v.witness.empty() ? "" : ",") + o.state_hashes[i].short_hex();
            }
            rep.verdicts.push_back(std::move(v));
        }
        row.pct_liveness = 100.0 * static_cast<double>(row.flagged) / denom;
        row.trace_len = row.flagged ? rounds_sum / static_cast<double>(row.flagged) : 0;
        row.pct_false_pos =
            row.flagged ? 100.0 * static_cast<double>(row.false_positives) / static_cast<double>(row.flagged) : 0;
        rep.rows.push_back(row);
    };

    if (cfg.temperature)
        for (auto tt : cfg.thresholds) {
            double ms = 0;
            for (const auto &o : rep.outcomes) ms += o.temperature_ms;
            make_row(Method::Temperature, tt, 0, ms, [tt](const ScenarioOutcome &o) {
                auto it = o.temperature.find(tt);
                return it == o.temperature.end() ? std::optional<ViewNumber>{} : it->second;
            });
        }
    if (cfg.lasso) {
        double ms = lasso_search_ms;
        for (const auto &o : rep.outcomes) ms += o.graph_ms;
        make_row(Method::Lasso, 0, 0, ms, [](const ScenarioOutcome &o) { return o.lasso; });
    }
    if (cfg.time_bound)
        for (std::size_t k = 0; k < 3; ++k) {
            double ms = calibration_ms;
            for (const auto &o : rep.outcomes) ms += o.time_bound_ms;
            make_row(Method::TimeBound, 0, k, ms, [k](const ScenarioOutcome &o) { return o.time_bound_round[k]; });
        }

    for (const auto &o : rep.outcomes) {
        if (o.failed || !o.safety) continue;
        VerdictRecord v;
        v.method = "safety";
        v.threshold = "-";
        v.index = o.index;
        v.seed = o.seed;
        v.fixture = o.fixture;
        rep.verdicts.push_back(std::move(v));
    }
    return rep;
}

const ReportRow *CampaignReport::row(const std::string &method, const std::string &threshold) const {
    for (const auto &r : rows)
        if (r.method == method && (threshold.empty() || r.threshold == threshold)) return &r;
    return nullptr;
}

std::string CampaignReport::csv() const {
    std::ostringstream os;
    os << "method,threshold,runtime_ms,trace_len,pct_safety,pct_liveness,pct_false_pos\n";
    for (const auto &r : rows)
        os << r.method << ',' << r.threshold << ',' << fmt(r.runtime_ms) << ',' << fmt(r.trace_len) << ','
           << fmt(r.pct_safety) << ',' << fmt(r.pct_liveness) << ',' << fmt(r.pct_false_pos) << '\n';
    return os.str();
}

std::string CampaignReport::table() const {
    std::vector<std::vector<std::string>> cells{
        {"method", "threshold", "runtime ms", "trace len", "% safety", "% liveness", "% false pos"}};
    for (const auto &r : rows)
        cells.push_back({r.method, r.threshold, fmt(r.runtime_ms), fmt(r.trace_len), fmt(r.pct_safety),
                         fmt(r.pct_liveness), fmt(r.pct_false_pos)});
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto &line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    std::ostringstream os;
    os << "protocol " << to_string(config.generator.kind) << ", " << outcomes.size() << " scenarios, "
       << config.generator.rounds << " rounds";
    if (failed) os << ", " << failed << " failed";
    os << "\n";
    for (std::size_t l = 0; l < cells.size(); ++l) {
        for (std::size_t c = 0; c < cells[l].size(); ++c) {
            if (c) os << "  ";
            if (c < 2)
                os << std::left << std::setw(static_cast<int>(width[c])) << cells[l][c];
            else
                os << std::right << std::setw(static_cast<int>(width[c])) << cells[l][c];
        }
        os << '\n';
    }
    return os.str();
}

std::string CampaignReport::verdict_index() const {
    std::ostringstream os;
    for (const auto &v : verdicts) {
        os << "method=" << v.method << " threshold=" << v.threshold << " index=" << v.index << " seed=" << v.seed
           << (v.fixture ? " fixture=1" : "") << " round=" << (v.round ? std::to_string(*v.round) : "-")
           << " false_positive=" << (v.false_positive ? 1 : 0) << " witness=" << (v.witness.empty() ? "-" : v.witness)
           << '\n';
    }
    for (const auto &o : outcomes)
        if (o.failed) os << "failed index=" << o.index << " seed=" << o.seed << " error=" << o.error << '\n';
    return os.str();
}

ReplayResult replay(const Scenario &scenario, const ReplayOptions &options) {
    ReplayResult res;
    Simulation sim(scenario);
    for (ViewNumber r = 1; r <= scenario.rounds; ++r) res.states.push_back(partial_state(sim.run_round(r)));
    res.execution = sim.run();
    const Execution &e = res.execution;
    PartialSystemState init = initial_system_state(scenario, e.store);
    StateTransitionGraph graph;
    for (std::size_t i = 0; i < res.states.size(); ++i) {
        const PartialSystemState *prev = i == 0 ? &init : &res.states[i - 1];
        res.hot.push_back(is_hot(res.states[i], prev, e.store, scenario.config, options.hot));
        graph.update(prev, res.states[i], res.hot[i]);
    }
    bool fp = classify_false_positive(e);
    for (auto tt : options.thresholds) {
        TemperatureState temp;
        for (std::size_t i = 0; i < res.hot.size(); ++i)
            if (check_temperature(temp, res.hot[i], tt)) {
                Verdict v;
                v.method = Method::Temperature;
                v.liveness = true;
                v.round = res.states[i].round();
                v.at = e.rounds[i].completed_at;
                v.false_positive = fp;
                v.witness = "TT=" + std::to_string(tt);
                res.verdicts.push_back(v);
                break;
            }
    }
    if (options.lasso) {
        auto cyclic = graph.hot_cyclic_vertices();
        for (std::size_t i = 0; i < res.states.size(); ++i)
            if (res.hot[i] && cyclic.count(res.states[i].hash())) {
                Verdict v;
                v.method = Method::Lasso;
                v.liveness = true;
                v.round = res.states[i].round();
                v.at = e.rounds[i].completed_at;
                v.false_positive = fp;
                v.witness = res.states[i].hash().hex();
                res.verdicts.push_back(v);
                break;
            }
    }
    if (options.time_bound) {
        if (auto at = time_bound_check(commit_times(e), e.end_time, *options.time_bound)) {
            Verdict v;
            v.method = Method::TimeBound;
            v.liveness = true;
            v.at = at;
            v.round = round_at(e, *at);
            v.false_positive = fp;
            v.witness = "bound=" + std::to_string(*options.time_bound) + "ms";
            res.verdicts.push_back(v);
        }
    }
    if (check_safety(e)) {
        Verdict v;
        v.safety = true;
        v.witness = "conflicting executed blocks";
        res.verdicts.push_back(v);
    }

    std::ostringstream os;
    os << e.event_log() << e.snapshot_log();
    for (std::size_t i = 0; i < res.states.size(); ++i)
        os << "state round=" << res.states[i].round() << " hash=" << res.states[i].hash().hex()
           << " hot=" << (res.hot[i] ? 1 : 0) << '\n';
    for (const auto &v : res.verdicts) {
        os << "verdict " << (v.safety ? "safety" : std::string("liveness method=") + to_string(v.method));
        if (v.round) os << " round=" << *v.round;
        if (v.at) os << " t=" << *v.at;
        if (v.liveness) os << " false_positive=" << (v.false_positive ? 1 : 0);
        os << " witness=" << v.witness << '\n';
    }
    res.trace = os.str();
    return res;
}

} // namespace hotlive
