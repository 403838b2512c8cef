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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "campaign.hpp"
#include "monitor.hpp"
#include "scenario.hpp"
#include "simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace hotlive;

namespace {

using Clock = std::chrono::steady_clock;

struct Result {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string &what) {
        if (!cond) {
            pass = false;
            detail << "[FAILED: " << what << "] ";
        }
    }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", v);
    return buf;
}

bool any_conflict(const std::vector<BlockDigest> &blocks, const BlockStore &store) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (store.conflicts(blocks[i], blocks[j])) return true;
    return false;
}

std::vector<BlockDigest> correct_locks(const RoundBoundary &b) {
    std::vector<BlockDigest> out;
    for (const auto &[id, t] : b.replicas)
        if (id.twin == TwinTag::None) out.push_back(t.lock);
    return out;
}

bool has_verdict(const ReplayResult &r, Method m) {
    return std::any_of(r.verdicts.begin(), r.verdicts.end(), [&](const Verdict &v) { return v.liveness && v.method == m; });
}

bool has_safety(const ReplayResult &r) {
    return std::any_of(r.verdicts.begin(), r.verdicts.end(), [](const Verdict &v) { return v.safety; });
}

CampaignConfig campaign(ProtocolKind kind, std::uint32_t count, std::vector<std::uint32_t> thresholds) {
    CampaignConfig cfg;
    cfg.generator = GeneratorConfig::defaults(kind);
    cfg.generator.rounds = 10;
    cfg.scenario_count = count;
    cfg.master_seed = 1;
    cfg.thresholds = std::move(thresholds);
    cfg.workers = workers();
    return cfg;
}

const ReportRow *t_small_row(const CampaignReport &rep) {
    for (const auto &r : rep.rows)
        if (r.method == "time-bound" && r.threshold.rfind("T_small", 0) == 0) return &r;
    return nullptr;
}

std::string rates(const CampaignReport &rep) {
    std::ostringstream os;
    for (const auto &r : rep.rows)
        os << r.method << "(" << r.threshold << ")=" << pct(r.pct_liveness) << "/fp" << pct(r.pct_false_pos) << " ";
    return os.str();
}

// ---- 1 ----
Result fixture_deadlock() {
    Result res;
    auto t0 = Clock::now();
    Scenario s = fixture_fig2();
    ReplayOptions o;
    o.thresholds = {5};
    ReplayResult r = replay(s, o);
    const Execution &e = r.execution;
    double secs = seconds_since(t0);

    // The round-1 proposal of the twin is the first block above genesis.
    const Block &g = e.store.get(e.store.genesis());
    BlockDigest b1 = make_child(g, 1, proposal_payload(ProcessId{1, TwinTag::A}, 1, 1)).digest;
    auto locks1 = correct_locks(e.rounds.at(0));
    auto on_b1 = std::count(locks1.begin(), locks1.end(), b1);
    res.require(on_b1 == 1, "(a) exactly one correct replica locked on B1 after round 1");

    auto locks2 = correct_locks(e.rounds.at(1));
    std::set<BlockDigest> distinct(locks2.begin(), locks2.end());
    distinct.erase(e.store.genesis());
    bool two = distinct.size() == 2 && distinct.count(b1) && any_conflict({distinct.begin(), distinct.end()}, e.store);
    res.require(two, "(b) round-2 locks are {B1, B2} and conflict");

    std::optional<ViewNumber> fired;
    for (const auto &v : r.verdicts)
        if (v.liveness && v.method == Method::Temperature) fired = v.round;
    res.require(fired && *fired >= 3 && *fired <= 8, "(c) temperature verdict with TT=5 in rounds 3-8");

    StateTransitionGraph graph;
    for (std::size_t i = 0; i < r.states.size(); ++i)
        graph.update(i ? &r.states[i - 1] : nullptr, r.states[i], r.hot[i]);
    res.require(!graph.hot_lassos().empty() && has_verdict(r, Method::Lasso), "(d) hot lasso after the run");
    res.require(!classify_false_positive(e), "(e) not a false positive");
    res.require(secs < 1.0, "runtime < 1 s");
    res.detail << "B1=" << b1.short_hex() << " temperature_round=" << (fired ? std::to_string(*fired) : "-")
               << " runtime=" << secs << "s";
    return res;
}

// ---- 2 ----
Result three_phase_immunity() {
    Result res;
    auto t0 = Clock::now();
    Scenario s = fixture_fig2();
    s.config = ProtocolConfig::make(ProtocolKind::HotStuff, s.config.n, s.config.f);
    s.timing = default_timing(ProtocolKind::HotStuff);
    ReplayOptions o;
    o.thresholds = {5};
    ReplayResult r = replay(s, o);
    double secs = seconds_since(t0);
    res.require(!has_verdict(r, Method::Temperature), "no temperature verdict");
    res.require(!has_verdict(r, Method::Lasso), "no lasso verdict");
    res.require(!has_safety(r), "no safety verdict");
    std::size_t executed = 0;
    for (const auto &ev : r.execution.executed_by_correct())
        if (ev.event.block != r.execution.store.genesis()) ++executed;
    res.require(executed > 0, "a correct replica executes a block");
    res.require(secs < 1.0, "runtime < 1 s");
    res.detail << "executions_by_correct=" << executed << " runtime=" << secs << "s";
    return res;
}

// ---- 3 ----
Result hotstuff_campaign() {
    Result res;
    auto t0 = Clock::now();
    CampaignReport rep = run_campaign(campaign(ProtocolKind::HotStuff, 500, {5}));
    double secs = seconds_since(t0);
    const ReportRow *temp = rep.row("temperature", "TT=5");
    const ReportRow *lasso = rep.row("lasso", "-");
    const ReportRow *tb = t_small_row(rep);
    res.require(temp && temp->pct_liveness == 0.0, "temperature 0% liveness");
    res.require(lasso && lasso->pct_liveness == 0.0, "lasso 0% liveness");
    res.require(rep.safety_violations == 0, "0% safety");
    res.require(tb != nullptr, "T_small row present");
    if (tb) {
        res.require(tb->pct_liveness > 50.0, "T_small > 50% liveness");
        res.require(tb->flagged > 0 && tb->false_positives == tb->flagged, "T_small verdicts are all false positives");
    }
    res.require(rep.failed == 0, "no failed scenarios");
    res.require(secs < 600, "runtime < 10 min");
    res.detail << rates(rep) << "safety=" << rep.safety_violations << " runtime=" << secs << "s";
    return res;
}

// ---- 4 and 10 share the 2-Phase corpus ----
CampaignReport &two_phase_report(double &secs) {
    static CampaignReport rep;
    static double elapsed = -1;
    if (elapsed < 0) {
        auto t0 = Clock::now();
        rep = run_campaign(campaign(ProtocolKind::TwoPhaseHotStuff, 1000, {5, 10, 15}));
        elapsed = seconds_since(t0);
    }
    secs = elapsed;
    return rep;
}

Result two_phase_campaign() {
    Result res;
    double secs = 0;
    const CampaignReport &rep = two_phase_report(secs);
    const ReportRow *temp = rep.row("temperature", "TT=5");
    const ReportRow *lasso = rep.row("lasso", "-");
    const ReportRow *tb = t_small_row(rep);
    for (const ReportRow *r : {temp, lasso}) {
        if (!r) {
            res.require(false, "row missing");
            continue;
        }
        res.require(r->pct_liveness >= 0.1 && r->pct_liveness <= 5.0, r->method + " rate within [0.1%, 5%]");
        res.require(r->false_positives == 0, r->method + " has 0% false positives");
    }
    res.require(tb != nullptr, "T_small row present");
    if (temp && tb) res.require(tb->pct_liveness >= 10 * temp->pct_liveness, "T_small rate >= 10x temperature rate");
    res.require(rep.failed == 0, "no failed scenarios");
    res.require(secs < 1200, "runtime < 20 min");
    res.detail << rates(rep) << "runtime=" << secs << "s";
    return res;
}

// ---- 5 ----
Result sync_campaign() {
    Result res;
    auto t0 = Clock::now();
    CampaignConfig cfg = campaign(ProtocolKind::SyncHotStuff, 1000, {5});
    cfg.generator.delay_injection = true;
    cfg.generator.timing = default_timing(ProtocolKind::SyncHotStuff);
    cfg.generator.timing->delta_ms = 50;
    CampaignReport rep = run_campaign(cfg);
    double secs = seconds_since(t0);
    res.require(rep.safety_violations >= 1, "at least one safety verdict");

    std::size_t true_liveness = 0, bad = 0;
    for (const auto &o : rep.outcomes) {
        bool flagged = o.lasso.has_value() || (o.temperature.count(5) && o.temperature.at(5).has_value());
        if (!flagged || o.false_positive) continue;
        ++true_liveness;
        // Re-run independently and inspect the final locks of the correct replicas.
        bool fixture = false;
        Execution e = Simulation(campaign_scenario(cfg, o.index, fixture)).run();
        std::vector<BlockDigest> locks;
        for (const auto &id : e.correct) locks.push_back(e.final_triples.at(id).lock);
        if (!any_conflict(locks, e.store)) ++bad;
    }
    res.require(true_liveness >= 1, "at least one true liveness verdict");
    res.require(bad == 0, "every true liveness verdict ends with conflicting correct locks");
    res.require(rep.failed == 0, "no failed scenarios");
    res.require(secs < 1800, "runtime < 30 min");
    res.detail << "safety=" << pct(100.0 * rep.safety_violations / rep.outcomes.size())
               << " true_liveness=" << true_liveness << " " << rates(rep) << "runtime=" << secs << "s";
    return res;
}

// ---- 6 ----
Result temperature_oracle() {
    Result res;
    std::mt19937_64 rng(606);
    std::size_t mismatches = 0, fired_total = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::uint32_t tt = static_cast<std::uint32_t>(uniform_int(rng, 1, 8));
        std::size_t len = uniform_int(rng, 0, 40);
        double p = static_cast<double>(uniform_int(rng, 1, 9)) / 10.0;
        std::bernoulli_distribution coin(p);
        std::vector<bool> bits(len);
        for (std::size_t i = 0; i < len; ++i) bits[i] = coin(rng);

        // Oracle: first index at which a run of tt ones is completed.
        std::optional<std::size_t> expected;
        for (std::size_t i = 0; i + tt <= len && !expected; ++i) {
            bool all = true;
            for (std::size_t k = i; k < i + tt; ++k) all = all && bits[k];
            if (all) expected = i + tt - 1;
        }
        TemperatureState t;
        std::optional<std::size_t> got;
        for (std::size_t i = 0; i < len; ++i)
            if (check_temperature(t, bits[i], tt) && !got) got = i;
        if (got != expected) ++mismatches;
        if (got) ++fired_total;
    }
    res.require(mismatches == 0, "exact match with the run-of-ones oracle");
    res.detail << "sequences=10000 fired=" << fired_total << " mismatches=" << mismatches;
    return res;
}

// ---- 7 ----
bool oracle_hot_cycle(const PlainGraph &g, std::vector<bool> *on_cycle) {
    const std::size_t n = g.adj.size();
    bool any = false;
    for (std::size_t s = 0; s < n; ++s) {
        if (!g.hot[s]) continue;
        // Plain DFS over hot vertices looking for a path back to s.
        std::vector<bool> seen(n, false);
        std::vector<std::uint32_t> stack;
        for (auto w : g.adj[s])
            if (g.hot[w]) stack.push_back(w);
        bool back = false;
        while (!stack.empty() && !back) {
            auto u = stack.back();
            stack.pop_back();
            if (u == s) back = true;
            if (seen[u]) continue;
            seen[u] = true;
            for (auto w : g.adj[u])
                if (g.hot[w] && !seen[w]) stack.push_back(w);
                else if (w == s) back = true;
        }
        if (on_cycle) (*on_cycle)[s] = back;
        any = any || back;
    }
    return any;
}

bool valid_cycle(const PlainGraph &g, const std::vector<std::uint32_t> &c) {
    if (c.empty()) return false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto u = c[i], v = c[(i + 1) % c.size()];
        if (!g.hot[u]) return false;
        if (std::find(g.adj[u].begin(), g.adj[u].end(), v) == g.adj[u].end()) return false;
    }
    std::set<std::uint32_t> distinct(c.begin(), c.end());
    return distinct.size() == c.size();
}

Result lasso_oracle() {
    Result res;
    std::mt19937_64 rng(707);
    std::size_t mismatches = 0, member_mismatches = 0, invalid = 0, with_cycle = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = uniform_int(rng, 1, 200);
        double degree = static_cast<double>(uniform_int(rng, 0, 30)) / 10.0; // mean out-degree 0..3
        double hot_p = static_cast<double>(uniform_int(rng, 1, 10)) / 10.0;
        std::bernoulli_distribution hot(hot_p), edge(std::min(1.0, degree / static_cast<double>(n)));
        PlainGraph g;
        g.adj.resize(n);
        g.hot.resize(n);
        for (std::size_t v = 0; v < n; ++v) g.hot[v] = hot(rng);
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = 0; b < n; ++b)
                if (edge(rng)) g.adj[a].push_back(b);

        std::vector<bool> on_cycle(n, false);
        bool expected = oracle_hot_cycle(g, &on_cycle);
        auto cycles = find_hot_lassos(g);
        if (expected != !cycles.empty()) ++mismatches;
        if (hot_cycle_members(g) != on_cycle) ++member_mismatches;
        for (const auto &c : cycles)
            if (!valid_cycle(g, c)) ++invalid;
        if (expected) ++with_cycle;
    }
    res.require(mismatches == 0, "non-empty iff the DFS oracle finds a hot cycle");
    res.require(member_mismatches == 0, "cycle membership matches the oracle");
    res.require(invalid == 0, "every reported lasso is an elementary hot cycle");
    res.detail << "graphs=1000 with_hot_cycle=" << with_cycle << " mismatches=" << mismatches
               << " membership_mismatches=" << member_mismatches << " invalid_cycles=" << invalid;
    return res;
}

// ---- 8 ----
struct Tree {
    std::vector<int> parent; // parent[0] = -1 is genesis
    bool ancestor_or_self(int a, int b) const { // b on the path from a to the root
        for (int x = a; x >= 0; x = parent[x])
            if (x == b) return true;
        return false;
    }
    bool conflict(int a, int b) const { return !ancestor_or_self(a, b) && !ancestor_or_self(b, a); }
};

bool oracle_hot(const Tree &t, const std::vector<int> &lock, const std::vector<int> &exec,
                const std::vector<int> *prev_exec, std::uint32_t quorum) {
    const std::size_t n = lock.size();
    bool i = false;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (t.conflict(lock[a], lock[b])) i = true;
    bool ii = true;
    for (std::size_t a = 0; a < n; ++a) {
        // Replicas not locked on something conflicting would lock on lock[a].
        std::uint32_t willing = 0;
        for (std::size_t b = 0; b < n; ++b)
            if (!t.conflict(lock[b], lock[a])) ++willing;
        if (willing >= quorum) ii = false;
    }
    bool iii = true;
    for (std::size_t a = 0; a < n; ++a)
        if (exec[a] != (prev_exec ? (*prev_exec)[a] : 0)) iii = false;
    return i && ii && iii;
}

Result hot_predicate_audit() {
    Result res;
    std::mt19937_64 rng(808);
    std::size_t mismatches = 0, hot_count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto kind = trial % 2 ? ProtocolKind::TwoPhaseHotStuff : ProtocolKind::HotStuff;
        std::uint32_t f = static_cast<std::uint32_t>(uniform_int(rng, 1, 2));
        auto config = ProtocolConfig::make(kind, 3 * f + 1, f);
        std::size_t correct = config.n - 1;
        std::size_t blocks = uniform_int(rng, 2, 7);
        Tree t;
        t.parent = {-1};
        BlockStore store;
        std::vector<BlockDigest> digest{store.genesis()};
        for (std::size_t b = 1; b < blocks; ++b) {
            int p = static_cast<int>(uniform_int(rng, 0, b - 1));
            t.parent.push_back(p);
            digest.push_back(store.insert(make_child(store.get(digest[p]), b, "n" + std::to_string(b))).digest);
        }
        auto pick = [&] { return static_cast<int>(uniform_int(rng, 0, blocks - 1)); };
        std::vector<int> lock(correct), exec(correct), prev(correct);
        for (std::size_t k = 0; k < correct; ++k) {
            lock[k] = pick();
            prev[k] = uniform_int(rng, 0, 2) ? 0 : pick();
            exec[k] = uniform_int(rng, 0, 3) ? prev[k] : pick();
        }
        bool with_prev = uniform_int(rng, 0, 1) == 1;
        std::map<ProcessId, BlockTriple> now_map, prev_map;
        for (std::uint32_t k = 0; k < correct; ++k) {
            ProcessId id{k + 2};
            now_map[id] = BlockTriple{digest[lock[k]], digest[lock[k]], digest[exec[k]]};
            prev_map[id] = BlockTriple{digest[lock[k]], digest[lock[k]], digest[prev[k]]};
        }
        PartialSystemState now_state(2, now_map), prev_state(1, prev_map);
        bool got = is_hot(now_state, with_prev ? &prev_state : nullptr, store, config);
        bool expected = oracle_hot(t, lock, exec, with_prev ? &prev : nullptr, config.quorum_size());
        if (got != expected) ++mismatches;
        if (expected) ++hot_count;
    }
    res.require(mismatches == 0, "is_hot matches the brute-force evaluation");
    res.require(hot_count > 0, "audit covers hot configurations");
    res.detail << "configurations=1000 hot=" << hot_count << " mismatches=" << mismatches;
    return res;
}

// ---- 9 ----
std::string verdict_lines(const ReplayResult &r) {
    std::ostringstream os;
    for (const auto &v : r.verdicts)
        os << to_string(v.method) << ' ' << v.liveness << v.safety << ' ' << (v.round ? *v.round : 0) << ' '
           << (v.at ? *v.at : -1) << ' ' << v.false_positive << ' ' << v.witness << '\n';
    return os.str();
}

Result determinism() {
    Result res;
    std::size_t runs = 0, diffs = 0;
    for (auto kind : {ProtocolKind::HotStuff, ProtocolKind::TwoPhaseHotStuff, ProtocolKind::SyncHotStuff}) {
        auto g = GeneratorConfig::defaults(kind);
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            ReplayOptions o;
            o.thresholds = {3, 5};
            o.time_bound = 100;
            Scenario s = generate(g, derive_seed(99, seed));
            ReplayResult a = replay(s, o);
            ReplayResult b = replay(parse_scenario(to_text(s)), o);
            ++runs;
            if (a.execution.event_log() != b.execution.event_log() ||
                a.execution.snapshot_log() != b.execution.snapshot_log() || verdict_lines(a) != verdict_lines(b) ||
                a.trace != b.trace)
                ++diffs;
        }
    }
    CampaignConfig cfg = campaign(ProtocolKind::TwoPhaseHotStuff, 60, {5});
    cfg.workers = 1;
    CampaignReport serial = run_campaign(cfg);
    cfg.workers = std::max(2u, workers());
    CampaignReport parallel = run_campaign(cfg);
    bool campaigns_equal = serial.verdict_index() == parallel.verdict_index() &&
                           serial.graph->export_text() == parallel.graph->export_text();
    res.require(diffs == 0, "replays are byte-identical");
    res.require(campaigns_equal, "campaign verdicts independent of worker count");
    res.detail << "replays=" << runs << " differing=" << diffs << " campaign_equal=" << campaigns_equal;
    return res;
}

// ---- 10 ----
Result threshold_monotonicity() {
    Result res;
    double secs = 0;
    const CampaignReport &rep = two_phase_report(secs);
    double last = 101;
    for (std::uint32_t tt : {5u, 10u, 15u}) {
        const ReportRow *r = rep.row("temperature", "TT=" + std::to_string(tt));
        if (!r) {
            res.require(false, "row TT=" + std::to_string(tt) + " missing");
            continue;
        }
        res.require(r->pct_liveness <= last, "rate non-increasing at TT=" + std::to_string(tt));
        res.require(r->false_positives == 0, "no false positives at TT=" + std::to_string(tt));
        last = r->pct_liveness;
        res.detail << "TT=" << tt << ":" << pct(r->pct_liveness) << "/fp=" << r->false_positives << " ";
    }
    return res;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char *name;
        std::function<Result()> run;
    };
    std::vector<Criterion> criteria{
        {1, "deadlock fixture", fixture_deadlock},
        {2, "three-phase immunity", three_phase_immunity},
        {3, "HotStuff campaign", hotstuff_campaign},
        {4, "2-Phase campaign", two_phase_campaign},
        {5, "Sync HotStuff force-locking", sync_campaign},
        {6, "temperature oracle", temperature_oracle},
        {7, "lasso oracle", lasso_oracle},
        {8, "hot-state audit", hot_predicate_audit},
        {9, "determinism", determinism},
        {10, "threshold monotonicity", threshold_monotonicity},
    };
    int failed = 0;
    for (auto &c : criteria) {
        Result r;
        try {
            r = c.run();
        } catch (const std::exception &e) {
            r.pass = false;
            r.detail << "exception: " << e.what();
        }
        if (!r.pass) ++failed;
        std::printf("criterion %2d %-28s %s  %s\n", c.id, c.name, r.pass ? "PASS" : "FAIL", r.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
