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

#include "monitor.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hotlive {

PartialSystemState::PartialSystemState(ViewNumber round, std::map<ProcessId, BlockTriple> states)
    : round_(round), states_(std::move(states)) {
    std::string enc;
    put_u32(enc, static_cast<std::uint32_t>(states_.size()));
    for (const auto &[id, t] : states_) {
        put_field(enc, id.str());
        for (const auto *d : {&t.prepared, &t.lock, &t.exec})
            enc.append(reinterpret_cast<const char *>(d->bytes.data()), d->bytes.size());
    }
    hash_ = sha256_128(enc);
}

std::vector<PartialProcessState> PartialSystemState::processes() const {
    std::vector<PartialProcessState> out;
    for (const auto &[id, t] : states_) out.push_back({id, t});
    return out;
}

PartialSystemState partial_state(const RoundBoundary &boundary) {
    std::map<ProcessId, BlockTriple> correct;
    for (const auto &[id, t] : boundary.replicas)
        if (id.twin == TwinTag::None) correct.emplace(id, t);
    return PartialSystemState(boundary.round, std::move(correct));
}

bool is_hot(const PartialSystemState &state, const PartialSystemState *prev, const BlockStore &store,
            const ProtocolConfig &config, const HotOptions &options) {
    std::vector<BlockDigest> locks;
    for (const auto &[id, t] : state.states()) locks.push_back(t.lock);

    bool conflicting = false;
    for (std::size_t i = 0; i < locks.size() && !conflicting; ++i)
        for (std::size_t j = i + 1; j < locks.size(); ++j)
            if (store.conflicts(locks[i], locks[j])) {
                conflicting = true;
                break;
            }
    if (!conflicting) return false;

    std::uint32_t quorum = config.quorum_size();
    std::uint32_t credit = options.credit_faulty ? options.faulty_count : 0;
    for (const auto &b : locks) {
        std::uint32_t support = credit;
        for (const auto &l : locks)
            if (!store.conflicts(l, b)) ++support;
        if (support >= quorum) return false;
    }

    const BlockDigest genesis = store.genesis();
    for (const auto &[id, t] : state.states()) {
        BlockDigest before = genesis;
        if (prev) {
            auto it = prev->states().find(id);
            if (it != prev->states().end()) before = it->second.exec;
        }
        if (t.exec != before) return false;
    }
    return true;
}

bool check_temperature(TemperatureState &t, bool hot, std::uint32_t threshold) {
    if (!hot) {
        t.temp = 0;
        return false;
    }
    ++t.temp;
    return t.temp == threshold;
}

void StateTransitionGraph::update(const PartialSystemState *prev, const PartialSystemState &next, bool hot) {
    std::lock_guard lock(mu_);
    auto &flag = hot_[next.hash()];
    flag = flag || hot;
    out_[next.hash()];
    if (prev) {
        hot_.try_emplace(prev->hash(), false);
        out_[prev->hash()].insert(next.hash());
    }
}

std::size_t StateTransitionGraph::vertex_count() const {
    std::lock_guard lock(mu_);
    return hot_.size();
}

std::size_t StateTransitionGraph::edge_count() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto &[v, succ] : out_) n += succ.size();
    return n;
}

bool StateTransitionGraph::contains(const Digest &v) const {
    std::lock_guard lock(mu_);
    return hot_.count(v) != 0;
}

bool StateTransitionGraph::hot(const Digest &v) const {
    std::lock_guard lock(mu_);
    auto it = hot_.find(v);
    return it != hot_.end() && it->second;
}

namespace {

struct Indexed {
    PlainGraph graph;
    std::vector<Digest> names;
};

Indexed index_graph(const std::map<Digest, bool> &hot, const std::map<Digest, std::set<Digest>> &out) {
    Indexed ix;
    std::map<Digest, std::uint32_t> pos;
    for (const auto &[v, h] : hot) {
        pos[v] = static_cast<std::uint32_t>(ix.names.size());
        ix.names.push_back(v);
        ix.graph.hot.push_back(h);
    }
    ix.graph.adj.resize(ix.names.size());
    for (const auto &[v, succ] : out)
        for (const auto &w : succ) ix.graph.adj[pos.at(v)].push_back(pos.at(w));
    return ix;
}

// Iterative Tarjan over the hot subgraph; returns the component id of each
// hot vertex (-1 for cold vertices).
std::vector<int> hot_components(const PlainGraph &g, int &count) {
    const std::size_t n = g.adj.size();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    int next = 0;
    count = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (!g.hot[root] || index[root] != -1) continue;
        std::vector<std::pair<std::uint32_t, std::size_t>> work{{root, 0}};
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!work.empty()) {
            auto &[v, i] = work.back();
            if (i < g.adj[v].size()) {
                std::uint32_t w = g.adj[v][i++];
                if (!g.hot[w]) continue;
                if (index[w] == -1) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    work.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::uint32_t done = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
            if (low[done] == index[done]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != done);
                ++count;
            }
        }
    }
    return comp;
}

} // namespace

std::vector<bool> hot_cycle_members(const PlainGraph &g) {
    int count = 0;
    auto comp = hot_components(g, count);
    std::vector<std::size_t> size(count, 0);
    for (int c : comp)
        if (c >= 0) ++size[c];
    std::vector<bool> member(g.adj.size(), false);
    for (std::uint32_t v = 0; v < g.adj.size(); ++v) {
        if (comp[v] < 0) continue;
        if (size[comp[v]] > 1) member[v] = true;
        for (auto w : g.adj[v])
            if (w == v) member[v] = true;
    }
    return member;
}

std::vector<std::vector<std::uint32_t>> find_hot_lassos(const PlainGraph &g, std::size_t cap) {
    std::vector<std::vector<std::uint32_t>> cycles;
    if (cap == 0) return cycles;
    int count = 0;
    auto comp = hot_components(g, count);
    auto member = hot_cycle_members(g);
    const std::size_t n = g.adj.size();
    std::set<std::vector<std::uint32_t>> seen;
    std::vector<bool> blocked(n, false);
    std::vector<std::set<std::uint32_t>> bset(n);
    std::vector<std::uint32_t> path;

    for (std::uint32_t s = 0; s < n && cycles.size() < cap; ++s) {
        if (!member[s]) continue;
        auto allowed = [&](std::uint32_t w) { return w >= s && comp[w] == comp[s]; };
        std::function<void(std::uint32_t)> unblock = [&](std::uint32_t u) {
            blocked[u] = false;
            auto pending = std::move(bset[u]);
            bset[u].clear();
            for (auto w : pending)
                if (blocked[w]) unblock(w);
        };
        std::function<bool(std::uint32_t)> circuit = [&](std::uint32_t v) -> bool {
            bool found = false;
            path.push_back(v);
            blocked[v] = true;
            for (auto w : g.adj[v]) {
                if (!allowed(w) || cycles.size() >= cap) continue;
                if (w == s) {
                    std::vector<std::uint32_t> key(path);
                    std::sort(key.begin(), key.end());
                    if (seen.insert(key).second) cycles.push_back(path);
                    found = true;
                } else if (!blocked[w] && circuit(w)) {
                    found = true;
                }
            }
            if (found) {
                unblock(v);
            } else {
                for (auto w : g.adj[v])
                    if (allowed(w)) bset[w].insert(v);
            }
            path.pop_back();
            return found;
        };
        for (std::uint32_t v = 0; v < n; ++v)
            if (allowed(v)) {
                blocked[v] = false;
                bset[v].clear();
            }
        circuit(s);
    }
    return cycles;
}

std::set<Digest> StateTransitionGraph::hot_cyclic_vertices() const {
    std::lock_guard lock(mu_);
    auto ix = index_graph(hot_, out_);
    auto member = hot_cycle_members(ix.graph);
    std::set<Digest> out;
    for (std::size_t i = 0; i < member.size(); ++i)
        if (member[i]) out.insert(ix.names[i]);
    return out;
}

std::vector<std::vector<Digest>> StateTransitionGraph::hot_lassos(std::size_t cap) const {
    std::lock_guard lock(mu_);
    auto ix = index_graph(hot_, out_);
    std::vector<std::vector<Digest>> out;
    for (const auto &cycle : find_hot_lassos(ix.graph, cap)) {
        std::vector<Digest> named;
        for (auto v : cycle) named.push_back(ix.names[v]);
        out.push_back(std::move(named));
    }
    return out;
}

std::string StateTransitionGraph::export_text() const {
    std::lock_guard lock(mu_);
    std::ostringstream os;
    for (const auto &[v, h] : hot_) os << "v " << v.hex() << " hot=" << (h ? 1 : 0) << '\n';
    for (const auto &[v, succ] : out_)
        for (const auto &w : succ) os << "e " << v.hex() << ' ' << w.hex() << '\n';
    return os.str();
}

std::optional<SimTime> time_bound_check(std::vector<SimTime> commit_times, SimTime end, SimTime bound) {
    std::sort(commit_times.begin(), commit_times.end());
    SimTime last = 0;
    for (SimTime t : commit_times) {
        if (t > end) break;
        if (t - last > bound) return last + bound;
        last = std::max(last, t);
    }
    if (end - last > bound) return last + bound;
    return std::nullopt;
}

bool check_safety(const Execution &e) {
    std::set<BlockDigest> executed;
    for (const auto &ev : e.executed_by_correct())
        if (ev.event.block) executed.insert(*ev.event.block);
    std::vector<BlockDigest> v(executed.begin(), executed.end());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (e.store.conflicts(v[i], v[j])) return true;
    return false;
}

bool classify_false_positive(const Execution &e) {
    std::vector<BlockDigest> locks;
    for (const auto &[id, t] : e.final_triples)
        if (id.twin == TwinTag::None) locks.push_back(t.lock);
    for (std::size_t i = 0; i < locks.size(); ++i)
        for (std::size_t j = i + 1; j < locks.size(); ++j)
            if (e.store.conflicts(locks[i], locks[j])) return false;
    return true;
}

const char *to_string(Method m) {
    switch (m) {
    case Method::Temperature: return "temperature";
    case Method::Lasso: return "lasso";
    case Method::TimeBound: return "time-bound";
    }
    return "?";
}

} // namespace hotlive
