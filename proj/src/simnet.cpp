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

#include <algorithm>
#include <sstream>

namespace hotlive {

bool NetworkRule::same_partition(const ProcessId &a, const ProcessId &b) const {
    for (const auto &group : partitions) {
        bool has_a = std::find(group.begin(), group.end(), a) != group.end();
        bool has_b = std::find(group.begin(), group.end(), b) != group.end();
        if (has_a || has_b) return has_a && has_b;
    }
    return false;
}

std::uint32_t NetworkRule::override_for(const ProcessId &from, const ProcessId &to, MessageKind kind) const {
    auto it = delay_overrides.find({from, to, kind});
    if (it != delay_overrides.end()) return it->second;
    it = delay_overrides.find({from, std::nullopt, kind});
    return it == delay_overrides.end() ? 0 : it->second;
}

NetworkRule network_rule(const Scenario &s, ViewNumber round) {
    NetworkRule rule;
    rule.round = round;
    auto it = s.schedule.find(static_cast<std::uint32_t>(round));
    if (it != s.schedule.end()) rule.partitions = it->second.partitions;
    for (const auto &d : s.delays) {
        if (d.round != round) continue;
        auto &slot = rule.delay_overrides[{d.sender, d.recipient, d.kind}];
        slot = std::max(slot, d.half_deltas);
    }
    return rule;
}

std::optional<SimTime> deliver(const Message &msg, const ProcessId &from, const ProcessId &to, const NetworkRule &rule,
                               SimTime now, const Timing &timing) {
    if (from == to) return now;
    if (!rule.same_partition(from, to)) return std::nullopt;
    SimTime extra = static_cast<SimTime>(rule.override_for(from, to, msg.kind)) * timing.delta_ms / 2;
    return now + timing.base_delay_ms + extra;
}

std::vector<ReplicaState> instantiate_twins(const ProtocolConfig &config, std::uint32_t twin_index,
                                            const BlockStore &store) {
    config.validate();
    if (twin_index < 1 || twin_index > config.n) throw ConfigError("twin index out of range");
    std::vector<ReplicaState> out;
    for (const auto &id : instance_ids(config.n, twin_index)) out.push_back(initial_state(id, store));
    return out;
}

std::string format_event(const LoggedEvent &e) {
    std::ostringstream os;
    os << "t=" << e.event.time << " replica=" << e.replica.str() << " kind=" << to_string(e.event.kind)
       << " view=" << e.event.view << " block=" << (e.event.block ? e.event.block->hex() : std::string("-"));
    return os.str();
}

std::string Execution::event_log() const {
    std::string out;
    for (const auto &e : events) out += format_event(e) + "\n";
    return out;
}

std::string Execution::snapshot_log() const {
    std::ostringstream os;
    for (const auto &r : rounds) {
        os << "round=" << r.round << (r.stalled ? " stalled" : "");
        for (const auto &[id, t] : r.replicas)
            os << ' ' << id.str() << '=' << t.prepared.short_hex() << '/' << t.lock.short_hex() << '/'
               << t.exec.short_hex();
        os << '\n';
    }
    return os.str();
}

std::vector<LoggedEvent> Execution::executed_by_correct() const {
    std::vector<LoggedEvent> out;
    for (const auto &e : events)
        if (e.event.kind == EventKind::Executed && e.replica.twin == TwinTag::None) out.push_back(e);
    return out;
}

Simulation::Simulation(const Scenario &scenario, SimOptions options) : options_(options) {
    auto problems = validate(scenario);
    if (!problems.empty()) throw ConfigError("invalid scenario: " + problems.front());
    exec_.scenario = scenario;
    exec_.instances = instance_ids(scenario.config.n, scenario.twin_index);
    for (const auto &id : exec_.instances)
        if (id.twin == TwinTag::None) exec_.correct.push_back(id);
    leaders_ = scenario.leader_schedule();
    rules_.reserve(scenario.rounds);
    for (ViewNumber r = 1; r <= scenario.rounds; ++r) rules_.push_back(network_rule(scenario, r));
    states_ = instantiate_twins(scenario.config, scenario.twin_index, exec_.store);
}

void Simulation::start() {
    if (started_) return;
    started_ = true;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        ReplicaContext ctx{exec_.scenario.config, exec_.scenario.timing, exec_.store, leaders_};
        apply(i, enter_view(states_[i], 1, 0, ctx));
    }
}

void Simulation::send(std::size_t from, const Message &m) {
    const ProcessId &src = states_[from].id;
    for (std::size_t j = 0; j < states_.size(); ++j) {
        const ProcessId &dst = states_[j].id;
        if (m.recipient && dst.index != *m.recipient) continue;
        if (m.view < 1 || m.view > exec_.scenario.rounds) continue;
        auto at = deliver(m, src, dst, rules_[m.view - 1], now_, exec_.scenario.timing);
        if (options_.record_deliveries) exec_.deliveries.push_back({src, dst, m.kind, m.view, now_, at.value_or(-1)});
        if (!at) {
            ++exec_.dropped_by_partition;
            continue;
        }
        queue_.push(Pending{*at, seq_++, j, m, std::nullopt});
    }
}

void Simulation::apply(std::size_t i, Step step) {
    states_[i] = std::move(step.state);
    for (auto &ev : step.events) exec_.events.push_back({states_[i].id, std::move(ev)});
    for (const auto &x : step.exits) {
        if (x.view < 1 || x.view > exec_.scenario.rounds) continue;
        exits_[x.view][states_[i].id] = {x.triple, x.time};
    }
    if (done(i)) {
        exec_.end_time = std::max(exec_.end_time, now_);
        return;
    }
    for (const auto &m : step.outbound) send(i, m);
    for (const auto &t : step.timers) queue_.push(Pending{std::max(t.fire_at, now_), seq_++, i, std::nullopt, t});
}

bool Simulation::step_once() {
    while (!queue_.empty()) {
        Pending p = queue_.top();
        queue_.pop();
        if (done(p.target)) continue;
        now_ = p.at;
        ReplicaContext ctx{exec_.scenario.config, exec_.scenario.timing, exec_.store, leaders_};
        if (p.msg) {
            if (p.msg->view > exec_.scenario.rounds) continue;
            apply(p.target, handle_message(states_[p.target], *p.msg, now_, ctx));
        } else {
            if (p.timer->view > exec_.scenario.rounds) continue;
            apply(p.target, on_timer(states_[p.target], *p.timer, now_, ctx));
        }
        return true;
    }
    return false;
}

const RoundBoundary &Simulation::run_round(ViewNumber round) {
    if (round != next_round_ || round > exec_.scenario.rounds)
        throw std::logic_error("rounds must be run in order within the scenario");
    start();
    auto complete = [&] { return exits_[round].size() == states_.size(); };
    bool stalled = false;
    while (!complete()) {
        if (!step_once()) {
            stalled = true;
            break;
        }
    }
    RoundBoundary b;
    b.round = round;
    b.stalled = stalled;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        auto it = exits_[round].find(states_[i].id);
        if (it != exits_[round].end()) {
            b.replicas[states_[i].id] = it->second.first;
            b.completed_at = std::max(b.completed_at, it->second.second);
        } else {
            b.replicas[states_[i].id] = states_[i].triple();
            b.completed_at = std::max(b.completed_at, now_);
        }
    }
    exits_.erase(round);
    exec_.rounds.push_back(std::move(b));
    ++next_round_;
    return exec_.rounds.back();
}

Execution Simulation::run() {
    while (next_round_ <= exec_.scenario.rounds) run_round(next_round_);
    while (step_once()) {
    }
    exec_.end_time = std::max(exec_.end_time, now_);
    for (const auto &st : states_) exec_.final_triples[st.id] = st.triple();
    return exec_;
}

} // namespace hotlive
