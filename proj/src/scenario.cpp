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

#include "scenario.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace hotlive {

std::vector<std::uint32_t> Scenario::leader_schedule() const {
    std::vector<std::uint32_t> out(rounds, 0);
    for (const auto &[r, spec] : schedule)
        if (r >= 1 && r <= rounds) out[r - 1] = spec.leader;
    return out;
}

std::vector<ProcessId> instance_ids(std::uint32_t n, std::uint32_t twin_index) {
    std::vector<ProcessId> out;
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (i == twin_index) {
            out.push_back({i, TwinTag::A});
            out.push_back({i, TwinTag::B});
        } else {
            out.push_back({i, TwinTag::None});
        }
    }
    return out;
}

Timing default_timing(ProtocolKind kind) {
    Timing t;
    if (kind == ProtocolKind::SyncHotStuff) t.view_timeout_ms = t.sync_view_limit_ms;
    return t;
}

GeneratorConfig GeneratorConfig::defaults(ProtocolKind kind) {
    GeneratorConfig g;
    g.kind = kind;
    auto pc = ProtocolConfig::defaults(kind);
    g.n = pc.n;
    g.f = pc.f;
    g.delay_injection = kind == ProtocolKind::SyncHotStuff;
    return g;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over master ^ golden-ratio-scaled index
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t uniform_int(std::mt19937_64 &rng, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return rng();
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return lo + x % span;
}

namespace {

PartitionSet sample_partition(std::mt19937_64 &rng, std::vector<ProcessId> ids, std::uint32_t groups) {
    if (groups <= 1) return {ids};
    const std::size_t m = ids.size();
    const std::size_t k = uniform_int(rng, 1, m - 1);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = uniform_int(rng, i, m - 1);
        std::swap(ids[i], ids[j]);
    }
    std::vector<ProcessId> first(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<ProcessId> second(ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {first, second};
}

} // namespace

Scenario generate(const GeneratorConfig &gcfg, std::uint64_t seed) {
    Scenario s;
    s.config = ProtocolConfig::make(gcfg.kind, gcfg.n, gcfg.f);
    if (gcfg.rounds < 1) throw ConfigError("rounds must be at least 1");
    if (gcfg.partitions_per_round < 1 || gcfg.partitions_per_round > 2)
        throw ConfigError("partitions_per_round must be 1 or 2");
    if (gcfg.delay_injection && gcfg.kind != ProtocolKind::SyncHotStuff)
        throw ConfigError("delay injection is only defined for Sync HotStuff");
    s.timing = gcfg.timing.value_or(default_timing(gcfg.kind));
    s.rounds = gcfg.rounds;
    s.seed = seed;

    std::mt19937_64 rng(seed);
    s.twin_index = static_cast<std::uint32_t>(uniform_int(rng, 1, gcfg.n));
    const auto ids = instance_ids(gcfg.n, s.twin_index);
    for (std::uint32_t r = 1; r <= gcfg.rounds; ++r) {
        RoundSpec spec;
        spec.leader = gcfg.leader_law == LeaderLaw::Uniform ? static_cast<std::uint32_t>(uniform_int(rng, 1, gcfg.n))
                                                            : (r - 1) % gcfg.n + 1;
        spec.partitions = sample_partition(rng, ids, gcfg.partitions_per_round);
        s.schedule.emplace(r, std::move(spec));
    }
    if (gcfg.delay_injection) {
        for (std::uint32_t r = 1; r <= gcfg.rounds; ++r) {
            for (const auto &sender : ids) {
                auto propose = static_cast<std::uint32_t>(uniform_int(rng, 0, kMaxProposeHalfDeltas));
                auto vote = static_cast<std::uint32_t>(uniform_int(rng, 0, kMaxVoteHalfDeltas));
                s.delays.push_back({r, sender, std::nullopt, MessageKind::Propose, propose});
                s.delays.push_back({r, sender, std::nullopt, MessageKind::VotePrepare, vote});
            }
        }
    }
    return s;
}

Scenario fixture_fig2() {
    Scenario s;
    s.config = ProtocolConfig::make(ProtocolKind::TwoPhaseHotStuff, 4, 1);
    s.timing = default_timing(ProtocolKind::TwoPhaseHotStuff);
    s.twin_index = 1;
    s.rounds = 10;
    s.seed = 0;
    const ProcessId p1a{1, TwinTag::A}, p1b{1, TwinTag::B}, p2{2}, p3{3}, p4{4};
    // View 1: the twin P1A reaches only P3 and P4, and its certificate to P4
    // is held back past P4's view timeout.
    s.schedule[1] = RoundSpec{1, {{p1a, p3, p4}, {p1b, p2}}};
    const auto late = static_cast<std::uint32_t>(2 * s.timing.view_timeout_ms / s.timing.delta_ms + 8);
    s.delays.push_back({1, p1a, p4, MessageKind::QCAnnounce, late});
    // View 2: P2 leads; P3's lock report arrives after P2 already has a quorum.
    s.schedule[2] = RoundSpec{2, {{p1b, p2, p3, p4}, {p1a}}};
    s.delays.push_back({2, p3, p2, MessageKind::NewView, 1});
    // Afterwards the twin stays silent and no leader can assemble 2f+1.
    for (std::uint32_t r = 3; r <= s.rounds; ++r)
        s.schedule[r] = RoundSpec{r % 2 == 1 ? 2u : 4u, {{p1a, p1b, p3}, {p2, p4}}};
    return s;
}

std::vector<std::string> validate(const Scenario &s) {
    std::vector<std::string> out;
    try {
        s.config.validate();
    } catch (const ConfigError &e) {
        out.push_back(std::string("protocol config: ") + e.what());
    }
    if (s.rounds < 1) out.push_back("rounds must be at least 1");
    if (s.twin_index < 1 || s.twin_index > s.config.n)
        out.push_back("twin index " + std::to_string(s.twin_index) + " out of range");
    if (s.timing.base_delay_ms < 0 || s.timing.delta_ms <= 0 || s.timing.delta_ms % 2 != 0)
        out.push_back("timing: delta must be positive and even, base delay non-negative");
    if (s.timing.view_timeout_ms <= 0 || s.timing.sync_view_limit_ms <= 0) out.push_back("timing: timeouts must be positive");

    const auto ids = instance_ids(s.config.n, s.twin_index);
    const std::set<ProcessId> all(ids.begin(), ids.end());
    for (std::uint32_t r = 1; r <= s.rounds; ++r) {
        auto it = s.schedule.find(r);
        const std::string tag = "round " + std::to_string(r) + ": ";
        if (it == s.schedule.end()) {
            out.push_back(tag + "missing from the leader/partition schedule");
            continue;
        }
        const auto &spec = it->second;
        if (spec.leader < 1 || spec.leader > s.config.n) out.push_back(tag + "leader out of range");
        std::set<ProcessId> seen;
        bool ok = true;
        for (const auto &group : spec.partitions) {
            if (group.empty()) ok = false;
            for (const auto &p : group) {
                if (!all.count(p)) out.push_back(tag + "unknown instance " + p.str() + " in partition");
                if (!seen.insert(p).second) out.push_back(tag + "instance " + p.str() + " in two partitions");
            }
        }
        if (!ok) out.push_back(tag + "empty partition");
        if (seen.size() != all.size() || !std::includes(seen.begin(), seen.end(), all.begin(), all.end()))
            out.push_back(tag + "partitions do not cover every instance");
    }
    for (const auto &[r, spec] : s.schedule)
        if (r < 1 || r > s.rounds) out.push_back("round " + std::to_string(r) + " scheduled beyond the scenario");

    for (const auto &d : s.delays) {
        const std::string tag = "delay round " + std::to_string(d.round) + " " + d.sender.str() + ": ";
        if (d.round < 1 || d.round > s.rounds) out.push_back(tag + "round out of range");
        if (!all.count(d.sender)) out.push_back(tag + "unknown sender");
        if (d.recipient && !all.count(*d.recipient)) out.push_back(tag + "unknown recipient");
        if (d.kind == MessageKind::Propose && d.half_deltas > kMaxProposeHalfDeltas)
            out.push_back(tag + "propose delay exceeds blame timer (3 Delta)");
        if (is_vote(d.kind) && d.half_deltas > kMaxVoteHalfDeltas)
            out.push_back(tag + "vote delay exceeds commit timer (2 Delta)");
    }
    return out;
}

namespace {

std::string join_group(const std::vector<ProcessId> &group) {
    std::string out;
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (i) out.push_back(',');
        out += group[i].str();
    }
    return out;
}

template <class T> T parse_number(std::string_view text, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw MalformedInput("line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace

std::string to_text(const Scenario &s) {
    std::ostringstream o;
    o << "hotlive-scenario 1\n";
    o << "protocol " << to_string(s.config.kind) << "\n";
    o << "n " << s.config.n << "\n";
    o << "f " << s.config.f << "\n";
    o << "twin " << s.twin_index << "\n";
    o << "rounds " << s.rounds << "\n";
    o << "seed " << s.seed << "\n";
    o << "base_delay_ms " << s.timing.base_delay_ms << "\n";
    o << "delta_ms " << s.timing.delta_ms << "\n";
    o << "view_timeout_ms " << s.timing.view_timeout_ms << "\n";
    o << "sync_view_limit_ms " << s.timing.sync_view_limit_ms << "\n";
    for (const auto &[r, spec] : s.schedule) {
        o << "round " << r << " leader " << spec.leader << " partitions ";
        for (std::size_t i = 0; i < spec.partitions.size(); ++i) {
            if (i) o << '|';
            o << join_group(spec.partitions[i]);
        }
        o << "\n";
    }
    for (const auto &d : s.delays)
        o << "delay " << d.round << ' ' << d.sender.str() << ' ' << (d.recipient ? d.recipient->str() : "*") << ' '
          << to_string(d.kind) << ' ' << d.half_deltas << "\n";
    return o.str();
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::uint32_t n = 0, f = 0;
    std::optional<ProtocolKind> kind;
    bool header = false;
    std::size_t lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        std::string line(raw);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream in(line);
        std::vector<std::string> tok;
        for (std::string t; in >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](const std::string &why) -> MalformedInput {
            return MalformedInput("line " + std::to_string(lineno) + ": " + why);
        };
        const std::string &key = tok[0];
        try {
            if (key == "hotlive-scenario") {
                if (tok.size() != 2 || tok[1] != "1") throw fail("unsupported format version");
                header = true;
            } else if (key == "round") {
                if (tok.size() != 6 || tok[2] != "leader" || tok[4] != "partitions") throw fail("malformed round line");
                RoundSpec spec;
                spec.leader = parse_number<std::uint32_t>(tok[3], lineno);
                for (auto group : split(tok[5], '|')) {
                    std::vector<ProcessId> members;
                    if (!group.empty())
                        for (auto id : split(group, ',')) members.push_back(ProcessId::parse(id));
                    spec.partitions.push_back(std::move(members));
                }
                auto r = parse_number<std::uint32_t>(tok[1], lineno);
                if (!s.schedule.emplace(r, std::move(spec)).second) throw fail("duplicate round " + tok[1]);
            } else if (key == "delay") {
                if (tok.size() != 6) throw fail("malformed delay line");
                DelayOverride d;
                d.round = parse_number<ViewNumber>(tok[1], lineno);
                d.sender = ProcessId::parse(tok[2]);
                if (tok[3] != "*") d.recipient = ProcessId::parse(tok[3]);
                d.kind = parse_message_kind(tok[4]);
                d.half_deltas = parse_number<std::uint32_t>(tok[5], lineno);
                s.delays.push_back(d);
            } else {
                if (tok.size() != 2) throw fail("expected 'key value'");
                const std::string &v = tok[1];
                if (key == "protocol") kind = parse_protocol_kind(v);
                else if (key == "n") n = parse_number<std::uint32_t>(v, lineno);
                else if (key == "f") f = parse_number<std::uint32_t>(v, lineno);
                else if (key == "twin") s.twin_index = parse_number<std::uint32_t>(v, lineno);
                else if (key == "rounds") s.rounds = parse_number<std::uint32_t>(v, lineno);
                else if (key == "seed") s.seed = parse_number<std::uint64_t>(v, lineno);
                else if (key == "base_delay_ms") s.timing.base_delay_ms = parse_number<SimTime>(v, lineno);
                else if (key == "delta_ms") s.timing.delta_ms = parse_number<SimTime>(v, lineno);
                else if (key == "view_timeout_ms") s.timing.view_timeout_ms = parse_number<SimTime>(v, lineno);
                else if (key == "sync_view_limit_ms") s.timing.sync_view_limit_ms = parse_number<SimTime>(v, lineno);
                else throw fail("unknown key '" + key + "'");
            }
        } catch (const std::exception &e) {
            std::string why = e.what();
            if (why.rfind("line ", 0) == 0) throw MalformedInput(why);
            throw fail(why);
        }
    }
    if (!header) throw MalformedInput("missing 'hotlive-scenario 1' header");
    if (!kind) throw MalformedInput("missing protocol");
    s.config = ProtocolConfig{n, f, *kind};
    return s;
}

} // namespace hotlive
