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

#include "hotlive/hotlive.h"

#include "campaign.hpp"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

struct hl_scenario {
    hotlive::Scenario scenario;
};

struct hl_report {
    hotlive::CampaignReport report;
};

namespace {

thread_local std::string last_error;

hl_status fail(hl_status code, const std::string &what) {
    last_error = what;
    return code;
}

template <typename F>
hl_status guarded(F &&body) {
    try {
        last_error.clear();
        return body();
    } catch (const hotlive::ConfigError &e) {
        return fail(HL_ERR_CONFIG, e.what());
    } catch (const hotlive::MalformedInput &e) {
        return fail(HL_ERR_MALFORMED, e.what());
    } catch (const hotlive::LookupError &e) {
        return fail(HL_ERR_LOOKUP, e.what());
    } catch (const std::exception &e) {
        return fail(HL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(HL_ERR_INTERNAL, "unknown error");
    }
}

char *dup_string(const std::string &s) {
    char *out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

hotlive::ProtocolKind kind_of(hl_protocol p) {
    switch (p) {
    case HL_PROTOCOL_HOTSTUFF: return hotlive::ProtocolKind::HotStuff;
    case HL_PROTOCOL_TWO_PHASE: return hotlive::ProtocolKind::TwoPhaseHotStuff;
    case HL_PROTOCOL_SYNC: return hotlive::ProtocolKind::SyncHotStuff;
    }
    throw hotlive::ConfigError("unknown protocol");
}

} // namespace

extern "C" {

const char *hl_last_error(void) { return last_error.c_str(); }

const char *hl_version(void) { return "0.1.0"; }

void hl_string_free(char *s) { delete[] s; }

hl_status hl_parse_protocol(const char *name, hl_protocol *out) {
    if (!name || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        switch (hotlive::parse_protocol_kind(name)) {
        case hotlive::ProtocolKind::HotStuff: *out = HL_PROTOCOL_HOTSTUFF; break;
        case hotlive::ProtocolKind::TwoPhaseHotStuff: *out = HL_PROTOCOL_TWO_PHASE; break;
        case hotlive::ProtocolKind::SyncHotStuff: *out = HL_PROTOCOL_SYNC; break;
        }
        return HL_OK;
    });
}

const char *hl_protocol_name(hl_protocol protocol) {
    try {
        return hotlive::to_string(kind_of(protocol));
    } catch (...) {
        return "unknown";
    }
}

hl_status hl_scenario_generate(hl_protocol protocol, uint32_t rounds, int delay_injection, uint64_t seed,
                               hl_scenario **out) {
    if (!out) return fail(HL_ERR_INVALID_ARGUMENT, "null output");
    return guarded([&] {
        auto g = hotlive::GeneratorConfig::defaults(kind_of(protocol));
        g.rounds = rounds;
        if (delay_injection >= 0) g.delay_injection = delay_injection != 0;
        *out = new hl_scenario{hotlive::generate(g, seed)};
        return HL_OK;
    });
}

hl_status hl_scenario_fixture_deadlock(hl_scenario **out) {
    if (!out) return fail(HL_ERR_INVALID_ARGUMENT, "null output");
    return guarded([&] {
        *out = new hl_scenario{hotlive::fixture_fig2()};
        return HL_OK;
    });
}

hl_status hl_scenario_parse(const char *text, hl_scenario **out) {
    if (!text || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new hl_scenario{hotlive::parse_scenario(text)};
        return HL_OK;
    });
}

hl_status hl_scenario_to_text(const hl_scenario *s, char **out) {
    if (!s || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dup_string(hotlive::to_text(s->scenario));
        return HL_OK;
    });
}

hl_status hl_scenario_validate(const hl_scenario *s, char **findings, size_t *count) {
    if (!s || !findings || !count) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto problems = hotlive::validate(s->scenario);
        std::string joined;
        for (const auto &p : problems) joined += p + "\n";
        *findings = dup_string(joined);
        *count = problems.size();
        return HL_OK;
    });
}

void hl_scenario_free(hl_scenario *s) { delete s; }

void hl_replay_options_init(hl_replay_options *o) {
    if (!o) return;
    static const uint32_t default_tt[] = {5};
    o->thresholds = default_tt;
    o->threshold_count = 1;
    o->lasso = 1;
    o->time_bound_ms = 0;
    o->credit_faulty = 0;
}

hl_status hl_replay(const hl_scenario *s, const hl_replay_options *o, char **trace, uint32_t *liveness_verdicts,
                    int *safety_violation) {
    if (!s || !trace) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        hotlive::ReplayOptions opts;
        if (o) {
            if (o->threshold_count && !o->thresholds) return fail(HL_ERR_INVALID_ARGUMENT, "null thresholds");
            opts.thresholds.assign(o->thresholds, o->thresholds + o->threshold_count);
            for (auto tt : opts.thresholds)
                if (tt == 0) return fail(HL_ERR_CONFIG, "temperature thresholds must be positive");
            opts.lasso = o->lasso != 0;
            if (o->time_bound_ms > 0) opts.time_bound = o->time_bound_ms;
            opts.hot.credit_faulty = o->credit_faulty != 0;
        }
        auto problems = hotlive::validate(s->scenario);
        if (!problems.empty()) {
            std::string joined = "invalid scenario:";
            for (const auto &p : problems) joined += "\n  " + p;
            return fail(HL_ERR_CONFIG, joined);
        }
        auto res = hotlive::replay(s->scenario, opts);
        std::uint32_t live = 0;
        int safety = 0;
        for (const auto &v : res.verdicts) {
            if (v.liveness) ++live;
            if (v.safety) safety = 1;
        }
        *trace = dup_string(res.trace);
        if (liveness_verdicts) *liveness_verdicts = live;
        if (safety_violation) *safety_violation = safety;
        return HL_OK;
    });
}

hl_status hl_calibrate(hl_protocol protocol, uint32_t rounds, uint32_t runs, uint64_t seed, hl_bounds *out) {
    if (!out) return fail(HL_ERR_INVALID_ARGUMENT, "null output");
    return guarded([&] {
        auto b = hotlive::calibrate(kind_of(protocol), rounds, runs, seed);
        *out = hl_bounds{b.mean, b.stddev, b.small, b.mid, b.large, b.samples};
        return HL_OK;
    });
}

void hl_campaign_config_init(hl_campaign_config *c) {
    if (!c) return;
    *c = hl_campaign_config{};
    c->protocol = HL_PROTOCOL_HOTSTUFF;
    c->scenarios = 100;
    c->rounds = 10;
    c->seed = 1;
    c->workers = 1;
    c->delay_injection = -1;
}

hl_status hl_campaign_run(const hl_campaign_config *c, hl_report **out) {
    if (!c || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        hotlive::CampaignConfig cfg;
        cfg.generator = hotlive::GeneratorConfig::defaults(kind_of(c->protocol));
        cfg.generator.rounds = c->rounds;
        if (c->delay_injection >= 0) cfg.generator.delay_injection = c->delay_injection != 0;
        cfg.scenario_count = c->scenarios;
        cfg.master_seed = c->seed;
        cfg.workers = c->workers;
        if (c->threshold_count) {
            if (!c->thresholds) return fail(HL_ERR_INVALID_ARGUMENT, "null thresholds");
            cfg.thresholds.assign(c->thresholds, c->thresholds + c->threshold_count);
        }
        if (c->t_small_ms || c->t_mid_ms || c->t_large_ms) {
            hotlive::TimeBounds b;
            b.small = c->t_small_ms;
            b.mid = c->t_mid_ms;
            b.large = c->t_large_ms;
            cfg.bounds = b;
        }
        cfg.include_fixture = c->include_fixture != 0;
        cfg.hot.credit_faulty = c->credit_faulty != 0;
        auto report = std::make_unique<hl_report>();
        report->report = hotlive::run_campaign(cfg);
        *out = report.release();
        return HL_OK;
    });
}

hl_status hl_report_table(const hl_report *r, char **out) {
    if (!r || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dup_string(r->report.table());
        return HL_OK;
    });
}

hl_status hl_report_csv(const hl_report *r, char **out) {
    if (!r || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dup_string(r->report.csv());
        return HL_OK;
    });
}

hl_status hl_report_verdicts(const hl_report *r, char **out) {
    if (!r || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dup_string(r->report.verdict_index());
        return HL_OK;
    });
}

hl_status hl_report_graph(const hl_report *r, char **out) {
    if (!r || !out) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dup_string(r->report.graph ? r->report.graph->export_text() : std::string());
        return HL_OK;
    });
}

hl_status hl_report_counts(const hl_report *r, uint64_t *liveness_flagged, uint64_t *safety, uint64_t *failed) {
    if (!r) return fail(HL_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::uint64_t flagged = 0;
        for (const auto &o : r->report.outcomes) {
            bool hit = o.lasso.has_value();
            for (const auto &[tt, round] : o.temperature) hit = hit || round.has_value();
            if (!o.failed && hit) ++flagged;
        }
        if (liveness_flagged) *liveness_flagged = flagged;
        if (safety) *safety = r->report.safety_violations;
        if (failed) *failed = r->report.failed;
        return HL_OK;
    });
}

void hl_report_free(hl_report *r) { delete r; }

} // extern "C"
