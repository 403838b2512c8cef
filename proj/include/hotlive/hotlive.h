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

#ifndef HOTLIVE_HOTLIVE_H
#define HOTLIVE_HOTLIVE_H

#include <stddef.h>
#include <stdint.h>

#if defined(HOTLIVE_BUILDING_LIBRARY)
#define HOTLIVE_API __attribute__((visibility("default")))
#else
#define HOTLIVE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hl_scenario hl_scenario;
typedef struct hl_report hl_report;

typedef enum hl_status {
    HL_OK = 0,
    HL_ERR_INVALID_ARGUMENT = 1,
    HL_ERR_CONFIG = 2,
    HL_ERR_MALFORMED = 3,
    HL_ERR_LOOKUP = 4,
    HL_ERR_INTERNAL = 5
} hl_status;

typedef enum hl_protocol {
    HL_PROTOCOL_HOTSTUFF = 0,
    HL_PROTOCOL_TWO_PHASE = 1,
    HL_PROTOCOL_SYNC = 2
} hl_protocol;

/* Message of the last failed call on this thread, "" if none. */
HOTLIVE_API const char *hl_last_error(void);
HOTLIVE_API const char *hl_version(void);
/* Releases strings returned through char ** out-parameters. */
HOTLIVE_API void hl_string_free(char *s);
HOTLIVE_API hl_status hl_parse_protocol(const char *name, hl_protocol *out);
HOTLIVE_API const char *hl_protocol_name(hl_protocol protocol);

/* Scenarios. delay_injection: -1 protocol default, 0 off, 1 on. */
HOTLIVE_API hl_status hl_scenario_generate(hl_protocol protocol, uint32_t rounds, int delay_injection,
                                           uint64_t seed, hl_scenario **out);
/* The hand-built 2-Phase deadlock. */
HOTLIVE_API hl_status hl_scenario_fixture_deadlock(hl_scenario **out);
HOTLIVE_API hl_status hl_scenario_parse(const char *text, hl_scenario **out);
HOTLIVE_API hl_status hl_scenario_to_text(const hl_scenario *s, char **out);
/* Newline-separated findings; *count is 0 for a valid scenario. */
HOTLIVE_API hl_status hl_scenario_validate(const hl_scenario *s, char **findings, size_t *count);
HOTLIVE_API void hl_scenario_free(hl_scenario *s);

typedef struct hl_replay_options {
    const uint32_t *thresholds;
    size_t threshold_count;
    int lasso;
    int64_t time_bound_ms; /* <= 0 disables the time-bound check */
    int credit_faulty;
} hl_replay_options;

HOTLIVE_API void hl_replay_options_init(hl_replay_options *o);
/* Re-executes the scenario and returns the trace with verdict lines. */
HOTLIVE_API hl_status hl_replay(const hl_scenario *s, const hl_replay_options *o, char **trace,
                                uint32_t *liveness_verdicts, int *safety_violation);

typedef struct hl_bounds {
    double mean;
    double stddev;
    int64_t small_ms;
    int64_t mid_ms;
    int64_t large_ms;
    uint64_t samples;
} hl_bounds;

HOTLIVE_API hl_status hl_calibrate(hl_protocol protocol, uint32_t rounds, uint32_t runs, uint64_t seed,
                                   hl_bounds *out);

typedef struct hl_campaign_config {
    hl_protocol protocol;
    uint32_t scenarios;
    uint32_t rounds;
    uint64_t seed;
    uint32_t workers;
    const uint32_t *thresholds; /* NULL: TT = 5 */
    size_t threshold_count;
    int64_t t_small_ms; /* all three zero: calibrate */
    int64_t t_mid_ms;
    int64_t t_large_ms;
    int include_fixture;
    int credit_faulty;
    int delay_injection; /* -1 protocol default */
} hl_campaign_config;

HOTLIVE_API void hl_campaign_config_init(hl_campaign_config *c);
HOTLIVE_API hl_status hl_campaign_run(const hl_campaign_config *c, hl_report **out);
HOTLIVE_API hl_status hl_report_table(const hl_report *r, char **out);
HOTLIVE_API hl_status hl_report_csv(const hl_report *r, char **out);
HOTLIVE_API hl_status hl_report_verdicts(const hl_report *r, char **out);
HOTLIVE_API hl_status hl_report_graph(const hl_report *r, char **out);
/* Scenarios flagged by any liveness checker, safety violations, failed runs. */
HOTLIVE_API hl_status hl_report_counts(const hl_report *r, uint64_t *liveness_flagged, uint64_t *safety,
                                       uint64_t *failed);
HOTLIVE_API void hl_report_free(hl_report *r);

#ifdef __cplusplus
}
#endif

#endif
