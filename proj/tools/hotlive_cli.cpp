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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kClean = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(hl_status st) {
    if (st != HL_OK) throw UsageError(hl_last_error());
}

std::string take(char *s) {
    std::string out = s ? s : "";
    hl_string_free(s);
    return out;
}

using ScenarioPtr = std::unique_ptr<hl_scenario, decltype(&hl_scenario_free)>;
using ReportPtr = std::unique_ptr<hl_report, decltype(&hl_report_free)>;

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    out << text;
}

hl_protocol protocol_of(const std::string &name) {
    hl_protocol p;
    check(hl_parse_protocol(name.c_str(), &p));
    return p;
}

ScenarioPtr load_scenario(const std::string &path) {
    hl_scenario *s = nullptr;
    check(hl_scenario_parse(read_file(path).c_str(), &s));
    return ScenarioPtr(s, hl_scenario_free);
}

int delay_flag(const std::string &v) {
    if (v == "default") return -1;
    if (v == "on") return 1;
    if (v == "off") return 0;
    throw UsageError("--delays takes on, off or default");
}

struct CampaignArgs {
    std::string protocol = "hotstuff";
    uint32_t scenarios = 100;
    uint32_t rounds = 10;
    uint64_t seed = 1;
    uint32_t workers = 1;
    std::vector<uint32_t> tt{5};
    int64_t t_small = 0, t_mid = 0, t_large = 0;
    bool fixture = false;
    bool credit_faulty = false;
    std::string delays = "default";
    std::string out_dir;

    void bind(CLI::App *cmd) {
        cmd->add_option("-p,--protocol", protocol, "hotstuff, two-phase or sync");
        cmd->add_option("-n,--scenarios", scenarios, "number of generated scenarios");
        cmd->add_option("-r,--rounds", rounds, "rounds per scenario");
        cmd->add_option("-s,--seed", seed, "master seed");
        cmd->add_option("-j,--workers", workers, "parallel workers");
        cmd->add_option("--tt", tt, "temperature thresholds")->delimiter(',');
        cmd->add_option("--t-small", t_small, "time bound in ms (skips calibration)");
        cmd->add_option("--t-mid", t_mid, "time bound in ms");
        cmd->add_option("--t-large", t_large, "time bound in ms");
        cmd->add_flag("--fixture", fixture, "replace the first scenario with the 2-Phase deadlock");
        cmd->add_flag("--credit-faulty", credit_faulty, "count the twin as a supporter of every lock");
        cmd->add_option("--delays", delays, "message-delay injection: on, off or default");
        cmd->add_option("-o,--out-dir", out_dir, "directory for report files");
    }

    ReportPtr run() const {
        hl_campaign_config c;
        hl_campaign_config_init(&c);
        c.protocol = protocol_of(protocol);
        c.scenarios = scenarios;
        c.rounds = rounds;
        c.seed = seed;
        c.workers = workers;
        c.thresholds = tt.data();
        c.threshold_count = tt.size();
        c.t_small_ms = t_small;
        c.t_mid_ms = t_mid;
        c.t_large_ms = t_large;
        c.include_fixture = fixture;
        c.credit_faulty = credit_faulty;
        c.delay_injection = delay_flag(delays);
        hl_report *r = nullptr;
        check(hl_campaign_run(&c, &r));
        return ReportPtr(r, hl_report_free);
    }
};

int cmd_generate(const std::string &protocol, uint32_t rounds, uint64_t seed, uint32_t count,
                 const std::string &delays, const std::string &out_dir) {
    hl_protocol p = protocol_of(protocol);
    if (count > 1 && out_dir.empty()) throw UsageError("--count above 1 needs --out-dir");
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    for (uint32_t i = 0; i < count; ++i) {
        hl_scenario *raw = nullptr;
        check(hl_scenario_generate(p, rounds, delay_flag(delays), seed + i, &raw));
        ScenarioPtr s(raw, hl_scenario_free);
        char *text = nullptr;
        check(hl_scenario_to_text(s.get(), &text));
        if (out_dir.empty()) {
            std::cout << take(text);
        } else {
            auto path = std::filesystem::path(out_dir) / ("scenario-" + std::to_string(seed + i) + ".txt");
            write_file(path, take(text));
            std::cout << path.string() << '\n';
        }
    }
    return kClean;
}

int cmd_validate(const std::vector<std::string> &files) {
    int rc = kClean;
    for (const auto &f : files) {
        hl_scenario *raw = nullptr;
        if (hl_scenario_parse(read_file(f).c_str(), &raw) != HL_OK) {
            std::cout << f << ": " << hl_last_error() << '\n';
            rc = kUsage;
            continue;
        }
        ScenarioPtr s(raw, hl_scenario_free);
        char *findings = nullptr;
        size_t count = 0;
        check(hl_scenario_validate(s.get(), &findings, &count));
        std::string text = take(findings);
        if (count == 0) {
            std::cout << f << ": ok\n";
        } else {
            rc = kUsage;
            std::istringstream lines(text);
            for (std::string line; std::getline(lines, line);) std::cout << f << ": " << line << '\n';
        }
    }
    return rc;
}

int cmd_run(const CampaignArgs &a) {
    auto r = a.run();
    char *table = nullptr, *csv = nullptr, *verdicts = nullptr;
    check(hl_report_table(r.get(), &table));
    check(hl_report_csv(r.get(), &csv));
    check(hl_report_verdicts(r.get(), &verdicts));
    std::cout << take(table);
    std::string csv_text = take(csv), index = take(verdicts);
    if (!a.out_dir.empty()) {
        std::filesystem::create_directories(a.out_dir);
        write_file(std::filesystem::path(a.out_dir) / "report.csv", csv_text);
        write_file(std::filesystem::path(a.out_dir) / "verdicts.txt", index);
        char *graph = nullptr;
        check(hl_report_graph(r.get(), &graph));
        write_file(std::filesystem::path(a.out_dir) / "graph.txt", take(graph));
    }
    uint64_t flagged = 0, safety = 0, failed = 0;
    check(hl_report_counts(r.get(), &flagged, &safety, &failed));
    return flagged || safety ? kViolations : kClean;
}

int cmd_replay(const std::string &file, bool fixture, const std::vector<uint32_t> &tt, bool no_lasso,
               int64_t time_bound, bool credit_faulty, const std::string &out) {
    if (file.empty() == !fixture) throw UsageError("replay takes a scenario file or --fixture");
    ScenarioPtr s(nullptr, hl_scenario_free);
    if (fixture) {
        hl_scenario *raw = nullptr;
        check(hl_scenario_fixture_deadlock(&raw));
        s.reset(raw);
    } else {
        s = load_scenario(file);
    }
    hl_replay_options o;
    hl_replay_options_init(&o);
    o.thresholds = tt.data();
    o.threshold_count = tt.size();
    o.lasso = !no_lasso;
    o.time_bound_ms = time_bound;
    o.credit_faulty = credit_faulty;
    char *trace = nullptr;
    uint32_t live = 0;
    int safety = 0;
    check(hl_replay(s.get(), &o, &trace, &live, &safety));
    std::string text = take(trace);
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    return live || safety ? kViolations : kClean;
}

int cmd_calibrate(const std::string &protocol, uint32_t rounds, uint32_t runs, uint64_t seed) {
    hl_bounds b;
    check(hl_calibrate(protocol_of(protocol), rounds, runs, seed, &b));
    std::printf("samples %llu\nmean_ms %.2f\nstd_ms %.2f\nT_small %lld\nT_mid %lld\nT_large %lld\n",
                static_cast<unsigned long long>(b.samples), b.mean, b.stddev, static_cast<long long>(b.small_ms),
                static_cast<long long>(b.mid_ms), static_cast<long long>(b.large_ms));
    return kClean;
}

int cmd_export_graph(const CampaignArgs &a, const std::string &out) {
    auto r = a.run();
    char *graph = nullptr;
    check(hl_report_graph(r.get(), &graph));
    std::string text = take(graph);
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    return kClean;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Liveness checking for HotStuff-family protocols"};
    app.require_subcommand(1);
    app.set_version_flag("--version", hl_version());

    std::string protocol = "hotstuff", delays = "default", out_dir, out, file;
    uint32_t rounds = 10, count = 1, runs = 50;
    uint64_t seed = 1;
    std::vector<std::string> files;
    std::vector<uint32_t> tt{5};
    bool fixture = false, no_lasso = false, credit_faulty = false;
    int64_t time_bound = 0;

    auto *gen = app.add_subcommand("generate", "write generated scenarios");
    gen->add_option("-p,--protocol", protocol, "hotstuff, two-phase or sync");
    gen->add_option("-r,--rounds", rounds, "rounds per scenario");
    gen->add_option("-s,--seed", seed, "seed of the first scenario");
    gen->add_option("-c,--count", count, "number of scenarios");
    gen->add_option("--delays", delays, "message-delay injection: on, off or default");
    gen->add_option("-o,--out-dir", out_dir, "directory for scenario files");

    auto *val = app.add_subcommand("validate", "check scenario files");
    val->add_option("files", files, "scenario files")->required();

    CampaignArgs run_args;
    auto *run = app.add_subcommand("run", "run a campaign and report");
    run_args.bind(run);

    auto *rep = app.add_subcommand("replay", "re-execute one scenario with the checkers");
    rep->add_option("file", file, "scenario file");
    rep->add_flag("--fixture", fixture, "replay the built-in 2-Phase deadlock");
    rep->add_option("--tt", tt, "temperature thresholds")->delimiter(',');
    rep->add_flag("--no-lasso", no_lasso, "skip lasso detection");
    rep->add_option("--time-bound", time_bound, "time bound in ms");
    rep->add_flag("--credit-faulty", credit_faulty, "count the twin as a supporter of every lock");
    rep->add_option("-o,--out", out, "write the trace here");

    auto *cal = app.add_subcommand("calibrate", "derive time bounds from failure-free runs");
    cal->add_option("-p,--protocol", protocol, "hotstuff, two-phase or sync");
    cal->add_option("-r,--rounds", rounds, "rounds per run");
    cal->add_option("--runs", runs, "number of runs");
    cal->add_option("-s,--seed", seed, "seed");

    CampaignArgs graph_args;
    auto *exp = app.add_subcommand("export-graph", "run a campaign and print its state-transition graph");
    graph_args.bind(exp);
    exp->add_option("--out", out, "write the graph here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen) return cmd_generate(protocol, rounds, seed, count, delays, out_dir);
        if (*val) return cmd_validate(files);
        if (*run) return cmd_run(run_args);
        if (*rep) return cmd_replay(file, fixture, tt, no_lasso, time_bound, credit_faulty, out);
        if (*cal) return cmd_calibrate(protocol, rounds, runs, seed);
        if (*exp) return cmd_export_graph(graph_args, out);
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
