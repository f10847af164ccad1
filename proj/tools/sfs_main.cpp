/*
   Copyright 2026 The sfs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


// sfs command-line front end. Talks to the simulator only through the C
// interface.
//
//   sfs run|compare|converge|oracle <config> [options]
//
// Exit codes: 0 success, 1 invalid input, 2 divergence cap exceeded,
// 3 no exact reference available.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfs/sfs.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kDivergence = 2, kNoOracle = 3 };

int exit_code(sfs_status s)
{
    switch (s) {
    case SFS_OK: return kOk;
    case SFS_ERR_DIVERGENCE_CAP: return kDivergence;
    case SFS_ERR_ORACLE_INAPPLICABLE: return kNoOracle;
    default: return kInvalid;
    }
}

/// Thrown to unwind with a library status.
struct Failure {
    sfs_status status;
};

void check(sfs_status s)
{
    if (s != SFS_OK) throw Failure{s};
}

template<class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
};

using Scenario = Handle<sfs_scenario, sfs_scenario_free>;
using Table = Handle<sfs_table, sfs_table_free>;

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<long long> parse_counts(const std::string& text)
{
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        long long v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad count '" + item + "'");
        out.push_back(v);
    }
    return out;
}

struct Args {
    std::string command;
    std::string config;
    long long traj = -1;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::string gauge;
    std::string weight;
    std::string out = ".";
    bool normalize = false;
    int threads = 0;
    std::string counts = "100,1000,10000";
};

sfs_run_options make_options(const Args& a)
{
    sfs_run_options o;
    sfs_run_options_init(&o);
    o.trajectories = a.traj;
    o.override_seed = a.have_seed ? 1 : 0;
    o.seed = a.seed;
    if (a.gauge == "adaptive") o.gauge = SFS_GAUGE_ADAPTIVE;
    if (a.gauge == "on") o.gauge = SFS_GAUGE_ON;
    if (a.gauge == "off") o.gauge = SFS_GAUGE_OFF;
    if (a.weight == "on") o.weight = SFS_WEIGHT_ON;
    if (a.weight == "off") o.weight = SFS_WEIGHT_OFF;
    o.threads = a.threads;
    o.normalize_intensity = a.normalize ? 1 : 0;
    return o;
}

json table_counts(const sfs_table* t)
{
    long long total = 0, completed = 0, omitted = 0;
    check(sfs_table_counts(t, &total, &completed, &omitted));
    return {{"total", total},
            {"completed", completed},
            {"omitted", omitted},
            {"omitted_fraction", total > 0 ? static_cast<double>(omitted) / total : 0.0}};
}

std::string write_table(const sfs_table* t, const fs::path& path)
{
    check(sfs_table_write_csv(t, path.string().c_str()));
    return path.string();
}

const char* oracle_name(sfs_oracle_kind k)
{
    switch (k) {
    case SFS_ORACLE_BRUTE_FORCE: return "brute-force";
    case SFS_ORACLE_DICKE_LADDER: return "dicke-ladder";
    default: return "none";
    }
}

int execute(const Args& a, const std::string& command_line)
{
    json manifest;
    manifest["command"] = command_line;
    manifest["version"] = sfs_version();
    manifest["config"] = a.config;
    manifest["started"] = utc_now();

    Scenario sc;
    check(sfs_scenario_load(a.config.c_str(), sc.out()));
    const sfs_run_options opt = make_options(a);
    check(sfs_scenario_apply(sc.p, &opt));
    char hash[17];
    check(sfs_scenario_hash(sc.p, hash, sizeof hash));
    std::uint64_t seed = 0;
    check(sfs_scenario_seed(sc.p, &seed));
    manifest["config_hash"] = hash;
    manifest["seed"] = seed;

    const fs::path dir(a.out);
    fs::create_directories(dir);
    const std::string stem = fs::path(a.config).stem().string();
    std::vector<std::string> outputs;

    if (a.command == "run") {
        Table t;
        check(sfs_run_ensemble(sc.p, &opt, t.out()));
        outputs.push_back(write_table(t.p, dir / (stem + ".csv")));
        manifest["trajectories"] = table_counts(t.p);
    } else if (a.command == "oracle") {
        Table t;
        sfs_oracle_kind kind = SFS_ORACLE_NONE;
        check(sfs_run_oracle(sc.p, &opt, t.out(), &kind));
        outputs.push_back(write_table(t.p, dir / (stem + "_oracle.csv")));
        manifest["oracle"] = oracle_name(kind);
    } else if (a.command == "compare") {
        Table st, ex, diff;
        sfs_oracle_kind kind = SFS_ORACLE_NONE;
        check(sfs_run_compare(sc.p, &opt, st.out(), ex.out(), diff.out(), &kind));
        outputs.push_back(write_table(st.p, dir / (stem + "_stochastic.csv")));
        outputs.push_back(write_table(ex.p, dir / (stem + "_oracle.csv")));
        outputs.push_back(write_table(diff.p, dir / (stem + "_diff.csv")));
        manifest["oracle"] = oracle_name(kind);
        manifest["trajectories"] = table_counts(st.p);
        size_t n = 0;
        check(sfs_table_series_count(diff.p, &n));
        json summary = json::object();
        for (size_t i = 0; i < n; ++i) {
            const char* name = nullptr;
            double m = 0.0;
            check(sfs_table_series_name(diff.p, i, &name));
            check(sfs_table_max_abs(diff.p, i, &m));
            summary[name] = m;
            std::printf("max|diff| %-10s %.6g\n", name, m);
        }
        manifest["max_abs_diff"] = summary;
    } else {
        std::vector<long long> counts;
        try {
            counts = parse_counts(a.counts);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "sfs: --counts: %s\n", e.what());
            return kInvalid;
        }
        Table t;
        check(sfs_run_convergence(sc.p, &opt, counts.data(), counts.size(), t.out()));
        outputs.push_back(write_table(t.p, dir / (stem + "_convergence.csv")));
        manifest["trajectories"] = table_counts(t.p);
        manifest["counts"] = counts;
    }

    manifest["outputs"] = outputs;
    manifest["finished"] = utc_now();
    const fs::path mpath = dir / (stem + "_" + a.command + ".manifest.json");
    std::ofstream(mpath) << manifest.dump(2) << '\n';
    std::printf("wrote %s\n", mpath.string().c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo superfluorescence simulator"};
    app.require_subcommand(1);
    Args a;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", a.config, "run description file")->required();
        sub->add_option("--traj", a.traj, "trajectory count override");
        sub->add_option("--seed", a.seed, "base seed override")
            ->each([&](const std::string&) { a.have_seed = true; });
        sub->add_option("--gauge", a.gauge, "drift gauge policy")
            ->check(CLI::IsMember({"adaptive", "on", "off"}));
        sub->add_option("--weight", a.weight, "use trajectory weights")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--out", a.out, "output directory");
        sub->add_flag("--normalize-intensity", a.normalize, "also emit I_norm");
        sub->add_option("--threads", a.threads, "worker threads (0: automatic)");
    };
    auto* run = app.add_subcommand("run", "run a stochastic ensemble");
    auto* cmp = app.add_subcommand("compare", "run the ensemble and an exact reference");
    auto* conv = app.add_subcommand("converge", "nested ensembles over trajectory counts");
    auto* orc = app.add_subcommand("oracle", "exact reference only");
    for (auto* sub : {run, cmp, conv, orc}) add_common(sub);
    conv->add_option("--counts", a.counts, "comma-separated increasing trajectory counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInvalid;
    }
    a.command = app.get_subcommands().front()->get_name();

    std::string command_line;
    for (int i = 0; i < argc; ++i) {
        if (i) command_line += ' ';
        command_line += argv[i];
    }
    try {
        return execute(a, command_line);
    } catch (const Failure& f) {
        std::fprintf(stderr, "sfs: %s: %s\n", sfs_status_name(f.status), sfs_last_error());
        return exit_code(f.status);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sfs: %s\n", e.what());
        return kInvalid;
    }
}
