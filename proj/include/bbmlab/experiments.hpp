// experiments.hpp
//
// Reproducible experiment driver: a registry mapping limit statements to
// executable checks, structured configuration, artifact persistence and a
// consolidated reporter.
//
// Every experiment writes three artifacts under <output_dir>/<experiment>/:
//   samples.jsonl - raw per-replica records (optionally truncated),
//   verdict.json  - per-check target/tolerance/observed/pass,
//   plot.csv      - plot-ready aggregates.
// Given (seed, config) the artifacts are byte-identical regardless of the
// thread count: replicas draw from per-index substreams and are merged in
// index order.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bbmlab::experiments {

using json = nlohmann::ordered_json;

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::uint64_t replicas = 0;      // 0: experiment default
    double t = 0.0;                  // horizon-like knob, 0: default
    double gamma = 0.0;              // 0: default
    double x = 0.0;                  // 0: default
    std::vector<double> law_probs;   // empty: binary offspring law
    std::string output_dir = "out";
    int threads = 1;
    std::uint64_t sample_limit = 0;  // 0: keep every sample line
    std::map<std::string, double> thresholds;   // per-check overrides
    std::set<std::string> parts;     // empty: run all parts of the experiment

    [[nodiscard]] double threshold(const std::string& name, double fallback) const;
    [[nodiscard]] bool part_enabled(const std::string& name) const;

    static ExperimentConfig from_json(const json& j);
    [[nodiscard]] json to_json() const;
};

struct CheckResult {
    std::string name;
    std::string statement;
    double observed = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::string comparison;
    bool pass = false;
};

struct Verdict {
    std::string experiment;
    std::uint64_t seed = 1;
    std::vector<CheckResult> checks;
    bool pass = true;
    json config_echo;
    json extra;

    void add(CheckResult check);
    [[nodiscard]] json to_json() const;
};

class OutputWriter {
public:
    OutputWriter(const std::string& output_dir, const std::string& experiment,
                 std::uint64_t sample_limit);
    ~OutputWriter();

    void sample(const json& record);
    void plot_header(const std::string& header);
    void plot_row(const std::string& row);
    void write_verdict(const Verdict& verdict);

    [[nodiscard]] const std::string& dir() const noexcept { return dir_; }

private:
    std::string dir_;
    std::uint64_t sample_limit_;
    std::uint64_t sample_count_ = 0;
    void* samples_ = nullptr;   // FILE*
    void* plot_ = nullptr;      // FILE*
};

struct ExperimentInfo {
    std::string name;
    std::string statement;
    std::string description;
    std::function<Verdict(const ExperimentConfig&, OutputWriter&)> run;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo* find_experiment(const std::string& name);

// One entry per in-scope limit statement; the registry self-test asserts a
// one-to-one correspondence with experiment names.
const std::vector<std::pair<std::string, std::string>>& statement_manifest();

// Runs the named experiment and persists its artifacts.
Verdict run_experiment(const ExperimentConfig& cfg);

// CLI wrapper with the exit-code contract: 0 pass, 1 threshold failure,
// 2 configuration error, 3 resource or insufficient-sample error.
int run_experiment_cli(const ExperimentConfig& cfg);

struct ReportResult {
    std::string markdown;
    std::string csv;
    bool all_pass = true;
    std::size_t verdicts = 0;
};

// Scans <dir>/*/verdict.json and builds one table per statement; corrupt or
// missing files become per-row notes rather than failures.
ReportResult generate_report(const std::string& dir);

// Writes report.md and report.csv into dir and prints the markdown; exit 0
// when every verdict passes (an empty directory passes).
int report_cli(const std::string& dir);

} // namespace bbmlab::experiments
