#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbls/solver.hpp"

namespace pbls {

struct RunConfig {
    std::string instance_path;
    SolveParams params;
    bool dump_init = false;  // key=value dump of the initial assignment to stderr
};

// parse -> solve -> competition output on out, key=value statistics on err.
// Returns the process exit code: 0 feasible, 20 trivially unsatisfiable at
// parse, 10 unknown, 2 parse error.
int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// One solver configuration in a benchmark sweep: a display name plus the
// extra command line flags passed to each child run.
struct BenchConfigSpec {
    std::string name;
    std::vector<std::string> flags;
};

struct BenchOptions {
    std::vector<std::string> instance_files;
    std::vector<BenchConfigSpec> configs;  // defaulted to one plain config if empty
    int seeds = 3;
    std::uint64_t base_seed = 1;           // run i uses base_seed + i
    double cutoff_seconds = 10.0;
    int jobs = 1;
    std::string solver_exe;                // child binary, "solve" subcommand
    std::string csv_path;                  // empty: no CSV written
};

struct RunRecord {
    std::string instance;
    std::string config;
    std::uint64_t seed = 0;
    enum class Status { Satisfiable, Unknown, Failed } status = Status::Failed;
    std::int64_t best_cost = 0;            // valid when Satisfiable
    double time_to_first_feasible = -1.0;  // < 0: none
    std::uint64_t flips = 0;
    std::uint64_t local_optima = 0;
};

struct BenchAggregate {
    std::string instance;
    std::string config;
    int feasible_runs = 0;
    int total_runs = 0;
    // Over feasible runs only; min is meaningless when feasible_runs == 0.
    std::int64_t min_cost = 0;
    std::optional<std::int64_t> median_delta;  // lower median - min, when the median run is feasible
    std::optional<std::int64_t> max_delta;     // max - min, when every run is feasible
    bool win = false;
};

struct BenchReport {
    std::vector<RunRecord> runs;
    std::vector<BenchAggregate> rows;              // instance-major, config order preserved
    std::map<std::string, int> wins;               // config name -> instances won
};

// Runs seeds x configs child processes per instance (SIGKILL at cutoff plus a
// 5 second grace), aggregates best costs as min[+median delta, +max delta],
// and credits an instance win to every config tying the best overall cost.
// Writes the text table to table_out and, when requested, CSV to csv_path.
BenchReport run_bench(const BenchOptions& opts, std::ostream& table_out);

void write_bench_csv(const BenchReport& report, std::ostream& out);

}  // namespace pbls
