#include "pbls/bench.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pbls/opb.hpp"

namespace pbls {

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ParseResult parsed;
    try {
        std::ifstream in(cfg.instance_path);
        if (!in) {
            err << "c cannot open " << cfg.instance_path << "\n";
            return 2;
        }
        parsed = parse_opb(in);
    } catch (const TriviallyUnsatError& e) {
        err << "c " << e.what() << "\n";
        out << "s UNSATISFIABLE\n" << std::flush;
        return 20;
    } catch (const Error& e) {
        err << "c " << e.what() << "\n";
        return 2;
    }
    for (const std::string& w : parsed.warnings) err << "c warning: " << w << "\n";

    const PBOInstance& inst = parsed.instance;
    bool has_objective = !inst.objective.empty();
    std::optional<std::int64_t> announced;
    SolveResult res = solve(inst, cfg.params, [&](std::int64_t cost, double) {
        if (!has_objective) return;
        out << "o " << cost << "\n" << std::flush;
        announced = cost;
    });

    bool feasible = res.status == SolveStatus::Feasible;
    std::optional<EmittedSolution> best;
    if (feasible) best = EmittedSolution{res.best, res.best_cost};
    emit_solution(out, feasible, best, has_objective, announced);

    err << "status=" << (feasible ? "SATISFIABLE" : "UNKNOWN") << "\n";
    if (feasible) err << "best_cost=" << res.best_cost << "\n";
    err << "flips=" << res.stats.flips << "\n";
    err << "local_optima=" << res.stats.local_optima << "\n";
    err << "decimation_hard_forcings=" << res.stats.decimation_hard_forcings << "\n";
    err << "decimation_soft_choices=" << res.stats.decimation_soft_choices << "\n";
    err << "decimation_random_choices=" << res.stats.decimation_random_choices << "\n";
    err << "decimation_contradictions=" << res.stats.decimation_contradictions << "\n";
    if (res.stats.time_to_first_feasible >= 0)
        err << "time_to_first_feasible_s=" << std::fixed << std::setprecision(6)
            << res.stats.time_to_first_feasible << "\n";
    err << "elapsed_s=" << std::fixed << std::setprecision(6) << res.stats.elapsed_seconds << "\n";
    if (cfg.dump_init) {
        err << "init=";
        for (int v = 1; v <= inst.num_vars; ++v) err << int(res.initial.value(v));
        err << "\n";
    }
    err << std::flush;
    return feasible ? 0 : 10;
}

namespace {

struct PendingRun {
    std::size_t record_index = 0;
    std::vector<std::string> argv;
};

struct ActiveRun {
    pid_t pid = -1;
    std::size_t record_index = 0;
    std::string out_path;
    std::string err_path;
    std::chrono::steady_clock::time_point deadline;
    bool killed = false;
};

std::string temp_path(const char* tag, std::size_t idx) {
    return "/tmp/pbls_bench_" + std::to_string(getpid()) + "_" + std::to_string(idx) + "." + tag;
}

pid_t spawn(const std::vector<std::string>& argv, const std::string& out_path,
            const std::string& err_path) {
    pid_t pid = fork();
    if (pid != 0) return pid;
    int ofd = open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    int efd = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (ofd < 0 || efd < 0) _exit(127);
    dup2(ofd, 1);
    dup2(efd, 2);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execv(cargv[0], cargv.data());
    _exit(127);
}

void parse_child_output(RunRecord& rec, const std::string& out_path, const std::string& err_path,
                        int exit_code) {
    std::optional<std::int64_t> last_o;
    bool saw_sat = false;
    bool saw_unknown = false;
    {
        std::ifstream in(out_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("o ", 0) == 0) last_o = std::stoll(line.substr(2));
            else if (line == "s SATISFIABLE") saw_sat = true;
            else if (line == "s UNKNOWN") saw_unknown = true;
        }
    }
    std::optional<std::int64_t> reported_best;
    {
        std::ifstream in(err_path);
        std::string line;
        while (std::getline(in, line)) {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            try {
                if (key == "best_cost") reported_best = std::stoll(value);
                else if (key == "flips") rec.flips = std::stoull(value);
                else if (key == "local_optima") rec.local_optima = std::stoull(value);
                else if (key == "time_to_first_feasible_s") rec.time_to_first_feasible = std::stod(value);
            } catch (...) {
            }
        }
    }
    if (reported_best || last_o || saw_sat) {
        rec.status = RunRecord::Status::Satisfiable;
        rec.best_cost = reported_best ? *reported_best : last_o.value_or(0);
    } else if (saw_unknown || exit_code == 10 || exit_code == 20) {
        rec.status = RunRecord::Status::Unknown;
    } else {
        rec.status = RunRecord::Status::Failed;
    }
}

std::string format_cell(const BenchAggregate& agg) {
    if (agg.feasible_runs == 0) return "N/A";
    std::string s = std::to_string(agg.min_cost);
    s += "[+";
    s += agg.median_delta ? std::to_string(*agg.median_delta) : std::string("N/A");
    s += ",+";
    s += agg.max_delta ? std::to_string(*agg.max_delta) : std::string("N/A");
    s += "]";
    return s;
}

}  // namespace

BenchReport run_bench(const BenchOptions& opts, std::ostream& table_out) {
    BenchReport report;
    std::vector<BenchConfigSpec> configs = opts.configs;
    if (configs.empty()) configs.push_back({"default", {}});

    std::deque<PendingRun> pending;
    for (const std::string& inst : opts.instance_files) {
        for (const BenchConfigSpec& cfg : configs) {
            for (int s = 0; s < opts.seeds; ++s) {
                std::uint64_t seed = opts.base_seed + static_cast<std::uint64_t>(s);
                RunRecord rec;
                rec.instance = inst;
                rec.config = cfg.name;
                rec.seed = seed;
                PendingRun run;
                run.record_index = report.runs.size();
                run.argv = {opts.solver_exe, "solve", inst,
                            "--seed", std::to_string(seed),
                            "--cutoff", std::to_string(opts.cutoff_seconds)};
                run.argv.insert(run.argv.end(), cfg.flags.begin(), cfg.flags.end());
                report.runs.push_back(std::move(rec));
                pending.push_back(std::move(run));
            }
        }
    }

    int jobs = std::max(1, opts.jobs);
    std::vector<ActiveRun> active;
    auto grace = std::chrono::duration<double>(opts.cutoff_seconds + 5.0);
    std::size_t spawn_counter = 0;
    while (!pending.empty() || !active.empty()) {
        while (!pending.empty() && static_cast<int>(active.size()) < jobs) {
            PendingRun run = std::move(pending.front());
            pending.pop_front();
            ActiveRun a;
            a.record_index = run.record_index;
            a.out_path = temp_path("out", spawn_counter);
            a.err_path = temp_path("err", spawn_counter);
            ++spawn_counter;
            a.deadline = std::chrono::steady_clock::now() +
                         std::chrono::duration_cast<std::chrono::steady_clock::duration>(grace);
            a.pid = spawn(run.argv, a.out_path, a.err_path);
            active.push_back(std::move(a));
        }
        for (std::size_t i = 0; i < active.size();) {
            ActiveRun& a = active[i];
            int status = 0;
            pid_t r = waitpid(a.pid, &status, WNOHANG);
            if (r == 0) {
                if (!a.killed && std::chrono::steady_clock::now() > a.deadline) {
                    kill(a.pid, SIGKILL);
                    a.killed = true;
                }
                ++i;
                continue;
            }
            int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            parse_child_output(report.runs[a.record_index], a.out_path, a.err_path, exit_code);
            unlink(a.out_path.c_str());
            unlink(a.err_path.c_str());
            active[i] = active.back();
            active.pop_back();
        }
        if (!active.empty()) usleep(2000);
    }

    // Aggregate per (instance, config), preserving input order.
    for (const std::string& inst : opts.instance_files) {
        std::int64_t best_overall = 0;
        bool any_feasible = false;
        std::vector<std::size_t> row_indices;
        for (const BenchConfigSpec& cfg : configs) {
            BenchAggregate agg;
            agg.instance = inst;
            agg.config = cfg.name;
            std::vector<std::int64_t> costs;
            for (const RunRecord& rec : report.runs) {
                if (rec.instance != inst || rec.config != cfg.name) continue;
                ++agg.total_runs;
                if (rec.status == RunRecord::Status::Satisfiable) costs.push_back(rec.best_cost);
            }
            std::sort(costs.begin(), costs.end());
            agg.feasible_runs = static_cast<int>(costs.size());
            if (!costs.empty()) {
                agg.min_cost = costs.front();
                // Infeasible runs rank as +infinity; the lower median over all
                // runs is finite only when more than half were feasible.
                std::size_t median_rank = static_cast<std::size_t>(agg.total_runs - 1) / 2;
                if (median_rank < costs.size()) agg.median_delta = costs[median_rank] - agg.min_cost;
                if (agg.feasible_runs == agg.total_runs) agg.max_delta = costs.back() - agg.min_cost;
                if (!any_feasible || agg.min_cost < best_overall) {
                    any_feasible = true;
                    best_overall = agg.min_cost;
                }
            }
            row_indices.push_back(report.rows.size());
            report.rows.push_back(std::move(agg));
        }
        if (any_feasible) {
            for (std::size_t idx : row_indices) {
                BenchAggregate& agg = report.rows[idx];
                if (agg.feasible_runs > 0 && agg.min_cost == best_overall) {
                    agg.win = true;
                    ++report.wins[agg.config];
                }
            }
        }
    }
    for (const BenchConfigSpec& cfg : configs) report.wins.try_emplace(cfg.name, 0);

    std::size_t inst_width = 8;
    std::size_t cfg_width = 6;
    for (const BenchAggregate& agg : report.rows) {
        inst_width = std::max(inst_width, agg.instance.size());
        cfg_width = std::max(cfg_width, agg.config.size());
    }
    table_out << std::left << std::setw(static_cast<int>(inst_width) + 2) << "instance"
              << std::setw(static_cast<int>(cfg_width) + 2) << "config"
              << "best[+median,+max]  feasible\n";
    for (const BenchAggregate& agg : report.rows) {
        table_out << std::left << std::setw(static_cast<int>(inst_width) + 2) << agg.instance
                  << std::setw(static_cast<int>(cfg_width) + 2) << agg.config
                  << std::setw(20) << format_cell(agg)
                  << agg.feasible_runs << "/" << agg.total_runs
                  << (agg.win ? "  win" : "") << "\n";
    }
    table_out << "wins:";
    for (const auto& [name, count] : report.wins) table_out << " " << name << "=" << count;
    table_out << " (ties credited to every tied config)\n";

    if (!opts.csv_path.empty()) {
        std::ofstream csv(opts.csv_path);
        write_bench_csv(report, csv);
    }
    return report;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
    out << "instance,config,seed,status,best_cost,time_to_first_feasible_s,flips,local_optima\n";
    for (const RunRecord& rec : report.runs) {
        const char* status = rec.status == RunRecord::Status::Satisfiable ? "SATISFIABLE"
                             : rec.status == RunRecord::Status::Unknown   ? "UNKNOWN"
                                                                          : "FAILED";
        out << rec.instance << "," << rec.config << "," << rec.seed << "," << status << ",";
        if (rec.status == RunRecord::Status::Satisfiable) out << rec.best_cost;
        else out << "N/A";
        out << ",";
        if (rec.time_to_first_feasible >= 0)
            out << std::fixed << std::setprecision(6) << rec.time_to_first_feasible;
        else out << "N/A";
        out << "," << rec.flips << "," << rec.local_optima << "\n";
    }
}

}  // namespace pbls
