#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbls/bench.hpp"
#include "pbls/generator.hpp"
#include "pbls/opb.hpp"
#include "pbls/verifier.hpp"

namespace {

void add_solver_flags(CLI::App& cmd, pbls::SolveParams& params, bool& no_care) {
    cmd.add_option("--cutoff", params.cutoff_seconds, "wall clock budget in seconds")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--seed", params.seed, "random seed");
    cmd.add_option("--p", params.p, "probability of the random-falsified branch at local optima")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_flag("--no-decimation", [&params](std::int64_t) { params.use_decimation = false; },
                 "start from the all-zeros assignment");
    cmd.add_flag("--no-care", no_care, "disable care-guided selection (same as --p 1)");
    cmd.add_option("--bms", params.bms, "best-of-k sampling when picking the scoring variable")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--gamma", params.gamma, "objective constraint weight cap")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--hinc", params.hard_inc, "hard constraint weight increment")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--oinc", params.obj_inc, "objective constraint weight increment")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--max-flips", params.max_flips, "flip budget (mainly for reproducible tests)");
}

int cmd_verify(const std::string& instance_path, const std::string& solution_path) {
    pbls::ParseResult parsed;
    try {
        std::ifstream in(instance_path);
        if (!in) {
            std::cerr << "cannot open " << instance_path << "\n";
            return 2;
        }
        parsed = pbls::parse_opb(in);
    } catch (const pbls::TriviallyUnsatError& e) {
        std::cerr << e.what() << "\n";
        return 20;
    } catch (const pbls::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    pbls::Assignment a;
    try {
        std::ifstream in(solution_path);
        if (!in) {
            std::cerr << "cannot open " << solution_path << "\n";
            return 2;
        }
        a = pbls::parse_solution_vlines(in, parsed.instance.num_vars);
    } catch (const pbls::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    pbls::VerificationReport rep = pbls::verify(parsed.instance, a);
    if (rep.feasible) {
        std::cout << "feasible objective=" << rep.objective << "\n";
        return 0;
    }
    std::cout << "infeasible violated=";
    for (std::size_t i = 0; i < rep.violated.size(); ++i)
        std::cout << (i ? "," : "") << rep.violated[i];
    std::cout << "\n";
    return 1;
}

std::vector<std::string> expand_instances(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const std::string& p : paths) {
        if (std::filesystem::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& entry : std::filesystem::directory_iterator(p))
                if (entry.path().extension() == ".opb") found.push_back(entry.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    return files;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime local search solver for pseudo-Boolean optimization"};
    app.require_subcommand(1);

    // solve
    pbls::RunConfig run_cfg;
    bool solve_no_care = false;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one OPB instance");
    solve_cmd->add_option("instance", run_cfg.instance_path, "OPB file")->required();
    add_solver_flags(*solve_cmd, run_cfg.params, solve_no_care);
    solve_cmd->add_flag("--dump-init", run_cfg.dump_init,
                        "print the initial assignment to standard error");

    // bench
    pbls::BenchOptions bench_opts;
    std::vector<std::string> bench_paths;
    std::vector<std::string> bench_config_specs;
    CLI::App* bench_cmd = app.add_subcommand("bench", "multi-seed benchmark over instances");
    bench_cmd->add_option("instances", bench_paths, "OPB files or directories")->required();
    bench_cmd->add_option("--seeds", bench_opts.seeds, "runs per instance and config")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--base-seed", bench_opts.base_seed, "seed of run 0; run i adds i");
    bench_cmd->add_option("--cutoff", bench_opts.cutoff_seconds, "per run budget in seconds")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--jobs", bench_opts.jobs, "concurrent solver processes")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--csv", bench_opts.csv_path, "write per-run records as CSV");
    bench_cmd->add_option("--config", bench_config_specs,
                          "named flag set \"name:--p 0.2 --no-care\"; repeatable");

    // verify
    std::string verify_instance, verify_solution;
    CLI::App* verify_cmd = app.add_subcommand("verify", "check a solution file against an instance");
    verify_cmd->add_option("instance", verify_instance, "OPB file")->required();
    verify_cmd->add_option("solution", verify_solution, "file with v lines")->required();

    // gen
    pbls::GenConfig gen_cfg;
    std::string gen_out;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random instance");
    gen_cmd->add_option("output", gen_out, "OPB file to write")->required();
    gen_cmd->add_option("--vars", gen_cfg.num_vars)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--cons", gen_cfg.num_constraints)->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--min-terms", gen_cfg.min_terms)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--max-terms", gen_cfg.max_terms)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--min-coeff", gen_cfg.min_coeff)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--max-coeff", gen_cfg.max_coeff)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--obj-density", gen_cfg.objective_density)->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen_cfg.seed);

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) {
        if (solve_no_care) run_cfg.params.p = 1.0;
        return pbls::run_solve(run_cfg, std::cout, std::cerr);
    }
    if (bench_cmd->parsed()) {
        bench_opts.instance_files = expand_instances(bench_paths);
        if (bench_opts.instance_files.empty()) {
            std::cerr << "no instances found\n";
            return 2;
        }
        for (const std::string& spec : bench_config_specs) {
            std::size_t colon = spec.find(':');
            pbls::BenchConfigSpec cfg;
            cfg.name = colon == std::string::npos ? spec : spec.substr(0, colon);
            if (colon != std::string::npos) {
                std::istringstream tokens(spec.substr(colon + 1));
                std::string tok;
                while (tokens >> tok) cfg.flags.push_back(tok);
            }
            bench_opts.configs.push_back(std::move(cfg));
        }
        bench_opts.solver_exe = std::filesystem::canonical("/proc/self/exe").string();
        pbls::run_bench(bench_opts, std::cout);
        return 0;
    }
    if (verify_cmd->parsed()) return cmd_verify(verify_instance, verify_solution);
    if (gen_cmd->parsed()) {
        pbls::PBOInstance inst = pbls::generate_random_instance(gen_cfg);
        std::ofstream out(gen_out);
        if (!out) {
            std::cerr << "cannot open " << gen_out << " for writing\n";
            return 2;
        }
        pbls::emit_instance(out, inst);
        return 0;
    }
    return 0;
}
