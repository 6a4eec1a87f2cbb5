// Command-line experiment harness for the fraction-penalty thresholding
// library. Subcommands: gen, solve, sweep-m, sweep-k, prox-selftest,
// oracle-check. Exit codes: 0 success, 1 invalid arguments or I/O failure,
// 2 property-suite failure.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpt/experiment.hpp"
#include "fpt/instances.hpp"
#include "fpt/metrics.hpp"
#include "fpt/oracle.hpp"
#include "fpt/solver.hpp"

namespace {

std::vector<fpt::Scheme> parse_algorithms(const std::string& list) {
    std::vector<fpt::Scheme> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::string low;
        for (char c : tok) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (low == "fp-scheme1" || low == "scheme1" || low == "fp1") {
            out.push_back(fpt::Scheme::FpFixedLambda);
        } else if (low == "fp-scheme2" || low == "scheme2" || low == "fp2" || low == "fp") {
            out.push_back(fpt::Scheme::FpAdaptive);
        } else if (low == "soft") {
            out.push_back(fpt::Scheme::Soft);
        } else if (low == "half") {
            out.push_back(fpt::Scheme::Half);
        } else {
            throw CLI::ValidationError("--algorithms", "unknown algorithm '" + tok + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError("--algorithms", "empty algorithm list");
    return out;
}

// "lo:hi:step" or "lo:hi" (step 1) or a single value.
std::vector<std::size_t> parse_range(const std::string& text) {
    std::vector<std::size_t> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stoul(tok));
    std::vector<std::size_t> out;
    if (parts.size() == 1) {
        out.push_back(parts[0]);
    } else if (parts.size() == 2 || parts.size() == 3) {
        const std::size_t step = parts.size() == 3 ? parts[2] : 1;
        if (step == 0 || parts[1] < parts[0]) {
            throw CLI::ValidationError("range", "need lo<=hi and step>0 in '" + text + "'");
        }
        for (std::size_t v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
    } else {
        throw CLI::ValidationError("range", "expected lo:hi[:step], got '" + text + "'");
    }
    return out;
}

struct CommonOpts {
    fpt::ExperimentSpec spec;
    std::string algorithms = "fp-scheme2";
    std::string out_path;
    std::string aggregate_path;
};

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--a", o.spec.a, "fraction-penalty sharpness a");
    cmd->add_option("--lambda0", o.spec.lambda0, "fixed lambda for FP-Scheme1 and Soft");
    cmd->add_option("--epsilon", o.spec.epsilon, "step-size margin: mu=(1-eps)/||A||^2");
    cmd->add_option("--step-tol", o.spec.step_tol, "relative iterate-change stop tolerance");
    cmd->add_option("--max-iter", o.spec.max_iter, "iteration cap");
    cmd->add_option("--success-threshold", o.spec.success_threshold,
                    "relative squared error bound counted as success");
    cmd->add_option("--algorithms", o.algorithms,
                    "comma list: fp-scheme1,fp-scheme2,soft,half");
    cmd->add_option("--seed", o.spec.seed, "master seed");
    cmd->add_option("--sigma", o.spec.sigma, "measurement noise std");
    cmd->add_option("--support-eps", o.spec.support_eps,
                    "|x_i| > eps support rule for vectors loaded from files");
}

int run_sweep_command(CommonOpts& o, const std::string& name, bool vary_m,
                      const std::string& range_text) {
    o.spec.kind = vary_m ? fpt::ExperimentKind::SweepM : fpt::ExperimentKind::SweepK;
    o.spec.algorithms = parse_algorithms(o.algorithms);
    auto& points = vary_m ? o.spec.m_values : o.spec.k_values;
    points = parse_range(range_text);
    const std::vector<fpt::ExperimentRecord> records =
        vary_m ? fpt::run_sweep_m(o.spec) : fpt::run_sweep_k(o.spec);

    if (o.out_path.empty() || o.out_path == "-") {
        fpt::write_records_csv(std::cout, o.spec, name, records);
    } else {
        std::ofstream os(o.out_path);
        if (!os) throw std::runtime_error("cannot open " + o.out_path);
        fpt::write_records_csv(os, o.spec, name, records);
    }
    if (!o.aggregate_path.empty()) {
        std::ofstream os(o.aggregate_path);
        if (!os) throw std::runtime_error("cannot open " + o.aggregate_path);
        fpt::write_aggregate_csv(os, o.spec, name, records);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraction-penalty thresholding: sparse recovery experiments"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a sensing problem and write it to a file");
    std::size_t gen_m = 64, gen_n = 256, gen_k = 8;
    double gen_sigma = 0.0;
    std::uint64_t gen_seed = 42;
    std::string gen_out;
    gen->add_option("--m", gen_m, "measurement count");
    gen->add_option("--n", gen_n, "signal dimension");
    gen->add_option("--k", gen_k, "ground-truth sparsity");
    gen->add_option("--sigma", gen_sigma, "noise std");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one instance and print a summary");
    CommonOpts so;
    std::string solve_problem_path, trace_out;
    solve_cmd->add_option("--problem", solve_problem_path, "load a problem file instead of generating");
    solve_cmd->add_option("--m", so.spec.m, "measurement count (generated problems)");
    solve_cmd->add_option("--n", so.spec.n, "signal dimension");
    solve_cmd->add_option("--k", so.spec.k,
                          "sparsity for generation and the adaptive k prior; with --problem, "
                          "0 reads k off the stored ground truth");
    solve_cmd->add_option("--trace-out", trace_out, "write per-iteration trace CSV here");
    solve_cmd->add_option("--out", so.out_path, "write the record CSV here");
    add_solver_flags(solve_cmd, so);

    // sweep-m
    auto* sweep_m = app.add_subcommand("sweep-m", "success rate vs measurement count");
    CommonOpts smo;
    std::string m_range = "50:370:20";
    sweep_m->add_option("--m-range", m_range, "lo:hi[:step]");
    sweep_m->add_option("--n", smo.spec.n, "signal dimension");
    sweep_m->add_option("--k", smo.spec.k, "signal sparsity");
    sweep_m->add_option("--trials", smo.spec.trials, "trials per sweep point");
    sweep_m->add_option("--jobs", smo.spec.jobs, "worker threads");
    sweep_m->add_flag("--fixed-matrix", smo.spec.fixed_matrix,
                      "one matrix per sweep point instead of per trial");
    sweep_m->add_option("--out", smo.out_path, "records CSV (default stdout)");
    sweep_m->add_option("--aggregate-out", smo.aggregate_path, "per-point aggregate CSV");
    add_solver_flags(sweep_m, smo);
    smo.spec.trials = 100;
    smo.spec.k = 100;
    smo.algorithms = "fp-scheme2,soft,half";

    // sweep-k
    auto* sweep_k = app.add_subcommand("sweep-k", "success rate vs sparsity");
    CommonOpts sko;
    std::string k_range = "5:80:5";
    sweep_k->add_option("--k-range", k_range, "lo:hi[:step]");
    sweep_k->add_option("--m", sko.spec.m, "measurement count");
    sweep_k->add_option("--n", sko.spec.n, "signal dimension");
    sweep_k->add_option("--trials", sko.spec.trials, "trials per sweep point");
    sweep_k->add_option("--jobs", sko.spec.jobs, "worker threads");
    sweep_k->add_flag("--fixed-matrix", sko.spec.fixed_matrix,
                      "one matrix per sweep point instead of per trial");
    sweep_k->add_option("--out", sko.out_path, "records CSV (default stdout)");
    sweep_k->add_option("--aggregate-out", sko.aggregate_path, "per-point aggregate CSV");
    add_solver_flags(sweep_k, sko);
    sko.spec.trials = 100;
    sko.algorithms = "fp-scheme2,soft,half";

    // prox-selftest
    auto* selftest = app.add_subcommand("prox-selftest", "run the thresholding property suite");
    std::uint64_t selftest_seed = 20240501;
    selftest->add_option("--seed", selftest_seed, "suite seed");

    // oracle-check
    auto* ocheck = app.add_subcommand("oracle-check", "cross-check oracles on tiny instances");
    fpt::OracleCheckSpec ospec;
    ocheck->add_option("--m", ospec.m, "measurements (<= 10)");
    ocheck->add_option("--n", ospec.n, "dimension (<= 20)");
    ocheck->add_option("--k", ospec.k, "sparsity");
    ocheck->add_option("--trials", ospec.trials, "instance count");
    ocheck->add_option("--seed", ospec.seed, "master seed");
    ocheck->add_option("--a", ospec.a, "penalty sharpness");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            const fpt::SensingProblem p =
                fpt::make_problem(gen_m, gen_n, gen_k, gen_sigma, gen_seed);
            if (gen_out.empty() || gen_out == "-") {
                fpt::save_problem(p, std::cout);
            } else {
                fpt::save_problem(p, gen_out);
                std::cout << "wrote " << gen_out << " (m=" << gen_m << " n=" << gen_n
                          << " k=" << gen_k << ")\n";
            }
            return 0;
        }

        if (*solve_cmd) {
            so.spec.kind = fpt::ExperimentKind::Single;
            so.spec.algorithms = parse_algorithms(so.algorithms);
            std::optional<fpt::SensingProblem> loaded;
            if (!solve_problem_path.empty()) {
                loaded = fpt::load_problem(solve_problem_path);
                if (solve_cmd->count("--k") == 0) so.spec.k = 0;  // derive from the file
            }
            const fpt::SingleRun run = fpt::run_single(so.spec, std::move(loaded));
            for (std::size_t i = 0; i < run.results.size(); ++i) {
                const auto& [scheme, res] = run.results[i];
                const auto& rec = run.records[i];
                std::cout << fpt::scheme_name(scheme) << ": iterations=" << res.iterations
                          << " converged=" << (res.converged ? "yes" : "no")
                          << " residual=" << res.fixed_point_residual
                          << " objective=" << res.objective_trace.back();
                if (run.problem.has_truth()) {
                    std::cout << " rel_sq_error=" << rec.rel_sq_error
                              << " support_dist=" << rec.support_dist
                              << " success=" << rec.success;
                }
                std::cout << "\n";
            }
            if (!trace_out.empty()) {
                std::ofstream os(trace_out);
                if (!os) throw std::runtime_error("cannot open " + trace_out);
                fpt::write_trace_csv(os, run.results.front().second);
            }
            if (!so.out_path.empty()) {
                std::ofstream os(so.out_path);
                if (!os) throw std::runtime_error("cannot open " + so.out_path);
                fpt::write_metadata(os, so.spec, "single");
                os << fpt::kRecordHeader << '\n';
                for (const auto& r : run.records) fpt::write_record_row(os, r);
            }
            return 0;
        }

        if (*sweep_m) return run_sweep_command(smo, "sweep-m", true, m_range);
        if (*sweep_k) return run_sweep_command(sko, "sweep-k", false, k_range);

        if (*selftest) {
            const fpt::CheckReport rep = fpt::run_prox_selftest(std::cout, selftest_seed);
            return rep.passed() ? 0 : 2;
        }

        if (*ocheck) {
            const fpt::CheckReport rep = fpt::run_oracle_check(ospec, std::cout);
            return rep.passed() ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
