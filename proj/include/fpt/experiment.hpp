#pragma once

// Experiment harness: measurement/sparsity sweeps, single solves, CSV
// emission, and the self-check suites behind the prox-selftest and
// oracle-check commands.
//
// All randomness flows from ExperimentSpec::seed through fixed stream tags,
// and records land in canonical order (sweep point, algorithm, trial) no matter
// how many worker threads run, so re-runs are byte-identical up to the
// runtime_ms column.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fpt/instances.hpp"
#include "fpt/metrics.hpp"
#include "fpt/oracle.hpp"
#include "fpt/solver.hpp"

namespace fpt {

inline constexpr std::uint64_t kSweepPointTag = 101;
inline constexpr std::uint64_t kTrialTag = 202;
inline constexpr std::uint64_t kFixedMatrixTag = 303;
inline constexpr std::uint64_t kStartVectorTag = 404;

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial) {
    return rng::derive_stream(rng::derive_stream(master, kSweepPointTag + point),
                              kTrialTag + trial);
}

enum class ExperimentKind { SweepM, SweepK, Single, ProxSelfTest, OracleCheck };

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Single;
    std::size_t n = 512;
    std::size_t m = 128;
    std::size_t k = 20;
    std::vector<std::size_t> m_values;  // SweepM points
    std::vector<std::size_t> k_values;  // SweepK points
    double sigma = 0.0;
    std::size_t trials = 1;
    std::uint64_t seed = 42;
    std::vector<Scheme> algorithms{Scheme::FpAdaptive};
    double a = 2.0;
    double success_threshold = 1e-5;
    double lambda0 = 0.5;  // FP-Scheme1 and Soft
    double epsilon = 0.01;
    double step_tol = 1e-8;
    std::size_t max_iter = 5000;
    bool fixed_matrix = false;
    std::size_t jobs = 1;
    double support_eps = 0.0;
};

struct ExperimentRecord {
    std::string experiment;
    std::string algorithm;
    std::size_t m = 0, n = 0, k = 0;
    double sigma = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    int success = 0;
    double rel_sq_error = 0.0;
    double support_dist = 0.0;
    std::size_t iterations = 0;
    double runtime_ms = 0.0;
};

inline constexpr const char* kRecordHeader =
    "experiment,algorithm,m,n,k,sigma,trial,seed,success,rel_sq_error,support_dist,"
    "iterations,runtime_ms";

inline constexpr const char* kAggregateHeader =
    "experiment,algorithm,m,n,k,sigma,trials,success_rate,mean_rel_sq_error,"
    "mean_support_dist";

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

inline void write_record_row(std::ostream& os, const ExperimentRecord& r) {
    os << r.experiment << ',' << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.k << ','
       << detail::fmt_g17(r.sigma) << ',' << r.trial << ',' << r.seed << ',' << r.success << ','
       << detail::fmt_g17(r.rel_sq_error) << ',' << detail::fmt_g17(r.support_dist) << ','
       << r.iterations << ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.runtime_ms);
    os << buf << '\n';
}

// Leading '#' metadata lines record the parameterization (baseline lambda0
// included); the schema row follows unchanged.
inline void write_metadata(std::ostream& os, const ExperimentSpec& spec,
                           const std::string& name) {
    os << "# " << name << " n=" << spec.n;
    if (spec.kind == ExperimentKind::SweepM) os << " k=" << spec.k;
    if (spec.kind == ExperimentKind::SweepK) os << " m=" << spec.m;
    if (spec.kind == ExperimentKind::Single) os << " m=" << spec.m << " k=" << spec.k;
    os << " sigma=" << detail::fmt_g17(spec.sigma)
       << " trials=" << spec.trials << " seed=" << spec.seed << " a="
       << detail::fmt_g17(spec.a) << " lambda0=" << detail::fmt_g17(spec.lambda0)
       << " epsilon=" << detail::fmt_g17(spec.epsilon) << " step_tol="
       << detail::fmt_g17(spec.step_tol) << " max_iter=" << spec.max_iter
       << " success_threshold=" << detail::fmt_g17(spec.success_threshold)
       << " fixed_matrix=" << (spec.fixed_matrix ? 1 : 0) << " rng=xoshiro256++/box-muller\n";
    os << "# algorithms=";
    for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
        if (i) os << '+';
        os << scheme_name(spec.algorithms[i]);
    }
    os << '\n';
}

inline SolverConfig solver_config_for(const ExperimentSpec& spec, Scheme scheme,
                                      std::size_t k_prior) {
    SolverConfig cfg;
    cfg.scheme = scheme;
    cfg.a = spec.a;
    cfg.lambda0 = spec.lambda0;
    cfg.k = k_prior;
    cfg.epsilon = spec.epsilon;
    cfg.step_tol = spec.step_tol;
    cfg.max_iter = spec.max_iter;
    return cfg;
}

inline ExperimentRecord evaluate_solve(const ExperimentSpec& spec, const std::string& name,
                                       const SensingProblem& problem, Scheme scheme,
                                       std::size_t k_label, std::size_t trial,
                                       const SolveResult& res, double runtime_ms) {
    ExperimentRecord rec;
    rec.experiment = name;
    rec.algorithm = scheme_name(scheme);
    rec.m = problem.A.rows();
    rec.n = problem.A.cols();
    rec.k = k_label;
    rec.sigma = problem.sigma;
    rec.trial = trial;
    rec.seed = problem.seed;
    rec.iterations = res.iterations;
    rec.runtime_ms = runtime_ms;
    if (problem.has_truth()) {
        rec.rel_sq_error = rel_sq_error(res.x_final, problem.x_true);
        rec.success = rec.rel_sq_error <= spec.success_threshold ? 1 : 0;
        rec.support_dist = support_distance(support_of(res.x_final),
                                            support_of(problem.x_true, spec.support_eps));
    } else {
        rec.rel_sq_error = std::nan("");
        rec.support_dist = std::nan("");
        rec.success = 0;
    }
    return rec;
}

inline ExperimentRecord run_trial(const ExperimentSpec& spec, const std::string& name,
                                  const SensingProblem& problem, Scheme scheme,
                                  std::size_t k_prior, std::size_t trial) {
    const SolverConfig cfg = solver_config_for(spec, scheme, k_prior);
    const auto start = std::chrono::steady_clock::now();
    const SolveResult res = solve(problem.A, problem.b, cfg);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return evaluate_solve(spec, name, problem, scheme, k_prior, trial, res, ms);
}

namespace detail {

struct SweepAxis {
    std::vector<std::size_t> points;
    bool vary_m = true;  // otherwise vary k
};

inline std::vector<ExperimentRecord> run_sweep(const ExperimentSpec& spec,
                                               const SweepAxis& axis,
                                               const std::string& name) {
    if (axis.points.empty()) throw std::invalid_argument(name + ": empty sweep range");
    if (spec.trials < 1) throw std::invalid_argument(name + ": trials must be >= 1");
    if (spec.algorithms.empty()) throw std::invalid_argument(name + ": no algorithms");
    const std::size_t algs = spec.algorithms.size();
    std::vector<ExperimentRecord> records(axis.points.size() * algs * spec.trials);

    parallel_for(axis.points.size() * spec.trials, spec.jobs, [&](std::size_t task) {
        const std::size_t p = task / spec.trials;
        const std::size_t t = task % spec.trials;
        const std::size_t m = axis.vary_m ? axis.points[p] : spec.m;
        const std::size_t k = axis.vary_m ? spec.k : axis.points[p];
        const std::uint64_t seed = trial_seed(spec.seed, p, t);
        SensingProblem problem = [&] {
            if (!spec.fixed_matrix) return make_problem(m, spec.n, k, spec.sigma, seed);
            DenseMatrix A = gen_gaussian_matrix(
                m, spec.n, rng::derive_stream(spec.seed, kFixedMatrixTag));
            std::vector<double> x = gen_sparse_signal(spec.n, k, seed);
            std::vector<double> b = measure(A, x, spec.sigma, seed);
            return SensingProblem{std::move(A), std::move(b), std::move(x), spec.sigma, seed};
        }();
        for (std::size_t ai = 0; ai < algs; ++ai) {
            const std::size_t slot = (p * algs + ai) * spec.trials + t;
            records[slot] =
                run_trial(spec, name, problem, spec.algorithms[ai], k, t);
        }
    });
    return records;
}

}  // namespace detail

inline std::vector<ExperimentRecord> run_sweep_m(const ExperimentSpec& spec) {
    return detail::run_sweep(spec, {spec.m_values, true}, "sweep-m");
}

inline std::vector<ExperimentRecord> run_sweep_k(const ExperimentSpec& spec) {
    return detail::run_sweep(spec, {spec.k_values, false}, "sweep-k");
}

inline void write_records_csv(std::ostream& os, const ExperimentSpec& spec,
                              const std::string& name,
                              const std::vector<ExperimentRecord>& records) {
    write_metadata(os, spec, name);
    os << kRecordHeader << '\n';
    for (const auto& r : records) write_record_row(os, r);
}

// Per (sweep point, algorithm) aggregates in record order.
inline void write_aggregate_csv(std::ostream& os, const ExperimentSpec& spec,
                                const std::string& name,
                                const std::vector<ExperimentRecord>& records) {
    write_metadata(os, spec, name);
    os << kAggregateHeader << '\n';
    for (std::size_t base = 0; base < records.size(); base += spec.trials) {
        double succ = 0.0, rel = 0.0, dist = 0.0;
        for (std::size_t t = 0; t < spec.trials; ++t) {
            const auto& r = records[base + t];
            succ += r.success;
            rel += r.rel_sq_error;
            dist += r.support_dist;
        }
        const auto& head = records[base];
        const double tr = static_cast<double>(spec.trials);
        os << head.experiment << ',' << head.algorithm << ',' << head.m << ',' << head.n << ','
           << head.k << ',' << detail::fmt_g17(head.sigma) << ',' << spec.trials << ','
           << detail::fmt_g17(succ / tr) << ',' << detail::fmt_g17(rel / tr) << ','
           << detail::fmt_g17(dist / tr) << '\n';
    }
}

struct SingleRun {
    SensingProblem problem;
    std::vector<std::pair<Scheme, SolveResult>> results;
    std::vector<ExperimentRecord> records;
};

// The k prior handed to the adaptive schemes is spec.k when set; for loaded
// problems with a stored ground truth, k = 0 means "read it off the truth".
inline SingleRun run_single(const ExperimentSpec& spec,
                            std::optional<SensingProblem> loaded = std::nullopt) {
    SingleRun out{loaded ? std::move(*loaded)
                         : make_problem(spec.m, spec.n, spec.k, spec.sigma, spec.seed),
                  {},
                  {}};
    std::size_t k_prior = spec.k;
    if (k_prior == 0 && out.problem.has_truth()) {
        k_prior = support_of(out.problem.x_true, spec.support_eps).size();
    }
    if (k_prior == 0 || k_prior >= out.problem.A.cols()) {
        k_prior = std::max<std::size_t>(1, out.problem.A.cols() / 4);
    }
    for (Scheme scheme : spec.algorithms) {
        const SolverConfig cfg = solver_config_for(spec, scheme, k_prior);
        const auto start = std::chrono::steady_clock::now();
        SolveResult res = solve(out.problem.A, out.problem.b, cfg);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        out.records.push_back(
            evaluate_solve(spec, "single", out.problem, scheme, k_prior, 0, res, ms));
        out.results.emplace_back(scheme, std::move(res));
    }
    return out;
}

// Writes the per-iteration trace of one solve: iteration, objective at the
// produced iterate, step length, and the lambda used.
inline void write_trace_csv(std::ostream& os, const SolveResult& res) {
    os << "iteration,objective,step_diff,lambda\n";
    for (std::size_t j = 0; j < res.iterations; ++j) {
        os << (j + 1) << ',' << detail::fmt_g17(res.objective_trace[j + 1]) << ','
           << detail::fmt_g17(res.step_diffs[j]) << ',' << detail::fmt_g17(res.lambda_trace[j])
           << '\n';
    }
}

struct CheckReport {
    std::size_t checks = 0;
    std::size_t failures = 0;

    bool passed() const { return failures == 0; }

    void tally(bool ok) {
        ++checks;
        if (!ok) ++failures;
    }
};

// Property suite for the thresholding operator: ordering of the threshold
// constants, cubic-root residuals, oddness/shrinkage, dead-zone behavior,
// the nonzero floor, and agreement with the grid-search oracle.
// injected_threshold_offset shifts the dead zone of the prox under test;
// nonzero values emulate a faulty build and must be caught by the suite.
inline CheckReport run_prox_selftest(std::ostream& log, std::uint64_t seed = 20240501,
                                     double injected_threshold_offset = 0.0) {
    CheckReport rep;
    rng::Xoshiro256pp gen(seed);
    auto log_section = [&](const char* name, std::size_t before) {
        log << "  [" << (rep.failures == before ? "ok" : "FAIL") << "] " << name << "\n";
    };

    auto prox_under_test = [&](double x, double lambda_eff, double a) {
        const ThresholdTriple th = compute_thresholds(lambda_eff, a);
        if (std::fabs(x) <= th.t + injected_threshold_offset) return 0.0;
        return detail::resolvent_at(x, lambda_eff, a);
    };

    auto uniform_log = [&](double lo, double hi) {
        return lo * std::exp(gen.uniform() * std::log(hi / lo));
    };

    // threshold ordering and the equal-point at lambda = 1/a^2
    std::size_t mark = rep.failures;
    for (int i = 0; i < 100000; ++i) {
        const double lambda = uniform_log(1e-4, 1e4);
        const double a = uniform_log(0.05, 50.0);
        const ThresholdTriple th = compute_thresholds(lambda, a);
        rep.tally(th.t1 <= th.t3 + 1e-12 && th.t3 <= th.t2 + 1e-12);
        const ThresholdTriple eq = compute_thresholds(1.0 / (a * a), a);
        const double half_inv = 1.0 / (2.0 * a);
        rep.tally(std::fabs(eq.t1 - half_inv) <= 1e-12 && std::fabs(eq.t2 - half_inv) <= 1e-12 &&
                  std::fabs(eq.t3 - half_inv) <= 1e-12);
    }
    log_section("threshold ordering", mark);

    // resolvent: root residual and exact oddness anywhere above t1; the
    // shrinkage |g(t)| <= |t| only holds above the operator's dead zone
    // (below it the outermost root can cross -|t|), so it is checked there.
    mark = rep.failures;
    for (int i = 0; i < 10000; ++i) {
        const double lambda = uniform_log(0.01, 10.0);
        const double a = uniform_log(0.5, 10.0);
        const ThresholdTriple th = compute_thresholds(lambda, a);
        const double sign = gen.uniform() < 0.5 ? -1.0 : 1.0;
        const double t =
            sign * (std::max(th.t1, 0.0) + std::pow(10.0, -6.0 + 7.0 * gen.uniform()));
        const double y = resolvent(t, lambda, a);
        rep.tally(oracle::cubic_residual(y, t, lambda, a) <= 1e-9 * std::max(1.0, lambda * a));
        rep.tally(resolvent(-t, lambda, a) == -y);
        const double ts = sign * (th.t + std::pow(10.0, -6.0 + 7.0 * gen.uniform()));
        rep.tally(std::fabs(resolvent(ts, lambda, a)) <= std::fabs(ts));
    }
    log_section("resolvent roots", mark);

    // dead zone, jump floor, prox oddness
    mark = rep.failures;
    for (int i = 0; i < 5000; ++i) {
        const double lambda_eff = uniform_log(0.01, 10.0);
        const double a = uniform_log(0.5, 10.0);
        const ThresholdTriple th = compute_thresholds(lambda_eff, a);
        const double inside = th.t * gen.uniform();
        rep.tally(prox_under_test(inside, lambda_eff, a) == 0.0);
        const double outside = th.t * (1.0 + 1e-6 + gen.uniform());
        const double p = prox_under_test(outside, lambda_eff, a);
        rep.tally(p != 0.0 && std::fabs(p) <= outside);
        rep.tally(prox_under_test(-outside, lambda_eff, a) == -p);
        if (th.regime == ThresholdRegime::LargeLambda) {
            rep.tally(std::fabs(p) >= std::sqrt(lambda_eff) - 1.0 / a - 1e-9);
        }
    }
    log_section("dead zone and floor", mark);

    // agreement with the exhaustive grid oracle
    mark = rep.failures;
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.5 + 9.5 * gen.uniform();
        const double lambda_eff = 0.01 + 9.99 * gen.uniform();
        const double x = -20.0 + 40.0 * gen.uniform();
        const double p = prox_under_test(x, lambda_eff, a);
        const double q = oracle::prox_grid_oracle(x, lambda_eff, a);
        const PenaltyParams params(a);
        auto f = [&](double y) {
            const double d = y - x;
            return d * d + lambda_eff * fraction_penalty(y, params);
        };
        rep.tally(f(p) <= f(q) + 1e-8);
        rep.tally(std::fabs(p - q) <= 1e-4);
    }
    log_section("grid-oracle agreement", mark);

    log << "prox-selftest: " << (rep.checks - rep.failures) << "/" << rep.checks
        << " checks passed\n";
    return rep;
}

struct OracleCheckSpec {
    std::size_t m = 6;
    std::size_t n = 12;
    std::size_t k = 2;
    std::size_t trials = 20;
    std::uint64_t seed = 20240502;
    double a = 2.0;
};

// Cross-checks the brute-force verifiers against solver runs on tiny
// instances: vertex constants, sign-flip invariance of the l0 search, the
// zero-solution weight, and first-order conditions at converged iterates.
inline CheckReport run_oracle_check(const OracleCheckSpec& spec, std::ostream& log) {
    CheckReport rep;
    if (spec.n > 20 || spec.m > 10) {
        throw std::invalid_argument("run_oracle_check: tiny instances only (m<=10, n<=20)");
    }
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        const std::uint64_t seed = trial_seed(spec.seed, 0, trial);
        const SensingProblem problem =
            make_problem(spec.m, spec.n, spec.k, 0.0, seed);
        const double bb = norm2_sq(problem.b);

        const oracle::L0Result l0 = oracle::exhaustive_l0(problem.A, problem.b);
        rep.tally(l0.size >= 1 && l0.size <= spec.k);

        const oracle::TinyInstanceReport tiny =
            oracle::tiny_constants(problem.A, problem.b, 2.0 * bb, spec.a);
        rep.tally(tiny.r_const > 0.0 && tiny.r_const <= tiny.R_const);
        rep.tally(std::isfinite(tiny.a_star_star) && tiny.a_star_star > 0.0);
        rep.tally(tiny.sigma_min > 0.0);
        rep.tally(tiny.l0_min == l0.size);

        // column sign flips permute nothing and flip solution entries
        DenseMatrix flipped = problem.A;
        rng::Xoshiro256pp gen(rng::derive_stream(seed, 7));
        std::vector<double> signs(spec.n);
        for (auto& s : signs) s = gen.uniform() < 0.5 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < spec.m; ++i) {
            for (std::size_t j = 0; j < spec.n; ++j) flipped(i, j) *= signs[j];
        }
        const oracle::L0Result l0f = oracle::exhaustive_l0(flipped, problem.b);
        bool flip_ok = l0f.size == l0.size;
        for (std::size_t j = 0; flip_ok && j < spec.n; ++j) {
            flip_ok = std::fabs(l0f.x[j] * signs[j] - l0.x[j]) <= 1e-9 * std::max(1.0, std::fabs(l0.x[j]));
        }
        rep.tally(flip_ok);

        // at lambda_bar, no start beats the zero vector's objective
        const double lbar = zero_solution_lambda(problem.A, problem.b, spec.a);
        const PenaltyParams params(spec.a);
        for (int s = 0; s < 3; ++s) {
            SolverConfig cfg;
            cfg.scheme = Scheme::FpFixedLambda;
            cfg.a = spec.a;
            cfg.lambda0 = lbar;
            cfg.x0.resize(spec.n);
            rng::Xoshiro256pp sg(rng::derive_stream(seed, kStartVectorTag + s));
            for (auto& v : cfg.x0) v = sg.normal();
            const SolveResult res = solve(problem.A, problem.b, cfg);
            rep.tally(res.objective_trace.back() >= bb * (1.0 - 1e-9));
        }

        // first-order condition at a tightly converged fixed lambda solve
        SolverConfig cfg;
        cfg.scheme = Scheme::FpFixedLambda;
        cfg.a = spec.a;
        cfg.lambda0 = 1.0;
        cfg.step_tol = 1e-13;
        cfg.max_iter = 20000;
        const SolveResult res = solve(problem.A, problem.b, cfg);
        rep.tally(oracle::check_first_order(res.x_final, problem.A, problem.b, cfg.lambda0,
                                            spec.a, 1e-6));
    }
    log << "oracle-check: " << (rep.checks - rep.failures) << "/" << rep.checks
        << " checks passed\n";
    return rep;
}

}  // namespace fpt
