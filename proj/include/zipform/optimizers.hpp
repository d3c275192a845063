// Optimizer zoo behind a single value-and-gradient evaluation contract:
// steepest descent, nonlinear conjugate gradient, LBFGS, simulated
// annealing, the three-stage SD/CG - SA - SD/CG hybrid, and the
// annealing-assisted evolutionary strategy (SAEC).
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace zipform {

// Deterministic evaluator: returns the value; fills grad when a span of
// size `dimension` is passed (gradient-based optimizers require it).
struct ObjectiveHandle {
    int dimension = 0;
    std::function<double(std::span<const double> x, std::span<double> grad)> eval;
    bool has_gradient = true;

    double value(std::span<const double> x) const { return eval(x, {}); }
};

struct SAConfig {
    double t_initial = 10.0;         // starting temperature
    double cooling = 0.95;           // geometric factor per temperature level
    int steps_per_temperature = 50;  // proposals per temperature level
    double step_scale = 1.0;         // proposal half-width at t_initial
};

struct SAECConfig {
    int population_size = 24;
    double parent_fraction = 0.5;   // fraction of the population eligible as parents
    double mutation_scale = 0.1;    // Gaussian mutation, relative to box half-width
    int generations = 48;
};

struct OptimizerConfig {
    double grad_rms_tol = 1e-9;  // stop when ||g||_2 / sqrt(n) drops below
    double gmax_tol = 1e-9;      // stop when max_i |g_i| drops below
    int max_iters = 20000;       // iterations (gradient methods) or proposals (SA)
    SAConfig sa;
    SAECConfig saec;
    int lbfgs_memory = 8;
    std::uint64_t rng_seed = 0;

    void validate() const;  // throws ArgumentError
};

struct TracePoint {
    int iteration = 0;
    double f = 0.0;
    double grad_rms = 0.0;
};

struct OptimizationResult {
    std::vector<double> x_best;
    double f_best = std::numeric_limits<double>::infinity();
    int iterations = 0;
    long function_evals = 0;
    long gradient_evals = 0;
    bool converged = false;
    std::string reason;  // "grad_rms", "gmax", "max_iters", "line_search_failed", ...
    std::vector<TracePoint> trace;
    std::vector<double> stage_best;  // per-stage best f (staged hybrid only)
};

// CSV: header "iteration,f,grad_rms", one row per trace point.
std::string trace_csv(const OptimizationResult& r);

// Backtracking line search along -grad f; monotone in f.
OptimizationResult steepest_descent(const ObjectiveHandle& obj,
                                    std::span<const double> x0,
                                    const OptimizerConfig& cfg);

// Polak-Ribiere nonlinear CG with restart on non-descent directions.
OptimizationResult conjugate_gradient(const ObjectiveHandle& obj,
                                      std::span<const double> x0,
                                      const OptimizerConfig& cfg);

// Two-loop recursion over the last `lbfgs_memory` curvature pairs with a
// strong-Wolfe line search; pairs with non-positive s.y are skipped.
OptimizationResult lbfgs(const ObjectiveHandle& obj, std::span<const double> x0,
                         const OptimizerConfig& cfg);

// Metropolis acceptance with uniform box proposals of half-width
// step_scale * T / t_initial and geometric cooling; gradient-free; fully
// reproducible from rng_seed. max_iters counts proposals.
OptimizationResult simulated_annealing(const ObjectiveHandle& obj,
                                       std::span<const double> x0,
                                       const OptimizerConfig& cfg);

// SD then CG, simulated annealing seeded at the local minimizer, then SD
// and CG again from the best annealing point. The first-stage SD and CG
// hand off early when grad RMS improves by less than 1% over 10 iterations.
OptimizationResult sdcg_sa_sdcg(const ObjectiveHandle& obj,
                                std::span<const double> x0,
                                const OptimizerConfig& cfg);

// Evolutionary strategy: rank-selected parents, Gaussian mutation, each
// offspring polished by a short annealing run; mutation and annealing
// scales decay geometrically to 1e-6 of their initial size across the
// configured generations. lo/hi give the per-coordinate search box;
// when empty the box defaults to [-5, 5]^n.
OptimizationResult saec(const ObjectiveHandle& obj, const OptimizerConfig& cfg,
                        std::span<const double> lo = {},
                        std::span<const double> hi = {});

// Central differences per coordinate; throws EvaluationError (naming the
// coordinate) when an evaluation is non-finite.
std::vector<double> finite_diff_gradient(const ObjectiveHandle& obj,
                                         std::span<const double> x, double step);

// Flat key=value configuration (one pair per line, '#' comments, nested
// keys dotted: "sa.cooling = 0.9"). Unknown keys are rejected. Values not
// named keep those of `base`.
OptimizerConfig parse_optimizer_config(const std::string& text,
                                       OptimizerConfig base = {});

// Dispatch by name: "sd", "cg", "lbfgs", "sa", "sdcg-sa-sdcg", "saec".
// The box is only used by saec; others start from x0.
OptimizationResult run_optimizer(const std::string& name, const ObjectiveHandle& obj,
                                 std::span<const double> x0, const OptimizerConfig& cfg,
                                 std::span<const double> lo = {},
                                 std::span<const double> hi = {});

bool is_known_optimizer(const std::string& name);

}  // namespace zipform
