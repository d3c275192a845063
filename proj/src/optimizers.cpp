#include "zipform/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>

#include "zipform/errors.hpp"

namespace zipform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double grad_rms(std::span<const double> g) {
    return g.empty() ? 0.0 : norm2(g) / std::sqrt(static_cast<double>(g.size()));
}

double grad_max(std::span<const double> g) {
    double m = 0;
    for (double x : g) m = std::max(m, std::fabs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Counting wrapper; evaluation failures surface as +inf so stochastic
// optimizers can reject the proposal.
class Eval {
public:
    Eval(const ObjectiveHandle& obj, OptimizationResult& result)
        : obj_(obj), result_(result) {}

    double value(std::span<const double> x) {
        ++result_.function_evals;
        try {
            return obj_.eval(x, {});
        } catch (const EvaluationError&) {
            return kInf;
        } catch (const DomainError&) {
            return kInf;
        }
    }

    double value_grad(std::span<const double> x, std::span<double> grad) {
        ++result_.function_evals;
        ++result_.gradient_evals;
        try {
            return obj_.eval(x, grad);
        } catch (const EvaluationError&) {
            for (auto& g : grad) g = kInf;
            return kInf;
        } catch (const DomainError&) {
            for (auto& g : grad) g = kInf;
            return kInf;
        }
    }

private:
    const ObjectiveHandle& obj_;
    OptimizationResult& result_;
};

// Deterministic uniform/normal draws independent of the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double u01() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * u01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = u01();
        while (u1 <= 1e-300) u1 = u01();
        double u2 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

void require_gradient(const ObjectiveHandle& obj) {
    if (!obj.has_gradient)
        throw ArgumentError("this optimizer needs an objective with gradients");
    if (obj.dimension < 1) throw ArgumentError("objective dimension must be positive");
}

void track_best(OptimizationResult& r, std::span<const double> x, double f) {
    if (f < r.f_best) {
        r.f_best = f;
        r.x_best.assign(x.begin(), x.end());
    }
}

// Re-evaluate at the best point so f_best is exactly the evaluator's value.
void finalize(Eval& ev, OptimizationResult& r) {
    if (!r.x_best.empty()) r.f_best = ev.value(r.x_best);
}

// Armijo backtracking with quadratic interpolation, then one interpolation
// refinement of the accepted step (exact on quadratic objectives).
// Returns 0 on failure; otherwise fills x_out/f_out with the accepted point.
double armijo_search(Eval& ev, std::span<const double> x, std::span<const double> d,
                     double f0, double dphi0, double alpha_init,
                     std::vector<double>& x_out, double& f_out) {
    constexpr double c1 = 1e-4;
    const size_t n = x.size();
    std::vector<double> trial(n);
    auto at = [&](double a) {
        for (size_t i = 0; i < n; ++i) trial[i] = x[i] + a * d[i];
        return ev.value(trial);
    };
    auto interpolate = [&](double a, double fa) {
        double denom = 2.0 * (fa - f0 - dphi0 * a);
        if (!(std::isfinite(denom)) || denom <= 0) return 0.5 * a;
        return std::clamp(-dphi0 * a * a / denom, 0.1 * a, 0.5 * a);
    };

    double alpha = alpha_init;
    for (int k = 0; k < 64; ++k) {
        double f = at(alpha);
        if (std::isfinite(f) && f <= f0 + c1 * alpha * dphi0) {
            // Refine once with the parabola through (0, f0, dphi0), (alpha, f).
            double denom = 2.0 * (f - f0 - dphi0 * alpha);
            if (std::isfinite(denom) && denom > 0) {
                double a_star = -dphi0 * alpha * alpha / denom;
                if (a_star > 0 && std::isfinite(a_star) && std::fabs(a_star - alpha) > 1e-14 * alpha) {
                    double f_star = at(a_star);
                    if (std::isfinite(f_star) && f_star < f) {
                        f_out = f_star;
                        for (size_t i = 0; i < n; ++i) x_out[i] = x[i] + a_star * d[i];
                        return a_star;
                    }
                }
            }
            f_out = f;
            for (size_t i = 0; i < n; ++i) x_out[i] = x[i] + alpha * d[i];
            return alpha;
        }
        alpha = std::isfinite(f) ? interpolate(alpha, f) : 0.5 * alpha;
        if (alpha < 1e-20) break;
    }
    return 0.0;
}

using StallStop = std::function<bool(const std::vector<TracePoint>&)>;

enum class DirectionRule { steepest, polak_ribiere };

OptimizationResult gradient_loop(const ObjectiveHandle& obj, std::span<const double> x0,
                                 const OptimizerConfig& cfg, DirectionRule rule,
                                 const StallStop& stall) {
    require_gradient(obj);
    cfg.validate();
    if (x0.size() != static_cast<size_t>(obj.dimension))
        throw ArgumentError("x0 has wrong dimension");

    OptimizationResult result;
    Eval ev(obj, result);
    const size_t n = x0.size();

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> g(n), g_prev(n), d(n), x_next(n);
    double f = ev.value_grad(x, g);
    if (!std::isfinite(f) || !all_finite(g))
        throw DivergenceError("non-finite objective at the starting point",
                              std::move(x), f);
    track_best(result, x, f);
    result.trace.push_back({0, f, grad_rms(g)});

    double alpha_prev = 0.0;
    bool have_prev_dir = false;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (grad_rms(g) <= cfg.grad_rms_tol) {
            result.converged = true;
            result.reason = "grad_rms";
            break;
        }
        if (grad_max(g) <= cfg.gmax_tol) {
            result.converged = true;
            result.reason = "gmax";
            break;
        }
        if (stall && stall(result.trace)) {
            result.reason = "stalled";
            break;
        }

        if (rule == DirectionRule::steepest || !have_prev_dir) {
            for (size_t i = 0; i < n; ++i) d[i] = -g[i];
        } else {
            // Polak-Ribiere+ with restart on non-descent.
            double num = 0, den = 0;
            for (size_t i = 0; i < n; ++i) {
                num += g[i] * (g[i] - g_prev[i]);
                den += g_prev[i] * g_prev[i];
            }
            double beta = den > 0 ? std::max(0.0, num / den) : 0.0;
            double dg = 0;
            for (size_t i = 0; i < n; ++i) {
                d[i] = -g[i] + beta * d[i];
                dg += d[i] * g[i];
            }
            if (dg >= 0)
                for (size_t i = 0; i < n; ++i) d[i] = -g[i];
        }

        double dphi0 = 0;
        for (size_t i = 0; i < n; ++i) dphi0 += d[i] * g[i];
        if (dphi0 >= 0) {  // numerically flat; nothing to gain
            result.converged = true;
            result.reason = "flat_direction";
            break;
        }

        double alpha_init = alpha_prev > 0 ? 2.0 * alpha_prev
                                           : std::min(1.0, 1.0 / (1.0 + grad_max(g)));
        double f_next = 0;
        double alpha = armijo_search(ev, x, d, f, dphi0, alpha_init, x_next, f_next);
        if (alpha == 0.0) {
            result.reason = "line_search_failed";
            break;
        }
        alpha_prev = alpha;

        g_prev = g;
        x = x_next;
        f = ev.value_grad(x, g);
        if (!std::isfinite(f) || !all_finite(g))
            throw DivergenceError("non-finite objective during descent",
                                  std::vector<double>(result.x_best), result.f_best);
        have_prev_dir = true;
        track_best(result, x, f);
        result.iterations = iter + 1;
        result.trace.push_back({iter + 1, f, grad_rms(g)});
    }
    if (result.reason.empty()) result.reason = "max_iters";
    finalize(ev, result);
    return result;
}

// Strong-Wolfe line search (bracket + zoom with quadratic interpolation).
// Evaluates value and gradient at every trial; on success fills the
// accepted point, value and gradient. Returns 0 on failure.
double wolfe_search(Eval& ev, std::span<const double> x, std::span<const double> d,
                    double f0, double dphi0, double alpha_init,
                    std::vector<double>& x_out, double& f_out,
                    std::vector<double>& g_out) {
    constexpr double c1 = 1e-4, c2 = 0.9;
    const size_t n = x.size();
    std::vector<double> trial(n), g_trial(n);

    auto phi = [&](double a, double& dphi) {
        for (size_t i = 0; i < n; ++i) trial[i] = x[i] + a * d[i];
        double f = ev.value_grad(trial, g_trial);
        dphi = 0;
        for (size_t i = 0; i < n; ++i) dphi += g_trial[i] * d[i];
        return f;
    };
    // One interpolation refinement of an acceptable step: the parabola
    // through (0, f0, dphi0) and (a, f) lands on the exact line minimum for
    // quadratic objectives.
    auto accept = [&](double a, double f) {
        std::vector<double> x_keep = trial, g_keep = g_trial;
        double denom = 2.0 * (f - f0 - dphi0 * a);
        if (std::isfinite(denom) && denom > 0) {
            double a_star = -dphi0 * a * a / denom;
            if (std::isfinite(a_star) && a_star > 1e-16 &&
                std::fabs(a_star - a) > 1e-12 * a) {
                double dphi_star;
                double f_star = phi(a_star, dphi_star);
                if (std::isfinite(f_star) && f_star < f &&
                    f_star <= f0 + c1 * a_star * dphi0) {
                    x_out = trial;
                    f_out = f_star;
                    g_out = g_trial;
                    return a_star;
                }
            }
        }
        x_out = std::move(x_keep);
        f_out = f;
        g_out = std::move(g_keep);
        return a;
    };

    double a_lo = 0, f_lo = f0, dphi_lo = dphi0;
    double a_hi = 0, f_hi = 0;
    double a = alpha_init, a_prev = 0, f_prev = f0, dphi_prev = dphi0;
    bool bracketed = false;

    for (int i = 0; i < 20 && !bracketed; ++i) {
        double dphi;
        double f = phi(a, dphi);
        if (!std::isfinite(f) || f > f0 + c1 * a * dphi0 || (i > 0 && f >= f_prev)) {
            a_lo = a_prev; f_lo = f_prev; dphi_lo = dphi_prev;
            a_hi = a; f_hi = f;
            bracketed = true;
            break;
        }
        if (std::fabs(dphi) <= -c2 * dphi0) return accept(a, f);
        if (dphi >= 0) {
            a_lo = a; f_lo = f; dphi_lo = dphi;
            a_hi = a_prev; f_hi = f_prev;
            bracketed = true;
            break;
        }
        a_prev = a; f_prev = f; dphi_prev = dphi;
        a *= 2.0;
        if (a > 1e12) return 0.0;
    }
    if (!bracketed) return 0.0;

    for (int j = 0; j < 48; ++j) {
        double width = a_hi - a_lo;
        double a_j;
        // Minimizer of the parabola through (a_lo, f_lo, dphi_lo), (a_hi, f_hi).
        double denom = 2.0 * (f_hi - f_lo - dphi_lo * width);
        if (std::isfinite(denom) && denom != 0.0 && std::isfinite(f_hi)) {
            a_j = a_lo - dphi_lo * width * width / denom;
        } else {
            a_j = a_lo + 0.5 * width;
        }
        double lo = std::min(a_lo, a_hi), hi = std::max(a_lo, a_hi);
        double guard = 0.05 * std::fabs(width);
        if (!(a_j > lo + guard && a_j < hi - guard)) a_j = a_lo + 0.5 * width;

        double dphi;
        double f = phi(a_j, dphi);
        if (!std::isfinite(f) || f > f0 + c1 * a_j * dphi0 || f >= f_lo) {
            a_hi = a_j; f_hi = f;
        } else {
            if (std::fabs(dphi) <= -c2 * dphi0) return accept(a_j, f);
            if (dphi * (a_hi - a_lo) >= 0) {
                a_hi = a_lo; f_hi = f_lo;
            }
            a_lo = a_j; f_lo = f; dphi_lo = dphi;
        }
        if (std::fabs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::fabs(a_lo))) break;
    }
    // Fall back to the best sufficient-decrease point found, if any.
    if (a_lo > 0 && f_lo <= f0 + c1 * a_lo * dphi0) {
        double dphi;
        double f = phi(a_lo, dphi);
        if (std::isfinite(f)) return accept(a_lo, f);
    }
    return 0.0;
}

}  // namespace

void OptimizerConfig::validate() const {
    if (!(grad_rms_tol > 0) || !(gmax_tol > 0))
        throw ArgumentError("tolerances must be positive");
    if (max_iters < 0) throw ArgumentError("max_iters must be non-negative");
    if (!(sa.t_initial > 0) || !(sa.step_scale > 0) || sa.steps_per_temperature < 1)
        throw ArgumentError("bad simulated-annealing schedule");
    if (!(sa.cooling > 0.0 && sa.cooling < 1.0))
        throw ArgumentError("cooling factor must be in (0, 1)");
    if (saec.population_size < 2)
        throw ArgumentError("population_size must be at least 2");
    if (!(saec.parent_fraction > 0.0 && saec.parent_fraction <= 1.0))
        throw ArgumentError("parent_fraction must be in (0, 1]");
    if (!(saec.mutation_scale > 0) || saec.generations < 1)
        throw ArgumentError("bad SAEC configuration");
    if (lbfgs_memory < 1) throw ArgumentError("lbfgs_memory must be at least 1");
}

std::string trace_csv(const OptimizationResult& r) {
    std::string out = "iteration,f,grad_rms\n";
    char buf[96];
    for (const auto& t : r.trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.iteration, t.f, t.grad_rms);
        out += buf;
    }
    return out;
}

OptimizationResult steepest_descent(const ObjectiveHandle& obj,
                                    std::span<const double> x0,
                                    const OptimizerConfig& cfg) {
    return gradient_loop(obj, x0, cfg, DirectionRule::steepest, nullptr);
}

OptimizationResult conjugate_gradient(const ObjectiveHandle& obj,
                                      std::span<const double> x0,
                                      const OptimizerConfig& cfg) {
    return gradient_loop(obj, x0, cfg, DirectionRule::polak_ribiere, nullptr);
}

OptimizationResult lbfgs(const ObjectiveHandle& obj, std::span<const double> x0,
                         const OptimizerConfig& cfg) {
    require_gradient(obj);
    cfg.validate();
    if (x0.size() != static_cast<size_t>(obj.dimension))
        throw ArgumentError("x0 has wrong dimension");

    OptimizationResult result;
    Eval ev(obj, result);
    const size_t n = x0.size();
    const size_t m = static_cast<size_t>(cfg.lbfgs_memory);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> g(n), d(n), q(n), x_next(n), g_next(n);
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho;

    double f = ev.value_grad(x, g);
    if (!std::isfinite(f) || !all_finite(g))
        throw DivergenceError("non-finite objective at the starting point",
                              std::move(x), f);
    track_best(result, x, f);
    result.trace.push_back({0, f, grad_rms(g)});

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (grad_rms(g) <= cfg.grad_rms_tol) {
            result.converged = true;
            result.reason = "grad_rms";
            break;
        }
        if (grad_max(g) <= cfg.gmax_tol) {
            result.converged = true;
            result.reason = "gmax";
            break;
        }

        // Two-loop recursion; with no stored pairs the direction is -g.
        q = g;
        std::vector<double> alpha(s_hist.size());
        for (size_t k = s_hist.size(); k-- > 0;) {
            double sq = 0;
            for (size_t i = 0; i < n; ++i) sq += s_hist[k][i] * q[i];
            alpha[k] = rho[k] * sq;
            for (size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y_hist[k][i];
        }
        double gamma = 1.0;
        if (!s_hist.empty()) {
            double sy = 0, yy = 0;
            for (size_t i = 0; i < n; ++i) {
                sy += s_hist.back()[i] * y_hist.back()[i];
                yy += y_hist.back()[i] * y_hist.back()[i];
            }
            if (yy > 0) gamma = sy / yy;
        }
        for (size_t i = 0; i < n; ++i) q[i] *= gamma;
        for (size_t k = 0; k < s_hist.size(); ++k) {
            double yq = 0;
            for (size_t i = 0; i < n; ++i) yq += y_hist[k][i] * q[i];
            double beta = rho[k] * yq;
            for (size_t i = 0; i < n; ++i) q[i] += s_hist[k][i] * (alpha[k] - beta);
        }
        double dphi0 = 0;
        for (size_t i = 0; i < n; ++i) {
            d[i] = -q[i];
            dphi0 += d[i] * g[i];
        }
        if (dphi0 >= 0) {  // defective curvature history; restart from -g
            s_hist.clear();
            y_hist.clear();
            rho.clear();
            dphi0 = 0;
            for (size_t i = 0; i < n; ++i) {
                d[i] = -g[i];
                dphi0 -= g[i] * g[i];
            }
            if (dphi0 >= 0) {
                result.converged = true;
                result.reason = "flat_direction";
                break;
            }
        }

        double alpha_init = iter == 0 ? std::min(1.0, 1.0 / (1.0 + grad_max(g))) : 1.0;
        double f_next = 0;
        double step = wolfe_search(ev, x, d, f, dphi0, alpha_init, x_next, f_next, g_next);
        if (step == 0.0) {
            result.reason = "line_search_failed";
            break;
        }
        if (!std::isfinite(f_next) || !all_finite(g_next))
            throw DivergenceError("non-finite objective during descent",
                                  std::vector<double>(result.x_best), result.f_best);

        double sy = 0, snorm2 = 0, ynorm2 = 0;
        std::vector<double> s(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            s[i] = x_next[i] - x[i];
            y[i] = g_next[i] - g[i];
            sy += s[i] * y[i];
            snorm2 += s[i] * s[i];
            ynorm2 += y[i] * y[i];
        }
        if (sy > 1e-10 * std::sqrt(snorm2 * ynorm2)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho.push_back(1.0 / sy);
            if (s_hist.size() > m) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho.pop_front();
            }
        }
        x = x_next;
        g = g_next;
        f = f_next;
        track_best(result, x, f);
        result.iterations = iter + 1;
        result.trace.push_back({iter + 1, f, grad_rms(g)});
    }
    if (result.reason.empty()) result.reason = "max_iters";
    finalize(ev, result);
    return result;
}

OptimizationResult simulated_annealing(const ObjectiveHandle& obj,
                                       std::span<const double> x0,
                                       const OptimizerConfig& cfg) {
    cfg.validate();
    if (obj.dimension < 1) throw ArgumentError("objective dimension must be positive");
    if (x0.size() != static_cast<size_t>(obj.dimension))
        throw ArgumentError("x0 has wrong dimension");

    OptimizationResult result;
    Eval ev(obj, result);
    Rng rng(cfg.rng_seed);
    const size_t n = x0.size();

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> x_trial(n);
    double f = ev.value(x);
    if (!std::isfinite(f)) f = kInf;
    track_best(result, x, f);

    double t = cfg.sa.t_initial;
    int proposals = 0;
    result.trace.push_back({0, f, 0.0});

    while (proposals < cfg.max_iters) {
        double half_width = cfg.sa.step_scale * t / cfg.sa.t_initial;
        for (int s = 0; s < cfg.sa.steps_per_temperature && proposals < cfg.max_iters; ++s) {
            for (size_t i = 0; i < n; ++i)
                x_trial[i] = x[i] + rng.uniform(-half_width, half_width);
            double f_trial = ev.value(x_trial);
            ++proposals;
            if (!std::isfinite(f_trial)) continue;  // rejected, still counted
            double delta = f_trial - f;
            if (delta <= 0 || rng.u01() < std::exp(-delta / t)) {
                x.swap(x_trial);
                f = f_trial;
                track_best(result, x, f);
            }
        }
        t *= cfg.sa.cooling;
        result.trace.push_back({proposals, f, 0.0});
    }
    result.iterations = proposals;
    result.converged = true;
    result.reason = "schedule_complete";
    finalize(ev, result);
    return result;
}

OptimizationResult sdcg_sa_sdcg(const ObjectiveHandle& obj, std::span<const double> x0,
                                const OptimizerConfig& cfg) {
    require_gradient(obj);
    cfg.validate();

    // Hand off when grad RMS improved by less than 1% over the last 10
    // iterations.
    StallStop stall = [](const std::vector<TracePoint>& trace) {
        if (trace.size() < 11) return false;
        double before = trace[trace.size() - 11].grad_rms;
        double now = trace.back().grad_rms;
        return before > 0 && (before - now) < 0.01 * before;
    };

    OptimizationResult total;
    auto absorb = [&total](const OptimizationResult& r) {
        total.function_evals += r.function_evals;
        total.gradient_evals += r.gradient_evals;
        int base = total.iterations;
        for (const auto& t : r.trace)
            total.trace.push_back({base + t.iteration, t.f, t.grad_rms});
        total.iterations += r.iterations;
        if (r.f_best < total.f_best) {
            total.f_best = r.f_best;
            total.x_best = r.x_best;
        }
    };

    OptimizationResult sd1 = gradient_loop(obj, x0, cfg, DirectionRule::steepest, stall);
    absorb(sd1);
    OptimizationResult cg1 =
        gradient_loop(obj, sd1.x_best, cfg, DirectionRule::polak_ribiere, stall);
    absorb(cg1);
    total.stage_best.push_back(total.f_best);

    OptimizationResult sa = simulated_annealing(obj, total.x_best, cfg);
    absorb(sa);
    total.stage_best.push_back(total.f_best);

    OptimizationResult sd2 =
        gradient_loop(obj, total.x_best, cfg, DirectionRule::steepest, stall);
    absorb(sd2);
    OptimizationResult cg2 =
        gradient_loop(obj, sd2.x_best, cfg, DirectionRule::polak_ribiere, nullptr);
    absorb(cg2);
    total.stage_best.push_back(total.f_best);

    total.converged = cg2.converged;
    total.reason = cg2.reason;
    // f_best/x_best already re-evaluated by each stage.
    return total;
}

OptimizationResult saec(const ObjectiveHandle& obj, const OptimizerConfig& cfg,
                        std::span<const double> lo, std::span<const double> hi) {
    cfg.validate();
    if (obj.dimension < 1) throw ArgumentError("objective dimension must be positive");
    const size_t n = static_cast<size_t>(obj.dimension);

    std::vector<double> lo_v(lo.begin(), lo.end());
    std::vector<double> hi_v(hi.begin(), hi.end());
    if (lo_v.empty() && hi_v.empty()) {
        lo_v.assign(n, -5.0);
        hi_v.assign(n, 5.0);
    }
    if (lo_v.size() != n || hi_v.size() != n)
        throw ArgumentError("search box has wrong dimension");
    for (size_t i = 0; i < n; ++i)
        if (!(lo_v[i] < hi_v[i]))
            throw ArgumentError("search box is empty or degenerate");

    OptimizationResult result;
    Eval ev(obj, result);
    Rng rng(cfg.rng_seed);

    const int pop_size = cfg.saec.population_size;
    const int n_parents = std::clamp(
        static_cast<int>(std::lround(cfg.saec.parent_fraction * pop_size)), 1, pop_size);
    const int generations = cfg.saec.generations;
    // Mutation and annealing scales decay geometrically to 1e-6 of their
    // starting size across the run; the tail generations polish.
    const double shrink = std::pow(1e-6, 1.0 / generations);

    struct Individual {
        std::vector<double> x;
        double f = kInf;
    };
    auto clamp_to_box = [&](std::vector<double>& x) {
        for (size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo_v[i], hi_v[i]);
    };

    std::vector<Individual> pop(pop_size);
    for (auto& ind : pop) {
        ind.x.resize(n);
        for (size_t i = 0; i < n; ++i) ind.x[i] = rng.uniform(lo_v[i], hi_v[i]);
        ind.f = ev.value(ind.x);
        track_best(result, ind.x, ind.f);
    }
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) { return a.f < b.f; });
    result.trace.push_back({0, result.f_best, 0.0});

    std::vector<double> half_width(n);
    for (size_t i = 0; i < n; ++i) half_width[i] = 0.5 * (hi_v[i] - lo_v[i]);

    // Rank selection: parent r drawn with weight (n_parents - r); ties were
    // resolved by the stable sort (lower index wins).
    auto pick_parent = [&]() {
        double total_w = 0.5 * n_parents * (n_parents + 1);
        double u = rng.u01() * total_w;
        double acc = 0;
        for (int r = 0; r < n_parents; ++r) {
            acc += n_parents - r;
            if (u < acc) return r;
        }
        return n_parents - 1;
    };

    std::vector<double> trial(n);
    for (int gen = 0; gen < generations; ++gen) {
        double scale = cfg.saec.mutation_scale * std::pow(shrink, gen);
        double t_local = cfg.sa.t_initial * std::pow(shrink, 2.0 * gen);
        std::vector<Individual> offspring(pop_size);
        for (int k = 0; k < pop_size; ++k) {
            const Individual& parent = pop[pick_parent()];
            Individual child;
            child.x.resize(n);
            for (size_t i = 0; i < n; ++i)
                child.x[i] = parent.x[i] + rng.normal() * scale * half_width[i];
            clamp_to_box(child.x);
            child.f = ev.value(child.x);

            // Short annealing polish of the offspring.
            double t = t_local;
            for (int l = 0; l < cfg.sa.steps_per_temperature; ++l) {
                double w = 0.5 * scale;
                for (size_t i = 0; i < n; ++i)
                    trial[i] = child.x[i] + rng.uniform(-w, w) * half_width[i];
                clamp_to_box(trial);
                double f_t = ev.value(trial);
                if (std::isfinite(f_t)) {
                    double delta = f_t - child.f;
                    if (delta <= 0 || (t > 0 && rng.u01() < std::exp(-delta / t))) {
                        child.x = trial;
                        child.f = f_t;
                    }
                }
                t *= cfg.sa.cooling;
            }
            track_best(result, child.x, child.f);
            offspring[k] = std::move(child);
        }
        // Elitist (mu + lambda) survival.
        for (auto& o : offspring) pop.push_back(std::move(o));
        std::stable_sort(pop.begin(), pop.end(),
                         [](const Individual& a, const Individual& b) { return a.f < b.f; });
        pop.resize(pop_size);
        result.trace.push_back({gen + 1, result.f_best, 0.0});
    }
    result.iterations = generations;
    result.converged = true;
    result.reason = "generations_complete";
    finalize(ev, result);
    return result;
}

std::vector<double> finite_diff_gradient(const ObjectiveHandle& obj,
                                         std::span<const double> x, double step) {
    if (!(step > 0)) throw ArgumentError("finite difference step must be positive");
    if (x.size() != static_cast<size_t>(obj.dimension))
        throw ArgumentError("x has wrong dimension");
    std::vector<double> xt(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        xt[i] = x[i] + step;
        double fp = obj.value(xt);
        xt[i] = x[i] - step;
        double fm = obj.value(xt);
        xt[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw EvaluationError("non-finite evaluation at coordinate " +
                                  std::to_string(i));
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

OptimizerConfig parse_optimizer_config(const std::string& text, OptimizerConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(line).empty())
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "grad_rms_tol") base.grad_rms_tol = std::stod(value);
            else if (key == "gmax_tol") base.gmax_tol = std::stod(value);
            else if (key == "max_iters") base.max_iters = std::stoi(value);
            else if (key == "lbfgs_memory") base.lbfgs_memory = std::stoi(value);
            else if (key == "rng_seed") base.rng_seed = std::stoull(value);
            else if (key == "sa.t_initial") base.sa.t_initial = std::stod(value);
            else if (key == "sa.cooling") base.sa.cooling = std::stod(value);
            else if (key == "sa.steps_per_temperature")
                base.sa.steps_per_temperature = std::stoi(value);
            else if (key == "sa.step_scale") base.sa.step_scale = std::stod(value);
            else if (key == "saec.population_size")
                base.saec.population_size = std::stoi(value);
            else if (key == "saec.parent_fraction")
                base.saec.parent_fraction = std::stod(value);
            else if (key == "saec.mutation_scale")
                base.saec.mutation_scale = std::stod(value);
            else if (key == "saec.generations") base.saec.generations = std::stoi(value);
            else
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ParseError("config line " + std::to_string(line_no) +
                             ": bad value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw ParseError("config line " + std::to_string(line_no) +
                             ": bad value '" + value + "'");
        }
    }
    base.validate();
    return base;
}

OptimizationResult run_optimizer(const std::string& name, const ObjectiveHandle& obj,
                                 std::span<const double> x0, const OptimizerConfig& cfg,
                                 std::span<const double> lo, std::span<const double> hi) {
    if (name == "sd") return steepest_descent(obj, x0, cfg);
    if (name == "cg") return conjugate_gradient(obj, x0, cfg);
    if (name == "lbfgs") return lbfgs(obj, x0, cfg);
    if (name == "sa") return simulated_annealing(obj, x0, cfg);
    if (name == "sdcg-sa-sdcg") return sdcg_sa_sdcg(obj, x0, cfg);
    if (name == "saec") return saec(obj, cfg, lo, hi);
    throw ArgumentError("unknown optimizer '" + name + "'");
}

bool is_known_optimizer(const std::string& name) {
    return name == "sd" || name == "cg" || name == "lbfgs" || name == "sa" ||
           name == "sdcg-sa-sdcg" || name == "saec";
}

}  // namespace zipform
