#include "zipform/objectives.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "zipform/errors.hpp"
#include "zipform/potentials.hpp"

namespace zipform {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ObjectiveHandle make_lj_cluster_objective(int n_atoms) {
    if (n_atoms < 2) throw ArgumentError("LJ cluster needs at least 2 atoms");
    ObjectiveHandle h;
    h.dimension = 3 * n_atoms;
    h.has_gradient = true;
    h.eval = [n_atoms](std::span<const double> x, std::span<double> grad) {
        try {
            return lj_cluster_value_grad(x, n_atoms, grad);
        } catch (const EvaluationError&) {
            for (auto& g : grad) g = kInf;
            return kInf;
        }
    };
    return h;
}

ObjectiveHandle make_dg_objective(DistanceGeometryProblem problem) {
    problem.validate();
    auto p = std::make_shared<DistanceGeometryProblem>(std::move(problem));
    ObjectiveHandle h;
    h.dimension = 3 * p->n_sensors;
    h.has_gradient = true;
    h.eval = [p](std::span<const double> x, std::span<double> grad) {
        return dg_objective(*p, x, grad);
    };
    return h;
}

ObjectiveHandle make_axis_objective(AxisFitProblem problem) {
    auto p = std::make_shared<AxisFitProblem>(std::move(problem));
    ObjectiveHandle h;
    h.dimension = 3;
    h.has_gradient = true;
    h.eval = [p](std::span<const double> x, std::span<double> grad) {
        Vec3 w{x[0], x[1], x[2]};
        try {
            if (grad.empty()) return axis_objective(*p, w);
            Vec3 g;
            double f = axis_objective(*p, w, &g);
            grad[0] = g.x;
            grad[1] = g.y;
            grad[2] = g.z;
            return f;
        } catch (const DomainError&) {
            for (auto& g : grad) g = kInf;
            return kInf;
        }
    };
    return h;
}

ObjectiveHandle make_sphere_objective(int n) {
    ObjectiveHandle h;
    h.dimension = n;
    h.has_gradient = true;
    h.eval = [](std::span<const double> x, std::span<double> grad) {
        double f = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            f += x[i] * x[i];
            if (!grad.empty()) grad[i] = 2.0 * x[i];
        }
        return f;
    };
    return h;
}

ObjectiveHandle make_rosenbrock_objective() {
    ObjectiveHandle h;
    h.dimension = 2;
    h.has_gradient = true;
    h.eval = [](std::span<const double> x, std::span<double> grad) {
        double a = 1.0 - x[0];
        double b = x[1] - x[0] * x[0];
        if (!grad.empty()) {
            grad[0] = -2.0 * a - 400.0 * x[0] * b;
            grad[1] = 200.0 * b;
        }
        return a * a + 100.0 * b * b;
    };
    return h;
}

ObjectiveHandle make_quadratic_objective(std::vector<double> diag) {
    auto c = std::make_shared<std::vector<double>>(std::move(diag));
    ObjectiveHandle h;
    h.dimension = static_cast<int>(c->size());
    h.has_gradient = true;
    h.eval = [c](std::span<const double> x, std::span<double> grad) {
        double f = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            f += 0.5 * (*c)[i] * x[i] * x[i];
            if (!grad.empty()) grad[i] = (*c)[i] * x[i];
        }
        return f;
    };
    return h;
}

namespace {

double u01(std::mt19937_64& eng) { return (eng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& eng, double a, double b) { return a + (b - a) * u01(eng); }

// Jittered cubic grid keeps pair separations comfortably away from the
// singularity, where finite differences would be meaningless.
std::vector<double> random_cluster(std::mt19937_64& eng, int n_atoms) {
    int side = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n_atoms))));
    std::vector<double> x(3 * n_atoms);
    for (int i = 0; i < n_atoms; ++i) {
        int gx = i % side, gy = (i / side) % side, gz = i / (side * side);
        x[3 * i] = 1.2 * gx + uniform(eng, -0.2, 0.2);
        x[3 * i + 1] = 1.2 * gy + uniform(eng, -0.2, 0.2);
        x[3 * i + 2] = 1.2 * gz + uniform(eng, -0.2, 0.2);
    }
    return x;
}

struct Trial {
    ObjectiveHandle obj;
    std::vector<double> x;
};

Trial make_trial(const std::string& name, std::mt19937_64& eng) {
    if (name == "lj-cluster") {
        int n_atoms = 3 + static_cast<int>(eng() % 6);  // N in 3..8
        return {make_lj_cluster_objective(n_atoms), random_cluster(eng, n_atoms)};
    }
    if (name == "dg-model1" || name == "dg-model2" || name == "dg-model3") {
        int model = name.back() - '0';
        auto p = model_problem(model);
        std::vector<double> x = p.initial;
        for (auto& xi : x) xi += uniform(eng, -2.0, 2.0);
        return {make_dg_objective(std::move(p)), std::move(x)};
    }
    if (name == "axis-fit") {
        std::vector<double> w(3);
        do {
            for (auto& wi : w) wi = uniform(eng, -3.0, 3.0);
        } while (w[0] * w[0] + w[1] * w[1] + w[2] * w[2] < 0.25);
        return {make_axis_objective(strand_axis_data('A')), std::move(w)};
    }
    if (name == "sphere") {
        std::vector<double> x(6);
        for (auto& xi : x) xi = uniform(eng, -3.0, 3.0);
        return {make_sphere_objective(6), std::move(x)};
    }
    if (name == "rosenbrock") {
        std::vector<double> x(2);
        for (auto& xi : x) xi = uniform(eng, -2.0, 2.0);
        return {make_rosenbrock_objective(), std::move(x)};
    }
    throw ArgumentError("unknown gradient-check objective '" + name + "'");
}

}  // namespace

GradCheckResult check_gradient(const std::string& objective, int trials,
                               std::uint64_t seed, double step, double tol) {
    if (trials < 1) throw ArgumentError("check_gradient needs at least one trial");
    std::mt19937_64 eng(seed);
    GradCheckResult result;
    result.objective = objective;
    result.trials = trials;
    for (int t = 0; t < trials; ++t) {
        Trial trial = make_trial(objective, eng);
        std::vector<double> analytic(trial.obj.dimension);
        trial.obj.eval(trial.x, analytic);
        std::vector<double> fd = finite_diff_gradient(trial.obj, trial.x, step);
        double diff2 = 0, norm2 = 0;
        for (size_t i = 0; i < analytic.size(); ++i) {
            double d = analytic[i] - fd[i];
            diff2 += d * d;
            norm2 += analytic[i] * analytic[i];
        }
        double rel = std::sqrt(diff2) / std::max(1.0, std::sqrt(norm2));
        result.worst_rel_error = std::max(result.worst_rel_error, rel);
    }
    result.ok = result.worst_rel_error <= tol;
    return result;
}

std::vector<std::string> grad_check_objectives() {
    return {"lj-cluster", "dg-model1", "dg-model2", "dg-model3",
            "axis-fit", "sphere", "rosenbrock"};
}

std::vector<double> seeded_cluster_start(int n_atoms, std::uint64_t seed) {
    if (n_atoms < 2) throw ArgumentError("LJ cluster needs at least 2 atoms");
    std::mt19937_64 eng(seed);
    return random_cluster(eng, n_atoms);
}

}  // namespace zipform
