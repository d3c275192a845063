// Adapters exposing the library's energy and least-squares functions
// through the ObjectiveHandle contract, plus standard test functions and
// the finite-difference gradient-check harness.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zipform/geomopt.hpp"
#include "zipform/optimizers.hpp"

namespace zipform {

// Reduced-unit LJ cluster over 3*n_atoms coordinates; coincident atoms
// evaluate to +inf so stochastic optimizers can reject the proposal.
ObjectiveHandle make_lj_cluster_objective(int n_atoms);

ObjectiveHandle make_dg_objective(DistanceGeometryProblem problem);

// 3-variable axis direction objective; +inf at w = 0.
ObjectiveHandle make_axis_objective(AxisFitProblem problem);

ObjectiveHandle make_sphere_objective(int n);
ObjectiveHandle make_rosenbrock_objective();
// Diagonal convex quadratic 1/2 sum c_i x_i^2.
ObjectiveHandle make_quadratic_objective(std::vector<double> diag);

struct GradCheckResult {
    std::string objective;
    int trials = 0;
    double worst_rel_error = 0.0;
    bool ok = false;
};

// Seeded random points for the named objective ("lj-cluster", "dg-model1",
// "dg-model2", "dg-model3", "axis-fit", "sphere", "rosenbrock"); compares
// the analytic gradient against central differences. Relative error is
// ||g_a - g_fd|| / max(1, ||g_a||).
GradCheckResult check_gradient(const std::string& objective, int trials,
                               std::uint64_t seed, double step = 1e-6,
                               double tol = 1e-6);

std::vector<std::string> grad_check_objectives();

// Deterministic jittered-grid starting coordinates for an LJ cluster run.
std::vector<double> seeded_cluster_start(int n_atoms, std::uint64_t seed);

}  // namespace zipform
