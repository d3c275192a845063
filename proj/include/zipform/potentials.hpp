// Pair potentials (LJ 12-6 in epsilon/sigma and A/B forms, 12-10
// hydrogen-bond form) and the reduced-unit LJ cluster objective.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace zipform {

struct LJParams {
    double epsilon;  // well depth
    double sigma;    // atom diameter, angstroms
};

struct LJABParams {
    double a;  // repulsion coefficient, energy * A^12
    double b;  // attraction coefficient, energy * A^6
};

struct HBParams {
    double c;  // repulsion coefficient, energy * A^12
    double d;  // attraction coefficient, energy * A^10
};

// 4 eps [(sigma/r)^12 - (sigma/r)^6]; throws DomainError for r <= 0 and
// ArgumentError for non-positive parameters.
double lj_pair(double r, const LJParams& p);

// a/r^12 - b/r^6; equals lj_pair under a = 4 eps sigma^12, b = 4 eps sigma^6.
double lj_pair_ab(double r, const LJABParams& p);

// c/r^12 - d/r^10.
double hb_pair(double r, const HBParams& p);

// Reduced-unit (epsilon = sigma = 1) cluster energy over all pairs,
//   f(x) = 4 sum_{i<j} (1/t^6 - 1/t^3),  t = |xi - xj|^2,
// with its exact analytic gradient. x holds 3*n_atoms coordinates.
// Throws EvaluationError when two atoms coincide.
double lj_cluster_value_grad(std::span<const double> x, int n_atoms,
                             std::span<double> grad);
double lj_cluster_value(std::span<const double> x, int n_atoms);

// Monotone r grid with lj_pair values, for plotting.
std::vector<std::pair<double, double>> lj_curve(const LJParams& p, double r_min,
                                                double r_max, int samples);

// CSV with header "r,V", 9 significant digits.
std::string lj_curve_csv(std::span<const std::pair<double, double>> curve);

}  // namespace zipform
