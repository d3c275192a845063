#include "zipform/potentials.hpp"

#include <cmath>
#include <cstdio>

#include "zipform/errors.hpp"

namespace zipform {

namespace {

void require_positive_r(double r) {
    if (!(r > 0.0)) throw DomainError("pair potential needs r > 0");
}

}  // namespace

double lj_pair(double r, const LJParams& p) {
    if (!(p.epsilon > 0.0) || !(p.sigma > 0.0))
        throw ArgumentError("LJ parameters must be positive");
    require_positive_r(r);
    double sr6 = std::pow(p.sigma / r, 6);
    return 4.0 * p.epsilon * (sr6 * sr6 - sr6);
}

double lj_pair_ab(double r, const LJABParams& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0))
        throw ArgumentError("LJ A/B parameters must be positive");
    require_positive_r(r);
    double r6 = std::pow(r, 6);
    return p.a / (r6 * r6) - p.b / r6;
}

double hb_pair(double r, const HBParams& p) {
    if (!(p.c > 0.0) || !(p.d > 0.0))
        throw ArgumentError("HB parameters must be positive");
    require_positive_r(r);
    double r2 = r * r;
    double r10 = r2 * r2 * r2 * r2 * r2;
    return p.c / (r10 * r2) - p.d / r10;
}

double lj_cluster_value_grad(std::span<const double> x, int n_atoms,
                             std::span<double> grad) {
    if (n_atoms < 2) throw ArgumentError("LJ cluster needs at least 2 atoms");
    if (x.size() != static_cast<size_t>(3 * n_atoms))
        throw ArgumentError("LJ cluster coordinate vector has wrong length");
    bool want_grad = !grad.empty();
    if (want_grad && grad.size() != x.size())
        throw ArgumentError("LJ cluster gradient vector has wrong length");
    if (want_grad)
        for (auto& g : grad) g = 0.0;

    double f = 0.0;
    for (int i = 1; i < n_atoms; ++i) {
        for (int j = 0; j < i; ++j) {
            double dx = x[3 * i] - x[3 * j];
            double dy = x[3 * i + 1] - x[3 * j + 1];
            double dz = x[3 * i + 2] - x[3 * j + 2];
            double t = dx * dx + dy * dy + dz * dz;  // squared distance
            if (t < 1e-18)
                throw EvaluationError("coincident atoms " + std::to_string(j) + " and " +
                                      std::to_string(i));
            double it3 = 1.0 / (t * t * t);
            f += 4.0 * (it3 * it3 - it3);
            if (want_grad) {
                // d/dt 4(t^-6 - t^-3) = 4(-6 t^-7 + 3 t^-4); dt/dxi = 2(xi - xj)
                double df_dt = 4.0 * (3.0 * it3 - 6.0 * it3 * it3) / t;
                double gx = 2.0 * df_dt * dx;
                double gy = 2.0 * df_dt * dy;
                double gz = 2.0 * df_dt * dz;
                grad[3 * i] += gx;
                grad[3 * i + 1] += gy;
                grad[3 * i + 2] += gz;
                grad[3 * j] -= gx;
                grad[3 * j + 1] -= gy;
                grad[3 * j + 2] -= gz;
            }
        }
    }
    return f;
}

double lj_cluster_value(std::span<const double> x, int n_atoms) {
    return lj_cluster_value_grad(x, n_atoms, {});
}

std::vector<std::pair<double, double>> lj_curve(const LJParams& p, double r_min,
                                                double r_max, int samples) {
    if (!(0.0 < r_min && r_min < r_max))
        throw ArgumentError("lj_curve needs 0 < r_min < r_max");
    if (samples < 2) throw ArgumentError("lj_curve needs at least 2 samples");
    std::vector<std::pair<double, double>> out;
    out.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        double r = r_min + (r_max - r_min) * i / (samples - 1);
        out.emplace_back(r, lj_pair(r, p));
    }
    return out;
}

std::string lj_curve_csv(std::span<const std::pair<double, double>> curve) {
    std::string out = "r,V\n";
    char buf[64];
    for (const auto& [r, v] : curve) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", r, v);
        out += buf;
    }
    return out;
}

}  // namespace zipform
