// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "zipform/errors.hpp"
#include "zipform/fibril.hpp"
#include "zipform/geomopt.hpp"
#include "zipform/mutator.hpp"
#include "zipform/objectives.hpp"
#include "zipform/optimizers.hpp"
#include "zipform/potentials.hpp"
#include "zipform/structure.hpp"
#include "zipform/transforms.hpp"

using namespace zipform;

namespace {

const std::string kFixtures = ZIPFORM_FIXTURE_DIR;
int g_failures = 0;

void criterion(int number, const std::string& what, const std::function<bool()>& body) {
    bool ok = false;
    std::string detail;
    try {
        ok = body();
    } catch (const std::exception& e) {
        detail = std::string(" (") + e.what() + ")";
    }
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %2d: %s%s\n", ok ? "PASS" : "FAIL", number,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
}

bool expect(bool cond, const char* what) {
    if (!cond) std::printf("    failed: %s\n", what);
    return cond;
}

OptimizationResult solve_model(int model, const std::string& optimizer,
                               std::uint64_t seed) {
    DistanceGeometryProblem p = model_problem(model);
    OptimizerConfig cfg;
    cfg.rng_seed = seed;
    std::vector<double> lo, hi;
    p.search_box(lo, hi);
    return run_optimizer(optimizer, make_dg_objective(p), p.initial, cfg, lo, hi);
}

}  // namespace

int main() {
    // 1. Model 1: every solver reaches <= 1e-8 from the published initial
    //    point with all three contacts within 1e-3 A of 3.4; the published
    //    optimum itself evaluates to <= 1e-2.
    criterion(1, "model 1 solved by lbfgs, sdcg-sa-sdcg and saec", [] {
        DistanceGeometryProblem p = model_problem(1);
        bool ok = true;
        for (const std::string opt : {"lbfgs", "sdcg-sa-sdcg", "saec"}) {
            OptimizationResult r = solve_model(1, opt, 7);
            ok &= expect(r.f_best <= 1e-8, (opt + " objective <= 1e-8").c_str());
            for (double d : p.edge_distances(r.x_best))
                ok &= expect(std::fabs(d - 3.4) <= 1e-3,
                             (opt + " contact within 1e-3 of 3.4").c_str());
        }
        double at_published = dg_objective(p, model_reference_optimum(1), {});
        ok &= expect(at_published <= 1e-2, "published optimum evaluates <= 1e-2");
        return ok;
    });

    // 2. Model 1 initial distances match the reported 7.82, 8.36, 9.04 A.
    criterion(2, "model 1 initial contact distances", [] {
        DistanceGeometryProblem p = model_problem(1);
        auto d = p.edge_distances(p.initial);
        return expect(std::fabs(d[0] - 7.82) <= 0.01, "edge 1 = 7.82 +- 0.01") &&
               expect(std::fabs(d[1] - 8.36) <= 0.01, "edge 2 = 8.36 +- 0.01") &&
               expect(std::fabs(d[2] - 9.04) <= 0.01, "edge 3 = 9.04 +- 0.01");
    });

    // 3. Model 2: anchor gap 6.85 +- 0.01 > 6.8 flagged infeasible; solvers
    //    match or beat the published optimum.
    criterion(3, "model 2 infeasibility and solver quality", [] {
        DistanceGeometryProblem p = model_problem(2);
        double gap = distance(p.anchors[0], p.anchors[1]);
        bool ok = expect(std::fabs(gap - 6.85) <= 0.01, "anchor gap = 6.85 +- 0.01");
        ok &= expect(gap > 6.8, "anchor gap > 6.8");
        ok &= expect(!p.infeasible_pairs().empty(), "infeasibility flagged");
        double published = dg_objective(p, model_reference_optimum(2), {});
        for (const std::string opt : {"lbfgs", "sdcg-sa-sdcg", "saec"}) {
            OptimizationResult r = solve_model(2, opt, 7);
            ok &= expect(r.f_best <= published,
                         (opt + " objective <= published-optimum value").c_str());
        }
        return ok;
    });

    // 4. Model 3: solver in [2.0, 2.4], no worse than the published optimum,
    //    and the two infeasible contacts equalize to within 0.02 A.
    criterion(4, "model 3 compromise minimum", [] {
        DistanceGeometryProblem p = model_problem(3);
        double published = dg_objective(p, model_reference_optimum(3), {});
        OptimizationResult r = solve_model(3, "lbfgs", 0);
        auto d = p.edge_distances(r.x_best);
        return expect(r.f_best >= 2.0 && r.f_best <= 2.4, "objective in [2.0, 2.4]") &&
               expect(r.f_best <= published, "objective <= published-optimum value") &&
               expect(std::fabs(d[0] - d[1]) <= 0.02,
                      "infeasible-edge distances equalize within 0.02 A");
    });

    // 5. Axis fitting: the two routes agree; the objective is scale
    //    invariant; agreement with the reference directions is reported and
    //    only warned about if below 0.99.
    criterion(5, "axis-fit route agreement and scale invariance", [] {
        bool ok = true;
        for (char strand : {'A', 'B'}) {
            AxisFitProblem p = strand_axis_data(strand);
            AxisRouteResult r = fit_axis_routes(p, strand);
            ok &= expect(r.direction_cosine >= 1.0 - 1e-6,
                         "route direction cosine >= 1 - 1e-6");
            std::mt19937_64 eng(strand);
            for (int t = 0; t < 5; ++t) {
                Vec3 w{(eng() >> 11) * 0x1.0p-53 * 4 - 2,
                       (eng() >> 11) * 0x1.0p-53 * 4 - 2,
                       (eng() >> 11) * 0x1.0p-53 * 4 - 2};
                if (w.norm() < 0.3) continue;
                double f = axis_objective(p, w);
                for (double c : {-1.0, 0.5, 10.0}) {
                    double fc = axis_objective(p, w * c);
                    ok &= expect(std::fabs(fc - f) <= 1e-12 * std::max(1.0, std::fabs(f)),
                                 "scale invariance to 1e-12");
                }
            }
            double ref_cos =
                std::fabs(strand_reference_direction(strand).normalized().dot(
                    r.eigen_direction));
            std::printf("    strand %c: reference direction cosine %.10f\n", strand,
                        ref_cos);
            if (ref_cos < 0.99)
                std::printf("    warning: strand %c below the 0.99 target "
                            "(reference normalization is unexplained)\n", strand);
        }
        return ok;
    });

    // 6. Transforms: exact rotation algebra, bit-exact stacking offsets,
    //    exact serialization round-trip of the shipped constants.
    criterion(6, "transform algebra, stacking offsets, serialization", [] {
        bool ok = true;
        for (const AffineTransform& t :
             {template_sheet_transform(), optimized_sheet_transform()}) {
            ok &= expect(t.rotation().transpose() * t.rotation() == Mat3::identity(),
                         "R^T R = I exactly");
            ok &= expect(t.rotation() * t.rotation() == Mat3::identity(),
                         "R^2 = I exactly");
        }
        Structure tmpl = parse_pdb_file(kFixtures + "/template_ab.pdb");
        AffineTransform t0 = template_sheet_transform();
        Structure core;
        core.chains = {*tmpl.find_chain('A'), *tmpl.find_chain('B'),
                       apply(t0, *tmpl.find_chain('A'), 'G'),
                       apply(t0, *tmpl.find_chain('B'), 'H')};
        Structure fibril = assemble_fibril(core);
        auto offsets_exact = [&](char from, char to, double dz) {
            const Chain* src = fibril.find_chain(from);
            const Chain* dst = fibril.find_chain(to);
            for (size_t r = 0; r < src->residues.size(); ++r)
                for (size_t a = 0; a < src->residues[r].atoms.size(); ++a) {
                    const Vec3& p = src->residues[r].atoms[a].pos;
                    const Vec3& q = dst->residues[r].atoms[a].pos;
                    if (q.x != p.x || q.y != p.y || q.z != p.z + dz) return false;
                }
            return true;
        };
        ok &= expect(offsets_exact('A', 'C', 9.59) && offsets_exact('B', 'D', 9.59) &&
                         offsets_exact('G', 'K', 9.59) && offsets_exact('H', 'L', 9.59),
                     "upward stack offsets bit-exact");
        ok &= expect(offsets_exact('A', 'E', -9.59) && offsets_exact('B', 'F', -9.59) &&
                         offsets_exact('G', 'I', -9.59) && offsets_exact('H', 'J', -9.59),
                     "downward stack offsets bit-exact");
        AffineTransform back = from_row_major_text(to_row_major_text(
            optimized_sheet_transform()));
        ok &= expect(back.rotation() == optimized_sheet_transform().rotation() &&
                         back.translation() == optimized_sheet_transform().translation(),
                     "serialized constants round-trip exactly");
        return ok;
    });

    // 7. Potentials: LBFGS dimer at the well bottom; cluster minima for
    //    N = 3, 4 via the staged hybrid, cross-checked by a 200-start
    //    random-restart local-search oracle.
    criterion(7, "LJ dimer and cluster global minima", [] {
        bool ok = true;
        OptimizerConfig cfg;
        std::vector<double> dimer0 = {0, 0, 0, 1.5, 0, 0};
        OptimizationResult dimer = lbfgs(make_lj_cluster_objective(2), dimer0, cfg);
        Vec3 a{dimer.x_best[0], dimer.x_best[1], dimer.x_best[2]};
        Vec3 b{dimer.x_best[3], dimer.x_best[4], dimer.x_best[5]};
        ok &= expect(std::fabs(dimer.f_best + 1.0) <= 1e-6, "dimer energy -1 +- 1e-6");
        ok &= expect(std::fabs(distance(a, b) - std::pow(2.0, 1.0 / 6.0)) <= 1e-6,
                     "dimer separation 2^(1/6) +- 1e-6");

        const double targets[2] = {-3.0, -6.0};
        for (int n = 3; n <= 4; ++n) {
            OptimizerConfig scfg;
            scfg.rng_seed = 1;
            OptimizationResult staged = sdcg_sa_sdcg(
                make_lj_cluster_objective(n), seeded_cluster_start(n, 1), scfg);
            ok &= expect(std::fabs(staged.f_best - targets[n - 3]) <= 1e-3,
                         "staged hybrid reaches the known minimum within 1e-3");

            // independent oracle: 200 random restarts of a local search
            std::mt19937_64 eng(n);
            auto u01 = [&] { return (eng() >> 11) * 0x1.0p-53; };
            double oracle = 0.0;
            OptimizerConfig ocfg;
            ocfg.max_iters = 2000;
            for (int s = 0; s < 200; ++s) {
                std::vector<double> x(3 * n);
                for (auto& xi : x) xi = 2.4 * u01();
                try {
                    OptimizationResult r = lbfgs(make_lj_cluster_objective(n), x, ocfg);
                    oracle = std::min(oracle, r.f_best);
                } catch (const OptimizeError&) {
                }
            }
            ok &= expect(std::fabs(oracle - targets[n - 3]) <= 1e-3,
                         "200-start oracle agrees with the known minimum");
            ok &= expect(staged.f_best <= oracle + 1e-3, "staged hybrid matches oracle");
        }
        return ok;
    });

    // 8. Every analytic gradient matches central finite differences to
    //    relative error <= 1e-6 over 20 seeded random points.
    criterion(8, "analytic gradients vs central differences", [] {
        bool ok = true;
        for (const char* name :
             {"lj-cluster", "dg-model1", "dg-model2", "dg-model3", "axis-fit"}) {
            GradCheckResult r = check_gradient(name, 20, 42);
            std::printf("    %-10s worst relative error %.3e\n", name,
                        r.worst_rel_error);
            ok &= expect(r.ok, "gradient check <= 1e-6");
        }
        return ok;
    });

    // 9. Structure IO: parse -> write -> parse is a fixed point on the
    //    bundled 12-chain fixture at 3-decimal fidelity.
    criterion(9, "PDB round-trip fixed point on the 12-chain fixture", [] {
        Structure s1 = parse_pdb_file(kFixtures + "/zipper12.pdb");
        std::string w1 = write_pdb_string(s1);
        Structure s2 = parse_pdb(w1);
        std::string w2 = write_pdb_string(s2);
        bool ok = expect(s1.chains.size() == 12, "12 chains");
        ok &= expect(w1 == w2, "write(parse(write(parse(file)))) is a fixed point");
        ok &= expect(s1.atom_count() == s2.atom_count(), "atom count preserved");
        for (size_t c = 0; c < s1.chains.size() && ok; ++c)
            for (size_t r = 0; r < s1.chains[c].residues.size() && ok; ++r) {
                const auto& ra = s1.chains[c].residues[r];
                const auto& rb = s2.chains[c].residues[r];
                for (size_t i = 0; i < ra.atoms.size() && ok; ++i)
                    ok &= expect(ra.atoms[i].pos == rb.atoms[i].pos,
                                 "coordinates identical at 3 decimals");
            }
        return ok;
    });

    // 10. Determinism: every stochastic path reproduces byte-identical
    //     traces from identical seeds.
    criterion(10, "stochastic paths are byte-reproducible", [] {
        bool ok = true;
        OptimizerConfig cfg;
        cfg.rng_seed = 123;
        std::vector<double> x0 = {1.0, -0.7};
        OptimizationResult sa1 = simulated_annealing(make_sphere_objective(2), x0, cfg);
        OptimizationResult sa2 = simulated_annealing(make_sphere_objective(2), x0, cfg);
        ok &= expect(trace_csv(sa1) == trace_csv(sa2) && sa1.x_best == sa2.x_best,
                     "simulated annealing");

        OptimizationResult ec1 = solve_model(1, "saec", 7);
        OptimizationResult ec2 = solve_model(1, "saec", 7);
        ok &= expect(trace_csv(ec1) == trace_csv(ec2) && ec1.x_best == ec2.x_best,
                     "saec");

        OptimizerConfig scfg;
        scfg.rng_seed = 1;
        std::vector<double> c0 = seeded_cluster_start(4, 1);
        OptimizationResult h1 = sdcg_sa_sdcg(make_lj_cluster_objective(4), c0, scfg);
        OptimizationResult h2 = sdcg_sa_sdcg(make_lj_cluster_objective(4), c0, scfg);
        ok &= expect(trace_csv(h1) == trace_csv(h2) && h1.x_best == h2.x_best,
                     "sdcg-sa-sdcg");
        return ok;
    });

    if (g_failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
