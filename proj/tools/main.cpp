// zipform command-line interface: builds steric-zipper fibril models and
// exposes the solvers behind them for batch use.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zipform/errors.hpp"
#include "zipform/fibril.hpp"
#include "zipform/geomopt.hpp"
#include "zipform/objectives.hpp"
#include "zipform/optimizers.hpp"
#include "zipform/potentials.hpp"
#include "zipform/structure.hpp"
#include "zipform/transforms.hpp"

using nlohmann::json;
using namespace zipform;

namespace {

// Exit codes: 2 parse/usage, 3 optimize, 4 io/lookup, 5 network.
int fail(int code, const std::string& kind, const std::string& message) {
    json err = {{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return code;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json optimization_json(const OptimizationResult& r) {
    return {{"f_best", r.f_best},         {"iterations", r.iterations},
            {"function_evals", r.function_evals}, {"gradient_evals", r.gradient_evals},
            {"converged", r.converged},   {"reason", r.reason}};
}

struct BuildArgs {
    std::string template_path, fetch_id, recipe_path, optimizer, transform, cache_dir;
    std::string sequence, pose_path, pose_out, opt_config;
    int model = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_pdb, out_report, trace_path;
};

void cmd_build(const BuildArgs& args) {
    if (args.template_path.empty() == args.fetch_id.empty())
        throw ArgumentError("pass exactly one of --template PATH or --fetch ID");
    if (args.recipe_path.empty() == (args.model == 0))
        throw ArgumentError("pass exactly one of --model 1|2|3 or --recipe FILE");

    BuildRecipe recipe = args.recipe_path.empty()
                             ? BuildRecipe::builtin_model(args.model)
                             : recipe_from_json(read_file(args.recipe_path));
    if (!args.optimizer.empty()) recipe.optimizer = args.optimizer;
    if (!args.opt_config.empty())
        recipe.opt = parse_optimizer_config(read_file(args.opt_config), recipe.opt);
    if (args.seed_given) recipe.opt.rng_seed = args.seed;
    if (!args.sequence.empty()) recipe.target_sequence = args.sequence;
    if (!args.pose_path.empty()) recipe.pose_text = read_file(args.pose_path);
    if (!args.transform.empty()) {
        if (args.transform != "shipped" && args.transform != "derived")
            throw ArgumentError("--transform must be shipped or derived");
        recipe.transform_mode =
            args.transform == "shipped" ? TransformMode::shipped : TransformMode::derived;
    }

    std::filesystem::path template_file = args.template_path;
    if (!args.fetch_id.empty()) {
        std::filesystem::path cache = args.cache_dir.empty()
                                          ? default_cache_dir()
                                          : std::filesystem::path(args.cache_dir);
        template_file = fetch_template(args.fetch_id, cache);
    }
    Structure tmpl = parse_pdb_file(template_file);

    BuildOutput out = build_model(recipe, tmpl);
    Structure fibril = assemble_fibril(out.core);
    annotate_assembly(out.report, fibril);

    std::string pdb_path =
        args.out_pdb.empty() ? recipe.model_name + ".pdb" : args.out_pdb;
    std::string report_path =
        args.out_report.empty() ? recipe.model_name + "_report.json" : args.out_report;
    write_pdb_file(fibril, pdb_path);
    write_file(report_path, contact_report_to_json(out.report, &out.opt) + "\n");
    if (!args.trace_path.empty()) write_file(args.trace_path, trace_csv(out.opt));
    if (!args.pose_out.empty())
        write_file(args.pose_out, to_row_major_text(out.pose) + "\n");

    std::printf("%s: %d chains, objective %.6g -> %.6g (%s)\n",
                recipe.model_name.c_str(), static_cast<int>(fibril.chains.size()),
                out.report.objective_initial, out.report.objective_final,
                recipe.optimizer.c_str());
    for (const auto& e : out.report.edges)
        std::printf("  %s - %s: %.2f -> %.4f A (target %.2f, emitted %.2f)\n",
                    e.u.c_str(), e.v.c_str(), e.initial, e.optimized, e.target,
                    e.emitted);
    for (const auto& inf : out.report.infeasible)
        std::printf("  note: sensor s%d anchors %.3f A apart > %.1f; exact contact "
                    "infeasible by %.3f A\n",
                    inf.sensor, inf.anchor_gap, inf.target_sum, inf.margin);
    std::printf("  wrote %s and %s\n", pdb_path.c_str(), report_path.c_str());
}

struct SolveArgs {
    std::string problem_path, optimizer = "saec", trace_path, out_path;
    std::string problem_out, opt_config;
    int builtin = 0;
    std::uint64_t seed = 0;
};

void cmd_solve_dg(const SolveArgs& args) {
    if (args.problem_path.empty() == (args.builtin == 0))
        throw ArgumentError("pass exactly one of --problem FILE or --builtin 1|2|3");
    DistanceGeometryProblem problem = args.builtin
                                          ? model_problem(args.builtin)
                                          : dg_problem_from_json(read_file(args.problem_path));

    if (!args.problem_out.empty())
        write_file(args.problem_out, dg_problem_to_json(problem) + "\n");

    OptimizerConfig cfg;
    if (!args.opt_config.empty()) cfg = parse_optimizer_config(read_file(args.opt_config));
    cfg.rng_seed = args.seed;
    ObjectiveHandle obj = make_dg_objective(problem);
    std::vector<double> lo, hi;
    problem.search_box(lo, hi);
    OptimizationResult res =
        run_optimizer(args.optimizer, obj, problem.initial, cfg, lo, hi);

    json doc;
    doc["schema_version"] = 1;
    doc["problem"] = args.builtin ? ("builtin-model" + std::to_string(args.builtin))
                                  : args.problem_path;
    doc["optimizer"] = args.optimizer;
    doc["seed"] = args.seed;
    doc["solution"] = res.x_best;
    doc["objective"] = res.f_best;
    doc["objective_initial"] = dg_objective(problem, problem.initial, {});
    auto d_init = problem.edge_distances(problem.initial);
    auto d_best = problem.edge_distances(res.x_best);
    doc["edges"] = json::array();
    for (size_t e = 0; e < problem.edges.size(); ++e)
        doc["edges"].push_back({{"u", problem.edges[e].u.label()},
                                {"v", problem.edges[e].v.label()},
                                {"target", problem.edges[e].target},
                                {"initial", d_init[e]},
                                {"distance", d_best[e]},
                                {"deviation", d_best[e] - problem.edges[e].target}});
    doc["infeasible"] = json::array();
    for (const auto& inf : problem.infeasible_pairs())
        doc["infeasible"].push_back({{"sensor", inf.sensor},
                                     {"edges", {inf.edge_u, inf.edge_v}},
                                     {"anchor_gap", inf.anchor_gap},
                                     {"target_sum", inf.target_sum},
                                     {"margin", inf.margin}});
    doc["optimization"] = optimization_json(res);

    if (!args.trace_path.empty()) write_file(args.trace_path, trace_csv(res));
    std::string text = doc.dump(2) + "\n";
    if (args.out_path.empty())
        std::cout << text;
    else
        write_file(args.out_path, text);
}

struct AxisArgs {
    std::string pdb_path, chain, builtin_strand, out_path;
};

void cmd_fit_axis(const AxisArgs& args) {
    if (args.pdb_path.empty() == args.builtin_strand.empty())
        throw ArgumentError("pass exactly one of --pdb PATH --chain ID or --builtin-strand A|B");

    AxisRouteResult result;
    json reference;
    if (!args.builtin_strand.empty()) {
        if (args.builtin_strand != "A" && args.builtin_strand != "B")
            throw ArgumentError("--builtin-strand must be A or B");
        char strand = args.builtin_strand[0];
        result = fit_axis_routes(strand_axis_data(strand), strand);
        Vec3 ref = strand_reference_direction(strand).normalized();
        double cosine = std::fabs(ref.dot(result.eigen_direction));
        reference = {{"direction", vec_json(ref)}, {"cosine", cosine}};
    } else {
        if (args.chain.size() != 1)
            throw ArgumentError("--chain wants a single chain id");
        Structure s = parse_pdb_file(args.pdb_path);
        result = strand_axes(s, args.chain).front();
    }

    json doc;
    doc["schema_version"] = 1;
    doc["chain"] = std::string(1, result.chain);
    doc["descent"] = {{"direction", vec_json(result.descent_direction)},
                      {"value", result.descent_value}};
    doc["eigen"] = {{"direction", vec_json(result.eigen_direction)},
                    {"value", result.eigen_value}};
    doc["direction_cosine"] = result.direction_cosine;
    if (!reference.is_null()) doc["reference"] = reference;

    std::string text = doc.dump(2) + "\n";
    if (args.out_path.empty())
        std::cout << text;
    else
        write_file(args.out_path, text);
}

struct LJArgs {
    int cluster = 0;
    bool curve = false;
    std::string optimizer = "sdcg-sa-sdcg", out_path, trace_path;
    std::uint64_t seed = 0;
    double epsilon = 1.0, sigma = 1.0, r_min = 0.0, r_max = 0.0;
    int samples = 200;
};

void cmd_lj(const LJArgs& args) {
    if ((args.cluster != 0) == args.curve)
        throw ArgumentError("pass exactly one of --cluster N or --curve");

    if (args.curve) {
        double r_min = args.r_min > 0 ? args.r_min : 0.8 * args.sigma;
        double r_max = args.r_max > 0 ? args.r_max : 3.0 * args.sigma;
        auto curve = lj_curve({args.epsilon, args.sigma}, r_min, r_max, args.samples);
        std::string csv = lj_curve_csv(curve);
        if (args.out_path.empty())
            std::cout << csv;
        else
            write_file(args.out_path, csv);
        return;
    }

    if (args.cluster < 2) throw ArgumentError("--cluster needs N >= 2");
    ObjectiveHandle obj = make_lj_cluster_objective(args.cluster);
    std::vector<double> x0 = seeded_cluster_start(args.cluster, args.seed);
    OptimizerConfig cfg;
    cfg.rng_seed = args.seed;
    std::vector<double> lo(x0.size(), -2.0), hi(x0.size());
    double side = std::ceil(std::cbrt(static_cast<double>(args.cluster)));
    for (auto& h : hi) h = 1.2 * side + 2.0;
    OptimizationResult res = run_optimizer(args.optimizer, obj, x0, cfg, lo, hi);

    json doc;
    doc["schema_version"] = 1;
    doc["n_atoms"] = args.cluster;
    doc["optimizer"] = args.optimizer;
    doc["seed"] = args.seed;
    doc["energy"] = res.f_best;
    doc["coordinates"] = res.x_best;
    doc["optimization"] = optimization_json(res);
    if (!args.trace_path.empty()) write_file(args.trace_path, trace_csv(res));
    std::string text = doc.dump(2) + "\n";
    if (args.out_path.empty())
        std::cout << text;
    else
        write_file(args.out_path, text);
}

struct GradArgs {
    std::string objective;
    int trials = 20;
    std::uint64_t seed = 0;
    double step = 1e-6, tol = 1e-6;
};

int cmd_check_grad(const GradArgs& args) {
    GradCheckResult res =
        check_gradient(args.objective, args.trials, args.seed, args.step, args.tol);
    json doc = {{"objective", res.objective},
                {"trials", res.trials},
                {"worst_rel_error", res.worst_rel_error},
                {"tolerance", args.tol},
                {"ok", res.ok}};
    std::cout << doc.dump(2) << "\n";
    return res.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steric-zipper amyloid fibril model builder"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* cb = app.add_subcommand("build", "build a fibril model from a template");
    cb->add_option("--template", build.template_path, "local template PDB file");
    cb->add_option("--fetch", build.fetch_id, "4-character id to download and cache");
    cb->add_option("--model", build.model, "built-in recipe (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    cb->add_option("--recipe", build.recipe_path, "recipe JSON file");
    cb->add_option("--optimizer", build.optimizer, "sd|cg|lbfgs|sa|sdcg-sa-sdcg|saec");
    cb->add_option("--seed", build.seed, "RNG seed")->each([&build](const std::string&) {
        build.seed_given = true;
    });
    cb->add_option("--transform", build.transform, "sheet-2 pose: shipped|derived");
    cb->add_option("--cache", build.cache_dir, "template cache directory");
    cb->add_option("--sequence", build.sequence, "override the Ala/Gly target sequence");
    cb->add_option("--pose", build.pose_path, "explicit sheet-2 pose (12-number text file)");
    cb->add_option("--pose-out", build.pose_out, "write the emitted pose transform here");
    cb->add_option("--opt-config", build.opt_config, "optimizer key=value config file");
    cb->add_option("--out", build.out_pdb, "output PDB path");
    cb->add_option("--report", build.out_report, "output report JSON path");
    cb->add_option("--trace", build.trace_path, "optimizer trace CSV path");

    SolveArgs solve;
    auto* cs = app.add_subcommand("solve-dg", "solve a distance-geometry problem");
    cs->add_option("--problem", solve.problem_path, "problem JSON file");
    cs->add_option("--builtin", solve.builtin, "built-in problem (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    cs->add_option("--optimizer", solve.optimizer, "optimizer name");
    cs->add_option("--seed", solve.seed, "RNG seed");
    cs->add_option("--trace", solve.trace_path, "trace CSV path");
    cs->add_option("--out", solve.out_path, "write the JSON report here");
    cs->add_option("--problem-out", solve.problem_out, "write the problem JSON here");
    cs->add_option("--opt-config", solve.opt_config, "optimizer key=value config file");

    AxisArgs axis;
    auto* ca = app.add_subcommand("fit-axis", "fit a strand axis both ways");
    ca->add_option("--pdb", axis.pdb_path, "structure file");
    ca->add_option("--chain", axis.chain, "chain id in the structure");
    ca->add_option("--builtin-strand", axis.builtin_strand, "built-in strand A or B");
    ca->add_option("--out", axis.out_path, "write the JSON report here");

    LJArgs lj;
    auto* cl = app.add_subcommand("lj", "LJ cluster minimization / potential curve");
    cl->add_option("--cluster", lj.cluster, "minimize an N-atom cluster");
    cl->add_flag("--curve", lj.curve, "emit the pair-potential curve as CSV");
    cl->add_option("--optimizer", lj.optimizer, "optimizer name");
    cl->add_option("--seed", lj.seed, "RNG seed");
    cl->add_option("--epsilon", lj.epsilon, "well depth");
    cl->add_option("--sigma", lj.sigma, "atom diameter");
    cl->add_option("--rmin", lj.r_min, "curve start");
    cl->add_option("--rmax", lj.r_max, "curve end");
    cl->add_option("--samples", lj.samples, "curve samples");
    cl->add_option("--out", lj.out_path, "output path");
    cl->add_option("--trace", lj.trace_path, "trace CSV path");

    GradArgs grad;
    auto* cg = app.add_subcommand("check-grad", "finite-difference gradient check");
    cg->add_option("--objective", grad.objective, "objective name")->required();
    cg->add_option("--trials", grad.trials, "random points to test");
    cg->add_option("--seed", grad.seed, "RNG seed");
    cg->add_option("--step", grad.step, "central-difference step");
    cg->add_option("--tol", grad.tol, "relative-error tolerance");

    try {
        app.parse(argc, argv);
        if (cb->parsed()) cmd_build(build);
        if (cs->parsed()) cmd_solve_dg(solve);
        if (ca->parsed()) cmd_fit_axis(axis);
        if (cl->parsed()) cmd_lj(lj);
        if (cg->parsed()) return cmd_check_grad(grad);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    } catch (const ParseError& e) {
        return fail(2, "parse", e.what());
    } catch (const ArgumentError& e) {
        return fail(2, "usage", e.what());
    } catch (const OptimizeError& e) {
        return fail(3, "optimize", e.what());
    } catch (const NetworkError& e) {
        return fail(5, "network", e.what());
    } catch (const LookupError& e) {
        return fail(4, "lookup", e.what());
    } catch (const StructureError& e) {
        return fail(4, "structure", e.what());
    } catch (const Error& e) {
        return fail(4, "io", e.what());
    } catch (const std::exception& e) {
        return fail(4, "internal", e.what());
    }
}
