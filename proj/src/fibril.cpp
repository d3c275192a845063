#include "zipform/fibril.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "zipform/errors.hpp"
#include "zipform/objectives.hpp"

namespace zipform {

using nlohmann::json;

std::string AtomAddress::label() const {
    return std::string(1, chain) + std::to_string(pos) + "." + atom;
}

AtomAddress AtomAddress::from_label(const std::string& label) {
    auto dot = label.find('.');
    if (label.size() < 4 || dot == std::string::npos || dot < 2 || dot + 1 >= label.size())
        throw ParseError("bad atom address '" + label + "' (want e.g. \"B6.CB\")");
    AtomAddress a;
    a.chain = label[0];
    try {
        a.pos = std::stoi(label.substr(1, dot - 1));
    } catch (const std::exception&) {
        throw ParseError("bad atom address '" + label + "'");
    }
    a.atom = label.substr(dot + 1);
    return a;
}

void BuildRecipe::validate() const {
    if (window_length < 1) throw ArgumentError("window length must be positive");
    if (window_start < 0) throw ArgumentError("window start must be non-negative");
    if (static_cast<int>(target_sequence.size()) != window_length)
        throw ArgumentError("target sequence length does not match the window");
    if (!(contact_distance > 0)) throw ArgumentError("contact distance must be positive");
    if (anchors.empty() || sensors.empty())
        throw ArgumentError("recipe needs at least one anchor and one sensor");
    if (edges.empty()) throw ArgumentError("recipe needs at least one edge");
    if (!is_known_optimizer(optimizer))
        throw ArgumentError("unknown optimizer '" + optimizer + "'");
    if (!pose_text.empty()) from_row_major_text(pose_text);  // must parse
    for (const auto& a : anchors)
        if (a.pos < 1 || a.pos > window_length)
            throw ArgumentError("anchor " + a.label() + " outside the window");
    for (const auto& s : sensors)
        if (s.pos < 1 || s.pos > window_length)
            throw ArgumentError("sensor " + s.label() + " outside the window");
}

BuildRecipe BuildRecipe::builtin_model(int model) {
    BuildRecipe r;
    r.window_start = 0;
    r.window_length = 6;
    r.contact_distance = 3.4;
    r.optimizer = "saec";
    switch (model) {
        case 1:
            r.model_name = "model1";
            r.target_sequence = "AGAAAA";
            r.anchors = {AtomAddress{'B', 6, "CB"}, AtomAddress{'B', 4, "CB"}};
            r.sensors = {AtomAddress{'H', 3, "CB"}, AtomAddress{'H', 5, "CB"}};
            break;
        case 2:
            r.model_name = "model2";
            r.target_sequence = "GAAAAG";
            r.anchors = {AtomAddress{'A', 3, "CB"}, AtomAddress{'A', 5, "CB"}};
            r.sensors = {AtomAddress{'G', 4, "CB"}, AtomAddress{'G', 2, "CB"}};
            break;
        case 3:
            r.model_name = "model3";
            r.target_sequence = "AAAAGA";
            r.anchors = {AtomAddress{'A', 1, "CB"}, AtomAddress{'A', 3, "CB"}};
            r.sensors = {AtomAddress{'G', 4, "CB"}, AtomAddress{'G', 2, "CB"}};
            break;
        default:
            throw ArgumentError("model must be 1, 2 or 3");
    }
    // Edges in the contact-chain order the captions list them.
    if (model == 2)
        r.edges = {{sensor_ref(0), anchor_ref(0), r.contact_distance},
                   {sensor_ref(1), anchor_ref(0), r.contact_distance},
                   {sensor_ref(1), anchor_ref(1), r.contact_distance}};
    else
        r.edges = {{sensor_ref(0), anchor_ref(0), r.contact_distance},
                   {sensor_ref(0), anchor_ref(1), r.contact_distance},
                   {sensor_ref(1), anchor_ref(1), r.contact_distance}};
    return r;
}

std::string recipe_to_json(const BuildRecipe& r) {
    json doc;
    doc["model"] = r.model_name;
    doc["target_sequence"] = r.target_sequence;
    doc["window"] = {{"start", r.window_start}, {"length", r.window_length}};
    doc["anchors"] = json::array();
    for (const auto& a : r.anchors) doc["anchors"].push_back(a.label());
    doc["sensors"] = json::array();
    for (const auto& s : r.sensors) doc["sensors"].push_back(s.label());
    doc["edges"] = json::array();
    for (const auto& e : r.edges)
        doc["edges"].push_back({{"u", e.u.label()}, {"v", e.v.label()}, {"d", e.target}});
    doc["contact_distance"] = r.contact_distance;
    doc["optimizer"] = r.optimizer;
    doc["transform_mode"] = r.transform_mode == TransformMode::shipped ? "shipped" : "derived";
    if (!r.pose_text.empty()) doc["pose"] = r.pose_text;
    doc["seed"] = r.opt.rng_seed;
    return doc.dump(2);
}

BuildRecipe recipe_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("recipe JSON: ") + e.what());
    }
    BuildRecipe r;
    try {
        r.model_name = doc.value("model", "custom");
        r.target_sequence = doc.at("target_sequence").get<std::string>();
        r.window_start = doc.at("window").at("start").get<int>();
        r.window_length = doc.at("window").at("length").get<int>();
        for (const auto& a : doc.at("anchors"))
            r.anchors.push_back(AtomAddress::from_label(a.get<std::string>()));
        for (const auto& s : doc.at("sensors"))
            r.sensors.push_back(AtomAddress::from_label(s.get<std::string>()));
        r.contact_distance = doc.value("contact_distance", 3.4);
        for (const auto& e : doc.at("edges"))
            r.edges.push_back({EndpointRef::from_label(e.at("u").get<std::string>()),
                               EndpointRef::from_label(e.at("v").get<std::string>()),
                               e.value("d", r.contact_distance)});
        r.optimizer = doc.value("optimizer", "saec");
        std::string mode = doc.value("transform_mode", "shipped");
        if (mode != "shipped" && mode != "derived")
            throw ParseError("transform_mode must be \"shipped\" or \"derived\"");
        r.transform_mode = mode == "shipped" ? TransformMode::shipped : TransformMode::derived;
        r.pose_text = doc.value("pose", "");
        r.opt.rng_seed = doc.value("seed", 0);
    } catch (const json::exception& e) {
        throw ParseError(std::string("recipe JSON: ") + e.what());
    }
    r.validate();
    return r;
}

namespace {

Chain window_chain(const Structure& tmpl, char id, int start, int length) {
    const Chain* chain = tmpl.find_chain(id);
    if (!chain) throw StructureError("template has no chain " + std::string(1, id));
    if (static_cast<int>(chain->residues.size()) < start + length)
        throw StructureError("chain " + std::string(1, id) + " has " +
                             std::to_string(chain->residues.size()) +
                             " residues; window needs " + std::to_string(start + length));
    Chain out;
    out.id = id;
    out.residues.assign(chain->residues.begin() + start,
                        chain->residues.begin() + start + length);
    return out;
}

char sheet1_partner(char sheet2_chain) {
    switch (sheet2_chain) {
        case 'G': return 'A';
        case 'H': return 'B';
        default:
            throw ArgumentError("sensors live on the generated chains G or H, got " +
                                std::string(1, sheet2_chain));
    }
}

// Position of a 1-based window address in an already-windowed structure.
Vec3 address_position(const Structure& s, const AtomAddress& addr) {
    const Chain* chain = s.find_chain(addr.chain);
    if (!chain) throw LookupError("no chain for address " + addr.label());
    int index = addr.pos - 1;
    if (index < 0 || index >= static_cast<int>(chain->residues.size()))
        throw LookupError("no residue for address " + addr.label());
    const Residue& res = chain->residues[index];
    const Atom* atom = res.find_atom(addr.atom);
    if (!atom) throw LookupError("no atom for address " + addr.label());
    return atom->pos;
}

std::string endpoint_label(const BuildRecipe& recipe, const EndpointRef& ref) {
    if (ref.kind == EndpointRef::Kind::anchor) return recipe.anchors[ref.index].label();
    return recipe.sensors[ref.index].label();
}

}  // namespace

BuildOutput build_model(const BuildRecipe& recipe, const Structure& tmpl) {
    recipe.validate();
    TargetSequence target(recipe.target_sequence, recipe.model_name);

    // Sheet 1: windowed, mutated copies of the template chains A and B.
    Chain a = thread_sequence(
        window_chain(tmpl, 'A', recipe.window_start, recipe.window_length), target);
    Chain b = thread_sequence(
        window_chain(tmpl, 'B', recipe.window_start, recipe.window_length), target);

    // Sheet 2 at its template position.
    AffineTransform t0 = template_sheet_transform();
    Structure core;
    core.title = recipe.model_name;
    core.chains = {a, b, apply(t0, a, 'G'), apply(t0, b, 'H')};

    // Distance-geometry problem over the designated sensor atoms.
    DistanceGeometryProblem problem;
    for (const auto& addr : recipe.anchors)
        problem.anchors.push_back(address_position(core, addr));
    problem.n_sensors = static_cast<int>(recipe.sensors.size());
    for (const auto& addr : recipe.sensors) {
        Vec3 p = address_position(core, addr);
        problem.initial.insert(problem.initial.end(), {p.x, p.y, p.z});
    }
    problem.edges = recipe.edges;
    problem.validate();

    ObjectiveHandle obj = make_dg_objective(problem);
    std::vector<double> lo, hi;
    problem.search_box(lo, hi);
    OptimizationResult opt =
        run_optimizer(recipe.optimizer, obj, problem.initial, recipe.opt, lo, hi);

    // Rigid pose for the emitted sheet-2 chains. The optimizer moves sensor
    // points individually; the emitted chains are posed as one rigid body so
    // the geometry stays chemically intact.
    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (size_t i = 0; i < recipe.sensors.size(); ++i) {
        AtomAddress source = recipe.sensors[i];
        source.chain = sheet1_partner(source.chain);
        pairs.emplace_back(address_position(core, source),
                           Vec3{opt.x_best[3 * i], opt.x_best[3 * i + 1],
                                opt.x_best[3 * i + 2]});
    }
    SheetTranslationFit fit = derive_sheet_translation(pairs, t0.rotation());
    AffineTransform pose = recipe.transform_mode == TransformMode::shipped
                               ? optimized_sheet_transform()
                               : AffineTransform(t0.rotation(), fit.translation);
    if (!recipe.pose_text.empty()) pose = from_row_major_text(recipe.pose_text);
    core.chains[2] = apply(pose, a, 'G');
    core.chains[3] = apply(pose, b, 'H');

    // Contact report: initial, optimized and emitted distances per edge.
    ContactReport report;
    report.model = recipe.model_name;
    report.optimizer = recipe.optimizer;
    report.transform_mode =
        !recipe.pose_text.empty()
            ? "explicit"
            : (recipe.transform_mode == TransformMode::shipped ? "shipped" : "derived");
    report.contact_target = recipe.contact_distance;
    report.objective_initial = dg_objective(problem, problem.initial, {});
    report.objective_final = opt.f_best;
    report.infeasible = problem.infeasible_pairs();
    report.derived_translation = fit.translation;
    report.derived_max_deviation = fit.max_deviation;
    report.pose_translation = pose.translation();

    std::vector<double> d_init = problem.edge_distances(problem.initial);
    std::vector<double> d_opt = problem.edge_distances(opt.x_best);
    for (size_t e = 0; e < problem.edges.size(); ++e) {
        ContactEdgeReport edge;
        edge.u = endpoint_label(recipe, problem.edges[e].u);
        edge.v = endpoint_label(recipe, problem.edges[e].v);
        edge.target = problem.edges[e].target;
        edge.initial = d_init[e];
        edge.optimized = d_opt[e];
        auto emitted_pos = [&](const EndpointRef& ref) {
            if (ref.kind == EndpointRef::Kind::anchor)
                return problem.anchors[ref.index];
            return address_position(core, recipe.sensors[ref.index]);
        };
        edge.emitted =
            distance(emitted_pos(problem.edges[e].u), emitted_pos(problem.edges[e].v));
        report.edges.push_back(edge);
    }

    return BuildOutput{std::move(core), std::move(report), std::move(opt),
                       std::move(problem), pose};
}

Structure assemble_fibril(const Structure& core) {
    for (char id : {'A', 'B', 'G', 'H'})
        if (!core.find_chain(id))
            throw StructureError("core is missing chain " + std::string(1, id));

    AffineTransform up = stack_transform(StackDirection::up);
    AffineTransform down = stack_transform(StackDirection::down);

    Structure fibril;
    fibril.title = core.title;
    const Chain& a = *core.find_chain('A');
    const Chain& b = *core.find_chain('B');
    const Chain& g = *core.find_chain('G');
    const Chain& h = *core.find_chain('H');
    fibril.chains = {
        a,
        b,
        apply(up, a, 'C'),   apply(up, b, 'D'),
        apply(down, a, 'E'), apply(down, b, 'F'),
        g,
        h,
        apply(down, g, 'I'), apply(down, h, 'J'),
        apply(up, g, 'K'),   apply(up, h, 'L'),
    };
    std::sort(fibril.chains.begin(), fibril.chains.end(),
              [](const Chain& x, const Chain& y) { return x.id < y.id; });
    return fibril;
}

void annotate_assembly(ContactReport& report, const Structure& fibril) {
    report.has_assembly = true;

    std::map<std::pair<char, char>, int> counts;
    for (const auto& hb : backbone_hbonds(fibril, report.hbond_cutoff)) {
        if (hb.chain_n == hb.chain_o) continue;
        auto key = std::minmax(hb.chain_n, hb.chain_o);
        ++counts[{key.first, key.second}];
    }
    report.hbonds.clear();
    for (const auto& [pair, count] : counts)
        report.hbonds.push_back({pair.first, pair.second, count});

    // Non-bonded clash scan: skip pairs within a residue and pairs in
    // adjacent residues of the same chain.
    struct Site {
        char chain;
        int res_index;
        Vec3 pos;
    };
    std::vector<Site> sites;
    for (const auto& chain : fibril.chains) {
        for (size_t ri = 0; ri < chain.residues.size(); ++ri)
            for (const auto& atom : chain.residues[ri].atoms)
                sites.push_back({chain.id, static_cast<int>(ri), atom.pos});
    }
    int clashes = 0;
    for (size_t i = 0; i < sites.size(); ++i) {
        for (size_t j = i + 1; j < sites.size(); ++j) {
            if (sites[i].chain == sites[j].chain &&
                std::abs(sites[i].res_index - sites[j].res_index) <= 1)
                continue;
            if (distance(sites[i].pos, sites[j].pos) < report.clash_cutoff) ++clashes;
        }
    }
    report.clash_count = clashes;
}

std::string contact_report_to_json(const ContactReport& report,
                                   const OptimizationResult* opt) {
    json doc;
    doc["schema_version"] = 1;
    doc["model"] = report.model;
    doc["optimizer"] = report.optimizer;
    doc["transform_mode"] = report.transform_mode;
    doc["contact_target"] = report.contact_target;
    doc["objective"] = {{"initial", report.objective_initial},
                        {"final", report.objective_final}};
    doc["edges"] = json::array();
    for (const auto& e : report.edges)
        doc["edges"].push_back({{"u", e.u},
                                {"v", e.v},
                                {"target", e.target},
                                {"initial", e.initial},
                                {"optimized", e.optimized},
                                {"emitted", e.emitted}});
    doc["infeasible"] = json::array();
    for (const auto& inf : report.infeasible)
        doc["infeasible"].push_back({{"sensor", inf.sensor},
                                     {"edges", {inf.edge_u, inf.edge_v}},
                                     {"anchor_gap", inf.anchor_gap},
                                     {"target_sum", inf.target_sum},
                                     {"margin", inf.margin}});
    doc["derived_transform"] = {
        {"translation",
         {report.derived_translation.x, report.derived_translation.y,
          report.derived_translation.z}},
        {"max_pair_deviation", report.derived_max_deviation}};
    doc["pose_translation"] = {report.pose_translation.x, report.pose_translation.y,
                               report.pose_translation.z};
    if (opt) {
        doc["optimization"] = {{"f_best", opt->f_best},
                               {"iterations", opt->iterations},
                               {"function_evals", opt->function_evals},
                               {"gradient_evals", opt->gradient_evals},
                               {"converged", opt->converged},
                               {"reason", opt->reason}};
    }
    if (report.has_assembly) {
        json hb = json::array();
        for (const auto& h : report.hbonds)
            hb.push_back({{"chains", std::string(1, h.chain_a) + h.chain_b},
                          {"count", h.count}});
        doc["assembly"] = {{"hbond_cutoff", report.hbond_cutoff},
                           {"hbonds", hb},
                           {"clash_cutoff", report.clash_cutoff},
                           {"clash_count", report.clash_count}};
    }
    return doc.dump(2);
}

namespace {

Vec3 sign_fixed_unit(Vec3 v) {
    v = v.normalized();
    for (int i = 0; i < 3; ++i) {
        if (std::fabs(v[i]) > 1e-9) return v[i] < 0 ? -v : v;
    }
    return v;
}

}  // namespace

AxisRouteResult fit_axis_routes(const AxisFitProblem& problem, char label) {
    if (problem.points.size() < 2)
        throw StructureError("axis fit needs at least 2 CA atoms in chain " +
                             std::string(1, label));

    AxisRouteResult result;
    result.chain = label;

    // Route 1: gradient descent on the perpendicular-distance objective,
    // started at the CA centroid.
    Vec3 centroid;
    for (const auto& p : problem.points) centroid += p;
    centroid = centroid / static_cast<double>(problem.points.size());

    OptimizerConfig cfg;
    cfg.grad_rms_tol = 1e-12;
    cfg.gmax_tol = 1e-12;
    cfg.max_iters = 50000;
    ObjectiveHandle obj = make_axis_objective(problem);
    std::vector<double> w0 = {centroid.x, centroid.y, centroid.z};
    OptimizationResult descent = steepest_descent(obj, w0, cfg);
    Vec3 w{descent.x_best[0], descent.x_best[1], descent.x_best[2]};
    result.descent_direction = sign_fixed_unit(w);
    result.descent_value = descent.f_best;

    // Route 2: smallest eigenpair of the inertia tensor.
    EigenPair eig = smallest_eigenpair(inertia_matrix(problem));
    result.eigen_direction = eig.vector;
    result.eigen_value = eig.value;

    result.direction_cosine =
        std::fabs(result.descent_direction.dot(result.eigen_direction));
    return result;
}

std::vector<AxisRouteResult> strand_axes(const Structure& s,
                                         const std::string& chain_ids) {
    std::vector<AxisRouteResult> out;
    for (char id : chain_ids) {
        const Chain* chain = s.find_chain(id);
        if (!chain) throw LookupError("no chain " + std::string(1, id));
        AxisFitProblem problem;
        for (const auto& res : chain->residues)
            if (const Atom* ca = res.find_atom("CA")) problem.points.push_back(ca->pos);
        out.push_back(fit_axis_routes(problem, id));
    }
    return out;
}

}  // namespace zipform
