// End-to-end pipeline: template -> mutate -> pose sheet 2 by
// distance-geometry optimization -> assemble the 12-chain fibril ->
// contact / axis analysis.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "zipform/geomopt.hpp"
#include "zipform/mutator.hpp"
#include "zipform/optimizers.hpp"
#include "zipform/structure.hpp"
#include "zipform/transforms.hpp"

namespace zipform {

// Atom address by chain and 1-based residue position within the build
// window, e.g. "B6.CB".
struct AtomAddress {
    char chain = ' ';
    int pos = 0;
    std::string atom;

    std::string label() const;
    static AtomAddress from_label(const std::string& label);
};

enum class TransformMode { shipped, derived };

struct BuildRecipe {
    std::string model_name;
    std::string target_sequence;  // Ala/Gly letters, one per window residue
    int window_start = 0;         // 0-based residue offset within each chain
    int window_length = 0;
    std::vector<AtomAddress> anchors;  // fixed, on the sheet-1 chains
    std::vector<AtomAddress> sensors;  // free, on the generated sheet-2 chains
    std::vector<DistanceEdge> edges;   // endpoint refs index anchors/sensors
    double contact_distance = 3.4;     // twice the carbon vdW radius
    std::string optimizer = "saec";
    TransformMode transform_mode = TransformMode::shipped;
    std::string pose_text;  // optional explicit pose (12-number row-major text)
    OptimizerConfig opt;

    void validate() const;

    // The three built-in sheet-contact recipes.
    static BuildRecipe builtin_model(int model);
};

std::string recipe_to_json(const BuildRecipe& recipe);
BuildRecipe recipe_from_json(const std::string& text);

struct ContactEdgeReport {
    std::string u, v;  // atom address labels
    double target = 0.0;
    double initial = 0.0;    // distance before optimization
    double optimized = 0.0;  // distance at the optimized sensor positions
    double emitted = 0.0;    // distance in the rigidly posed output chains
};

struct ChainPairHBonds {
    char chain_a = ' ', chain_b = ' ';
    int count = 0;
};

struct ContactReport {
    std::string model;
    std::string optimizer;
    std::string transform_mode;
    double contact_target = 3.4;
    double objective_initial = 0.0;
    double objective_final = 0.0;
    std::vector<ContactEdgeReport> edges;
    std::vector<InfeasibleEdgePair> infeasible;
    Vec3 derived_translation;
    double derived_max_deviation = 0.0;
    Vec3 pose_translation;

    // Assembly statistics, filled by annotate_assembly.
    bool has_assembly = false;
    double hbond_cutoff = 3.5;
    std::vector<ChainPairHBonds> hbonds;
    double clash_cutoff = 2.2;
    int clash_count = 0;
};

std::string contact_report_to_json(const ContactReport& report,
                                   const OptimizationResult* opt = nullptr);

struct BuildOutput {
    Structure core;  // chains A, B (sheet 1) and G, H (sheet 2)
    ContactReport report;
    OptimizationResult opt;
    DistanceGeometryProblem problem;
    AffineTransform pose;
};

// Mutates chains A,B over the recipe window, generates initial G,H by the
// template sheet transform, optimizes the sensor contacts, and emits G,H
// as rigid images under the shipped or derived transform. The optimized
// sensor positions feed the contact report and the derived-transform fit;
// the emitted chains stay rigid copies of the mutated sheet.
BuildOutput build_model(const BuildRecipe& recipe, const Structure& tmpl);

// C,D = A,B shifted (0,0,+9.59); E,F = A,B shifted (0,0,-9.59);
// K,L = G,H shifted up; I,J = G,H shifted down. 12 chains total.
Structure assemble_fibril(const Structure& core);

// Backbone hydrogen-bond counts per chain pair and a count of non-bonded
// atom pairs closer than the clash cutoff.
void annotate_assembly(ContactReport& report, const Structure& fibril);

struct AxisRouteResult {
    char chain = ' ';
    Vec3 descent_direction;  // unit, from gradient descent off the CA centroid
    double descent_value = 0.0;
    Vec3 eigen_direction;  // unit, from the inertia-tensor smallest eigenpair
    double eigen_value = 0.0;
    double direction_cosine = 0.0;  // |cos| between the two routes
};

// Both axis-fit routes for each requested chain (>= 2 CA atoms each).
std::vector<AxisRouteResult> strand_axes(const Structure& s,
                                         const std::string& chain_ids);
AxisRouteResult fit_axis_routes(const AxisFitProblem& problem, char label);

// Downloads the public structure file over HTTPS into the cache and
// returns its path; a cache hit short-circuits the network. Throws
// NetworkError with an offline hint on failure.
std::filesystem::path fetch_template(const std::string& id,
                                     const std::filesystem::path& cache_dir,
                                     int timeout_seconds = 10);

// ZIPFORM_CACHE_DIR, else XDG_CACHE_HOME/zipform, else ~/.cache/zipform.
std::filesystem::path default_cache_dir();

}  // namespace zipform
