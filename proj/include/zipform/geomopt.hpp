// Least-squares problem builders: sensor/anchor distance geometry for the
// sheet-contact targets and straight-line axis fitting for strands.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zipform/geom.hpp"

namespace zipform {

struct EndpointRef {
    enum class Kind { anchor, sensor };
    Kind kind = Kind::sensor;
    int index = 0;

    bool operator==(const EndpointRef&) const = default;

    // "a0", "s1", ...
    std::string label() const;
    static EndpointRef from_label(const std::string& label);
};

inline EndpointRef anchor_ref(int i) { return {EndpointRef::Kind::anchor, i}; }
inline EndpointRef sensor_ref(int i) { return {EndpointRef::Kind::sensor, i}; }

struct DistanceEdge {
    EndpointRef u, v;
    double target = 0.0;  // target distance, angstroms
};

// A pair of edges sharing a sensor whose anchor endpoints are farther apart
// than the sum of the edge targets; no placement can satisfy both exactly.
struct InfeasibleEdgePair {
    int sensor = 0;
    int edge_u = 0, edge_v = 0;  // indices into edges
    double anchor_gap = 0.0;     // anchor-anchor separation
    double target_sum = 0.0;     // d_u + d_v
    double margin = 0.0;         // anchor_gap - target_sum, > 0
};

// Fixed anchors, free sensors, target-distance edges, and an initial sensor
// layout. Objective: sum over edges of 1/2 (|u - v|^2 - d^2)^2.
struct DistanceGeometryProblem {
    std::vector<Vec3> anchors;
    int n_sensors = 0;
    std::vector<DistanceEdge> edges;
    std::vector<double> initial;  // 3 * n_sensors

    // Throws ArgumentError when an edge joins two anchors, references an
    // out-of-range endpoint, has a non-positive target, or the initial guess
    // has the wrong length.
    void validate() const;

    Vec3 endpoint(const EndpointRef& ref, std::span<const double> x) const;
    std::vector<double> edge_distances(std::span<const double> x) const;
    std::vector<InfeasibleEdgePair> infeasible_pairs() const;

    // Bounding box of the anchors padded by 2x the largest edge target; the
    // sensors must lie near the anchors by construction.
    void search_box(std::vector<double>& lo, std::vector<double>& hi) const;
};

// Objective value and exact analytic gradient with respect to the sensor
// coordinates. grad may be empty when only the value is needed.
double dg_objective(const DistanceGeometryProblem& p, std::span<const double> x,
                    std::span<double> grad);

// The three built-in sheet-contact problems (models 1-3), with their
// published anchors, edges, contact target 3.4 A and initial points.
DistanceGeometryProblem model_problem(int model);

// Reference optima reported for the built-in problems, for cross-checks.
std::vector<double> model_reference_optimum(int model);

std::string dg_problem_to_json(const DistanceGeometryProblem& p);
DistanceGeometryProblem dg_problem_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Axis fitting: best straight line through the origin for a point cloud.

struct AxisFitProblem {
    std::vector<Vec3> points;  // C-alpha positions, angstroms
};

// Sum over points of |a|^2 (1 - (a.w)^2 / (|a|^2 |w|^2)); homogeneous of
// degree 0 in w. Throws DomainError at w = 0.
double axis_objective(const AxisFitProblem& p, const Vec3& w, Vec3* grad = nullptr);

// Built-in C-alpha data for strands 'A' and 'B' of model 1.
AxisFitProblem strand_axis_data(char strand);

// Reference axis directions reported for the built-in strands.
Vec3 strand_reference_direction(char strand);

// diag(sum ay^2+az^2, sum az^2+ax^2, sum ax^2+ay^2), off-diagonals
// -sum ax ay etc.; for unit w, w^T M w equals axis_objective(w).
Mat3 inertia_matrix(const AxisFitProblem& p);

struct EigenPair {
    double value = 0.0;
    Vec3 vector;  // unit norm, first significant component positive
};

// Smallest eigenvalue and eigenvector of a symmetric 3x3 matrix
// (characteristic-polynomial route with inverse-iteration refinement);
// throws ArgumentError when the input is not symmetric to 1e-9.
EigenPair smallest_eigenpair(const Mat3& m);

}  // namespace zipform
