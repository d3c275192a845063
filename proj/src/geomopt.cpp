#include "zipform/geomopt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "zipform/errors.hpp"

namespace zipform {

using nlohmann::json;

std::string EndpointRef::label() const {
    return (kind == Kind::anchor ? "a" : "s") + std::to_string(index);
}

EndpointRef EndpointRef::from_label(const std::string& label) {
    if (label.size() < 2 || (label[0] != 'a' && label[0] != 's'))
        throw ParseError("bad endpoint label '" + label + "'");
    EndpointRef ref;
    ref.kind = label[0] == 'a' ? Kind::anchor : Kind::sensor;
    try {
        ref.index = std::stoi(label.substr(1));
    } catch (const std::exception&) {
        throw ParseError("bad endpoint label '" + label + "'");
    }
    return ref;
}

void DistanceGeometryProblem::validate() const {
    if (n_sensors < 1) throw ArgumentError("problem needs at least one sensor");
    if (initial.size() != static_cast<size_t>(3 * n_sensors))
        throw ArgumentError("initial guess has wrong length");
    for (const auto& e : edges) {
        if (!(e.target > 0.0)) throw ArgumentError("edge target must be positive");
        for (const auto& ref : {e.u, e.v}) {
            int limit = ref.kind == EndpointRef::Kind::anchor
                            ? static_cast<int>(anchors.size())
                            : n_sensors;
            if (ref.index < 0 || ref.index >= limit)
                throw ArgumentError("edge endpoint " + ref.label() + " out of range");
        }
        if (e.u.kind == EndpointRef::Kind::anchor && e.v.kind == EndpointRef::Kind::anchor)
            throw ArgumentError("anchor-anchor edges are constant and rejected");
    }
}

Vec3 DistanceGeometryProblem::endpoint(const EndpointRef& ref,
                                       std::span<const double> x) const {
    if (ref.kind == EndpointRef::Kind::anchor) return anchors[ref.index];
    return {x[3 * ref.index], x[3 * ref.index + 1], x[3 * ref.index + 2]};
}

std::vector<double> DistanceGeometryProblem::edge_distances(
    std::span<const double> x) const {
    std::vector<double> out;
    out.reserve(edges.size());
    for (const auto& e : edges)
        out.push_back(distance(endpoint(e.u, x), endpoint(e.v, x)));
    return out;
}

std::vector<InfeasibleEdgePair> DistanceGeometryProblem::infeasible_pairs() const {
    auto mixed = [](const DistanceEdge& e) {
        return (e.u.kind == EndpointRef::Kind::anchor) !=
               (e.v.kind == EndpointRef::Kind::anchor);
    };
    auto sensor_of = [](const DistanceEdge& e) {
        return e.u.kind == EndpointRef::Kind::sensor ? e.u.index : e.v.index;
    };
    auto anchor_of = [](const DistanceEdge& e) {
        return e.u.kind == EndpointRef::Kind::anchor ? e.u.index : e.v.index;
    };
    std::vector<InfeasibleEdgePair> out;
    for (size_t i = 0; i < edges.size(); ++i) {
        for (size_t j = i + 1; j < edges.size(); ++j) {
            const auto& a = edges[i];
            const auto& b = edges[j];
            if (!mixed(a) || !mixed(b)) continue;
            if (sensor_of(a) != sensor_of(b)) continue;
            double gap = distance(anchors[anchor_of(a)], anchors[anchor_of(b)]);
            double sum = a.target + b.target;
            if (gap > sum)
                out.push_back({sensor_of(a), static_cast<int>(i), static_cast<int>(j),
                               gap, sum, gap - sum});
        }
    }
    return out;
}

void DistanceGeometryProblem::search_box(std::vector<double>& lo,
                                         std::vector<double>& hi) const {
    if (anchors.empty()) throw ArgumentError("search box needs anchors");
    double d_max = 0;
    for (const auto& e : edges) d_max = std::max(d_max, e.target);
    Vec3 min = anchors.front(), max = anchors.front();
    for (const auto& a : anchors) {
        min = {std::min(min.x, a.x), std::min(min.y, a.y), std::min(min.z, a.z)};
        max = {std::max(max.x, a.x), std::max(max.y, a.y), std::max(max.z, a.z)};
    }
    double pad = 2.0 * d_max;
    lo.clear();
    hi.clear();
    for (int s = 0; s < n_sensors; ++s) {
        lo.insert(lo.end(), {min.x - pad, min.y - pad, min.z - pad});
        hi.insert(hi.end(), {max.x + pad, max.y + pad, max.z + pad});
    }
}

double dg_objective(const DistanceGeometryProblem& p, std::span<const double> x,
                    std::span<double> grad) {
    if (x.size() != static_cast<size_t>(3 * p.n_sensors))
        throw ArgumentError("dg_objective: x has wrong dimension");
    bool want_grad = !grad.empty();
    if (want_grad && grad.size() != x.size())
        throw ArgumentError("dg_objective: gradient has wrong dimension");
    if (want_grad)
        for (auto& g : grad) g = 0.0;

    double f = 0.0;
    for (const auto& e : p.edges) {
        Vec3 u = p.endpoint(e.u, x);
        Vec3 v = p.endpoint(e.v, x);
        Vec3 diff = u - v;
        double r = diff.norm2() - e.target * e.target;
        f += 0.5 * r * r;
        if (!want_grad) continue;
        Vec3 g = 2.0 * r * diff;
        if (e.u.kind == EndpointRef::Kind::sensor) {
            grad[3 * e.u.index] += g.x;
            grad[3 * e.u.index + 1] += g.y;
            grad[3 * e.u.index + 2] += g.z;
        }
        if (e.v.kind == EndpointRef::Kind::sensor) {
            grad[3 * e.v.index] -= g.x;
            grad[3 * e.v.index + 1] -= g.y;
            grad[3 * e.v.index + 2] -= g.z;
        }
    }
    return f;
}

namespace {

DistanceGeometryProblem make_model(std::vector<Vec3> anchors,
                                   std::vector<DistanceEdge> edges,
                                   std::vector<double> initial) {
    DistanceGeometryProblem p;
    p.anchors = std::move(anchors);
    p.n_sensors = 2;
    p.edges = std::move(edges);
    p.initial = std::move(initial);
    p.validate();
    return p;
}

constexpr double kContact = 3.4;  // twice the carbon vdW radius

}  // namespace

DistanceGeometryProblem model_problem(int model) {
    switch (model) {
        case 1:
            // anchors: B6.CB, B4.CB; sensors: H3.CB, H5.CB
            return make_model(
                {{-16.359, 9.934, -3.526}, {-9.726, 8.530, -3.613}},
                {{sensor_ref(0), anchor_ref(0), kContact},
                 {sensor_ref(0), anchor_ref(1), kContact},
                 {sensor_ref(1), anchor_ref(1), kContact}},
                {-12.928, 12.454, 3.034, -6.635, 14.301, 2.628});
        case 2:
            // anchors: A3.CB, A5.CB; sensors: G4.CB, G2.CB
            return make_model(
                {{-8.655, 8.153, 1.770}, {-2.257, 6.095, 3.078}},
                {{sensor_ref(0), anchor_ref(0), kContact},
                 {sensor_ref(1), anchor_ref(0), kContact},
                 {sensor_ref(1), anchor_ref(1), kContact}},
                {-13.909, 12.227, -0.889, -7.439, 14.419, -2.033});
        case 3:
            // anchors: A1.CB, A3.CB; sensors: G4.CB, G2.CB
            return make_model(
                {{-15.632, 9.694, 0.687}, {-8.655, 8.153, 1.770}},
                {{sensor_ref(0), anchor_ref(0), kContact},
                 {sensor_ref(0), anchor_ref(1), kContact},
                 {sensor_ref(1), anchor_ref(1), kContact}},
                {-13.909, 12.227, -0.889, -7.439, 14.419, -2.033});
        default:
            throw ArgumentError("model must be 1, 2 or 3");
    }
}

std::vector<double> model_reference_optimum(int model) {
    switch (model) {
        case 1: return {-13.062, 9.126, -3.336, -12.344, 6.695, -2.457};
        case 2: return {-11.275, 6.606, 3.288, -5.461, 7.124, 2.424};
        case 3: return {-12.149, 8.924, 1.229, -9.256, 11.007, 3.517};
        default: throw ArgumentError("model must be 1, 2 or 3");
    }
}

std::string dg_problem_to_json(const DistanceGeometryProblem& p) {
    json doc;
    doc["anchors"] = json::array();
    for (const auto& a : p.anchors) doc["anchors"].push_back({a.x, a.y, a.z});
    doc["n_sensors"] = p.n_sensors;
    doc["edges"] = json::array();
    for (const auto& e : p.edges)
        doc["edges"].push_back({{"u", e.u.label()}, {"v", e.v.label()}, {"d", e.target}});
    doc["initial"] = p.initial;
    return doc.dump(2);
}

DistanceGeometryProblem dg_problem_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("problem JSON: ") + e.what());
    }
    DistanceGeometryProblem p;
    try {
        for (const auto& a : doc.at("anchors"))
            p.anchors.push_back({a.at(0).get<double>(), a.at(1).get<double>(),
                                 a.at(2).get<double>()});
        p.n_sensors = doc.at("n_sensors").get<int>();
        for (const auto& e : doc.at("edges"))
            p.edges.push_back({EndpointRef::from_label(e.at("u").get<std::string>()),
                               EndpointRef::from_label(e.at("v").get<std::string>()),
                               e.at("d").get<double>()});
        p.initial = doc.at("initial").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("problem JSON: ") + e.what());
    }
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------

double axis_objective(const AxisFitProblem& p, const Vec3& w, Vec3* grad) {
    double w2 = w.norm2();
    if (!(w2 > 0.0)) throw DomainError("axis_objective undefined at w = 0");
    double f = 0.0;
    Vec3 g;
    for (const auto& a : p.points) {
        double aw = a.dot(w);
        f += a.norm2() - aw * aw / w2;
        if (grad) {
            // d/dw [-(a.w)^2 / |w|^2] = -2(a.w)a/|w|^2 + 2(a.w)^2 w/|w|^4
            g += (-2.0 * aw / w2) * a + (2.0 * aw * aw / (w2 * w2)) * w;
        }
    }
    if (grad) *grad = g;
    return f;
}

AxisFitProblem strand_axis_data(char strand) {
    if (strand == 'A' || strand == 'a')
        return {{{-16.196, 8.315, 1.061},
                 {-12.977, 6.460, 1.908},
                 {-9.178, 6.745, 1.448},
                 {-6.455, 4.112, 1.558},
                 {-3.006, 5.750, 1.782},
                 {-1.226, 2.750, 0.233}}};
    if (strand == 'B' || strand == 'b')
        return {{{-0.959, 2.950, -4.817},
                 {-3.465, 4.999, -2.846},
                 {-7.213, 4.412, -3.340},
                 {-9.954, 7.078, -3.168},
                 {-13.660, 6.241, -3.137},
                 {-16.702, 8.507, -3.074}}};
    throw ArgumentError("strand must be 'A' or 'B'");
}

Vec3 strand_reference_direction(char strand) {
    if (strand == 'A' || strand == 'a') return {-10.751, 6.428, 1.411};
    if (strand == 'B' || strand == 'b') return {-7.960, 4.579, -2.256};
    throw ArgumentError("strand must be 'A' or 'B'");
}

Mat3 inertia_matrix(const AxisFitProblem& p) {
    Mat3 m{};
    for (const auto& a : p.points) {
        m(0, 0) += a.y * a.y + a.z * a.z;
        m(1, 1) += a.z * a.z + a.x * a.x;
        m(2, 2) += a.x * a.x + a.y * a.y;
        m(0, 1) -= a.x * a.y;
        m(1, 2) -= a.y * a.z;
        m(0, 2) -= a.z * a.x;
    }
    m(1, 0) = m(0, 1);
    m(2, 1) = m(1, 2);
    m(2, 0) = m(0, 2);
    return m;
}

namespace {

// Solve (m - shift I) v = b for 3x3 via Cramer with partial fallback.
bool solve3(const Mat3& m, const Vec3& b, Vec3& out) {
    double det = m.det();
    if (std::fabs(det) < 1e-300) return false;
    Mat3 mx = m, my = m, mz = m;
    for (int i = 0; i < 3; ++i) {
        mx(i, 0) = b[i];
        my(i, 1) = b[i];
        mz(i, 2) = b[i];
    }
    out = {mx.det() / det, my.det() / det, mz.det() / det};
    return std::isfinite(out.x) && std::isfinite(out.y) && std::isfinite(out.z);
}

Vec3 fix_sign(Vec3 v) {
    double scale = std::max({std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)});
    double tol = 1e-12 * std::max(1.0, scale);
    for (int i = 0; i < 3; ++i) {
        double c = v[i];
        if (std::fabs(c) > tol) return c < 0 ? -v : v;
    }
    return v;
}

}  // namespace

EigenPair smallest_eigenpair(const Mat3& m) {
    if (max_abs_diff(m, m.transpose()) > 1e-9)
        throw ArgumentError("smallest_eigenpair needs a symmetric matrix");

    // Characteristic polynomial of a symmetric 3x3 via the trigonometric
    // closed form (Smith's method).
    double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
    Mat3 b = m;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    double p2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p2 += b(i, j) * b(i, j);
    p2 /= 6.0;
    double lambda_min;
    if (p2 < 1e-300) {
        lambda_min = q;  // scalar multiple of the identity
    } else {
        double p = std::sqrt(p2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b(i, j) /= p;
        double r = b.det() / 2.0;
        r = std::clamp(r, -1.0, 1.0);
        double phi = std::acos(r) / 3.0;
        // Eigenvalues q + 2p cos(phi + 2k pi / 3); k = 1 gives the smallest.
        lambda_min = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    }

    // Eigenvector: largest cross product of two rows of (m - lambda I).
    Mat3 shifted = m;
    for (int i = 0; i < 3; ++i) shifted(i, i) -= lambda_min;
    Vec3 best;
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i) {
        Vec3 c = shifted.row(i).cross(shifted.row((i + 1) % 3));
        if (c.norm() > best_norm) {
            best_norm = c.norm();
            best = c;
        }
    }
    double scale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::fabs(m(i, j)));
    Vec3 v = best_norm > 1e-12 * std::max(1.0, scale * scale)
                 ? best.normalized()
                 : Vec3{1, 0, 0};  // degenerate spectrum: any unit vector works

    // Inverse-iteration refinement with a slightly shifted matrix.
    double eps = 1e-10 * std::max(1.0, std::fabs(lambda_min));
    for (int iter = 0; iter < 8; ++iter) {
        Vec3 res = m * v - lambda_min * v;
        if (res.norm() <= 1e-12 * std::max(1.0, scale)) break;
        Mat3 shift = m;
        for (int i = 0; i < 3; ++i) shift(i, i) -= (lambda_min + eps);
        Vec3 next;
        if (!solve3(shift, v, next) || !(next.norm() > 0)) break;
        v = next.normalized();
        lambda_min = v.dot(m * v);
    }

    return {lambda_min, fix_sign(v)};
}

}  // namespace zipform
