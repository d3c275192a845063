#include "zipform/transforms.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "zipform/errors.hpp"

namespace zipform {

AffineTransform::AffineTransform() : rotation_(Mat3::identity()) {}

AffineTransform::AffineTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
    if (!is_orthogonal(rotation, 1e-9))
        throw ArgumentError("transform rotation is not orthogonal");
    if (std::fabs(rotation.det() - 1.0) > 1e-9)
        throw ArgumentError("transform rotation is not proper (det != 1)");
}

AffineTransform compose(const AffineTransform& t2, const AffineTransform& t1) {
    return AffineTransform(t2.rotation() * t1.rotation(),
                           t2.rotation() * t1.translation() + t2.translation());
}

AffineTransform template_sheet_transform() {
    return AffineTransform(Mat3::diagonal(-1, 1, -1), Vec3{-20.5865, 9.48, 0.0});
}

AffineTransform optimized_sheet_transform() {
    return AffineTransform(Mat3::diagonal(-1, 1, -1), Vec3{-20.2788, -0.0821, 0.5609});
}

AffineTransform stack_transform(StackDirection dir) {
    double dz = dir == StackDirection::up ? 9.59 : -9.59;
    return AffineTransform(Mat3::identity(), Vec3{0.0, 0.0, dz});
}

std::vector<Vec3> apply_to_points(const AffineTransform& tf, std::span<const Vec3> points) {
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(tf.apply(p));
    return out;
}

Chain apply(const AffineTransform& tf, const Chain& chain, char new_id) {
    Chain out = chain;
    out.id = new_id;
    for (auto& res : out.residues)
        for (auto& atom : res.atoms) atom.pos = tf.apply(atom.pos);
    return out;
}

Structure apply(const AffineTransform& tf, const Structure& s) {
    Structure out = s;
    for (auto& chain : out.chains)
        for (auto& res : chain.residues)
            for (auto& atom : res.atoms) atom.pos = tf.apply(atom.pos);
    return out;
}

SheetTranslationFit derive_sheet_translation(
    std::span<const std::pair<Vec3, Vec3>> pairs, const Mat3& rotation) {
    if (pairs.empty()) throw ArgumentError("derive_sheet_translation: no pairs");
    if (!is_orthogonal(rotation, 1e-9))
        throw ArgumentError("derive_sheet_translation: rotation is not orthogonal");

    SheetTranslationFit fit;
    std::vector<Vec3> residuals;
    residuals.reserve(pairs.size());
    Vec3 sum;
    for (const auto& [source, image] : pairs) {
        Vec3 r = image - rotation * source;
        residuals.push_back(r);
        sum += r;
    }
    fit.translation = sum / static_cast<double>(pairs.size());
    for (const auto& r : residuals) {
        Vec3 d = r - fit.translation;
        fit.deviations.push_back(d);
        fit.max_deviation = std::max(fit.max_deviation, d.norm());
    }
    return fit;
}

std::string to_row_major_text(const AffineTransform& tf) {
    char buf[40];
    std::string out;
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!out.empty()) out += ' ';
        out += buf;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) put(tf.rotation()(i, j));
    put(tf.translation().x);
    put(tf.translation().y);
    put(tf.translation().z);
    return out;
}

AffineTransform from_row_major_text(const std::string& text) {
    std::istringstream in(text);
    double v[12];
    for (double& x : v)
        if (!(in >> x)) throw ParseError("transform text needs 12 numbers");
    Mat3 r = Mat3::from_rows({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]});
    return AffineTransform(r, Vec3{v[9], v[10], v[11]});
}

}  // namespace zipform
