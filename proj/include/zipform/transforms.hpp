// Rigid transforms that generate beta-sheet 2 from beta-sheet 1 and stack
// strands along the fibril axis.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zipform/geom.hpp"
#include "zipform/structure.hpp"

namespace zipform {

// Proper rigid motion p -> R p + t. The constructor rejects rotations that
// are not orthogonal with determinant 1 (to 1e-9).
class AffineTransform {
public:
    AffineTransform();  // identity
    AffineTransform(const Mat3& rotation, const Vec3& translation);

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }

private:
    Mat3 rotation_;
    Vec3 translation_;
};

// compose(t2, t1) applies t1 first: compose(t2, t1).apply(p) == t2.apply(t1.apply(p)).
AffineTransform compose(const AffineTransform& t2, const AffineTransform& t1);

// Sheet-2 generator observed in the template: R = diag(-1, 1, -1),
// t = (-20.5865, 9.48, 0).
AffineTransform template_sheet_transform();

// Sheet-2 generator after contact optimization: same rotation,
// t = (-20.2788, -0.0821, 0.5609).
AffineTransform optimized_sheet_transform();

enum class StackDirection { up, down };

// Pure translation (0, 0, +/-9.59) stacking strands along the fibril axis.
AffineTransform stack_transform(StackDirection dir);

std::vector<Vec3> apply_to_points(const AffineTransform& tf, std::span<const Vec3> points);

// Transformed copy; chain/residue/atom identity preserved. Callers rename
// chains afterwards when producing new ones.
Structure apply(const AffineTransform& tf, const Structure& s);
Chain apply(const AffineTransform& tf, const Chain& chain, char new_id);

struct SheetTranslationFit {
    Vec3 translation;                  // mean over pairs of (image - R * source)
    std::vector<Vec3> deviations;      // per-pair (image - R * source) - mean
    double max_deviation = 0.0;        // largest deviation magnitude
};

// Least-squares translation for a fixed rotation: the arithmetic mean of
// (image - R * source) over the pairs, with per-pair spread diagnostics.
SheetTranslationFit derive_sheet_translation(
    std::span<const std::pair<Vec3, Vec3>> pairs, const Mat3& rotation);

// 12 numbers, row-major rotation then translation, full double precision.
std::string to_row_major_text(const AffineTransform& tf);
AffineTransform from_row_major_text(const std::string& text);

}  // namespace zipform
