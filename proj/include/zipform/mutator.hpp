// Threads an Ala/Gly target sequence onto a template chain's backbone and
// checks how many backbone hydrogen bonds survive a mutation.
#pragma once

#include <string>
#include <vector>

#include "zipform/geom.hpp"
#include "zipform/structure.hpp"

namespace zipform {

// Ordered Ala/Gly sequence; the length must match the template segment.
struct TargetSequence {
    std::string letters;  // alphabet {A, G}
    std::string name;     // model label

    TargetSequence(std::string letters, std::string name = "");
};

// Residue i becomes ALA or GLY. Backbone atoms N, CA, C, O keep their
// template coordinates; ALA keeps the template CB when present and builds
// one from ideal internal coordinates otherwise; every other side-chain
// atom is removed. Throws ArgumentError on a length mismatch and
// StructureError when a backbone atom is missing.
Chain thread_sequence(const Chain& chain, const TargetSequence& target);

// Ideal-geometry beta carbon: 1.53 A from CA, 110.5 deg to both N and C,
// on the L-chirality side.
Vec3 construct_cb(const Vec3& n, const Vec3& ca, const Vec3& c);

struct HBondPair {
    char chain_n = ' ';
    int seq_n = 0;  // residue donating the backbone N
    char chain_o = ' ';
    int seq_o = 0;  // residue providing the backbone O
    double dist = 0.0;

    bool operator==(const HBondPair&) const = default;
};

struct HBondReport {
    std::vector<HBondPair> before;
    std::vector<HBondPair> after;
    double retained_fraction = 1.0;  // 1.0 when there was nothing to lose
};

// Backbone N...O pairs within the cutoff, before and after a mutation.
// Distance-only criterion; pairs within the same residue or closer than
// three positions along the same chain are covalent neighbours, not bonds.
HBondReport preserved_hbond_check(const Structure& before, const Structure& after,
                                  double cutoff);

// The pairs the check would list for a single structure.
std::vector<HBondPair> backbone_hbonds(const Structure& s, double cutoff);

}  // namespace zipform
