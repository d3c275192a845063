#include "zipform/mutator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "zipform/errors.hpp"

namespace zipform {

TargetSequence::TargetSequence(std::string letters_in, std::string name_in)
    : letters(std::move(letters_in)), name(std::move(name_in)) {
    if (letters.empty()) throw ArgumentError("target sequence is empty");
    for (char c : letters)
        if (c != 'A' && c != 'G')
            throw ArgumentError("target sequence alphabet is {A, G}, got '" +
                                std::string(1, c) + "'");
}

Vec3 construct_cb(const Vec3& n, const Vec3& ca, const Vec3& c) {
    constexpr double bond = 1.53;  // CA-CB, angstroms
    const double cos_theta = std::cos(110.5 * std::numbers::pi / 180.0);
    Vec3 nh = (n - ca).normalized();
    Vec3 ch = (c - ca).normalized();
    Vec3 bisector = (nh + ch).normalized();
    Vec3 perp = nh.cross(ch).normalized();  // L-chirality branch
    // Coefficients chosen so the CB direction makes the target angle with
    // both the N-CA and C-CA bonds whatever the actual N-CA-C angle is.
    double cos_half = bisector.dot(nh);
    double a = -cos_theta / cos_half;
    double b = std::sqrt(std::max(0.0, 1.0 - a * a));
    Vec3 u = bisector * (-a) + perp * b;
    return ca + u * bond;
}

namespace {

const Atom* require_atom(const Residue& res, const char* name, char chain_id) {
    const Atom* a = res.find_atom(name);
    if (!a)
        throw StructureError("residue " + std::string(1, chain_id) +
                             std::to_string(res.seq) + "." + res.name +
                             " is missing backbone atom " + name);
    return a;
}

}  // namespace

Chain thread_sequence(const Chain& chain, const TargetSequence& target) {
    if (chain.residues.size() != target.letters.size())
        throw ArgumentError("target length " + std::to_string(target.letters.size()) +
                            " does not match chain " + std::string(1, chain.id) +
                            " residue count " + std::to_string(chain.residues.size()));

    Chain out;
    out.id = chain.id;
    out.residues.reserve(chain.residues.size());
    for (size_t i = 0; i < chain.residues.size(); ++i) {
        const Residue& src = chain.residues[i];
        bool ala = target.letters[i] == 'A';

        Residue res;
        res.name = ala ? "ALA" : "GLY";
        res.seq = src.seq;
        const Atom* n = require_atom(src, "N", chain.id);
        const Atom* calpha = require_atom(src, "CA", chain.id);
        const Atom* c = require_atom(src, "C", chain.id);
        const Atom* o = require_atom(src, "O", chain.id);
        res.atoms = {*n, *calpha, *c, *o};
        if (ala) {
            if (const Atom* tmpl_cb = src.find_atom("CB")) {
                res.atoms.push_back(*tmpl_cb);
            } else {
                Atom cb;
                cb.serial = calpha->serial;
                cb.name = "CB";
                cb.element = "C";
                cb.pos = construct_cb(n->pos, calpha->pos, c->pos);
                res.atoms.push_back(cb);
            }
        }
        out.residues.push_back(std::move(res));
    }
    return out;
}

std::vector<HBondPair> backbone_hbonds(const Structure& s, double cutoff) {
    struct Site {
        char chain;
        int seq;
        Vec3 pos;
    };
    std::vector<Site> donors, acceptors;
    for (const auto& chain : s.chains) {
        for (const auto& res : chain.residues) {
            if (const Atom* a = res.find_atom("N")) donors.push_back({chain.id, res.seq, a->pos});
            if (const Atom* a = res.find_atom("O"))
                acceptors.push_back({chain.id, res.seq, a->pos});
        }
    }
    std::vector<HBondPair> out;
    for (const auto& d : donors) {
        for (const auto& a : acceptors) {
            if (d.chain == a.chain && std::abs(d.seq - a.seq) <= 2) continue;
            double r = distance(d.pos, a.pos);
            if (r <= cutoff) out.push_back({d.chain, d.seq, a.chain, a.seq, r});
        }
    }
    return out;
}

HBondReport preserved_hbond_check(const Structure& before, const Structure& after,
                                  double cutoff) {
    if (cutoff < 0) throw ArgumentError("cutoff must be non-negative");
    HBondReport report;
    report.before = backbone_hbonds(before, cutoff);
    report.after = backbone_hbonds(after, cutoff);

    std::set<std::tuple<char, int, char, int>> kept;
    for (const auto& p : report.after)
        kept.insert({p.chain_n, p.seq_n, p.chain_o, p.seq_o});
    if (report.before.empty()) {
        report.retained_fraction = 1.0;
        return report;
    }
    int retained = 0;
    for (const auto& p : report.before)
        if (kept.count({p.chain_n, p.seq_n, p.chain_o, p.seq_o})) ++retained;
    report.retained_fraction =
        static_cast<double>(retained) / static_cast<double>(report.before.size());
    return report;
}

}  // namespace zipform
