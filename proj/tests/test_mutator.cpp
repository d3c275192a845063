#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zipform/errors.hpp"
#include "zipform/mutator.hpp"
#include "zipform/structure.hpp"

using namespace zipform;

namespace {

const std::string kFixtures = ZIPFORM_FIXTURE_DIR;

double angle_deg(const Vec3& a, const Vec3& apex, const Vec3& b) {
    Vec3 u = (a - apex).normalized();
    Vec3 v = (b - apex).normalized();
    return std::acos(std::clamp(u.dot(v), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

Chain template_chain(char id) {
    Structure s = parse_pdb_file(kFixtures + "/template_ab.pdb");
    return *s.find_chain(id);
}

}  // namespace

TEST_CASE("target sequences are Ala/Gly only") {
    CHECK_THROWS_AS(TargetSequence("AXA"), ArgumentError);
    CHECK_THROWS_AS(TargetSequence(""), ArgumentError);
    TargetSequence ok("AGAAAA", "model1");
    CHECK(ok.letters == "AGAAAA");
}

TEST_CASE("GLY to ALA builds an ideal beta carbon") {
    Chain a = template_chain('A');
    Chain mutated = thread_sequence(a, TargetSequence("AGAAAA"));
    // template residue 127 is GLY (no CB); the target wants ALA there
    const Residue& res = mutated.residues[0];
    REQUIRE(res.name == "ALA");
    const Atom* cb = res.find_atom("CB");
    REQUIRE(cb);
    Vec3 n = res.find_atom("N")->pos;
    Vec3 ca = res.find_atom("CA")->pos;
    Vec3 c = res.find_atom("C")->pos;
    CHECK(std::fabs(distance(cb->pos, ca) - 1.53) <= 0.01);
    CHECK(std::fabs(angle_deg(n, ca, cb->pos) - 110.5) <= 1.0);
    CHECK(std::fabs(angle_deg(c, ca, cb->pos) - 110.5) <= 1.0);
}

TEST_CASE("VAL to ALA keeps the template CB and drops the branches") {
    Chain a = template_chain('A');
    const Residue& val = a.residues[2];  // VAL 129
    REQUIRE(val.name == "VAL");
    REQUIRE(val.find_atom("CG1"));
    REQUIRE(val.find_atom("CG2"));
    Vec3 cb_before = val.find_atom("CB")->pos;

    Chain mutated = thread_sequence(a, TargetSequence("AGAAAA"));
    const Residue& res = mutated.residues[2];
    CHECK(res.name == "ALA");
    CHECK(res.atoms.size() == 5);
    CHECK(res.find_atom("CB")->pos == cb_before);
    CHECK(!res.find_atom("CG1"));
    CHECK(!res.find_atom("CG2"));
}

TEST_CASE("threading an already-mutated chain is the identity") {
    Chain a = template_chain('A');
    Chain once = thread_sequence(a, TargetSequence("AGAAAA"));
    Chain twice = thread_sequence(once, TargetSequence("AGAAAA"));
    REQUIRE(once.residues.size() == twice.residues.size());
    for (size_t r = 0; r < once.residues.size(); ++r) {
        REQUIRE(once.residues[r].atoms.size() == twice.residues[r].atoms.size());
        for (size_t i = 0; i < once.residues[r].atoms.size(); ++i)
            CHECK(once.residues[r].atoms[i].pos == twice.residues[r].atoms[i].pos);
    }
}

TEST_CASE("atom sets are exactly backbone plus optional CB") {
    Chain mutated = thread_sequence(template_chain('B'), TargetSequence("GAAAAG"));
    for (size_t r = 0; r < mutated.residues.size(); ++r) {
        const Residue& res = mutated.residues[r];
        if (res.name == "GLY") {
            CHECK(res.atoms.size() == 4);
            CHECK(!res.find_atom("CB"));
        } else {
            CHECK(res.atoms.size() == 5);
            CHECK(res.find_atom("CB"));
        }
        for (const char* name : {"N", "CA", "C", "O"}) CHECK(res.find_atom(name));
    }
}

TEST_CASE("backbone atoms never move") {
    Chain b = template_chain('B');
    Chain mutated = thread_sequence(b, TargetSequence("AAAAGA"));
    for (size_t r = 0; r < b.residues.size(); ++r)
        for (const char* name : {"N", "CA", "C", "O"})
            CHECK(mutated.residues[r].find_atom(name)->pos ==
                  b.residues[r].find_atom(name)->pos);
}

TEST_CASE("length mismatch and missing backbone are rejected") {
    Chain a = template_chain('A');
    CHECK_THROWS_AS(thread_sequence(a, TargetSequence("AG")), ArgumentError);

    Chain broken = a;
    auto& atoms = broken.residues[3].atoms;
    std::erase_if(atoms, [](const Atom& at) { return at.name == "O"; });
    CHECK_THROWS_AS(thread_sequence(broken, TargetSequence("AGAAAA")), StructureError);
    try {
        thread_sequence(broken, TargetSequence("AGAAAA"));
    } catch (const StructureError& e) {
        CHECK(std::string(e.what()).find("130") != std::string::npos);
    }
}

TEST_CASE("mutations that only touch side chains keep every hydrogen bond") {
    Structure before = parse_pdb_file(kFixtures + "/template_ab.pdb");
    Structure after = before;
    for (auto& chain : after.chains) chain = thread_sequence(chain, TargetSequence("AGAAAA"));
    HBondReport report = preserved_hbond_check(before, after, 3.5);
    CHECK(report.retained_fraction == doctest::Approx(1.0));
    CHECK(report.before.size() == report.after.size());
}

TEST_CASE("zero cutoff means zero bonds") {
    Structure s = parse_pdb_file(kFixtures + "/template_ab.pdb");
    HBondReport report = preserved_hbond_check(s, s, 0.0);
    CHECK(report.before.empty());
    CHECK(report.after.empty());
    CHECK(report.retained_fraction == doctest::Approx(1.0));
    CHECK_THROWS_AS(preserved_hbond_check(s, s, -1.0), ArgumentError);
}

TEST_CASE("the stacked zipper shows backbone hydrogen bonds") {
    Structure zipper = parse_pdb_file(kFixtures + "/zipper12.pdb");
    auto bonds = backbone_hbonds(zipper, 3.5);
    CHECK(bonds.size() > 0);
    CHECK(bonds.size() == 32);  // frozen count for the bundled fixture
    for (const auto& b : bonds) {
        CHECK(b.dist <= 3.5);
        bool covalent_neighbour = b.chain_n == b.chain_o && std::abs(b.seq_n - b.seq_o) <= 2;
        CHECK(!covalent_neighbour);
    }
}
