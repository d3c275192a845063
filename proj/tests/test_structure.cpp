#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "zipform/errors.hpp"
#include "zipform/structure.hpp"

using namespace zipform;

namespace {

const std::string kFixtures = ZIPFORM_FIXTURE_DIR;

bool structures_equal(const Structure& a, const Structure& b) {
    if (a.chains.size() != b.chains.size()) return false;
    for (size_t c = 0; c < a.chains.size(); ++c) {
        if (a.chains[c].id != b.chains[c].id) return false;
        if (a.chains[c].residues.size() != b.chains[c].residues.size()) return false;
        for (size_t r = 0; r < a.chains[c].residues.size(); ++r) {
            const Residue& ra = a.chains[c].residues[r];
            const Residue& rb = b.chains[c].residues[r];
            if (ra.name != rb.name || ra.seq != rb.seq) return false;
            if (ra.atoms.size() != rb.atoms.size()) return false;
            for (size_t i = 0; i < ra.atoms.size(); ++i) {
                if (ra.atoms[i].name != rb.atoms[i].name) return false;
                if (!(ra.atoms[i].pos == rb.atoms[i].pos)) return false;
            }
        }
    }
    return true;
}

constexpr const char* kOneAtom =
    "ATOM      1  CA  ALA A   1       1.000   2.000   3.000  1.00  0.00           C\n";

}  // namespace

TEST_CASE("single ATOM record maps fields directly") {
    Structure s = parse_pdb(std::string(kOneAtom));
    REQUIRE(s.chains.size() == 1);
    CHECK(s.chains[0].id == 'A');
    REQUIRE(s.chains[0].residues.size() == 1);
    const Residue& res = s.chains[0].residues[0];
    CHECK(res.name == "ALA");
    CHECK(res.seq == 1);
    REQUIRE(res.atoms.size() == 1);
    CHECK(res.atoms[0].name == "CA");
    CHECK(res.atoms[0].element == "C");
    CHECK(res.atoms[0].pos == Vec3{1.0, 2.0, 3.0});
}

TEST_CASE("empty input parses to an empty structure") {
    Structure s = parse_pdb(std::string(""));
    CHECK(s.chains.empty());
    CHECK(s.atom_count() == 0);
}

TEST_CASE("12-chain zipper fixture has chains A..L") {
    Structure s = parse_pdb_file(kFixtures + "/zipper12.pdb");
    REQUIRE(s.chains.size() == 12);
    std::string ids;
    for (const auto& c : s.chains) ids += c.id;
    CHECK(ids == "ABCDEFGHIJKL");
}

TEST_CASE("round trip is idempotent at 3 decimals") {
    Structure s1 = parse_pdb_file(kFixtures + "/zipper12.pdb");
    std::string w1 = write_pdb_string(s1);
    Structure s2 = parse_pdb(w1);
    std::string w2 = write_pdb_string(s2);
    CHECK(w1 == w2);
    CHECK(structures_equal(s1, s2));
    CHECK(s1.atom_count() == s2.atom_count());
}

TEST_CASE("coordinates round to 3 decimals on write") {
    Structure s = parse_pdb(std::string(kOneAtom));
    s.chains[0].residues[0].atoms[0].pos = {1.23456, 0.0, 0.0};
    std::string text = write_pdb_string(s);
    CHECK(text.find("   1.235") != std::string::npos);
}

TEST_CASE("one TER per chain") {
    std::string two_chains = std::string(kOneAtom) +
        "ATOM      2  CA  ALA B   1       4.000   5.000   6.000  1.00  0.00           C\n";
    std::string text = write_pdb_string(parse_pdb(two_chains));
    size_t count = 0, pos = 0;
    while ((pos = text.find("TER", pos)) != std::string::npos) {
        ++count;
        pos += 3;
    }
    CHECK(count == 2);
}

TEST_CASE("select_atom returns anchor coordinates from the template") {
    Structure s = parse_pdb_file(kFixtures + "/template_ab.pdb");
    Vec3 b6 = select_atom(s, 'B', 132, "CB");
    CHECK(b6.x == doctest::Approx(-16.359).epsilon(1e-12));
    CHECK(b6.y == doctest::Approx(9.934).epsilon(1e-12));
    CHECK(b6.z == doctest::Approx(-3.526).epsilon(1e-12));
    Vec3 a3 = select_atom(s, 'A', 129, "CB");
    CHECK(a3.x == doctest::Approx(-8.655).epsilon(1e-12));
    CHECK(a3.y == doctest::Approx(8.153).epsilon(1e-12));
    CHECK(a3.z == doctest::Approx(1.770).epsilon(1e-12));
}

TEST_CASE("missing addresses raise lookup errors naming the address") {
    Structure s = parse_pdb(std::string(kOneAtom));
    CHECK_THROWS_AS(select_atom(s, 'Z', 1, "CA"), LookupError);
    CHECK_THROWS_AS(select_atom(s, 'A', 99, "CA"), LookupError);
    CHECK_THROWS_AS(select_atom(s, 'A', 1, "CB"), LookupError);
    try {
        select_atom(s, 'Z', 1, "CA");
    } catch (const LookupError& e) {
        CHECK(std::string(e.what()).find("Z1.CA") != std::string::npos);
    }
}

TEST_CASE("selection is total over enumerable addresses") {
    Structure s = parse_pdb_file(kFixtures + "/template_ab.pdb");
    for (const auto& chain : s.chains)
        for (const auto& res : chain.residues)
            for (const auto& atom : res.atoms)
                CHECK(select_atom(s, chain.id, res.seq, atom.name) == atom.pos);
}

TEST_CASE("malformed coordinate names the line") {
    std::string bad =
        "ATOM      1  CA  ALA A   1       1.0x0   2.000   3.000  1.00  0.00           C\n";
    CHECK_THROWS_AS(parse_pdb(bad), ParseError);
    try {
        parse_pdb(bad);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("duplicate atom without altloc is a structural error") {
    std::string dup = std::string(kOneAtom) + kOneAtom;
    CHECK_THROWS_AS(parse_pdb(dup), StructureError);
}

TEST_CASE("alternate locations keep the first and count the rest") {
    std::string altloc =
        "ATOM      1  CA AALA A   1       1.000   2.000   3.000  0.50  0.00           C\n"
        "ATOM      2  CA BALA A   1       9.000   9.000   9.000  0.50  0.00           C\n";
    ParseStats stats;
    Structure s = parse_pdb(altloc, &stats);
    CHECK(stats.altloc_dropped == 1);
    REQUIRE(s.atom_count() == 1);
    CHECK(s.chains[0].residues[0].atoms[0].pos.x == doctest::Approx(1.0));
}

TEST_CASE("non-ATOM records are counted and ignored") {
    std::string text = "HEADER    SOMETHING\nREMARK  1 NOTE\n" + std::string(kOneAtom);
    ParseStats stats;
    Structure s = parse_pdb(text, &stats);
    CHECK(stats.ignored_records == 2);
    CHECK(s.atom_count() == 1);
}

TEST_CASE("occupancy and temp factor default when absent") {
    std::string short_line = "ATOM      1  CA  ALA A   1       1.000   2.000   3.000\n";
    Structure s = parse_pdb(short_line);
    const Atom& a = s.chains[0].residues[0].atoms[0];
    CHECK(a.occupancy == doctest::Approx(1.0));
    CHECK(a.b_factor == doctest::Approx(0.0));
    std::string text = write_pdb_string(s);
    CHECK(text.find("  1.00  0.00") != std::string::npos);
}

TEST_CASE("huge coordinates cannot be formatted") {
    Structure s = parse_pdb(std::string(kOneAtom));
    s.chains[0].residues[0].atoms[0].pos.x = 10000.0;
    CHECK_THROWS_AS(write_pdb_string(s), FormatError);
}

TEST_CASE("decreasing residue numbers within a chain are rejected") {
    std::string bad =
        "ATOM      1  CA  ALA A   5       1.000   2.000   3.000  1.00  0.00           C\n"
        "ATOM      2  CA  ALA A   4       2.000   2.000   3.000  1.00  0.00           C\n";
    CHECK_THROWS_AS(parse_pdb(bad), StructureError);
}
