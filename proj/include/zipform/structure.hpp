// Hierarchical molecular model (structure - chain - residue - atom) with
// fixed-column PDB ATOM record ingestion and emission.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "zipform/geom.hpp"

namespace zipform {

struct Atom {
    int serial = 0;
    std::string name;     // e.g. "CA", "CB", "N"
    std::string element;  // e.g. "C", "N", "O"
    Vec3 pos;             // angstroms
    double occupancy = 1.0;
    double b_factor = 0.0;
};

struct Residue {
    std::string name;  // 3-letter code
    int seq = 0;
    std::vector<Atom> atoms;

    const Atom* find_atom(std::string_view atom_name) const;
    bool has_atom(std::string_view atom_name) const { return find_atom(atom_name) != nullptr; }
};

struct Chain {
    char id = ' ';
    std::vector<Residue> residues;

    const Residue* find_residue(int seq) const;
};

struct Structure {
    std::string title;
    std::vector<Chain> chains;

    const Chain* find_chain(char id) const;
    std::size_t atom_count() const;
};

struct ParseStats {
    int ignored_records = 0;   // non-ATOM/HETATM/TER records
    int altloc_dropped = 0;    // alternate locations beyond the first
    int ter_records = 0;
};

// Parses fixed-column ATOM/HETATM records; everything else is counted and
// ignored. Atoms are grouped into residues and chains by the chain-id and
// residue-number columns. Throws ParseError (naming the line number) on a
// malformed coordinate field and StructureError on duplicate
// (chain, seq, atom name) without an alternate-location indicator.
Structure parse_pdb(std::istream& in, ParseStats* stats = nullptr);
Structure parse_pdb(const std::string& text, ParseStats* stats = nullptr);
Structure parse_pdb_file(const std::filesystem::path& path, ParseStats* stats = nullptr);

// Emits one ATOM record per atom, chains separated by TER, coordinates
// rounded to 3 decimals. Throws FormatError when a coordinate magnitude
// does not fit the 8.3 column (>= 10000 A).
void write_pdb(const Structure& s, std::ostream& out);
std::string write_pdb_string(const Structure& s);
void write_pdb_file(const Structure& s, const std::filesystem::path& path);

// Position of the addressed atom; throws LookupError naming the full
// address (e.g. "B6.CB") when the chain, residue or atom is missing.
Vec3 select_atom(const Structure& s, char chain, int seq, std::string_view atom_name);

}  // namespace zipform
