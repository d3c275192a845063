#include "zipform/structure.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "zipform/errors.hpp"

namespace zipform {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Column slice, 1-based inclusive like the PDB format description; tolerates
// short lines.
std::string_view columns(const std::string& line, size_t first, size_t last) {
    if (line.size() < first) return {};
    size_t len = std::min(last, line.size()) - first + 1;
    return std::string_view(line).substr(first - 1, len);
}

double parse_double(std::string_view field, const char* what, int line_no) {
    std::string t = trim(field);
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": malformed " + what +
                         " field '" + t + "'");
    return v;
}

int parse_int(std::string_view field, const char* what, int line_no) {
    std::string t = trim(field);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
        throw ParseError("line " + std::to_string(line_no) + ": malformed " + what +
                         " field '" + t + "'");
    return v;
}

// Element from the name when columns 77-78 are blank ("CG1" -> C, "1HB" -> H).
std::string element_from_name(const std::string& name) {
    for (char c : name)
        if (std::isalpha(static_cast<unsigned char>(c))) return std::string(1, c);
    return "";
}

// Atom name in columns 13-16: names of 1-letter elements start in column 14.
std::string format_atom_name(const Atom& a) {
    std::string n = a.name;
    if (n.size() >= 4) return n.substr(0, 4);
    if (a.element.size() == 1) {
        n = " " + n;
        n.resize(4, ' ');
        return n;
    }
    n.resize(4, ' ');
    return n;
}

}  // namespace

const Atom* Residue::find_atom(std::string_view atom_name) const {
    for (const auto& a : atoms)
        if (a.name == atom_name) return &a;
    return nullptr;
}

const Residue* Chain::find_residue(int seq) const {
    for (const auto& r : residues)
        if (r.seq == seq) return &r;
    return nullptr;
}

const Chain* Structure::find_chain(char id) const {
    for (const auto& c : chains)
        if (c.id == id) return &c;
    return nullptr;
}

std::size_t Structure::atom_count() const {
    std::size_t n = 0;
    for (const auto& c : chains)
        for (const auto& r : c.residues) n += r.atoms.size();
    return n;
}

Structure parse_pdb(std::istream& in, ParseStats* stats) {
    Structure s;
    ParseStats local;
    // (chain, seq, name) already stored; repeats are either altlocs (dropped)
    // or genuine duplicates (rejected).
    std::set<std::tuple<char, int, std::string>> seen;
    std::set<std::tuple<char, int, std::string>> seen_with_altloc;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string record = trim(columns(line, 1, 6));
        if (record == "TER") {
            ++local.ter_records;
            continue;
        }
        if (record != "ATOM" && record != "HETATM") {
            if (!trim(line).empty()) ++local.ignored_records;
            continue;
        }

        Atom atom;
        atom.serial = parse_int(columns(line, 7, 11), "serial", line_no);
        atom.name = trim(columns(line, 13, 16));
        if (atom.name.empty() || atom.name.size() > 4)
            throw ParseError("line " + std::to_string(line_no) + ": bad atom name");
        char altloc = line.size() >= 17 ? line[16] : ' ';
        std::string res_name = trim(columns(line, 18, 20));
        char chain_id = line.size() >= 22 ? line[21] : ' ';
        int res_seq = parse_int(columns(line, 23, 26), "residue number", line_no);
        atom.pos.x = parse_double(columns(line, 31, 38), "x", line_no);
        atom.pos.y = parse_double(columns(line, 39, 46), "y", line_no);
        atom.pos.z = parse_double(columns(line, 47, 54), "z", line_no);
        std::string occ = trim(columns(line, 55, 60));
        std::string bf = trim(columns(line, 61, 66));
        atom.occupancy = occ.empty() ? 1.0 : parse_double(occ, "occupancy", line_no);
        atom.b_factor = bf.empty() ? 0.0 : parse_double(bf, "temp factor", line_no);
        atom.element = trim(columns(line, 77, 78));
        if (atom.element.empty()) atom.element = element_from_name(atom.name);

        auto key = std::make_tuple(chain_id, res_seq, atom.name);
        if (seen.count(key)) {
            if (altloc != ' ' || seen_with_altloc.count(key)) {
                ++local.altloc_dropped;  // keep the first, drop the rest
                continue;
            }
            throw StructureError("duplicate atom " + std::string(1, chain_id) +
                                 std::to_string(res_seq) + "." + atom.name);
        }
        seen.insert(key);
        if (altloc != ' ') seen_with_altloc.insert(key);

        Chain* chain = nullptr;
        for (auto& c : s.chains)
            if (c.id == chain_id) chain = &c;
        if (!chain) {
            s.chains.push_back(Chain{chain_id, {}});
            chain = &s.chains.back();
        }
        if (chain->residues.empty() || chain->residues.back().seq != res_seq) {
            if (!chain->residues.empty() && chain->residues.back().seq > res_seq)
                throw StructureError("line " + std::to_string(line_no) +
                                     ": residue numbers not increasing in chain " +
                                     std::string(1, chain_id));
            chain->residues.push_back(Residue{res_name, res_seq, {}});
        }
        chain->residues.back().atoms.push_back(std::move(atom));
    }
    if (stats) *stats = local;
    return s;
}

Structure parse_pdb(const std::string& text, ParseStats* stats) {
    std::istringstream in(text);
    return parse_pdb(in, stats);
}

Structure parse_pdb_file(const std::filesystem::path& path, ParseStats* stats) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_pdb(in, stats);
}

void write_pdb(const Structure& s, std::ostream& out) {
    if (!s.title.empty()) out << "TITLE     " << s.title << "\n";
    char buf[96];
    int serial = 0;
    for (const auto& chain : s.chains) {
        const Residue* last = nullptr;
        for (const auto& res : chain.residues) {
            for (const auto& atom : res.atoms) {
                if (std::fabs(atom.pos.x) >= 10000.0 || std::fabs(atom.pos.y) >= 10000.0 ||
                    std::fabs(atom.pos.z) >= 10000.0)
                    throw FormatError("coordinate out of range for atom " +
                                      std::string(1, chain.id) + std::to_string(res.seq) +
                                      "." + atom.name);
                ++serial;
                std::snprintf(buf, sizeof buf,
                              "ATOM  %5d %s %-3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %2s",
                              serial, format_atom_name(atom).c_str(), res.name.c_str(),
                              chain.id, res.seq, atom.pos.x, atom.pos.y, atom.pos.z,
                              atom.occupancy, atom.b_factor, atom.element.c_str());
                out << buf << "\n";
            }
            last = &res;
        }
        ++serial;
        if (last) {
            std::snprintf(buf, sizeof buf, "TER   %5d      %-3s %c%4d", serial,
                          last->name.c_str(), chain.id, last->seq);
            out << buf << "\n";
        } else {
            out << "TER\n";
        }
    }
    out << "END\n";
}

std::string write_pdb_string(const Structure& s) {
    std::ostringstream out;
    write_pdb(s, out);
    return out.str();
}

void write_pdb_file(const Structure& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_pdb(s, out);
}

Vec3 select_atom(const Structure& s, char chain, int seq, std::string_view atom_name) {
    std::string address =
        std::string(1, chain) + std::to_string(seq) + "." + std::string(atom_name);
    const Chain* c = s.find_chain(chain);
    if (!c) throw LookupError("no chain for address " + address);
    const Residue* r = c->find_residue(seq);
    if (!r) throw LookupError("no residue for address " + address);
    const Atom* a = r->find_atom(atom_name);
    if (!a) throw LookupError("no atom for address " + address);
    return a->pos;
}

}  // namespace zipform
