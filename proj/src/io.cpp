// Copyright 2026 The xtalmet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xtalmet/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "xtalmet/elements.hpp"
#include "xtalmet/error.hpp"

namespace xtalmet {
namespace {

using nlohmann::json;

// Rounds to 12 significant digits; the shortest round-trip representation of
// the result is what gets written.
double round12(double x) { return std::stod(fmt::format("{:.12g}", x)); }

Vec3 read_triple(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw InputError(std::string(what) + " must be a list of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + " must be numeric");
    v[i] = j[i].get<double>();
  }
  return v;
}

const json& require(const json& rec, const char* key) {
  auto it = rec.find(key);
  if (it == rec.end()) throw InputError(std::string("missing required field '") + key + "'");
  return *it;
}

Crystal crystal_from_json(const json& rec) {
  if (!rec.is_object()) throw InputError("record is not a JSON object");
  const json& id = require(rec, "id");
  const json& lat = require(rec, "lattice");
  const json& species = require(rec, "species");
  const json& coords = require(rec, "frac_coords");
  if (!id.is_string()) throw InputError("'id' must be a string");
  if (!lat.is_array() || lat.size() != 3) throw InputError("'lattice' must be a 3x3 list");
  Mat3 basis;
  for (int r = 0; r < 3; ++r) basis.row(r) = read_triple(lat[r], "lattice row");
  if (!species.is_array() || !coords.is_array() || species.size() != coords.size()) {
    throw InputError("'species' and 'frac_coords' must be lists of equal length");
  }
  std::vector<Site> sites;
  sites.reserve(species.size());
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (!species[i].is_string()) throw InputError("species entries must be strings");
    sites.emplace_back(Element::from_symbol(species[i].get<std::string>()),
                       read_triple(coords[i], "frac_coords entry"));
  }
  std::optional<double> e_hull;
  if (auto it = rec.find("e_hull"); it != rec.end() && !it->is_null()) {
    if (!it->is_number()) throw InputError("'e_hull' must be a number");
    e_hull = it->get<double>();
  }
  std::optional<SymmetryRecord> symmetry;
  if (auto it = rec.find("symmetry"); it != rec.end() && !it->is_null()) {
    const json& sg = require(*it, "spacegroup");
    const json& wy = require(*it, "wyckoff");
    if (!sg.is_number_integer() || !wy.is_array()) {
      throw InputError("'symmetry' needs an integer spacegroup and a wyckoff list");
    }
    SymmetryRecord r;
    r.spacegroup = sg.get<int>();
    for (const auto& w : wy) {
      if (!w.is_string()) throw InputError("wyckoff letters must be strings");
      r.wyckoff.push_back(w.get<std::string>());
    }
    symmetry = std::move(r);
  }
  return Crystal(id.get<std::string>(), Lattice(basis), std::move(sites), std::move(symmetry),
                 e_hull);
}

}  // namespace

SampleSet parse_jsonl(std::istream& in, std::string label) {
  SampleSet set{std::move(label), {}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
      }
      set.crystals.push_back(crystal_from_json(rec));
    } catch (const InputError& e) {
      std::string msg = e.what();
      // "unknown element 'Xx'" -> "unknown element 'Xx' at line 3"
      throw InputError(msg + " at line " + std::to_string(lineno));
    }
  }
  if (set.crystals.empty()) throw InputError("empty sample set");
  return set;
}

SampleSet load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_jsonl(in, path.stem().string());
}

std::string to_json_record(const Crystal& c) {
  json rec;
  rec["id"] = c.id();
  json lat = json::array();
  for (int r = 0; r < 3; ++r) {
    lat.push_back({round12(c.lattice().basis()(r, 0)), round12(c.lattice().basis()(r, 1)),
                   round12(c.lattice().basis()(r, 2))});
  }
  rec["lattice"] = std::move(lat);
  json species = json::array(), coords = json::array();
  for (const Site& s : c.sites()) {
    species.push_back(std::string(s.element().symbol()));
    coords.push_back({round12(s.frac()[0]), round12(s.frac()[1]), round12(s.frac()[2])});
  }
  rec["species"] = std::move(species);
  rec["frac_coords"] = std::move(coords);
  if (c.e_hull()) rec["e_hull"] = round12(*c.e_hull());
  if (c.symmetry()) {
    rec["symmetry"] = {{"spacegroup", c.symmetry()->spacegroup},
                       {"wyckoff", c.symmetry()->wyckoff}};
  }
  return rec.dump();
}

void write_jsonl(std::ostream& out, const SampleSet& samples) {
  for (const Crystal& c : samples.crystals) out << to_json_record(c) << '\n';
}

std::string to_jsonl(const SampleSet& samples) {
  std::ostringstream out;
  write_jsonl(out, samples);
  return out.str();
}

// ---------------------------------------------------------------- CIF-lite

namespace {

std::vector<std::string> cif_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string line;
  bool in_text_field = false;
  std::string field;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == ';') {
      if (in_text_field) {
        tokens.push_back(field);
        field.clear();
        in_text_field = false;
      } else {
        in_text_field = true;
        field = line.substr(1);
      }
      continue;
    }
    if (in_text_field) {
      field += '\n' + line;
      continue;
    }
    std::size_t i = 0;
    while (i < line.size()) {
      const char ch = line[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else if (ch == '#') {
        break;
      } else if (ch == '\'' || ch == '"') {
        // A quote closes only when followed by whitespace or end of line.
        std::size_t j = i + 1;
        while (j < line.size() &&
               !(line[j] == ch &&
                 (j + 1 == line.size() || std::isspace(static_cast<unsigned char>(line[j + 1]))))) {
          ++j;
        }
        tokens.push_back(line.substr(i + 1, j - i - 1));
        i = j + 1;
      } else {
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        tokens.push_back(line.substr(i, j - i));
        i = j;
      }
    }
  }
  if (in_text_field) throw InputError("unterminated CIF text field");
  return tokens;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double cif_number(const std::string& token, const std::string& tag) {
  std::string t = token.substr(0, token.find('('));
  double v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) {
    throw InputError("bad number '" + token + "' for " + tag);
  }
  return v;
}

std::string element_from_label(const std::string& label) {
  std::string sym;
  for (char c : label) {
    if (!std::isalpha(static_cast<unsigned char>(c))) break;
    sym += sym.empty() ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                       : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  // "Zn1", "ZN", "Oa" style labels: fall back to the one-letter symbol.
  if (sym.size() > 1 && !atomic_number(sym)) sym.resize(1);
  return sym;
}

struct CifLoop {
  std::vector<std::string> tags;
  std::vector<std::string> values;

  std::size_t rows() const { return values.size() / tags.size(); }
  std::optional<std::size_t> column(std::string_view tag) const {
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (tags[i] == tag) return i;
    }
    return std::nullopt;
  }
  const std::string& at(std::size_t row, std::size_t col) const {
    return values[row * tags.size() + col];
  }
};

}  // namespace

Crystal parse_cif_lite(std::string_view text, std::string id) {
  const std::vector<std::string> tokens = cif_tokens(text);
  std::map<std::string, std::string> items;
  std::vector<CifLoop> loops;
  std::string block;
  for (std::size_t i = 0; i < tokens.size();) {
    const std::string& t = tokens[i];
    const std::string lt = lower(t);
    if (lt.rfind("data_", 0) == 0) {
      if (block.empty()) block = t.substr(5);
      ++i;
    } else if (lt == "loop_") {
      CifLoop loop;
      ++i;
      while (i < tokens.size() && tokens[i][0] == '_') loop.tags.push_back(lower(tokens[i++]));
      while (i < tokens.size() && tokens[i][0] != '_' && lower(tokens[i]) != "loop_" &&
             lower(tokens[i]).rfind("data_", 0) != 0) {
        loop.values.push_back(tokens[i++]);
      }
      if (loop.tags.empty() || loop.values.size() % loop.tags.size() != 0) {
        throw InputError("malformed CIF loop");
      }
      loops.push_back(std::move(loop));
    } else if (t[0] == '_') {
      if (i + 1 >= tokens.size()) throw InputError("CIF tag " + t + " has no value");
      items[lt] = tokens[i + 1];
      i += 2;
    } else {
      ++i;
    }
  }

  auto cell = [&](const char* tag) {
    auto it = items.find(tag);
    if (it == items.end()) throw InputError(std::string("missing ") + tag);
    return cif_number(it->second, tag);
  };
  const Lattice lattice = Lattice::from_parameters(
      cell("_cell_length_a"), cell("_cell_length_b"), cell("_cell_length_c"),
      cell("_cell_angle_alpha"), cell("_cell_angle_beta"), cell("_cell_angle_gamma"));

  const CifLoop* sites_loop = nullptr;
  for (const CifLoop& loop : loops) {
    for (const char* tag : {"_symmetry_equiv_pos_as_xyz", "_space_group_symop_operation_xyz"}) {
      if (auto col = loop.column(tag)) {
        for (std::size_t r = 0; r < loop.rows(); ++r) {
          std::string op;
          for (char c : lower(loop.at(r, *col))) {
            if (!std::isspace(static_cast<unsigned char>(c)) && c != '+') op += c;
          }
          if (loop.rows() > 1 || op != "x,y,z") {
            throw InputError("symmetry-expanded CIF unsupported");
          }
        }
      }
    }
    if (loop.column("_atom_site_fract_x")) sites_loop = &loop;
  }
  if (!sites_loop) throw InputError("missing atom_site loop");

  const auto fx = sites_loop->column("_atom_site_fract_x");
  const auto fy = sites_loop->column("_atom_site_fract_y");
  const auto fz = sites_loop->column("_atom_site_fract_z");
  const auto type = sites_loop->column("_atom_site_type_symbol");
  const auto label = sites_loop->column("_atom_site_label");
  const auto occ = sites_loop->column("_atom_site_occupancy");
  if (!fy || !fz || (!type && !label)) throw InputError("incomplete atom_site loop");

  std::vector<Site> sites;
  for (std::size_t r = 0; r < sites_loop->rows(); ++r) {
    if (occ && std::abs(cif_number(sites_loop->at(r, *occ), "_atom_site_occupancy") - 1.0) > 1e-6) {
      throw InputError("partial occupancy unsupported");
    }
    const std::string sym = element_from_label(sites_loop->at(r, type ? *type : *label));
    sites.emplace_back(Element::from_symbol(sym),
                       Vec3(cif_number(sites_loop->at(r, *fx), "_atom_site_fract_x"),
                            cif_number(sites_loop->at(r, *fy), "_atom_site_fract_y"),
                            cif_number(sites_loop->at(r, *fz), "_atom_site_fract_z")));
  }
  if (id.empty()) id = block;
  return Crystal(std::move(id), lattice, std::move(sites));
}

Crystal load_cif_lite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_cif_lite(buf.str(), path.stem().string());
}

SampleSet load_sample_set(const std::filesystem::path& path) {
  if (lower(path.extension().string()) == ".cif") {
    return SampleSet{path.stem().string(), {load_cif_lite(path)}};
  }
  return load_jsonl(path);
}

}  // namespace xtalmet
