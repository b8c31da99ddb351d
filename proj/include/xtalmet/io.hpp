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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "xtalmet/structures.hpp"

namespace xtalmet {

// JSONL structure records, one crystal per line:
//   {"id": str, "lattice": [[3],[3],[3]], "species": [str...],
//    "frac_coords": [[3]...], "e_hull": num?, "symmetry":
//    {"spacegroup": int, "wyckoff": [str...]}?}
// Blank lines are skipped. Errors carry the 1-based line number.
SampleSet parse_jsonl(std::istream& in, std::string label = {});
SampleSet load_jsonl(const std::filesystem::path& path);

// Floats are written with 12 significant digits.
void write_jsonl(std::ostream& out, const SampleSet& samples);
std::string to_jsonl(const SampleSet& samples);
std::string to_json_record(const Crystal& crystal);

// Explicit-site CIF subset: cell lengths/angles plus one atom_site loop.
// Files whose symmetry-operator loop contains anything but x,y,z are rejected.
Crystal parse_cif_lite(std::string_view text, std::string id = {});
Crystal load_cif_lite(const std::filesystem::path& path);

// Dispatches on extension: .cif gives a one-crystal set, anything else is
// read as JSONL.
SampleSet load_sample_set(const std::filesystem::path& path);

}  // namespace xtalmet
