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

#include "xtalmet/symmetry.hpp"

#include <algorithm>

#include "xtalmet/error.hpp"

namespace xtalmet {

std::string symmetry_key(const SymmetryRecord& record) {
  std::vector<std::string> letters = record.wyckoff;
  std::sort(letters.begin(), letters.end());
  std::string key = std::to_string(record.spacegroup) + ":";
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) key += ',';
    key += letters[i];
  }
  return key;
}

int d_wyckoff(const Crystal& a, const Crystal& b) {
  if (!a.symmetry() || !b.symmetry()) {
    throw InputError("symmetry metadata required for d_wyckoff");
  }
  return symmetry_key(*a.symmetry()) == symmetry_key(*b.symmetry()) ? 0 : 1;
}

}  // namespace xtalmet
