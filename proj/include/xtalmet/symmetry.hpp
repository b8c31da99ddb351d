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

#include <string>

#include "xtalmet/structures.hpp"

namespace xtalmet {

// "186:b,b" -- space group and sorted Wyckoff letters. Equal keys <=> equal
// (space group, letter multiset).
std::string symmetry_key(const SymmetryRecord& record);

// 0 iff space groups and Wyckoff-letter multisets match. Elements are
// ignored. Throws InputError when either crystal lacks symmetry metadata.
int d_wyckoff(const Crystal& a, const Crystal& b);

}  // namespace xtalmet
