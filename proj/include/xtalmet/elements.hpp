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

#include <optional>
#include <string_view>

namespace xtalmet {

inline constexpr int kMaxAtomicNumber = 103;

// Atomic number for a chemical symbol (case-sensitive, "Zn" not "ZN").
std::optional<int> atomic_number(std::string_view symbol);

// Symbol for 1 <= z <= kMaxAtomicNumber; throws std::out_of_range otherwise.
std::string_view element_symbol(int z);

}  // namespace xtalmet
