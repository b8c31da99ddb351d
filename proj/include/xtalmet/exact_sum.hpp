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

#include <array>
#include <cstdint>

namespace xtalmet {

/// Exact accumulator for non-negative finite doubles. The running sum is held
/// as a fixed-point integer wide enough for the full double range, so the
/// result does not depend on the order of additions or on how partial sums
/// are merged.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  /// The exact sum rounded to a double (deterministic in the exact value).
  double value() const;
  bool zero() const;

 private:
  static constexpr int kLimbs = 35;
  std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace xtalmet
