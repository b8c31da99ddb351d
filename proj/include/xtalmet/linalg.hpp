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

#include <Eigen/Dense>

namespace xtalmet {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Wraps each component into [0, 1).
inline Vec3 wrap_unit(const Vec3& f) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    double w = f[i] - std::floor(f[i]);
    out[i] = w >= 1.0 ? 0.0 : w;
  }
  return out;
}

// Wraps each component into [-0.5, 0.5).
inline Vec3 wrap_centered(const Vec3& f) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = f[i] - std::floor(f[i] + 0.5);
  return out;
}

}  // namespace xtalmet
