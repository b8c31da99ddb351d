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

#include <cstddef>
#include <cstdint>

#include "xtalmet/structures.hpp"

namespace xtalmet {

inline constexpr std::size_t kDefaultSiteCap = 10000;

// Lattice rows scaled by (n1, n2, n3); sites replicated in order. Symmetry
// labels and e_hull are carried over unchanged.
Crystal make_supercell(const Crystal& crystal, int n1, int n2, int n3,
                       std::size_t site_cap = kDefaultSiteCap);

// Krivy-Gruber reduction with tolerance tol * V^(1/3). Throws
// std::runtime_error if it has not converged after 1000 steps.
Lattice niggli_reduce(const Lattice& lattice, double tol = 1e-5);

// Same crystal expressed in the Niggli-reduced basis.
Crystal niggli_reduce(const Crystal& crystal, double tol = 1e-5);

// Factors out every internal translation that maps the site set onto itself
// within site_tol (Angstrom), then Niggli-reduces. Candidate translations
// are differences between sites of the rarest element.
Crystal primitive_reduce(const Crystal& crystal, double site_tol = 1e-3);

// Rigid motion: rotation (orthogonal within 1e-10, proper or improper) then
// translation in Angstrom. An improper rotation is absorbed by negating the
// basis so the lattice stays right-handed.
Crystal apply_isometry(const Crystal& crystal, const Mat3& rotation,
                       const Vec3& translation);

// Moves each site by an independent random vector: direction uniform on the
// sphere, length uniform in [0, eps]. Deterministic for a given seed
// (mt19937_64). Symmetry labels are dropped.
Crystal perturb_sites(const Crystal& crystal, double eps, std::uint64_t seed);

}  // namespace xtalmet
