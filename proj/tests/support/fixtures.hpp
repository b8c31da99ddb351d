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

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "xtalmet/metrics.hpp"
#include "xtalmet/structures.hpp"

namespace xtalmet::testing {

// Reference structures: wurtzite ZnO and GaN, rock-salt ZnO (primitive fcc
// cell) and rhombohedral Bi2Te3 in its 15-site hexagonal setting.
Crystal wz_zno();
Crystal rs_zno();
Crystal wz_gan();
Crystal bi2te3();
Crystal wz_zno_supercell();  // 2x2x2
Crystal simple_cubic(double a = 1.0, const char* element = "Po");
// 2x2x1 wz-ZnO supercell with 0.3 A site noise (seed 1); 16 sites, no
// internal translations. Base for the matcher chain fixture.
Crystal chain_base();

// Random crystal: 1..max_sites sites drawn from `elements`, lattice lengths in
// [3, 6] A, angles in [75, 105] deg, sites at least 1 A apart. Attaches a
// random symmetry record from a small pool and an e_hull in [0, 0.3].
struct RandomCrystalOptions {
  int max_sites = 4;
  std::vector<const char*> elements = {"Li", "O", "Zn", "Ga", "N", "Si"};
  int symmetry_pool = 4;
};
Crystal random_crystal(std::mt19937_64& rng, const RandomCrystalOptions& opt = {});
SampleSet random_set(std::mt19937_64& rng, std::size_t n, const RandomCrystalOptions& opt = {});

// Haar-random orthogonal matrix, improper with probability 1/2.
Mat3 random_rotation(std::mt19937_64& rng);

// Brute-force AMD: every lattice translate in a growing box, stopping once
// the box provably covers the k-th neighbour of every site.
std::vector<double> brute_force_amd(const Crystal& c, int k);

using PairDistance = std::function<double(const Crystal&, const Crystal&)>;

// Double-loop evaluations of the metric definitions over crystals.
double oracle_discrete_uniqueness(const std::vector<Crystal>& x, const PairDistance& d,
                                  std::size_t n);
double oracle_continuous_uniqueness(const std::vector<Crystal>& x, const PairDistance& d,
                                    std::size_t n);
double oracle_discrete_novelty(const std::vector<Crystal>& x, const std::vector<Crystal>& y,
                               const PairDistance& d, std::size_t n);
double oracle_continuous_novelty(const std::vector<Crystal>& x, const std::vector<Crystal>& y,
                                 const PairDistance& d, std::size_t n);

PairDistance pair_distance(DistanceKind kind, int k = kDefaultAmdK);

// Published screened uniqueness and novelty for six generative models.
struct PublishedRow {
  DistanceKind kind;
  std::array<double, 6> uniqueness;
  std::array<double, 6> novelty;
};
const std::array<const char*, 6>& published_models();
const std::vector<PublishedRow>& published_screened_rows();
std::vector<MetricReport> published_reports(const PublishedRow& row);

}  // namespace xtalmet::testing
