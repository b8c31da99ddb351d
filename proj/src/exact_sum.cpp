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

#include "xtalmet/exact_sum.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace xtalmet {
namespace {

// Bit 0 of the accumulator has weight 2^-1074 (smallest subnormal).
constexpr int kBias = 1074;

}  // namespace

void ExactSum::add(double x) {
  if (!(x >= 0) || !std::isfinite(x)) {
    throw std::invalid_argument("ExactSum accepts non-negative finite values only");
  }
  if (x == 0) return;
  std::uint64_t bits = 0;
  std::memcpy(&bits, &x, sizeof bits);
  const int biased = static_cast<int>(bits >> 52);
  std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
  // Value is mant * 2^(pos - kBias) with pos counted from the subnormal LSB.
  int pos = 0;
  if (biased != 0) {
    mant |= std::uint64_t{1} << 52;
    pos = biased - 1;
  }
  const int limb = pos / 64;
  const unsigned __int128 v = static_cast<unsigned __int128>(mant) << (pos % 64);
  std::uint64_t parts[2] = {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
  std::uint64_t carry = 0;
  for (int i = limb; i < kLimbs; ++i) {
    const std::uint64_t addend = (i - limb < 2 ? parts[i - limb] : 0);
    const unsigned __int128 s =
        static_cast<unsigned __int128>(limbs_[i]) + addend + carry;
    limbs_[i] = static_cast<std::uint64_t>(s);
    carry = static_cast<std::uint64_t>(s >> 64);
    if (i - limb >= 1 && carry == 0) break;
  }
  if (carry) throw std::overflow_error("ExactSum overflow");
}

void ExactSum::merge(const ExactSum& other) {
  std::uint64_t carry = 0;
  for (int i = 0; i < kLimbs; ++i) {
    const unsigned __int128 s =
        static_cast<unsigned __int128>(limbs_[i]) + other.limbs_[i] + carry;
    limbs_[i] = static_cast<std::uint64_t>(s);
    carry = static_cast<std::uint64_t>(s >> 64);
  }
  if (carry) throw std::overflow_error("ExactSum overflow");
}

bool ExactSum::zero() const {
  for (auto l : limbs_) {
    if (l) return false;
  }
  return true;
}

double ExactSum::value() const {
  int top = kLimbs - 1;
  while (top >= 0 && limbs_[top] == 0) --top;
  if (top < 0) return 0.0;
  double out = 0.0;
  for (int i = top; i >= 0 && i >= top - 2; --i) {
    out += std::ldexp(static_cast<double>(limbs_[i]), 64 * i - kBias);
  }
  return out;
}

}  // namespace xtalmet
