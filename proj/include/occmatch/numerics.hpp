/* Copyright 2026 The occmatch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#ifndef OCCMATCH_NUMERICS_HPP_
#define OCCMATCH_NUMERICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace occmatch {

inline double LogSumExp(std::span<const double> v) {
  double hi = -INFINITY;
  for (double x : v) hi = std::max(hi, x);
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

inline void Softmax(std::span<const double> v, std::span<double> out) {
  const double lse = LogSumExp(v);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i] - lse);
}

// Cross-entropy of softmax(logits) against a one-hot target.
inline double SoftmaxCrossEntropy(std::span<const double> logits, std::size_t target) {
  return LogSumExp(logits) - logits[target];
}

}  // namespace occmatch

#endif  // OCCMATCH_NUMERICS_HPP_
