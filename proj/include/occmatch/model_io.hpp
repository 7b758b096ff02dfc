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


// Weights files and training logs.

#ifndef OCCMATCH_MODEL_IO_HPP_
#define OCCMATCH_MODEL_IO_HPP_

#include <filesystem>
#include <span>
#include <string>

#include "occmatch/model.hpp"

namespace occmatch {

inline constexpr int kWeightsFormatVersion = 1;

// {"format", "feature_dim", "hidden", "modes", "horizon", "heads": {"class":
// [{"in", "out", "weight", "bias"}, ...], "position", "mode", "trajectory"}}
// with row-major value arrays at round-trip precision.
std::string SerializeWeights(const HeadWeights& weights);
// Throws Error(kParseError) on malformed documents and Error(kShapeMismatch)
// when the layer shapes disagree.
HeadWeights ParseWeights(const std::string& text);

void WriteWeightsFile(const std::filesystem::path& path, const HeadWeights& weights);
HeadWeights ReadWeightsFile(const std::filesystem::path& path);

// One JSON object per line: epoch, class_loss, pos_loss, traj_loss, total and
// probe_redundancy (null without a probe set).
std::string SerializeEpochRecord(const EpochRecord& record);
std::string SerializeTrainLog(std::span<const EpochRecord> log);

}  // namespace occmatch

#endif  // OCCMATCH_MODEL_IO_HPP_
