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


#ifndef OCCMATCH_SCENE_IO_HPP_
#define OCCMATCH_SCENE_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "occmatch/scene.hpp"

namespace occmatch {

inline constexpr int kSceneFormatVersion = 1;

// One scene per document, "format": 1. Doubles are written with
// shortest round-trip precision so read(write(s)) reproduces s exactly.
std::string SerializeScene(const Scene& scene);
Scene ParseScene(const std::string& text);  // throws Error(kParseError)

void WriteSceneFile(const std::filesystem::path& path, const Scene& scene);
Scene ReadSceneFile(const std::filesystem::path& path);

// All scene files (*.json except manifest.json) under dir, recursively, in
// lexicographic path order.
std::vector<std::filesystem::path> ListSceneFiles(const std::filesystem::path& dir);

// Small file helpers that map failures onto Error(kIoError) with the path.
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace occmatch

#endif  // OCCMATCH_SCENE_IO_HPP_
