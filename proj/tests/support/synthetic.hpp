// Copyright (c) 2026 The MINet-cpp Authors. All Rights Reserved.
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
#include <filesystem>
#include <string>

#include "minet/data.hpp"

namespace minet::testing {

struct SyntheticPair {
  data::GrayImage image;
  data::GrayImage mask;
};

/// Textured steel-like background with one defect: a dark inclusion, a
/// bright patch or a thin scratch, chosen by index % 3.
SyntheticPair synthetic_pair(int size, int index, std::uint64_t seed);

/// Writes count pairs as root/split/{images,masks}/sample_NNN.png, with the
/// images inside class folders when class_folders is set.
void write_synthetic_split(const std::filesystem::path& root, const std::string& split,
                           int count, int size, std::uint64_t seed, bool class_folders = false);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace minet::testing
