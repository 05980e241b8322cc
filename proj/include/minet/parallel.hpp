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

#include <functional>

namespace minet {

/// Worker count for kernel-internal parallelism: MINET_THREADS when set,
/// otherwise the hardware concurrency.
int thread_count();

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on
/// each. Each index is visited by exactly one worker, so kernels that write
/// only the outputs owned by their indices stay bit-identical for any
/// thread count.
void parallel_for(int count, const std::function<void(int, int)>& body);

}  // namespace minet
