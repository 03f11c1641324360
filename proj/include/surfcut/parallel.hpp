// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace surfcut {

/// Worker count: SURFCUT_THREADS if set (clamped to >= 1), otherwise the
/// hardware concurrency.
[[nodiscard]] int worker_count();

/// Runs body(i) for i in [0, n) over contiguous static chunks. Bodies must
/// only write to slots owned by i; callers merge results in index order, so
/// output never depends on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace surfcut
