// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "support.hpp"
#include "surfcut/parallel.hpp"

using namespace surfcut;

TEST_CASE("worker count follows SURFCUT_THREADS", "[parallel]") {
  {
    test::ThreadsGuard g(3);
    CHECK(worker_count() == 3);
  }
  {
    test::ThreadsGuard g(0);
    CHECK(worker_count() == 1);
  }
}

TEST_CASE("every index runs exactly once", "[parallel]") {
  for (int threads : {1, 2, 3, 8}) {
    test::ThreadsGuard g(threads);
    for (std::size_t n : {0u, 1u, 2u, 7u, 1000u}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_for(n, [&](std::size_t i) { hits[i]++; });
      for (auto& h : hits) CHECK(h.load() == 1);
    }
  }
}

TEST_CASE("the lowest failing index is reported", "[parallel]") {
  for (int threads : {1, 2, 5}) {
    test::ThreadsGuard g(threads);
    try {
      parallel_for(100, [](std::size_t i) {
        if (i == 13 || i == 77) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "13");
    }
  }
}
