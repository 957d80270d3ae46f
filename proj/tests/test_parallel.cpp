#include <atomic>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "l2ext/parallel.hpp"

using namespace l2ext;

TEST_SUITE("parallel") {

TEST_CASE("every index runs once") {
  for (int jobs : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, jobs);
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("exceptions propagate") {
  CHECK_THROWS_AS(parallel_for(
                      100,
                      [](std::size_t i) {
                        if (i == 37) throw std::runtime_error("boom");
                      },
                      4),
                  std::runtime_error);
}

TEST_CASE("default jobs") {
  const int old = default_jobs();
  set_default_jobs(4);
  CHECK(default_jobs() == 4);
  set_default_jobs(old);
}

}  // TEST_SUITE
