#include <doctest.h>

#include <cmath>

#include "dynkin/path.hpp"
#include "support.hpp"

using namespace dynkin;
using testing::generator;
using testing::random_sign_matrix;
using testing::random_valid_generator;

namespace {

PathRecord sample(const GeneratorMatrix& gen, const SignMatrix& s, Index start, std::uint64_t seed,
                  std::uint64_t index = 0) {
  const EmbeddedChain chain = embedded_chain(gen);
  RngStream rng = RngStream::make(seed, 1, index);
  return sample_path(chain, s, start, rng, 1000000);
}

bool identical(const PathRecord& a, const PathRecord& b) {
  return a.states == b.states && a.jump_times == b.jump_times && a.signs == b.signs &&
         a.absorbed == b.absorbed && a.end_time == b.end_time;
}

}  // namespace

TEST_CASE("single-state paths are one exponential holding then death") {
  const GeneratorMatrix gen = generator({{-1}});
  for (std::uint64_t i = 0; i < 50; ++i) {
    const PathRecord path = sample(gen, SignMatrix::all_positive(1), 0, 42, i);
    CHECK(path.absorbed);
    CHECK(path.states.size() == 1);
    CHECK(path.signs.back() == 1);
    CHECK(path.end_time > 0.0);
  }
}

TEST_CASE("paths are reproducible from the seed and absorbed well under the cap") {
  const GeneratorMatrix gen = generator({{-2, 1}, {1, -2}});
  const SignMatrix s = SignMatrix::all_positive(2);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const PathRecord a = sample(gen, s, 0, 7, i);
    const PathRecord b = sample(gen, s, 0, 7, i);
    CHECK(identical(a, b));
    CHECK(a.absorbed);
  }
  CHECK_FALSE(identical(sample(gen, s, 0, 7, 0), sample(gen, s, 0, 8, 0)));
}

TEST_CASE("jump cap raises instead of truncating") {
  // Conservative chain forced through a hand-built embedded chain: no
  // cemetery is ever reachable, so the cap must fire.
  EmbeddedChain chain;
  chain.p = testing::mat({{0, 1}, {1, 0}});
  chain.kill = Vector::Zero(2);
  chain.rates = Vector::Ones(2);
  RngStream rng = RngStream::make(3, 1, 0);
  CHECK_THROWS_AS(sample_path(chain, SignMatrix::all_positive(2), 0, rng, 64), PathCapError);
}

TEST_CASE("occupation and net occupation on a hand-built path") {
  // start at 0, one negative transition to 1, then death: holdings 0.7, 0.4.
  PathRecord path;
  path.states = {0, 1};
  path.jump_times = {0.0, 0.7};
  path.signs = {1, -1};
  path.absorbed = true;
  path.end_time = 1.1;

  CHECK(occupation(path, 0) == 0.7);
  CHECK(net_occupation(path, 0) == 0.7);
  CHECK(occupation(path, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(net_occupation(path, 1) == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(occupation(path, 5) == 0.0);  // never visited
  CHECK(net_occupation(path, 5) == 0.0);

  PathRecord unfinished = path;
  unfinished.absorbed = false;
  CHECK_THROWS_AS(occupation(unfinished, 0), StructuralError);
  CHECK_THROWS_AS(net_occupation(unfinished, 0), StructuralError);
}

TEST_CASE("per-path invariants hold on simulated trajectories") {
  RngStream master = RngStream::make(99, 0, 0);
  const GeneratorMatrix gen = random_valid_generator(master, 5);
  const SignMatrix s = random_sign_matrix(master, 5);
  const EmbeddedChain chain = embedded_chain(gen);

  for (std::uint64_t i = 0; i < 300; ++i) {
    RngStream rng = RngStream::make(5, 1, i);
    const PathRecord path = sample_path(chain, s, static_cast<Index>(i % 5), rng, 1000000);
    REQUIRE(path.absorbed);
    REQUIRE(path.states.size() == path.jump_times.size());
    REQUIRE(path.states.size() == path.signs.size());

    // Arrival times strictly increase and end after the last arrival.
    for (std::size_t k = 1; k < path.jump_times.size(); ++k) {
      CHECK(path.jump_times[k] > path.jump_times[k - 1]);
    }
    CHECK(path.end_time > path.jump_times.back());

    // Total occupation is the lifetime; net occupation is dominated statewise.
    double total = 0.0;
    for (Index x = 0; x < 5; ++x) {
      const double occ = occupation(path, x);
      CHECK(std::abs(net_occupation(path, x)) <= occ + 1e-15);
      total += occ;
    }
    CHECK(total == doctest::Approx(path.lifetime()).epsilon(1e-12));

    // The stored sign is the parity of negative transitions, re-derived.
    int parity = 1;
    for (std::size_t k = 1; k < path.states.size(); ++k) {
      parity *= s.sign(path.states[k - 1], path.states[k]);
      CHECK(path.signs[k] == parity);
    }
    CHECK(path.signs[0] == 1);
  }
}

TEST_CASE("all-positive signs make net occupation identical to occupation") {
  RngStream master = RngStream::make(123, 0, 0);
  const GeneratorMatrix gen = random_valid_generator(master, 4);
  const EmbeddedChain chain = embedded_chain(gen);
  const SignMatrix s = SignMatrix::all_positive(4);
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng = RngStream::make(6, 1, i);
    const PathRecord path = sample_path(chain, s, 0, rng, 1000000);
    for (Index x = 0; x < 4; ++x) {
      CHECK(net_occupation(path, x) == occupation(path, x));  // bit-identical
    }
  }
}

TEST_CASE("first_hit") {
  SUBCASE("one-step hit carries the transition sign") {
    PathRecord path;
    path.states = {1, 0};
    path.jump_times = {0.0, 0.3};
    path.signs = {1, -1};  // negative transition into the target set
    path.absorbed = true;
    path.end_time = 0.5;
    const auto hit = first_hit(path, {0});
    REQUIRE(hit.has_value());
    CHECK(hit->jump_index == 1);
    CHECK(hit->time == 0.3);
    CHECK(hit->state == 0);
    CHECK(hit->sign == -1);
  }

  SUBCASE("killed before reaching the set") {
    PathRecord path;
    path.states = {1, 2};
    path.jump_times = {0.0, 0.3};
    path.signs = {1, 1};
    path.absorbed = true;
    path.end_time = 0.5;
    CHECK_FALSE(first_hit(path, {0}).has_value());
  }

  SUBCASE("a start inside the set only counts from the first jump on") {
    // start at 0 (inside A), leave to 1, come back: the return is the hit and
    // its sign is the product of the two symmetric transition signs, +1.
    PathRecord path;
    path.states = {0, 1, 0};
    path.jump_times = {0.0, 0.2, 0.9};
    path.signs = {1, -1, 1};
    path.absorbed = true;
    path.end_time = 1.4;
    const auto hit = first_hit(path, {0});
    REQUIRE(hit.has_value());
    CHECK(hit->jump_index == 2);
    CHECK(hit->sign == 1);
  }
}
