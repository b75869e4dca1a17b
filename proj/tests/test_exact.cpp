#include <cmath>
#include <random>

#include "doctest.h"
#include "nfv/error.hpp"
#include "nfv/exact.hpp"
#include "nfv/heuristic.hpp"
#include "nfv/metrics.hpp"
#include "nfv/scenario.hpp"
#include "nfv/validate.hpp"

using namespace nfv;

namespace {

std::shared_ptr<const Problem> small_with(std::vector<ServiceRequest> reqs, double delay_mult = 1) {
  auto s = builtin_small_scale();
  s.delay_multiplier = delay_mult;
  Workload w;
  w.lifespan = 10;
  w.requests = std::move(reqs);
  s.requests = w;
  return instantiate(s, 1);
}

double cost_of(const std::vector<double>& mu, const std::vector<double>& c) {
  double sum = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) sum += mu[i] * c[i];
  return sum;
}

}  // namespace

TEST_CASE("min cost rates: symmetric case") {
  std::vector<double> in{0, 0}, cap{100, 100}, c{1, 1};
  auto mu = min_cost_rates(in, cap, c, 4);
  REQUIRE(mu);
  CHECK((*mu)[0] == doctest::Approx(0.5));
  CHECK((*mu)[1] == doctest::Approx(0.5));
}

TEST_CASE("min cost rates: unequal prices") {
  std::vector<double> in{0, 0}, cap{100, 100}, c{1, 4};
  auto mu = min_cost_rates(in, cap, c, 3);
  REQUIRE(mu);
  CHECK((*mu)[0] == doctest::Approx(1));
  CHECK((*mu)[1] == doctest::Approx(0.5));
}

TEST_CASE("min cost rates: intake shifts the rates") {
  std::vector<double> in{2, 2}, cap{100, 100}, c{1, 1};
  auto mu = min_cost_rates(in, cap, c, 4);
  REQUIRE(mu);
  CHECK((*mu)[0] == doctest::Approx(2.5));
}

TEST_CASE("min cost rates: infeasible budget") {
  std::vector<double> in{1, 1}, cap{1.1, 1.1}, c{1, 1};
  CHECK_FALSE(min_cost_rates(in, cap, c, 4));
}

TEST_CASE("min cost rates: clamped VM") {
  // the cheap VM would like a rate above its cap, the other makes up for it
  std::vector<double> in{0, 0}, cap{0.6, 100}, c{1, 100};
  auto mu = min_cost_rates(in, cap, c, 2);
  REQUIRE(mu);
  CHECK((*mu)[0] == doctest::Approx(0.6));
  CHECK(1 / (*mu)[0] + 1 / (*mu)[1] == doctest::Approx(2));
}

TEST_CASE("min cost rates agree with a grid search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> in{u(rng), u(rng)}, cap{in[0] + 0.5 + 2 * u(rng), in[1] + 0.5 + 2 * u(rng)}, c{0.1 + u(rng), 0.1 + u(rng)};
    const double budget = 1 / (cap[0] - in[0]) + 1 / (cap[1] - in[1]) + 0.5 + 3 * u(rng);
    auto mu = min_cost_rates(in, cap, c, budget);
    REQUIRE(mu);
    double best = 1e18;
    const int grid = 4000;
    for (int g = 0; g <= grid; ++g) {
      const double m0 = in[0] + 1e-9 + (cap[0] - in[0]) * g / grid;
      const double left = budget - 1 / (m0 - in[0]);
      if (left <= 0) continue;
      const double m1 = in[1] + 1 / left;
      if (m1 > cap[1]) continue;
      best = std::min(best, cost_of({m0, m1}, c));
    }
    CHECK(cost_of(*mu, c) <= best * 1.005);
    CHECK(1 / ((*mu)[0] - in[0]) + 1 / ((*mu)[1] - in[1]) <= budget * (1 + 1e-9));
  }
}

TEST_CASE("one request with one feasible placement") {
  auto p = small_with({{0, 0, 2, 5}}, 3.5);
  auto r = solve_exact(p);
  REQUIRE(r.run.state.served(0, 2));
  for (const auto& i : r.run.state.step(2).config(0)->instances) CHECK(p->network.vm(i.vm).name.rfind("medium", 0) == 0);
  auto m = compute_metrics(r.run.state);
  CHECK(r.objective == doctest::Approx(m.revenue - m.total_cost()));
  CHECK(validate(r.run.state).feasible());
}

TEST_CASE("contention for the only delay-feasible pair") {
  auto p = small_with({{0, 0, 1, 4}, {1, 0, 2, 8}}, 3.5);
  auto r = solve_exact(p);
  CHECK_FALSE(r.run.state.served(0, 1));
  CHECK(r.run.state.served(1, 2));
  CHECK(validate(r.run.state).feasible());
}

TEST_CASE("exact is never worse than the heuristic") {
  auto s = builtin_small_scale();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = instantiate(s, seed);
    auto e = solve_exact(p);
    auto h = run_heuristic(p, s.planner);
    CHECK(validate(e.run.state).feasible());
    CHECK(e.objective >= compute_metrics(h.state).objective - 1e-9);
  }
}

TEST_CASE("large scenario exceeds the solver limits") {
  auto p = instantiate(builtin_large_scale(), 1);
  CHECK_THROWS_AS(solve_exact(p), Error);
}
