#include <random>

#include "doctest.h"
#include "nfv/error.hpp"
#include "nfv/service.hpp"

using namespace nfv;

namespace {

ServiceSpec branch() {
  ServiceSpec s = ServiceSpec::chain("b", {{"q1", 1, 1}, {"q2", 1, 1}, {"q3", 1, 1}}, 10, 50, 1);
  s.set_prob(0, 1, 0.3);
  s.set_prob(0, 2, 0.7);
  s.set_prob(1, 2, 0);
  s.set_prob(2, kDummyVnf, 1);
  s.set_prob(1, kDummyVnf, 1);
  return s;
}

}  // namespace

TEST_CASE("chain rates") {
  auto s = ServiceSpec::chain("c", {{"q1", 1, 1}, {"q2", 1, 1}}, 3, 10, 1);
  auto r = solve_vnf_rates(s);
  CHECK(r[0] == doctest::Approx(3));
  CHECK(r[1] == doctest::Approx(3));
  auto e = edge_traffic(s, r);
  CHECK(e.at(0, 1) == doctest::Approx(3));
  CHECK(e.at(kDummyVnf, 0) == doctest::Approx(3));
  CHECK(e.at(1, kDummyVnf) == doctest::Approx(3));
}

TEST_CASE("branching rates") {
  auto s = branch();
  auto r = solve_vnf_rates(s);
  CHECK(r[1] == doctest::Approx(3));
  CHECK(r[2] == doctest::Approx(7));
  auto e = edge_traffic(s, r);
  CHECK(e.at(0, 1) == doctest::Approx(3));
  CHECK(e.at(0, 2) == doctest::Approx(7));
  auto report = validate_service(s);
  CHECK(report.valid);
  CHECK_FALSE(report.chain);
}

TEST_CASE("cycle with unit gain diverges") {
  auto s = ServiceSpec::chain("loop", {{"q1", 1, 1}, {"q2", 1, 1}}, 1, 10, 1);
  s.set_prob(1, kDummyVnf, 0);
  s.set_prob(1, 0, 1);
  CHECK_THROWS_AS(solve_vnf_rates(s), Error);
}

TEST_CASE("damped cycle matches a fixed-point iteration") {
  auto s = ServiceSpec::chain("loop", {{"q1", 1, 1}, {"q2", 1, 1}}, 2, 10, 1);
  s.set_prob(1, kDummyVnf, 0.5);
  s.set_prob(1, 0, 0.5);
  auto r = solve_vnf_rates(s);
  CHECK(r[0] == doctest::Approx(4));
  CHECK(r[1] == doctest::Approx(4));
  CHECK_FALSE(is_acyclic(s));
}

TEST_CASE("scaling factors") {
  auto pass = ServiceSpec::chain("c", {{"q1", 1, 1}, {"q2", 1, 1}}, 3, 10, 1);
  auto tp = derive_traffic(pass);
  CHECK(tp.scaling[0] == doctest::Approx(1));
  CHECK(tp.scaling[1] == doctest::Approx(1));

  // firewall forwarding half of its input and dropping the rest
  auto fw = ServiceSpec::chain("fw", {{"fw", 1, 1}, {"q2", 1, 1}}, 4, 10, 1);
  fw.set_prob(0, 1, 0.5);
  auto f = derive_traffic(fw);
  CHECK(f.scaling[0] == doctest::Approx(0.5));
  CHECK(f.vnf_rates[1] == doctest::Approx(2));
}

TEST_CASE("delay budgets are proportional to complexity") {
  auto a = ServiceSpec::chain("a", {{"q1", 1, 1}, {"q2", 3, 1}}, 1, 10, 1);
  auto da = delay_budgets(a);
  CHECK(da[0] == doctest::Approx(2.5));
  CHECK(da[1] == doctest::Approx(7.5));
  auto b = ServiceSpec::chain("b", {{"q1", 1, 1}, {"q2", 1, 1}}, 1, 45, 1);
  CHECK(delay_budgets(b)[0] == doctest::Approx(22.5));
  std::vector<VnfSpec> five;
  for (int i = 0; i < 5; ++i) five.push_back({"f" + std::to_string(i), 2, 1});
  for (double d : delay_budgets(ServiceSpec::chain("c", five, 1, 80, 1))) CHECK(d == doctest::Approx(16));
}

TEST_CASE("validation") {
  auto s1 = ServiceSpec::chain("s1", {{"f1", 1, 1}, {"f2", 1, 1}}, 0.3, 10, 100);
  auto ok = validate_service(s1);
  CHECK(ok.valid);
  CHECK(ok.chain);
  REQUIRE(chain_order(s1));
  CHECK(*chain_order(s1) == std::vector<int>{0, 1});

  auto bad = s1;
  bad.set_prob(0, kDummyVnf, 0.2);
  CHECK_FALSE(validate_service(bad).valid);

  auto no_ingress = s1;
  no_ingress.set_prob(kDummyVnf, 0, 0.5);
  CHECK_FALSE(validate_service(no_ingress).valid);
}

TEST_CASE("vnf paths of a branching graph") {
  auto paths = vnf_paths(branch());
  CHECK(paths.size() == 2);
}

TEST_CASE("random graphs agree with fixed-point iteration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<VnfSpec> v;
    for (int q = 0; q < n; ++q) v.push_back({"q" + std::to_string(q), 1, 1});
    auto s = ServiceSpec::chain("r", v, 1 + 9 * u(rng), 10, 1);
    for (int a = kDummyVnf; a < n; ++a) {
      for (int b = kDummyVnf; b < n; ++b) {
        if (a != b) s.set_prob(a, b, 0);
      }
    }
    s.set_prob(kDummyVnf, 0, 1);
    for (int a = 0; a < n; ++a) {
      std::vector<double> w(static_cast<std::size_t>(n) + 1);
      double sum = 0;
      for (auto& x : w) sum += (x = u(rng));
      const double keep = 0.9 / sum;
      for (int b = 0; b < n; ++b) {
        if (a != b) s.set_prob(a, b, w[static_cast<std::size_t>(b)] * keep);
      }
      s.set_prob(a, kDummyVnf, 1 - 0.9 + w.back() * keep);
    }
    auto r = solve_vnf_rates(s);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int it = 0; it < 5000; ++it) {
      std::vector<double> y(static_cast<std::size_t>(n));
      for (int q = 0; q < n; ++q) {
        double in = s.ingress_rate * s.prob(kDummyVnf, q);
        for (int p = 0; p < n; ++p) {
          if (p != q) in += x[static_cast<std::size_t>(p)] * s.prob(p, q);
        }
        y[static_cast<std::size_t>(q)] = in;
      }
      x = y;
    }
    for (int q = 0; q < n; ++q) CHECK(r[static_cast<std::size_t>(q)] == doctest::Approx(x[static_cast<std::size_t>(q)]).epsilon(1e-9));
  }
}
