#include "doctest.h"
#include "nfv/error.hpp"
#include "nfv/scenario.hpp"
#include "nfv/topology.hpp"

using namespace nfv;

namespace {

TopologyDescription two_dcs() {
  TopologyDescription d;
  d.switches = {"ga", "gb"};
  d.datacenters = {{"A", 2000, "ga"}, {"B", 2000, "gb"}};
  d.vms = {{"a1", "A", 600, 2e-5, 0.018, 1}, {"a2", "A", 1200, 4e-5, 0.036, 1},
           {"b1", "B", 600, 2e-5, 0.018, 1}, {"b2", "B", 1200, 4e-5, 0.036, 1}};
  d.links = {{"ga", "gb", 100, 2, 0.02, true}};
  return d;
}

TopologyDescription diamond() {
  TopologyDescription d;
  d.switches = {"up", "down"};
  d.datacenters = {{"A", 600, ""}, {"B", 600, ""}};
  d.vms = {{"a", "A", 600, 2e-5, 0.018, 1}, {"b", "B", 600, 2e-5, 0.018, 1}};
  d.links = {{"a", "up", kUnlimited, 1, 0.01, true},
             {"up", "b", kUnlimited, 2, 0.01, true},
             {"a", "down", kUnlimited, 2, 0.01, true},
             {"down", "b", kUnlimited, 3, 0.01, true}};
  return d;
}

}  // namespace

TEST_CASE("counts of a two-datacenter network") {
  auto net = PhysicalNetwork::build(two_dcs());
  CHECK(net.vm_count() == 4);
  CHECK(net.datacenter_count() == 2);
  CHECK(net.switch_count() == 2);
  CHECK(net.dummy_link_count() == 8);
  for (VmId m = 0; m < 4; ++m) {
    CHECK(net.links_between(kDummyVm, m).size() == 1);
    CHECK(net.links_between(m, kDummyVm).size() == 1);
    CHECK(net.links_between(kDummyVm, m).front().is_dummy);
  }
}

TEST_CASE("unknown link end point is rejected") {
  auto d = two_dcs();
  d.links.push_back({"ga", "nowhere", 1, 1, 0, true});
  CHECK_THROWS_AS(PhysicalNetwork::build(d), Error);
}

TEST_CASE("direct link between two single-VM datacenters") {
  TopologyDescription d;
  d.datacenters = {{"A", 600, ""}, {"B", 600, ""}};
  d.vms = {{"a", "A", 600, 2e-5, 0.018, 1}, {"b", "B", 600, 2e-5, 0.018, 1}};
  d.links = {{"a", "b", kUnlimited, 2, 0.02, true}};
  auto net = PhysicalNetwork::build(d);
  auto ab = net.links_between(net.find_vm("a"), net.find_vm("b"));
  REQUIRE(ab.size() == 1);
  CHECK(ab[0].delay == doctest::Approx(2));
  CHECK(ab[0].tx_cost == doctest::Approx(0.02));
  CHECK(net.links_between(net.find_vm("b"), net.find_vm("a")).size() == 1);
}

TEST_CASE("same-datacenter pair gets one ideal link") {
  auto net = PhysicalNetwork::build(two_dcs());
  auto l = net.links_between(net.find_vm("a1"), net.find_vm("a2"));
  REQUIRE(l.size() == 1);
  CHECK(l[0].delay == 0);
  CHECK(l[0].tx_cost == 0);
  CHECK(l[0].unlimited());
}

TEST_CASE("diamond yields two routes ordered by delay") {
  auto net = PhysicalNetwork::build(diamond(), 2);
  auto l = net.links_between(net.find_vm("a"), net.find_vm("b"));
  REQUIRE(l.size() == 2);
  CHECK(l[0].delay == doctest::Approx(3));
  CHECK(l[1].delay == doctest::Approx(5));
  CHECK(l[0].hops.size() == 2);

  auto one = PhysicalNetwork::build(diamond(), 1);
  CHECK(one.links_between(one.find_vm("a"), one.find_vm("b")).size() == 1);
}

TEST_CASE("logical link lookup round-trips and rejects unknown references") {
  auto net = PhysicalNetwork::build(diamond(), 2);
  for (const auto& l : net.links_between(0, 1)) {
    CHECK(net.contains(l.ref));
    CHECK(net.logical_link(l.ref).delay == doctest::Approx(l.delay));
  }
  CHECK_FALSE(net.contains(LinkRef{0, 1, 5}));
  CHECK_THROWS_AS(net.logical_link(LinkRef{0, 1, 5}), Error);
}

TEST_CASE("large builtin has the published counts") {
  auto s = builtin_large_scale();
  auto net = PhysicalNetwork::build(s.network, s.k_paths);
  CHECK(net.switch_count() == 197);
  CHECK(s.network.links.size() == 245);
  CHECK(net.datacenter_count() == 32);
  CHECK(net.vm_count() == 1344);
  for (const auto& dc : net.datacenters()) CHECK(dc.members.size() == 42);
}
