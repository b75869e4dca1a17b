#include "nfv/ledger.hpp"

#include <algorithm>
#include <map>

#include "nfv/error.hpp"

namespace nfv {

Ledger::Ledger(const PhysicalNetwork& net, int begin, int end) : net_(&net), begin_(begin), end_(end) {
  if (end < begin) throw Error("ledger range is empty");
  const auto len = static_cast<std::size_t>(end - begin);
  words_ = (len + 63) / 64;
  busy_.assign(net.vm_count() * words_, 0);
  ready_from_.assign(net.vm_count(), begin);
  link_used_.assign(net.links().size() * len, 0.0);
  dc_used_.assign(net.datacenter_count() * len, 0.0);
}

bool Ledger::vm_free(VmId vm, int a, int b) const {
  a = std::max(a, begin_);
  b = std::min(b, end_);
  const std::uint64_t* row = busy_.data() + static_cast<std::size_t>(vm) * words_;
  for (int t = a; t < b;) {
    const std::size_t i = col(t);
    const std::size_t w = i / 64;
    const std::size_t bit = i % 64;
    const std::size_t span = std::min<std::size_t>(64 - bit, static_cast<std::size_t>(b - t));
    const std::uint64_t mask = (span == 64 ? ~0ULL : ((1ULL << span) - 1)) << bit;
    if (row[w] & mask) return false;
    t += static_cast<int>(span);
  }
  return true;
}

void Ledger::mark(VmId vm, int a, int b, bool on) {
  std::uint64_t* row = busy_.data() + static_cast<std::size_t>(vm) * words_;
  for (int t = std::max(a, begin_); t < std::min(b, end_); ++t) {
    const std::size_t i = col(t);
    if (on) {
      row[i / 64] |= 1ULL << (i % 64);
    } else {
      row[i / 64] &= ~(1ULL << (i % 64));
    }
  }
}

double Ledger::link_residual(LinkId e, int a, int b) const {
  const double cap = net_->link(e).bandwidth;
  if (cap == kUnlimited) return kUnlimited;
  const std::size_t len = static_cast<std::size_t>(end_ - begin_);
  const double* row = link_used_.data() + static_cast<std::size_t>(e) * len;
  double worst = 0;
  for (int t = std::max(a, begin_); t < std::min(b, end_); ++t) worst = std::max(worst, row[col(t)]);
  return cap - worst;
}

double Ledger::dc_residual(DcId d, int a, int b) const {
  const double cap = net_->datacenters()[static_cast<std::size_t>(d)].capacity;
  const std::size_t len = static_cast<std::size_t>(end_ - begin_);
  const double* row = dc_used_.data() + static_cast<std::size_t>(d) * len;
  double worst = 0;
  for (int t = std::max(a, begin_); t < std::min(b, end_); ++t) worst = std::max(worst, row[col(t)]);
  return cap - worst;
}

bool Ledger::fits(const Problem& p, const RequestConfig& c, int a, int b) const {
  const auto& s = p.service_of(c.request);
  const auto& tr = p.traffic_of(c.request);
  std::map<DcId, double> cpu;
  for (const auto& i : c.instances) {
    if (!vm_available(i.vm, a, b)) return false;
    cpu[net_->vm(i.vm).datacenter] += i.rate * s.vnfs[static_cast<std::size_t>(i.vnf)].complexity;
  }
  for (const auto& [d, need] : cpu) {
    const double residual = dc_residual(d, a, b);
    if (need - residual > 1e-9 * std::max(1.0, residual)) return false;
  }
  std::map<LinkId, double> load;
  for (const auto& r : c.routes) {
    for (LinkId e : net_->logical_link(r.link).hops) load[e] += r.fraction * tr.traffic(r.from_vnf, r.to_vnf);
  }
  for (const auto& [e, need] : load) {
    const double residual = link_residual(e, a, b);
    if (need - residual > 1e-9 * std::max(1.0, residual)) return false;
  }
  return true;
}

void Ledger::apply(const Problem& p, const RequestConfig& c, int a, int b, double sign) {
  a = std::max(a, begin_);
  b = std::min(b, end_);
  const auto& s = p.service_of(c.request);
  const auto& tr = p.traffic_of(c.request);
  const std::size_t len = static_cast<std::size_t>(end_ - begin_);
  for (const auto& i : c.instances) {
    mark(i.vm, a, b, sign > 0);
    const double cpu = sign * i.rate * s.vnfs[static_cast<std::size_t>(i.vnf)].complexity;
    double* row = dc_used_.data() + static_cast<std::size_t>(net_->vm(i.vm).datacenter) * len;
    for (int t = a; t < b; ++t) row[col(t)] += cpu;
  }
  for (const auto& r : c.routes) {
    const auto l = net_->logical_link(r.link);
    const double amount = sign * r.fraction * tr.traffic(r.from_vnf, r.to_vnf);
    for (LinkId e : l.hops) {
      double* row = link_used_.data() + static_cast<std::size_t>(e) * len;
      for (int t = a; t < b; ++t) row[col(t)] += amount;
    }
  }
}

}  // namespace nfv
