#pragma once

#include <cstdint>
#include <vector>

#include "nfv/state.hpp"

namespace nfv {

/// Resources reserved by planned deployments over a range of steps.
class Ledger {
 public:
  Ledger(const PhysicalNetwork& net, int begin, int end);

  int begin() const { return begin_; }
  int end() const { return end_; }

  /// Marks the earliest step from which a VM may host.
  void set_ready_from(VmId vm, int step) { ready_from_[static_cast<std::size_t>(vm)] = step; }
  int ready_from(VmId vm) const { return ready_from_[static_cast<std::size_t>(vm)]; }

  bool vm_free(VmId vm, int a, int b) const;
  /// Ready to host from `a` and unoccupied throughout [a, b).
  bool vm_available(VmId vm, int a, int b) const { return a >= ready_from(vm) && vm_free(vm, a, b); }

  double link_residual(LinkId e, int a, int b) const;
  double dc_residual(DcId d, int a, int b) const;

  /// Whether `c` could be reserved over [a, b) without exceeding any capacity.
  bool fits(const Problem& p, const RequestConfig& c, int a, int b) const;
  void reserve(const Problem& p, const RequestConfig& c, int a, int b) { apply(p, c, a, b, 1.0); }
  void release(const Problem& p, const RequestConfig& c, int a, int b) { apply(p, c, a, b, -1.0); }

 private:
  void apply(const Problem& p, const RequestConfig& c, int a, int b, double sign);
  void mark(VmId vm, int a, int b, bool on);
  std::size_t col(int t) const { return static_cast<std::size_t>(t - begin_); }

  const PhysicalNetwork* net_;
  int begin_;
  int end_;
  std::size_t words_;
  std::vector<std::uint64_t> busy_;  // [vm * words_ + w]
  std::vector<int> ready_from_;
  std::vector<double> link_used_;  // [link * len + step]
  std::vector<double> dc_used_;    // [dc * len + step]
};

}  // namespace nfv
