#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nfv {

struct ServiceSpec;

/// Conversion constants between simulation steps, packets and billing units.
struct Units {
  double step_ms = 60000;
  double bytes_per_packet = 1250;

  double hours_per_step() const { return step_ms / 3.6e6; }
  /// Gigabits carried in one step by a flow of one packet per ms.
  double gb_per_rate_step() const { return step_ms * bytes_per_packet * 8.0 / 1e9; }
  double pkt_per_ms_from_mbps(double mbps) const { return mbps * 125.0 / bytes_per_packet; }
  double mbps_from_pkt_per_ms(double rate) const { return rate * bytes_per_packet / 125.0; }
};

struct ServiceRequest {
  int id = 0;
  int service = 0;  // index into the scenario's service list
  int arrival = 0;
  int departure = 0;

  int duration() const { return departure - arrival; }
  bool active_at(int t) const { return arrival <= t && t < departure; }
};

struct Workload {
  std::vector<ServiceRequest> requests;
  int lifespan = 0;
  double step_ms = 60000;

  const ServiceRequest& request(int id) const;
};

void validate_workload(const Workload& w, std::size_t service_count);

Workload generate_poisson(std::size_t service_count, double rate, double mean_duration, int lifespan,
                          std::uint64_t seed, double step_ms = 60000);

std::vector<ServiceRequest> active_in_window(const Workload& w, int t, int horizon);

double horizon_revenue(const ServiceRequest& k, const ServiceSpec& s, int t, int horizon, const Units& units);

std::string workload_to_json(const Workload& w, std::span<const std::string> service_ids);
Workload workload_from_json(const std::string& text, std::span<const std::string> service_ids);

}  // namespace nfv
