#include "nfv/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json.hpp"
#include "nfv/error.hpp"
#include "nfv/service.hpp"

namespace nfv {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng, double mean) { return -mean * std::log1p(-uniform01(rng)); }

constexpr const char* kSchema = "nfvsim-workload/1";

}  // namespace

const ServiceRequest& Workload::request(int id) const {
  if (id >= 0 && static_cast<std::size_t>(id) < requests.size() && requests[static_cast<std::size_t>(id)].id == id) {
    return requests[static_cast<std::size_t>(id)];
  }
  for (const auto& r : requests) {
    if (r.id == id) return r;
  }
  throw Error("unknown request id " + std::to_string(id));
}

void validate_workload(const Workload& w, std::size_t service_count) {
  if (w.lifespan < 1) throw Error("workload lifespan must be at least one step");
  std::set<int> ids;
  for (const auto& r : w.requests) {
    if (!ids.insert(r.id).second) throw Error("duplicate request id " + std::to_string(r.id));
    if (r.service < 0 || static_cast<std::size_t>(r.service) >= service_count) {
      throw Error("request " + std::to_string(r.id) + " refers to an unknown service");
    }
    if (r.arrival < 0 || r.departure > w.lifespan || r.arrival >= r.departure) {
      throw Error("request " + std::to_string(r.id) + " has an invalid lifetime [" + std::to_string(r.arrival) + "," +
                  std::to_string(r.departure) + ")");
    }
  }
}

Workload generate_poisson(std::size_t service_count, double rate, double mean_duration, int lifespan,
                          std::uint64_t seed, double step_ms) {
  if (service_count == 0) throw Error("cannot generate a workload without services");
  if (!(rate > 0)) throw Error("arrival rate must be positive");
  if (mean_duration < 1) throw Error("mean duration must be at least one step");
  if (lifespan < 1) throw Error("lifespan must be at least one step");

  std::mt19937_64 rng(seed);
  Workload w;
  w.lifespan = lifespan;
  w.step_ms = step_ms;
  double clock = exponential(rng, 1.0 / rate);
  while (clock < lifespan) {
    ServiceRequest r;
    r.id = static_cast<int>(w.requests.size());
    r.arrival = static_cast<int>(std::floor(clock));
    const int dur = std::max(1, static_cast<int>(std::ceil(exponential(rng, mean_duration))));
    r.departure = std::min(r.arrival + dur, lifespan);
    w.requests.push_back(r);
    clock += exponential(rng, 1.0 / rate);
  }

  std::vector<int> types(w.requests.size());
  for (std::size_t i = 0; i < types.size(); ++i) types[i] = static_cast<int>(i % service_count);
  for (std::size_t i = types.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(types[i - 1], types[std::min(j, i - 1)]);
  }
  for (std::size_t i = 0; i < types.size(); ++i) w.requests[i].service = types[i];
  return w;
}

std::vector<ServiceRequest> active_in_window(const Workload& w, int t, int horizon) {
  if (horizon < 1) throw Error("window length must be at least one step");
  std::vector<ServiceRequest> out;
  for (const auto& r : w.requests) {
    if (r.arrival < t + horizon && t < r.departure) out.push_back(r);
  }
  return out;
}

double horizon_revenue(const ServiceRequest& k, const ServiceSpec& s, int t, int horizon, const Units& units) {
  const int overlap = std::min(t + horizon, k.departure) - std::max(t, k.arrival);
  if (overlap <= 0) return 0.0;
  return s.revenue_rate * overlap * s.ingress_rate * units.gb_per_rate_step();
}

std::string workload_to_json(const Workload& w, std::span<const std::string> service_ids) {
  nlohmann::ordered_json j;
  j["schema"] = kSchema;
  j["lifespan"] = w.lifespan;
  j["step_ms"] = w.step_ms;
  auto& reqs = j["requests"] = nlohmann::ordered_json::array();
  for (const auto& r : w.requests) {
    nlohmann::ordered_json e;
    e["id"] = r.id;
    e["service"] = service_ids[static_cast<std::size_t>(r.service)];
    e["arrival"] = r.arrival;
    e["departure"] = r.departure;
    reqs.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

Workload workload_from_json(const std::string& text, std::span<const std::string> service_ids) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("workload file: ") + e.what());
  }
  if (j.value("schema", "") != kSchema) throw Error(std::string("workload file: expected schema ") + kSchema);
  for (const auto& [key, _] : j.items()) {
    if (key != "schema" && key != "lifespan" && key != "step_ms" && key != "requests") {
      throw Error("workload file: unknown field '" + key + "'");
    }
  }
  Workload w;
  try {
    w.lifespan = j.at("lifespan").get<int>();
    w.step_ms = j.value("step_ms", 60000.0);
    for (const auto& e : j.at("requests")) {
      ServiceRequest r;
      r.id = e.at("id").get<int>();
      const auto name = e.at("service").get<std::string>();
      auto it = std::find(service_ids.begin(), service_ids.end(), name);
      if (it == service_ids.end()) throw Error("workload file: unknown service '" + name + "'");
      r.service = static_cast<int>(it - service_ids.begin());
      r.arrival = e.at("arrival").get<int>();
      r.departure = e.at("departure").get<int>();
      w.requests.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("workload file: ") + e.what());
  }
  validate_workload(w, service_ids.size());
  return w;
}

}  // namespace nfv
