#include "mfrail/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mfrail/error.hpp"

namespace mfrail {

Dataset Dataset::make(std::vector<Cluster> clusters, std::optional<double> tau,
                      std::size_t max_cluster_size) {
  if (clusters.empty()) throw DataError("dataset has no clusters");

  const int p = static_cast<int>(clusters.front().members.empty()
                                     ? 0
                                     : clusters.front().members.front().covariates.size());
  double max_time = 0.0;
  std::size_t events = 0;
  for (const Cluster& c : clusters) {
    if (c.members.empty()) throw DataError("cluster '" + c.id + "' is empty");
    if (c.members.size() > max_cluster_size) {
      std::ostringstream os;
      os << "cluster '" << c.id << "' has " << c.members.size()
         << " members, above the bound " << max_cluster_size;
      throw DataError(os.str());
    }
    std::set<int> seen;
    for (const Observation& o : c.members) {
      if (!(o.time >= 0.0) || !std::isfinite(o.time))
        throw DataError("cluster '" + c.id + "': time must be finite and >= 0");
      if (o.event != 0 && o.event != 1)
        throw DataError("cluster '" + c.id + "': event must be 0 or 1");
      if (o.covariates.size() != p)
        throw DataError("cluster '" + c.id + "': covariate dimension mismatch");
      if (!o.covariates.allFinite())
        throw DataError("cluster '" + c.id + "': non-finite covariate");
      if (o.member_index < 0 || !seen.insert(o.member_index).second)
        throw DataError("cluster '" + c.id + "': member_index values must be unique and >= 0");
      max_time = std::max(max_time, o.time);
      events += static_cast<std::size_t>(o.event);
    }
  }
  if (events == 0) throw DataError("dataset has no observed failures");

  Dataset d;
  d.clusters_ = std::move(clusters);
  d.p_ = p;
  d.tau_ = tau.value_or(max_time);
  if (!(d.tau_ > 0.0)) throw DataError("tau must be positive");
  if (d.tau_ < max_time) throw DataError("tau is smaller than the largest observed time");
  return d;
}

std::size_t Dataset::n_observations() const {
  std::size_t n = 0;
  for (const Cluster& c : clusters_) n += c.size();
  return n;
}

std::size_t Dataset::n_events() const {
  std::size_t n = 0;
  for (const Cluster& c : clusters_)
    for (const Observation& o : c.members) n += static_cast<std::size_t>(o.event);
  return n;
}

std::vector<double> Dataset::failure_times() const {
  std::vector<double> t;
  for (const Cluster& c : clusters_)
    for (const Observation& o : c.members)
      if (o.event == 1) t.push_back(o.time);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace mfrail
