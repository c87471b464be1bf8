#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "beehive/discovery.hpp"
#include "beehive/errors.hpp"
#include "beehive/registry.hpp"

namespace beehive {

struct CacheEntry {
  std::string failed_id;
  std::string substitute_id;
  std::uint64_t inserted_at = 0;  // logical ticks
  std::uint64_t ttl = 0;

  std::uint64_t expires_at() const { return inserted_at + ttl; }
};

inline constexpr std::uint64_t kDefaultCacheTtl = 1000;

/// TTL-bounded store of failed-service -> substitute pairs on an injected
/// logical clock. An entry is live while now < inserted_at + ttl (the
/// boundary tick itself is already expired). One writer at a time; readers
/// may run concurrently and never see a torn entry.
class EquivalenceCache {
 public:
  EquivalenceCache() = default;
  explicit EquivalenceCache(std::size_t capacity) : capacity_(capacity) {}

  std::optional<std::string> lookup(const std::string& failed_id, std::uint64_t now) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(failed_id);
    if (it == entries_.end() || now >= it->second.expires_at()) return std::nullopt;
    return it->second.substitute_id;
  }

  void insert(const std::string& failed_id, const std::string& substitute_id, std::uint64_t now,
              std::uint64_t ttl = kDefaultCacheTtl) {
    if (failed_id == substitute_id) {
      raise(Errc::self_substitution, "'" + failed_id + "' cannot substitute itself");
    }
    if (ttl == 0) raise(Errc::invalid_params, "ttl must be > 0");
    std::unique_lock lock(mu_);
    entries_[failed_id] = CacheEntry{failed_id, substitute_id, now, ttl};
    while (capacity_ && entries_.size() > *capacity_) {
      auto victim = entries_.begin();
      for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        if (it->second.expires_at() < victim->second.expires_at()) victim = it;
      }
      entries_.erase(victim);  // map order already favors the smallest id on ties
    }
  }

  /// Removes every entry with now >= expiry; returns how many went.
  std::size_t evict_expired(std::uint64_t now) {
    std::unique_lock lock(mu_);
    std::size_t removed = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (now >= it->second.expires_at()) {
        it = entries_.erase(it);
        ++removed;
      } else {
        ++it;
      }
    }
    return removed;
  }

  void erase(const std::string& failed_id) {
    std::unique_lock lock(mu_);
    entries_.erase(failed_id);
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }

  std::optional<std::size_t> capacity() const { return capacity_; }

  /// (failed_id, substitute_id) pairs sorted by failed_id.
  std::vector<std::pair<std::string, std::string>> dump() const {
    std::shared_lock lock(mu_);
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_) out.emplace_back(id, e.substitute_id);
    return out;
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, CacheEntry> entries_;
  std::optional<std::size_t> capacity_;
};

enum class SubstituteSource { cache_hit, discovered };

inline const char* to_string(SubstituteSource s) {
  return s == SubstituteSource::cache_hit ? "cache-hit" : "discovered";
}

struct SubstitutionOutcome {
  ServiceDescriptor service;
  std::string registry_id;  // registry holding the substitute
  SubstituteSource source = SubstituteSource::discovered;
  std::uint64_t probes = 0;  // registry probes performed by this call
};

/// Replaces a failed service: a fresh cache entry short-circuits with zero
/// probes; otherwise a discovery run over the failed service's own domain
/// picks the nearest-QoS alternative (the failed id itself is excluded) and
/// the resulting couple is cached at `now`. A cached substitute that no
/// longer exists in the network counts as a miss and is dropped.
inline SubstitutionOutcome substitute(const std::string& failed_id, EquivalenceCache& cache,
                                      const PeerNetwork& net, const Taxonomy& t,
                                      const BeesParams& p, const QosWeights& weights,
                                      double requested_level, std::uint64_t now, std::uint64_t seed,
                                      std::uint64_t ttl = kDefaultCacheTtl) {
  const Registry* home = locate_service(net, failed_id);
  if (!home) raise(Errc::unknown_failed_service, "no service '" + failed_id + "' in the network");

  if (std::optional<std::string> cached = cache.lookup(failed_id, now)) {
    if (const Registry* sub_home = locate_service(net, *cached)) {
      for (const ServiceDescriptor& s : sub_home->services) {
        if (s.id == *cached) {
          return SubstitutionOutcome{s, sub_home->id, SubstituteSource::cache_hit, 0};
        }
      }
    }
    cache.erase(failed_id);  // stale: the substitute has left the network
  }

  DiscoveryQuery q{home->domain, weights, requested_level};
  DiscoveryResult found;
  try {
    found = discover_and_select(net, t, q, p, seed, failed_id);
  } catch (const Error& e) {
    if (e.code() == Errc::no_services_in_best_registry) {
      raise(Errc::no_substitute_available,
            "no service can stand in for '" + failed_id + "'");
    }
    throw;
  }
  cache.insert(failed_id, found.selected_service.id, now, ttl);
  return SubstitutionOutcome{found.selected_service, found.registry_id,
                             SubstituteSource::discovered, found.trace.total_probes};
}

}  // namespace beehive
