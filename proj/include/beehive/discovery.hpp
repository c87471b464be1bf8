#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "beehive/detail/sampling.hpp"
#include "beehive/errors.hpp"
#include "beehive/optimizer.hpp"
#include "beehive/qos.hpp"
#include "beehive/registry.hpp"
#include "beehive/taxonomy.hpp"

namespace beehive {

struct DiscoveryQuery {
  ConceptId wanted_domain;
  QosWeights qos_weights;
  double requested_level = 1.0;

  /// Checks the domain and level; weights are checked where selection
  /// actually uses them.
  void validate(const Taxonomy& t) const {
    ConceptId domain = normalize_concept(wanted_domain);
    if (!t.contains(domain)) {
      raise(Errc::unknown_concept, "wanted domain '" + domain + "' is not a taxonomy concept");
    }
    if (!(requested_level >= 0.0 && requested_level <= 1.0)) {
      raise(Errc::invalid_params, "requested level must be in [0, 1]");
    }
  }
};

enum class StopReason { similarity_one, budget_exhausted, all_probed };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::similarity_one: return "similarity-one";
    case StopReason::budget_exhausted: return "budget-exhausted";
    case StopReason::all_probed: return "all-probed";
  }
  return "?";
}

/// One wave of probes: the initial scout wave or one recruitment iteration.
struct TraceStep {
  std::vector<std::pair<std::string, double>> probes;  // (registry id, similarity) in probe order
  std::string elite_id;  // best-similarity registry known when the step closed

  bool operator==(const TraceStep&) const = default;
};

struct DiscoveryTrace {
  std::vector<TraceStep> steps;
  std::uint64_t total_probes = 0;
  StopReason stop_reason = StopReason::budget_exhausted;

  bool operator==(const DiscoveryTrace&) const = default;
};

struct DiscoveryOutcome {
  std::string registry_id;
  DiscoveryTrace trace;
};

struct DiscoveryResult {
  std::string registry_id;
  double similarity = 0.0;
  ServiceDescriptor selected_service;
  DiscoveryTrace trace;
};

namespace detail {

/// Registry ids within `radius` hops of `center` on the peer graph,
/// excluding the center, sorted.
inline std::vector<std::string> peer_ball(const PeerNetwork& net, const std::string& center,
                                          int radius) {
  std::set<std::string> seen{center};
  std::vector<std::string> frontier{center};
  std::vector<std::string> found;
  for (int d = 0; d < radius && !frontier.empty(); ++d) {
    std::vector<std::string> next;
    for (const std::string& u : frontier) {
      auto it = net.adjacency.find(u);
      if (it == net.adjacency.end()) continue;
      for (const std::string& v : it->second) {
        if (seen.insert(v).second) {
          next.push_back(v);
          found.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace detail

/// Bees-guided registry search.
///
/// Wave 0 probes up to `scouts` registries picked uniformly at random. Each
/// following iteration ranks everything probed so far by similarity to the
/// wanted domain, probes up to recruits_per_elite unprobed peers around the
/// single top registry and recruits_per_site around each of the next
/// (sites - elite_sites) ranked ones, then sends the remaining
/// (scouts - sites) bees to uniformly random unprobed registries. Probed
/// registries are never probed twice. The run stops the moment similarity
/// 1.0 is seen, when every registry has been probed, or after max_iterations
/// recruitment rounds; it returns the best-similarity registry probed (ties
/// toward the smallest id). Deterministic per seed.
inline DiscoveryOutcome discover_registry(const PeerNetwork& net, const Taxonomy& t,
                                          const DiscoveryQuery& q, const BeesParams& p,
                                          std::uint64_t seed) {
  if (net.registries.empty()) raise(Errc::empty_network, "network has no registries");
  p.validate();
  q.validate(t);
  ConceptId wanted = normalize_concept(q.wanted_domain);

  std::mt19937_64 rng(seed);
  DiscoveryTrace trace;
  std::set<std::string> unprobed;
  for (const auto& [id, reg] : net.registries) unprobed.insert(id);

  std::string best_id;
  double best_sim = -1.0;
  bool found_exact = false;

  auto probe_into = [&](const std::string& rid, TraceStep& step) {
    double sim = t.wu_palmer_similarity(wanted, probe_registry(net, rid).domain);
    ++trace.total_probes;
    step.probes.emplace_back(rid, sim);
    unprobed.erase(rid);
    if (sim > best_sim || (sim == best_sim && rid < best_id)) {
      best_sim = sim;
      best_id = rid;
    }
    if (sim == 1.0) found_exact = true;
  };
  auto probe_wave = [&](const std::vector<std::string>& candidates, std::size_t count,
                        TraceStep& step) {
    for (const std::string& rid : detail::pick_k(candidates, count, rng)) {
      probe_into(rid, step);
      if (found_exact) return;
    }
  };
  auto close_step = [&](TraceStep step) {
    step.elite_id = best_id;
    trace.steps.push_back(std::move(step));
  };

  int hop_radius = std::max(1, static_cast<int>(p.patch_size));

  // wave 0: random scouts
  {
    TraceStep step;
    probe_wave({unprobed.begin(), unprobed.end()}, static_cast<std::size_t>(p.scouts), step);
    close_step(std::move(step));
  }

  while (!found_exact && !unprobed.empty() &&
         trace.steps.size() <= static_cast<std::size_t>(p.max_iterations)) {
    std::vector<std::pair<std::string, double>> ranked;  // probed, best first
    for (const TraceStep& s : trace.steps) {
      for (const auto& pr : s.probes) ranked.push_back(pr);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    TraceStep step;
    std::size_t site_count = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(p.sites));
    for (std::size_t rank = 0; rank < site_count && !found_exact; ++rank) {
      bool elite = rank == 0;
      if (!elite && rank > static_cast<std::size_t>(p.sites - p.elite_sites)) break;
      std::vector<std::string> hood = detail::peer_ball(net, ranked[rank].first, hop_radius);
      std::erase_if(hood, [&](const std::string& id) { return !unprobed.count(id); });
      probe_wave(hood,
                 static_cast<std::size_t>(elite ? p.recruits_per_elite : p.recruits_per_site),
                 step);
    }
    if (!found_exact) {
      probe_wave({unprobed.begin(), unprobed.end()},
                 static_cast<std::size_t>(p.scouts - p.sites), step);
    }
    close_step(std::move(step));
  }

  trace.stop_reason = found_exact ? StopReason::similarity_one
                      : unprobed.empty() ? StopReason::all_probed
                                         : StopReason::budget_exhausted;
  return DiscoveryOutcome{best_id, std::move(trace)};
}

/// The classical baseline: probe every registry once, return the argmax of
/// similarity (ties toward the smallest id).
inline std::string exhaustive_discover(const PeerNetwork& net, const Taxonomy& t,
                                       const DiscoveryQuery& q) {
  if (net.registries.empty()) raise(Errc::empty_network, "network has no registries");
  q.validate(t);
  ConceptId wanted = normalize_concept(q.wanted_domain);
  std::string best_id;
  double best_sim = -1.0;
  for (const auto& [id, reg] : net.registries) {
    double sim = t.wu_palmer_similarity(wanted, probe_registry(net, id).domain);
    if (sim > best_sim) {
      best_sim = sim;
      best_id = id;
    }
  }
  return best_id;
}

/// Full pipeline: bees discovery, then QoS selection among the winning
/// registry's services. `exclude_service` drops one id from the candidate
/// list (used by failure substitution).
inline DiscoveryResult discover_and_select(const PeerNetwork& net, const Taxonomy& t,
                                           const DiscoveryQuery& q, const BeesParams& p,
                                           std::uint64_t seed,
                                           const std::optional<std::string>& exclude_service = {}) {
  DiscoveryOutcome outcome = discover_registry(net, t, q, p, seed);
  const Registry& winner = net.registries.at(outcome.registry_id);

  std::vector<ServiceDescriptor> candidates;
  for (const ServiceDescriptor& s : winner.services) {
    if (!exclude_service || s.id != *exclude_service) candidates.push_back(s);
  }
  if (candidates.empty()) {
    raise(Errc::no_services_in_best_registry,
          "registry '" + winner.id + "' has no selectable services");
  }

  DiscoveryResult result;
  result.registry_id = outcome.registry_id;
  result.similarity = t.wu_palmer_similarity(normalize_concept(q.wanted_domain), winner.domain);
  result.selected_service =
      nearest_qos_service(candidates, net.attributes, q.qos_weights, q.requested_level);
  result.trace = std::move(outcome.trace);
  return result;
}

struct GaDiscoveryOutcome {
  std::string registry_id;
  std::uint64_t total_probes = 0;
  int generations = 0;
};

/// GA baseline over the registry graph. Fitness of an index is the
/// similarity of that registry's domain; each distinct registry is probed
/// once and memoized, so total_probes counts unique registries visited.
inline GaDiscoveryOutcome ga_discover(const PeerNetwork& net, const Taxonomy& t,
                                      const DiscoveryQuery& q, const GaParams& params,
                                      std::uint64_t seed) {
  if (net.registries.empty()) raise(Errc::empty_network, "network has no registries");
  q.validate(t);
  ConceptId wanted = normalize_concept(q.wanted_domain);

  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index_of;
  for (const auto& [id, reg] : net.registries) {
    index_of[id] = ids.size();
    ids.push_back(id);
  }
  DiscreteSpace space;
  space.adjacency.resize(ids.size());
  for (const auto& [id, nbrs] : net.adjacency) {
    for (const std::string& n : nbrs) space.adjacency[index_of[id]].push_back(index_of[n]);
  }

  std::map<std::size_t, double> memo;
  auto fitness = [&](std::size_t i) {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    double sim = t.wu_palmer_similarity(wanted, probe_registry(net, ids[i]).domain);
    memo.emplace(i, sim);
    return sim;
  };

  GaParams ga = params;
  ga.target_fitness = 1.0;
  auto report = ga_optimize(fitness, space, ga, seed);

  std::string best_id;
  double best_sim = -1.0;
  for (const auto& [i, sim] : memo) {
    if (sim > best_sim || (sim == best_sim && ids[i] < best_id)) {
      best_sim = sim;
      best_id = ids[i];
    }
  }
  return GaDiscoveryOutcome{best_id, memo.size(), report.iterations_run};
}

}  // namespace beehive
