#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "beehive/detail/text.hpp"
#include "beehive/discovery.hpp"
#include "beehive/errors.hpp"
#include "beehive/optimizer.hpp"
#include "beehive/registry.hpp"
#include "beehive/substitution.hpp"
#include "beehive/taxonomy.hpp"

namespace beehive {

struct FailureInjection {
  std::uint64_t tick = 0;
  std::string service_id;

  bool operator==(const FailureInjection&) const = default;
};

/// A fully parsed scenario file. Paths are resolved against the file's own
/// directory; the defaulted sub-structs hold whatever keys were not set.
struct Scenario {
  std::filesystem::path base_dir;
  std::filesystem::path taxonomy_path;
  std::optional<std::filesystem::path> network_path;
  std::optional<GeneratorParams> generator;
  std::uint64_t generator_seed = 1;
  std::optional<DiscoveryQuery> query;
  std::vector<std::string> methods{"bees"};
  BeesParams bees;
  GaParams ga;
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t cache_ttl = kDefaultCacheTtl;
  std::optional<std::size_t> cache_capacity;
  std::vector<FailureInjection> failures;
  std::optional<std::filesystem::path> out_path;
};

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) raise(Errc::io_failure, "cannot read '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(Errc::io_failure, "read error on '" + p.string() + "'");
  return std::move(buf).str();
}

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_failure, "cannot write '" + p.string() + "'");
  out << content;
  out.flush();
  if (!out) raise(Errc::io_failure, "write error on '" + p.string() + "'");
}

namespace detail {

[[noreturn]] inline void bad_key(const std::string& key, std::size_t line, const std::string& why) {
  raise(Errc::bad_scenario,
        "key '" + key + "' (line " + std::to_string(line) + "): " + why);
}

inline long long int_value(const std::string& key, const std::string& value, std::size_t line,
                           long long lo, long long hi) {
  auto v = parse_int(value);
  if (!v || *v < lo || *v > hi) {
    bad_key(key, line, "expected an integer in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "], got '" + value + "'");
  }
  return *v;
}

inline double double_value(const std::string& key, const std::string& value, std::size_t line) {
  auto v = parse_double(value);
  if (!v) bad_key(key, line, "expected a number, got '" + value + "'");
  return *v;
}

inline bool bool_value(const std::string& key, const std::string& value, std::size_t line) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_key(key, line, "expected true or false, got '" + value + "'");
}

inline std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string_view item = trim(value.substr(
        start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

inline std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& value,
                                              std::size_t line) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& item : split_list(value)) {
    std::size_t dots = item.find("..");
    if (dots != std::string::npos) {
      auto lo = parse_int(item.substr(0, dots));
      auto hi = parse_int(item.substr(dots + 2));
      if (!lo || !hi || *lo < 0 || *hi < *lo) bad_key(key, line, "bad seed range '" + item + "'");
      if (*hi - *lo >= 1000000) bad_key(key, line, "seed range too large");
      for (long long s = *lo; s <= *hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      auto s = parse_int(item);
      if (!s || *s < 0) bad_key(key, line, "bad seed '" + item + "'");
      seeds.push_back(static_cast<std::uint64_t>(*s));
    }
  }
  if (seeds.empty()) bad_key(key, line, "no seeds given");
  return seeds;
}

inline QosWeights parse_weight_list(const std::string& key, const std::string& value,
                                    std::size_t line) {
  QosWeights weights;
  for (const std::string& item : split_list(value)) {
    std::size_t colon = item.rfind(':');
    if (colon == std::string::npos) bad_key(key, line, "expected name:weight in '" + item + "'");
    std::string name(trim(std::string_view(item).substr(0, colon)));
    auto w = parse_double(trim(std::string_view(item).substr(colon + 1)));
    if (name.empty() || !w) bad_key(key, line, "expected name:weight in '" + item + "'");
    if (!weights.emplace(name, *w).second) bad_key(key, line, "attribute '" + name + "' repeated");
  }
  if (weights.empty()) bad_key(key, line, "no weights given");
  return weights;
}

inline std::vector<FailureInjection> parse_failures(const std::string& key,
                                                    const std::string& value, std::size_t line) {
  std::vector<FailureInjection> out;
  for (const std::string& item : split_list(value)) {
    std::size_t at = item.rfind('@');
    if (at == std::string::npos) bad_key(key, line, "expected service@tick in '" + item + "'");
    std::string sid(trim(std::string_view(item).substr(0, at)));
    auto tick = parse_int(trim(std::string_view(item).substr(at + 1)));
    if (sid.empty() || !tick || *tick < 0) bad_key(key, line, "expected service@tick in '" + item + "'");
    out.push_back(FailureInjection{static_cast<std::uint64_t>(*tick), sid});
  }
  if (out.empty()) bad_key(key, line, "no failures given");
  return out;
}

}  // namespace detail

/// Parses the flat key=value scenario format ('#' starts a comment).
/// Unknown and repeated keys are rejected. See the README for the key list.
inline Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  Scenario sc;
  sc.base_dir = base_dir;

  auto resolve = [&](std::string_view value) {
    std::filesystem::path p{std::string(value)};
    return p.is_absolute() ? p : base_dir / p;
  };

  bool saw_generator = false;
  bool saw_query = false;
  QosWeights query_weights;
  double query_level = 1.0;
  std::string query_domain;
  std::set<std::string> seen_keys;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line{raw};
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      raise(Errc::bad_scenario, "line " + std::to_string(line_no) + " is not key = value");
    }
    std::string key(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      raise(Errc::bad_scenario, "line " + std::to_string(line_no) + " has an empty key or value");
    }
    if (!seen_keys.insert(key).second) detail::bad_key(key, line_no, "already set");

    auto ensure_generator = [&]() -> GeneratorParams& {
      if (!sc.generator) sc.generator.emplace();
      saw_generator = true;
      return *sc.generator;
    };

    if (key == "taxonomy") {
      sc.taxonomy_path = resolve(value);
    } else if (key == "network") {
      sc.network_path = resolve(value);
    } else if (key == "out") {
      sc.out_path = resolve(value);
    } else if (key == "generator.registries") {
      ensure_generator().registry_count = static_cast<int>(detail::int_value(key, value, line_no, 1, 10000));
    } else if (key == "generator.services_min") {
      ensure_generator().services_min = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000));
    } else if (key == "generator.services_max") {
      ensure_generator().services_max = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000));
    } else if (key == "generator.attributes") {
      try {
        ensure_generator().attributes = detail::parse_attribute_declarations(value);
      } catch (const Error& e) {
        detail::bad_key(key, line_no, e.what());
      }
    } else if (key == "generator.neighbors_k") {
      ensure_generator().neighbors_k = static_cast<int>(detail::int_value(key, value, line_no, 0, 10000));
    } else if (key == "generator.unique_domains") {
      ensure_generator().unique_domains = detail::bool_value(key, value, line_no);
    } else if (key == "generator.seed") {
      sc.generator_seed = static_cast<std::uint64_t>(
          detail::int_value(key, value, line_no, 0, std::numeric_limits<long long>::max()));
      saw_generator = true;
      if (!sc.generator) sc.generator.emplace();
    } else if (key == "query.domain") {
      query_domain = value;
      saw_query = true;
    } else if (key == "query.weights") {
      query_weights = detail::parse_weight_list(key, value, line_no);
      saw_query = true;
    } else if (key == "query.level") {
      query_level = detail::double_value(key, value, line_no);
      saw_query = true;
    } else if (key == "methods") {
      sc.methods.clear();
      for (const std::string& m : detail::split_list(value)) {
        if (m != "bees" && m != "sweep" && m != "ga") {
          detail::bad_key(key, line_no, "unknown method '" + m + "'");
        }
        if (std::count(sc.methods.begin(), sc.methods.end(), m)) {
          detail::bad_key(key, line_no, "method '" + m + "' repeated");
        }
        sc.methods.push_back(m);
      }
      if (sc.methods.empty()) detail::bad_key(key, line_no, "no methods given");
    } else if (key == "bees.scouts") {
      sc.bees.scouts = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "bees.sites") {
      sc.bees.sites = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "bees.elite_sites") {
      sc.bees.elite_sites = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "bees.recruits_per_site") {
      sc.bees.recruits_per_site = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "bees.recruits_per_elite") {
      sc.bees.recruits_per_elite = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "bees.patch_size") {
      sc.bees.patch_size = detail::double_value(key, value, line_no);
    } else if (key == "bees.stagnation_limit") {
      sc.bees.stagnation_limit = static_cast<int>(
          detail::int_value(key, value, line_no, 1, std::numeric_limits<int>::max()));
    } else if (key == "bees.max_iterations") {
      sc.bees.max_iterations = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "bees.patch_shrink") {
      sc.bees.patch_shrink = detail::double_value(key, value, line_no);
    } else if (key == "ga.population") {
      sc.ga.population_size = static_cast<int>(detail::int_value(key, value, line_no, 2, 1000000));
    } else if (key == "ga.generations") {
      sc.ga.max_generations = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "ga.crossover") {
      sc.ga.crossover_rate = detail::double_value(key, value, line_no);
    } else if (key == "ga.mutation") {
      sc.ga.mutation_rate = detail::double_value(key, value, line_no);
    } else if (key == "ga.tournament") {
      sc.ga.tournament_size = static_cast<int>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "seeds") {
      sc.seeds = detail::parse_seeds(key, value, line_no);
    } else if (key == "cache.ttl") {
      sc.cache_ttl = static_cast<std::uint64_t>(
          detail::int_value(key, value, line_no, 1, std::numeric_limits<long long>::max()));
    } else if (key == "cache.capacity") {
      sc.cache_capacity = static_cast<std::size_t>(detail::int_value(key, value, line_no, 1, 1000000));
    } else if (key == "failures") {
      sc.failures = detail::parse_failures(key, value, line_no);
    } else {
      raise(Errc::bad_scenario, "unknown key '" + key + "' (line " + std::to_string(line_no) + ")");
    }
  }

  if (sc.taxonomy_path.empty()) raise(Errc::bad_scenario, "scenario lacks the 'taxonomy' key");
  if (sc.network_path && saw_generator) {
    raise(Errc::bad_scenario, "scenario sets both 'network' and generator.* keys");
  }
  if (saw_query) {
    if (query_domain.empty()) raise(Errc::bad_scenario, "query.* keys given without query.domain");
    sc.query = DiscoveryQuery{query_domain, std::move(query_weights), query_level};
  }
  return sc;
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  return parse_scenario(text, path.has_parent_path() ? path.parent_path() : ".");
}

struct LoadedWorld {
  Taxonomy taxonomy;
  PeerNetwork network;
};

inline LoadedWorld load_world(const Scenario& sc) {
  Taxonomy t = Taxonomy::parse(read_text_file(sc.taxonomy_path));
  PeerNetwork net;
  if (sc.network_path) {
    net = load_network(read_text_file(*sc.network_path), t);
  } else if (sc.generator) {
    net = generate_network(*sc.generator, t, sc.generator_seed);
  } else {
    raise(Errc::bad_scenario, "scenario needs either 'network' or generator.* keys");
  }
  return LoadedWorld{std::move(t), std::move(net)};
}

namespace detail {

inline double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

/// Nearest-rank quantile on a copy of the values.
template <class T>
T quantile(std::vector<T> xs, double q) {
  std::sort(xs.begin(), xs.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
  return xs[rank == 0 ? 0 : rank - 1];
}

struct MethodStats {
  std::vector<double> probes;
  std::vector<double> similarity;
};

struct DiscoverRun {
  std::vector<std::string> lines;
  std::map<std::string, MethodStats> stats;  // per method
};

inline DiscoverRun discover_run(const Scenario& sc) {
  if (!sc.query) raise(Errc::bad_scenario, "discovery scenario lacks query.* keys");
  LoadedWorld world = load_world(sc);
  const Taxonomy& t = world.taxonomy;
  const PeerNetwork& net = world.network;
  const DiscoveryQuery& q = *sc.query;
  q.validate(t);
  validate_weights(q.qos_weights, net.attributes);
  ConceptId wanted = normalize_concept(q.wanted_domain);

  std::vector<std::string> methods = sc.methods;
  std::sort(methods.begin(), methods.end());
  std::vector<std::uint64_t> seeds = sc.seeds;
  std::sort(seeds.begin(), seeds.end());

  DiscoverRun run;
  for (std::uint64_t seed : seeds) {
    for (const std::string& method : methods) {
      nlohmann::json j;
      j["method"] = method;
      j["seed"] = seed;
      net.reset_probe_count();
      auto t0 = std::chrono::steady_clock::now();

      std::string rid;
      if (method == "bees") {
        DiscoveryOutcome out = discover_registry(net, t, q, sc.bees, seed);
        rid = out.registry_id;
        j["probes"] = out.trace.total_probes;
        j["iterations"] = out.trace.steps.size() - 1;
        j["stop"] = to_string(out.trace.stop_reason);
      } else if (method == "sweep") {
        rid = exhaustive_discover(net, t, q);
        j["probes"] = net.probe_count();
        j["iterations"] = 1;
        j["stop"] = to_string(StopReason::all_probed);
      } else {
        GaDiscoveryOutcome out = ga_discover(net, t, q, sc.ga, seed);
        rid = out.registry_id;
        j["probes"] = out.total_probes;
        j["iterations"] = out.generations;
        double sim = t.wu_palmer_similarity(wanted, net.registries.at(rid).domain);
        j["stop"] = to_string(sim == 1.0 ? StopReason::similarity_one
                                         : StopReason::budget_exhausted);
      }

      const Registry& winner = net.registries.at(rid);
      if (winner.services.empty()) {
        raise(Errc::no_services_in_best_registry,
              "registry '" + rid + "' has no selectable services");
      }
      std::size_t idx =
          nearest_qos_index(winner.services, net.attributes, q.qos_weights, q.requested_level);
      double similarity = t.wu_palmer_similarity(wanted, winner.domain);
      j["registry"] = rid;
      j["similarity"] = similarity;
      j["service"] = winner.services[idx].id;
      j["score"] = qos_scores(winner.services, net.attributes, q.qos_weights)[idx];
      j["wall_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

      run.lines.push_back(j.dump());
      run.stats[method].probes.push_back(j["probes"].get<double>());
      run.stats[method].similarity.push_back(similarity);
    }
  }

  for (const auto& [method, st] : run.stats) {
    nlohmann::json j;
    j["aggregate"] = true;
    j["method"] = method;
    j["seeds"] = st.probes.size();
    j["probes_mean"] = mean(st.probes);
    j["probes_p50"] = quantile(st.probes, 0.5);
    j["probes_p90"] = quantile(st.probes, 0.9);
    j["similarity_mean"] = mean(st.similarity);
    run.lines.push_back(j.dump());
  }
  return run;
}

}  // namespace detail

/// One JSON line per (seed, method) in sorted order, then one aggregate
/// line per method.
inline std::vector<std::string> run_discover(const Scenario& sc) {
  return detail::discover_run(sc).lines;
}

/// Discovery plus probe-cost comparisons of every other method against the
/// exhaustive sweep.
inline std::vector<std::string> run_bench(const Scenario& sc) {
  detail::DiscoverRun run = detail::discover_run(sc);
  auto sweep = run.stats.find("sweep");
  if (sweep != run.stats.end()) {
    for (const auto& [method, st] : run.stats) {
      if (method == "sweep") continue;
      nlohmann::json j;
      j["aggregate"] = true;
      j["comparison"] = method + "-vs-sweep";
      j["probe_ratio"] = detail::mean(st.probes) / detail::mean(sweep->second.probes);
      run.lines.push_back(j.dump());
    }
  }
  return run.lines;
}

/// Replays the failure injections in tick order against one shared cache.
inline std::vector<std::string> run_substitute(const Scenario& sc) {
  if (sc.failures.empty()) raise(Errc::bad_scenario, "substitution scenario lacks 'failures'");
  if (!sc.query) raise(Errc::bad_scenario, "substitution scenario lacks query.* keys");
  LoadedWorld world = load_world(sc);
  validate_weights(sc.query->qos_weights, world.network.attributes);

  std::vector<FailureInjection> injections = sc.failures;
  std::stable_sort(injections.begin(), injections.end(),
                   [](const FailureInjection& a, const FailureInjection& b) { return a.tick < b.tick; });

  EquivalenceCache cache = sc.cache_capacity ? EquivalenceCache(*sc.cache_capacity)
                                             : EquivalenceCache();
  std::uint64_t seed = sc.seeds.front();
  std::vector<std::string> lines;
  for (const FailureInjection& inj : injections) {
    world.network.reset_probe_count();
    auto t0 = std::chrono::steady_clock::now();
    SubstitutionOutcome out =
        substitute(inj.service_id, cache, world.network, world.taxonomy, sc.bees,
                   sc.query->qos_weights, sc.query->requested_level, inj.tick, seed, sc.cache_ttl);
    nlohmann::json j;
    j["tick"] = inj.tick;
    j["failed"] = inj.service_id;
    j["substitute"] = out.service.id;
    j["registry"] = out.registry_id;
    j["source"] = to_string(out.source);
    j["probes"] = out.probes;
    j["seed"] = seed;
    j["wall_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    lines.push_back(j.dump());
  }
  nlohmann::json j;
  j["aggregate"] = true;
  j["injections"] = injections.size();
  j["cache_entries"] = cache.size();
  lines.push_back(j.dump());
  return lines;
}

}  // namespace beehive
