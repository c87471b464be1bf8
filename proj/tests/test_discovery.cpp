#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "beehive/discovery.hpp"

using namespace beehive;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a beehive::Error");
  return Errc::invalid_params;
}

Taxonomy small_taxonomy() {
  return Taxonomy::parse(
      "a\troot\n"
      "b\troot\n"
      "a1\ta\n"
      "a2\ta\n"
      "b1\tb\n"
      "b2\tb\n");
}

// deep tree: 2 * 3 * 2 = 12 leaves at depth 4
Taxonomy wide_taxonomy() {
  std::string doc;
  for (char top : {'x', 'y'}) {
    doc += std::string(1, top) + "\troot\n";
    for (int mid = 1; mid <= 3; ++mid) {
      std::string m = std::string(1, top) + std::to_string(mid);
      doc += m + "\t" + std::string(1, top) + "\n";
      doc += m + "a\t" + m + "\n";
      doc += m + "b\t" + m + "\n";
    }
  }
  return Taxonomy::parse(doc);
}

DiscoveryQuery query_for(const ConceptId& domain) {
  return DiscoveryQuery{domain, {{"availability", 0.5}, {"response_time_ms", 0.5}}, 0.8};
}

BeesParams small_bees() {
  BeesParams p;
  p.scouts = 10;
  p.sites = 5;
  p.elite_sites = 1;
  p.recruits_per_site = 2;
  p.recruits_per_elite = 4;
  p.max_iterations = 100;
  return p;
}

std::uint64_t probe_bound(const BeesParams& p, std::size_t iterations) {
  return static_cast<std::uint64_t>(p.scouts) +
         iterations * (static_cast<std::uint64_t>(p.recruits_per_elite) +
                       static_cast<std::uint64_t>(p.sites - p.elite_sites) * p.recruits_per_site +
                       static_cast<std::uint64_t>(p.scouts - p.sites));
}

}  // namespace

TEST_CASE("single-registry network") {
  Taxonomy t = small_taxonomy();
  PeerNetwork net = load_network(R"(<network attributes="q:higher">
    <registry id="r1" domain="a1"><service id="s1" name="n" url="u"><qos q="1"/></service></registry>
  </network>)",
                                 t);

  auto [rid, trace] = discover_registry(net, t, query_for("b2"), small_bees(), 1);
  CHECK(rid == "r1");
  CHECK(trace.total_probes == 1);
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].probes.size() == 1);
  CHECK(trace.stop_reason == StopReason::all_probed);

  auto exact = discover_registry(net, t, query_for("a1"), small_bees(), 1);
  CHECK(exact.trace.stop_reason == StopReason::similarity_one);
}

TEST_CASE("an exact-domain registry stops the search with similarity one") {
  Taxonomy t = wide_taxonomy();
  GeneratorParams gen;
  gen.registry_count = 12;
  gen.neighbors_k = 3;
  PeerNetwork net = generate_network(gen, t, 21);
  ConceptId target = net.registries.at("r07").domain;

  auto [rid, trace] = discover_registry(net, t, query_for(target), small_bees(), 5);
  CHECK(net.registries.at(rid).domain == target);
  CHECK(trace.stop_reason == StopReason::similarity_one);
  CHECK(trace.steps.back().probes.back().second == 1.0);
  CHECK(trace.steps.back().elite_id == rid);
}

TEST_CASE("exhaustive sweep probes everything and breaks ties downward") {
  Taxonomy t = small_taxonomy();
  PeerNetwork net = load_network(R"(<network attributes="q:higher">
    <registry id="r3" domain="a2"/>
    <registry id="r0" domain="a2"/>
    <registry id="r9" domain="b1"/>
  </network>)",
                                 t);

  net.reset_probe_count();
  std::string rid = exhaustive_discover(net, t, query_for("a1"));
  CHECK(rid == "r0");  // r0 and r3 are equally similar
  CHECK(net.probe_count() == 3);

  CHECK(code_of([&] { exhaustive_discover(PeerNetwork{}, t, query_for("a1")); }) ==
        Errc::empty_network);
}

TEST_CASE("full-budget discovery matches the exhaustive oracle") {
  Taxonomy t = wide_taxonomy();
  GeneratorParams gen;
  gen.registry_count = 30;
  gen.unique_domains = false;
  gen.neighbors_k = 4;

  for (std::uint64_t seed = 7; seed < 17; ++seed) {
    PeerNetwork net = generate_network(gen, t, seed);
    DiscoveryQuery q = query_for("y2a");

    std::string oracle = exhaustive_discover(net, t, q);
    auto [rid, trace] = discover_registry(net, t, q, small_bees(), seed);

    REQUIRE(trace.stop_reason != StopReason::budget_exhausted);
    ConceptId wanted = "y2a";
    CHECK(t.wu_palmer_similarity(wanted, net.registries.at(rid).domain) ==
          t.wu_palmer_similarity(wanted, net.registries.at(oracle).domain));
    if (trace.stop_reason == StopReason::all_probed) {
      // full coverage also implies the identical smallest-id tie rule
      CHECK(rid == oracle);
    }
  }
}

TEST_CASE("trace invariants") {
  Taxonomy t = wide_taxonomy();
  GeneratorParams gen;
  gen.registry_count = 30;
  gen.unique_domains = false;
  gen.neighbors_k = 4;
  PeerNetwork net = generate_network(gen, t, 100);
  BeesParams p = small_bees();
  p.max_iterations = 3;  // keep some registries unprobed

  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    auto [rid, trace] = discover_registry(net, t, query_for("x1a"), p, seed);

    SECTION("no registry is probed twice (seed " + std::to_string(seed) + ")") {
      std::set<std::string> seen;
      std::uint64_t count = 0;
      for (const TraceStep& s : trace.steps) {
        for (const auto& [id, sim] : s.probes) {
          CHECK(seen.insert(id).second);
          ++count;
        }
      }
      CHECK(count == trace.total_probes);
      CHECK(count <= net.registries.size());
      CHECK(count <= probe_bound(p, trace.steps.size() - 1));
    }

    SECTION("running best similarity never decreases (seed " + std::to_string(seed) + ")") {
      double best = -1.0;
      ConceptId wanted = "x1a";
      for (const TraceStep& s : trace.steps) {
        for (const auto& [id, sim] : s.probes) best = std::max(best, sim);
        CHECK(t.wu_palmer_similarity(wanted, net.registries.at(s.elite_id).domain) == best);
      }
      CHECK(t.wu_palmer_similarity(wanted, net.registries.at(rid).domain) == best);
    }
  }
}

TEST_CASE("discovery is deterministic per seed") {
  Taxonomy t = wide_taxonomy();
  GeneratorParams gen;
  gen.registry_count = 25;
  gen.unique_domains = false;
  gen.neighbors_k = 3;
  PeerNetwork net = generate_network(gen, t, 55);
  BeesParams p = small_bees();
  p.max_iterations = 2;

  auto a = discover_registry(net, t, query_for("y3b"), p, 42);
  auto b = discover_registry(net, t, query_for("y3b"), p, 42);
  CHECK(a.registry_id == b.registry_id);
  CHECK(a.trace == b.trace);

  auto c = discover_registry(net, t, query_for("y3b"), p, 43);
  CHECK(a.trace != c.trace);
}

TEST_CASE("small-network degeneracy reduces wave zero to a full sweep") {
  Taxonomy t = wide_taxonomy();
  GeneratorParams gen;
  gen.registry_count = 6;
  gen.neighbors_k = 2;
  PeerNetwork net = generate_network(gen, t, 9);

  BeesParams p = small_bees();
  p.scouts = 10;  // more scouts than registries

  // pick a domain no registry carries exactly, so the sweep must complete
  ConceptId wanted = "root";
  auto [rid, trace] = discover_registry(net, t, DiscoveryQuery{wanted, {}, 1.0}, p, 3);
  CHECK(trace.stop_reason == StopReason::all_probed);
  CHECK(trace.steps.size() == 1);
  CHECK(trace.total_probes == net.registries.size());
}

TEST_CASE("selection stage") {
  Taxonomy t = small_taxonomy();

  SECTION("a single-service winner returns that service") {
    PeerNetwork net = load_network(R"(<network attributes="q:higher">
      <registry id="r1" domain="a1"><service id="s1" name="n" url="u"><qos q="1"/></service></registry>
      <registry id="r2" domain="b1"><service id="s2" name="n" url="u"><qos q="1"/></service></registry>
    </network>)",
                                   t);
    DiscoveryQuery q{"a1", {{"q", 1.0}}, 0.5};
    DiscoveryResult res = discover_and_select(net, t, q, small_bees(), 1);
    CHECK(res.registry_id == "r1");
    CHECK(res.similarity == 1.0);
    CHECK(res.selected_service.id == "s1");
  }

  SECTION("an empty winning registry is a domain error") {
    PeerNetwork net = load_network(R"(<network attributes="q:higher">
      <registry id="r1" domain="a1"/>
    </network>)",
                                   t);
    DiscoveryQuery q{"a1", {{"q", 1.0}}, 0.5};
    CHECK(code_of([&] { discover_and_select(net, t, q, small_bees(), 1); }) ==
          Errc::no_services_in_best_registry);
  }

  SECTION("exclusion removes a candidate") {
    PeerNetwork net = load_network(R"(<network attributes="q:higher">
      <registry id="r1" domain="a1">
        <service id="s1" name="n" url="u"><qos q="3"/></service>
        <service id="s2" name="n" url="u"><qos q="1"/></service>
      </registry>
    </network>)",
                                   t);
    DiscoveryQuery q{"a1", {{"q", 1.0}}, 1.0};
    CHECK(discover_and_select(net, t, q, small_bees(), 1).selected_service.id == "s1");
    CHECK(discover_and_select(net, t, q, small_bees(), 1, "s1").selected_service.id == "s2");

    PeerNetwork solo = load_network(R"(<network attributes="q:higher">
      <registry id="r1" domain="a1"><service id="s1" name="n" url="u"><qos q="1"/></service></registry>
    </network>)",
                                    t);
    CHECK(code_of([&] { discover_and_select(solo, t, q, small_bees(), 1, "s1"); }) ==
          Errc::no_services_in_best_registry);
  }

  SECTION("selection equals the two-stage brute-force oracle") {
    Taxonomy deep = wide_taxonomy();
    GeneratorParams gen;
    gen.registry_count = 30;
    gen.unique_domains = false;
    gen.neighbors_k = 4;
    PeerNetwork net = generate_network(gen, deep, 11);
    DiscoveryQuery q{"x2b", {{"availability", 0.7}, {"response_time_ms", 0.3}}, 0.6};

    std::string best_reg = exhaustive_discover(net, deep, q);
    ServiceDescriptor best_svc = nearest_qos_service(net.registries.at(best_reg).services,
                                                     net.attributes, q.qos_weights, q.requested_level);

    DiscoveryResult res = discover_and_select(net, deep, q, small_bees(), 11);
    CHECK(res.registry_id == best_reg);
    CHECK(res.selected_service == best_svc);
  }
}

TEST_CASE("query validation and error mapping") {
  Taxonomy t = small_taxonomy();
  PeerNetwork net = load_network(R"(<network attributes="q:higher">
    <registry id="r1" domain="a1"/>
  </network>)",
                                 t);

  CHECK(code_of([&] { discover_registry(PeerNetwork{}, t, query_for("a1"), small_bees(), 1); }) ==
        Errc::empty_network);
  CHECK(code_of([&] { discover_registry(net, t, query_for("ghost"), small_bees(), 1); }) ==
        Errc::unknown_concept);
  DiscoveryQuery bad_level{"a1", {}, 1.5};
  CHECK(code_of([&] { discover_registry(net, t, bad_level, small_bees(), 1); }) ==
        Errc::invalid_params);
}

TEST_CASE("ga discovery probes each registry at most once") {
  Taxonomy t = wide_taxonomy();
  GeneratorParams gen;
  gen.registry_count = 12;
  gen.neighbors_k = 3;
  PeerNetwork net = generate_network(gen, t, 77);
  ConceptId target = net.registries.at("r05").domain;

  GaParams ga;
  ga.population_size = 8;
  ga.max_generations = 40;
  ga.mutation_rate = 0.3;

  net.reset_probe_count();
  GaDiscoveryOutcome out = ga_discover(net, t, query_for(target), ga, 4);
  CHECK(net.registries.at(out.registry_id).domain == target);
  CHECK(out.total_probes <= net.registries.size());
  CHECK(net.probe_count() == out.total_probes);  // memoized: one probe per distinct registry

  GaDiscoveryOutcome again = ga_discover(net, t, query_for(target), ga, 4);
  CHECK(again.registry_id == out.registry_id);
  CHECK(again.total_probes == out.total_probes);
}
