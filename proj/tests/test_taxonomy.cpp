#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "beehive/taxonomy.hpp"

using beehive::ConceptId;
using beehive::Errc;
using beehive::Error;
using beehive::Taxonomy;

namespace {

// Independent LCA oracle: intersect the full ancestor-or-self sets and take
// the deepest member.
std::vector<ConceptId> ancestors_or_self(const Taxonomy& t, ConceptId c) {
  std::vector<ConceptId> chain{c};
  while (auto p = t.parent_of(chain.back())) chain.push_back(*p);
  return chain;
}

ConceptId brute_force_lca(const Taxonomy& t, const ConceptId& a, const ConceptId& b) {
  auto chain_a = ancestors_or_self(t, a);
  std::set<ConceptId> set_a(chain_a.begin(), chain_a.end());
  ConceptId best;
  int best_depth = 0;
  for (const auto& anc : ancestors_or_self(t, b)) {
    if (set_a.count(anc) && t.depth(anc) > best_depth) {
      best_depth = t.depth(anc);
      best = anc;
    }
  }
  return best;
}

double brute_force_wu_palmer(const Taxonomy& t, const ConceptId& a, const ConceptId& b) {
  int lca_depth = t.depth(brute_force_lca(t, a, b));
  return 2.0 * lca_depth / (t.depth(a) + t.depth(b));
}

// Random tree: node i's parent is drawn among nodes 0..i-1.
Taxonomy random_taxonomy(std::mt19937_64& rng, int node_count) {
  std::vector<std::pair<ConceptId, ConceptId>> edges;
  for (int i = 1; i < node_count; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back("n" + std::to_string(i), "n" + std::to_string(pick(rng)));
  }
  return Taxonomy::from_edges(edges);
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a beehive::Error");
  return Errc::io_failure;
}

}  // namespace

TEST_CASE("edge-list parsing builds the declared tree") {
  Taxonomy t = Taxonomy::parse(
      "# two-edge document\n"
      "thing\troot\n"
      "service\tthing\n"
      "\n");
  CHECK(t.size() == 3);
  CHECK(t.root() == "root");
  CHECK(t.depth("root") == 1);
  CHECK(t.depth("thing") == 2);
  CHECK(t.depth("service") == 3);
}

TEST_CASE("concept ids are case-folded at load") {
  Taxonomy t = Taxonomy::parse("Thing\tROOT\nService\tthing\n");
  CHECK(t.contains("thing"));
  CHECK(t.contains("service"));
  CHECK_FALSE(t.contains("Thing"));
}

TEST_CASE("load rejects malformed documents") {
  CHECK(code_of([] { Taxonomy::parse(""); }) == Errc::empty_document);
  CHECK(code_of([] { Taxonomy::parse("# only a comment\n\n"); }) == Errc::empty_document);
  CHECK(code_of([] { Taxonomy::parse("a\tb\nb\ta\n"); }) == Errc::cycle_detected);
  CHECK(code_of([] { Taxonomy::parse("a\troot\na\tother\n"); }) == Errc::duplicate_concept);
  CHECK(code_of([] { Taxonomy::parse("a\tr1\nb\tr2\n"); }) == Errc::multiple_roots);
  CHECK(code_of([] { Taxonomy::parse("a b\n"); }) == Errc::schema_violation);
  CHECK(code_of([] { Taxonomy::parse("a\ta\n"); }) == Errc::cycle_detected);
}

TEST_CASE("parent map with an undefined parent leaves an orphan") {
  std::map<ConceptId, ConceptId> parents{{"a", "root"}, {"b", "ghost"}};
  CHECK(code_of([&] { Taxonomy::from_parent_map("root", parents); }) == Errc::orphan_concept);
}

TEST_CASE("depth follows the root..concept node count") {
  Taxonomy t = Taxonomy::parse("a\troot\nb\ta\nc\tb\n");
  CHECK(t.depth("root") == 1);
  CHECK(t.depth("a") == 2);
  CHECK(t.depth("c") == 4);
  CHECK(code_of([&] { t.depth("zzz"); }) == Errc::unknown_concept);
}

TEST_CASE("lowest common ancestor basics") {
  Taxonomy t = Taxonomy::parse(
      "animal\troot\n"
      "plant\troot\n"
      "dog\tanimal\n"
      "cat\tanimal\n"
      "rose\tplant\n");
  CHECK(t.lowest_common_ancestor("dog", "dog") == "dog");
  CHECK(t.lowest_common_ancestor("dog", "cat") == "animal");
  CHECK(t.lowest_common_ancestor("root", "rose") == "root");
  CHECK(t.lowest_common_ancestor("dog", "rose") == "root");
  CHECK(code_of([&] { t.lowest_common_ancestor("dog", "zzz"); }) == Errc::unknown_concept);
}

TEST_CASE("wu-palmer similarity matches the formula") {
  // dog, cat are siblings at depth 3 with parent at depth 2.
  Taxonomy t = Taxonomy::parse(
      "animal\troot\n"
      "dog\tanimal\n"
      "cat\tanimal\n"
      "puppy\tdog\n");
  CHECK(t.wu_palmer_similarity("dog", "dog") == 1.0);
  CHECK(t.wu_palmer_similarity("dog", "cat") == Catch::Approx(brute_force_wu_palmer(t, "dog", "cat")));
  CHECK(t.wu_palmer_similarity("dog", "cat") == Catch::Approx(2.0 * 2 / (3 + 3)));
  // root against the depth-4 leaf.
  CHECK(t.wu_palmer_similarity("root", "puppy") == Catch::Approx(brute_force_wu_palmer(t, "root", "puppy")));
  CHECK(t.wu_palmer_similarity("root", "puppy") == Catch::Approx(0.4));
}

TEST_CASE("similarity properties hold on random trees") {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> size_dist(2, 50);
    Taxonomy t = random_taxonomy(rng, size_dist(rng));
    const auto& ids = t.concepts();
    for (const auto& a : ids) {
      for (const auto& b : ids) {
        // oracle equivalence on every pair
        REQUIRE(t.lowest_common_ancestor(a, b) == brute_force_lca(t, a, b));
        double sim = t.wu_palmer_similarity(a, b);
        REQUIRE(sim == t.wu_palmer_similarity(b, a));  // symmetry, exact
        REQUIRE(sim > 0.0);
        REQUIRE(sim <= 1.0);
        REQUIRE((sim == 1.0) == (a == b));
      }
    }
  }
}

TEST_CASE("similarity to a fixed leaf grows with ancestor depth") {
  Taxonomy t = Taxonomy::parse("a\troot\nb\ta\nc\tb\nd\tc\n");
  std::vector<ConceptId> chain{"root", "a", "b", "c", "d"};
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    CHECK(t.wu_palmer_similarity("d", chain[i]) <= t.wu_palmer_similarity("d", chain[i + 1]));
  }
}
