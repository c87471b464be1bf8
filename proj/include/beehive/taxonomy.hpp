#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "beehive/errors.hpp"

namespace beehive {

/// Case-normalized concept token (lowercase, no whitespace).
using ConceptId = std::string;

/// Lowercases a concept token and rejects empty or whitespace-bearing ones.
inline ConceptId normalize_concept(std::string_view raw) {
  ConceptId id;
  id.reserve(raw.size());
  for (unsigned char ch : raw) {
    if (std::isspace(ch)) {
      raise(Errc::schema_violation, "concept token contains whitespace: '" + std::string(raw) + "'");
    }
    id.push_back(static_cast<char>(std::tolower(ch)));
  }
  if (id.empty()) {
    raise(Errc::schema_violation, "empty concept token");
  }
  return id;
}

/// Rooted single-parent concept tree with Wu-Palmer similarity.
///
/// Depth is counted in nodes on the root..concept path, so depth(root) == 1
/// and the similarity 2*depth(lca) / (depth(a) + depth(b)) always lands in
/// (0, 1], hitting 1 exactly when a == b.
class Taxonomy {
 public:
  /// Parses the edge-list format: one `child<TAB>parent` per line, `#`
  /// comments and blank lines ignored. The root is the one concept that
  /// appears only on the parent side.
  static Taxonomy parse(std::string_view document) {
    std::vector<std::pair<ConceptId, ConceptId>> edges;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= document.size()) {
      std::size_t eol = document.find('\n', pos);
      std::string_view line = document.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      pos = eol == std::string_view::npos ? document.size() + 1 : eol + 1;
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) {
        raise(Errc::schema_violation,
              "taxonomy line " + std::to_string(line_no) + " is not 'child<TAB>parent'");
      }
      edges.emplace_back(normalize_concept(trim(line.substr(0, tab))),
                         normalize_concept(trim(line.substr(tab + 1))));
    }
    if (edges.empty()) {
      raise(Errc::empty_document, "taxonomy document declares no edges");
    }
    return from_edges(edges);
  }

  /// Builds a taxonomy from child->parent edges (already-normalized ids are
  /// normalized again, harmlessly).
  static Taxonomy from_edges(const std::vector<std::pair<ConceptId, ConceptId>>& edges) {
    Taxonomy t;
    std::map<ConceptId, ConceptId> parent_of;
    for (const auto& [raw_child, raw_parent] : edges) {
      ConceptId child = normalize_concept(raw_child);
      ConceptId parent = normalize_concept(raw_parent);
      if (parent_of.count(child)) {
        raise(Errc::duplicate_concept, "concept '" + child + "' declared twice");
      }
      parent_of.emplace(std::move(child), std::move(parent));
    }

    // Every concept mentioned anywhere; parents without an own edge are root
    // candidates.
    std::map<ConceptId, bool> is_child;
    for (const auto& [child, parent] : parent_of) {
      is_child[child] = true;
      is_child.emplace(parent, false);
    }
    std::vector<ConceptId> roots;
    for (const auto& [id, has_parent] : is_child) {
      if (!has_parent) roots.push_back(id);
    }
    if (roots.size() > 1) {
      raise(Errc::multiple_roots, "found " + std::to_string(roots.size()) + " parentless concepts");
    }
    if (roots.empty()) {
      // every concept has a parent, so some parent chain must loop
      raise(Errc::cycle_detected, "no root: every concept has a parent");
    }
    return t.build(roots.front(), parent_of);
  }

  /// Builds from an explicit root and parent map; parents referenced but
  /// never defined (and distinct from the root) leave their children unable
  /// to reach the root.
  static Taxonomy from_parent_map(const ConceptId& root, const std::map<ConceptId, ConceptId>& parent_of) {
    Taxonomy t;
    std::map<ConceptId, ConceptId> normalized;
    for (const auto& [child, parent] : parent_of) {
      normalized.emplace(normalize_concept(child), normalize_concept(parent));
    }
    return t.build(normalize_concept(root), normalized);
  }

  const ConceptId& root() const { return names_[root_index_]; }

  std::size_t size() const { return names_.size(); }

  bool contains(const ConceptId& c) const { return index_.count(c) > 0; }

  /// All concepts in lexicographic order.
  const std::vector<ConceptId>& concepts() const { return names_; }

  /// Concepts that are nobody's parent.
  std::vector<ConceptId> leaves() const {
    std::vector<bool> has_child(names_.size(), false);
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (parent_[i] >= 0) has_child[static_cast<std::size_t>(parent_[i])] = true;
    }
    std::vector<ConceptId> out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!has_child[i]) out.push_back(names_[i]);
    }
    return out;
  }

  std::optional<ConceptId> parent_of(const ConceptId& c) const {
    int i = parent_[require(c)];
    if (i < 0) return std::nullopt;
    return names_[static_cast<std::size_t>(i)];
  }

  /// Nodes on the root..c path, inclusive; depth(root) == 1.
  int depth(const ConceptId& c) const { return depth_[require(c)]; }

  /// Deepest ancestor-or-self shared by a and b (unique in a tree).
  ConceptId lowest_common_ancestor(const ConceptId& a, const ConceptId& b) const {
    return names_[static_cast<std::size_t>(lca_index(require(a), require(b)))];
  }

  /// 2*depth(lca) / (depth(a) + depth(b)), in (0, 1].
  double wu_palmer_similarity(const ConceptId& a, const ConceptId& b) const {
    std::size_t ia = require(a);
    std::size_t ib = require(b);
    int lca_depth = depth_[static_cast<std::size_t>(lca_index(ia, ib))];
    return 2.0 * lca_depth / (depth_[ia] + depth_[ib]);
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  std::size_t require(const ConceptId& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) {
      raise(Errc::unknown_concept, "concept '" + c + "' not in taxonomy");
    }
    return it->second;
  }

  int lca_index(std::size_t a, std::size_t b) const {
    int ia = static_cast<int>(a);
    int ib = static_cast<int>(b);
    while (depth_[static_cast<std::size_t>(ia)] > depth_[static_cast<std::size_t>(ib)]) ia = parent_[static_cast<std::size_t>(ia)];
    while (depth_[static_cast<std::size_t>(ib)] > depth_[static_cast<std::size_t>(ia)]) ib = parent_[static_cast<std::size_t>(ib)];
    while (ia != ib) {
      ia = parent_[static_cast<std::size_t>(ia)];
      ib = parent_[static_cast<std::size_t>(ib)];
    }
    return ia;
  }

  Taxonomy build(const ConceptId& root, const std::map<ConceptId, ConceptId>& parent_of) {
    // Collect the full concept set in sorted order for stable indexing.
    std::map<ConceptId, std::size_t> index;
    auto intern = [&](const ConceptId& id) {
      index.emplace(id, 0);
    };
    intern(root);
    for (const auto& [child, parent] : parent_of) {
      intern(child);
      intern(parent);
    }
    names_.reserve(index.size());
    for (auto& [id, slot] : index) {
      slot = names_.size();
      names_.push_back(id);
    }

    parent_.assign(names_.size(), -1);
    for (const auto& [child, parent] : parent_of) {
      if (child == root) {
        raise(Errc::cycle_detected, "root '" + root + "' has a parent");
      }
      parent_[index.at(child)] = static_cast<int>(index.at(parent));
    }
    root_index_ = index.at(root);

    // Resolve depths by chasing parent links; a revisit of an in-progress
    // node is a cycle, and a parentless non-root node cannot reach the root.
    depth_.assign(names_.size(), 0);
    std::vector<int> state(names_.size(), 0);  // 0 untouched, 1 on stack, 2 done
    for (std::size_t start = 0; start < names_.size(); ++start) {
      if (state[start] == 2) continue;
      std::vector<std::size_t> chain;
      std::size_t cur = start;
      while (true) {
        if (state[cur] == 2) break;
        if (state[cur] == 1) {
          raise(Errc::cycle_detected, "parent chain of '" + names_[start] + "' loops at '" + names_[cur] + "'");
        }
        state[cur] = 1;
        chain.push_back(cur);
        if (cur == root_index_) {
          depth_[cur] = 1;
          state[cur] = 2;
          chain.pop_back();
          break;
        }
        if (parent_[cur] < 0) {
          raise(Errc::orphan_concept, "concept '" + names_[cur] + "' cannot reach the root");
        }
        cur = static_cast<std::size_t>(parent_[cur]);
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        depth_[*it] = depth_[static_cast<std::size_t>(parent_[*it])] + 1;
        state[*it] = 2;
      }
    }

    index_.reserve(index.size());
    for (const auto& [id, slot] : index) index_.emplace(id, slot);
    return std::move(*this);
  }

  std::unordered_map<ConceptId, std::size_t> index_;
  std::vector<ConceptId> names_;  // sorted
  std::vector<int> parent_;       // -1 for root
  std::vector<int> depth_;
  std::size_t root_index_ = 0;
};

}  // namespace beehive
