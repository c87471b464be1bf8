#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "beehive/detail/sampling.hpp"
#include "beehive/detail/text.hpp"
#include "beehive/errors.hpp"
#include "beehive/service.hpp"
#include "beehive/taxonomy.hpp"

namespace beehive {

/// A community of services sharing one business domain.
struct Registry {
  std::string id;
  ConceptId domain;
  std::vector<ServiceDescriptor> services;

  bool operator==(const Registry&) const = default;
};

/// The simulated distributed environment: registries, a symmetric peer
/// adjacency graph, the globally declared QoS attribute set, and a probe
/// counter that tallies every registry description lookup.
///
/// Reads (probe_registry, neighbors_of) are safe concurrently; the counter
/// is atomic. Mutations (classify_service) need exclusive access.
struct PeerNetwork {
  std::map<std::string, Registry> registries;
  std::map<std::string, std::set<std::string>> adjacency;
  QosDirections attributes;

  PeerNetwork() = default;
  PeerNetwork(const PeerNetwork& o)
      : registries(o.registries), adjacency(o.adjacency), attributes(o.attributes),
        probes_(o.probes_.load()) {}
  PeerNetwork(PeerNetwork&& o) noexcept
      : registries(std::move(o.registries)), adjacency(std::move(o.adjacency)),
        attributes(std::move(o.attributes)), probes_(o.probes_.load()) {}
  PeerNetwork& operator=(const PeerNetwork& o) {
    if (this != &o) {
      registries = o.registries;
      adjacency = o.adjacency;
      attributes = o.attributes;
      probes_.store(o.probes_.load());
    }
    return *this;
  }
  PeerNetwork& operator=(PeerNetwork&& o) noexcept {
    registries = std::move(o.registries);
    adjacency = std::move(o.adjacency);
    attributes = std::move(o.attributes);
    probes_.store(o.probes_.load());
    return *this;
  }

  bool operator==(const PeerNetwork& o) const {
    return registries == o.registries && adjacency == o.adjacency && attributes == o.attributes;
  }

  std::uint64_t probe_count() const { return probes_.load(std::memory_order_relaxed); }
  void reset_probe_count() const { probes_.store(0, std::memory_order_relaxed); }
  void count_probe() const { probes_.fetch_add(1, std::memory_order_relaxed); }

  /// Checks every structural invariant against the taxonomy.
  void validate(const Taxonomy& t) const {
    if (attributes.empty()) raise(Errc::schema_violation, "network declares no QoS attributes");
    std::set<std::string_view> service_ids;
    for (const auto& [id, reg] : registries) {
      if (id != reg.id) raise(Errc::schema_violation, "registry key '" + id + "' != id '" + reg.id + "'");
      if (!t.contains(reg.domain)) {
        raise(Errc::unknown_domain_concept, "registry '" + id + "' domain '" + reg.domain +
                                                "' is not a taxonomy concept");
      }
      for (const ServiceDescriptor& s : reg.services) {
        if (!service_ids.insert(s.id).second) {
          raise(Errc::duplicate_service_id, "service id '" + s.id + "' appears more than once");
        }
        if (s.qos.size() != attributes.size() ||
            !std::equal(s.qos.begin(), s.qos.end(), attributes.begin(),
                        [](const auto& q, const auto& a) { return q.first == a.first; })) {
          raise(Errc::schema_violation,
                "service '" + s.id + "' does not carry exactly the declared attributes");
        }
      }
    }
    for (const auto& [id, nbrs] : adjacency) {
      if (!registries.count(id)) {
        raise(Errc::schema_violation, "adjacency lists unknown registry '" + id + "'");
      }
      for (const std::string& n : nbrs) {
        if (n == id) raise(Errc::schema_violation, "registry '" + id + "' has a self-loop");
        if (!registries.count(n)) {
          raise(Errc::schema_violation, "edge endpoint '" + n + "' is not a registry");
        }
        auto back = adjacency.find(n);
        if (back == adjacency.end() || !back->second.count(id)) {
          raise(Errc::asymmetric_adjacency,
                "edge " + id + " -> " + n + " has no reverse direction");
        }
      }
    }
  }

 private:
  mutable std::atomic<std::uint64_t> probes_{0};
};

namespace detail {

inline QosDirections parse_attribute_declarations(const std::string& decl) {
  QosDirections dirs;
  std::size_t start = 0;
  while (start <= decl.size()) {
    std::size_t comma = decl.find(',', start);
    std::string_view item = trim(std::string_view(decl).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) {
      std::size_t colon = item.rfind(':');
      if (colon == std::string_view::npos) {
        raise(Errc::schema_violation,
              "attribute '" + std::string(item) + "' lacks a :higher/:lower direction");
      }
      std::string name(trim(item.substr(0, colon)));
      std::string_view dir = trim(item.substr(colon + 1));
      if (name.empty()) raise(Errc::schema_violation, "empty attribute name in declaration");
      // names double as XML attribute names on <qos>, so keep them XML-safe
      auto name_char = [](char c, bool first) {
        bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
        bool digit = c >= '0' && c <= '9';
        return first ? alpha : alpha || digit || c == '-' || c == '.';
      };
      for (std::size_t i = 0; i < name.size(); ++i) {
        if (!name_char(name[i], i == 0)) {
          raise(Errc::schema_violation, "attribute name '" + name + "' is not a valid XML name");
        }
      }
      QosDirection d;
      if (dir == "higher") {
        d = QosDirection::higher_better;
      } else if (dir == "lower") {
        d = QosDirection::lower_better;
      } else {
        raise(Errc::schema_violation, "attribute direction must be 'higher' or 'lower', got '" +
                                          std::string(dir) + "'");
      }
      if (!dirs.emplace(std::move(name), d).second) {
        raise(Errc::schema_violation, "attribute declared twice");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return dirs;
}

inline std::string padded_id(char prefix, int value, int width) {
  std::string digits = std::to_string(value);
  std::string out(1, prefix);
  if (static_cast<int>(digits.size()) < width) out.append(width - digits.size(), '0');
  return out + digits;
}

inline std::string xml_attr(const boost::property_tree::ptree& node, const char* name,
                            const std::string& where) {
  auto v = node.get_optional<std::string>(std::string("<xmlattr>.") + name);
  if (!v) raise(Errc::schema_violation, where + " lacks required attribute '" + name + "'");
  return *v;
}

}  // namespace detail

/// Parses and validates a network file (see the README for the format).
inline PeerNetwork load_network(const std::string& document, const Taxonomy& t) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(document);
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    raise(Errc::schema_violation, std::string("malformed XML: ") + e.what());
  }
  auto root = tree.get_child_optional("network");
  if (!root) raise(Errc::schema_violation, "document has no <network> root element");

  PeerNetwork net;
  net.attributes = detail::parse_attribute_declarations(
      detail::xml_attr(*root, "attributes", "<network>"));

  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [key, node] : *root) {
    if (key == "<xmlattr>") continue;
    if (key == "registry") {
      Registry reg;
      reg.id = detail::xml_attr(node, "id", "<registry>");
      reg.domain = normalize_concept(detail::xml_attr(node, "domain", "<registry>"));
      for (const auto& [child_key, child] : node) {
        if (child_key == "<xmlattr>") continue;
        if (child_key != "service") {
          raise(Errc::schema_violation, "unexpected element <" + child_key + "> in <registry>");
        }
        ServiceDescriptor svc;
        svc.id = detail::xml_attr(child, "id", "<service>");
        svc.name = detail::xml_attr(child, "name", "<service>");
        svc.url = detail::xml_attr(child, "url", "<service>");
        auto qos_el = child.get_child_optional("qos");
        if (!qos_el) {
          raise(Errc::schema_violation, "service '" + svc.id + "' lacks a <qos> element");
        }
        if (auto qos_attrs = qos_el->get_child_optional("<xmlattr>")) {
          for (const auto& [attr_name, attr_value] : *qos_attrs) {
            auto v = detail::parse_double(attr_value.data());
            if (!v) {
              raise(Errc::schema_violation, "service '" + svc.id + "' attribute '" + attr_name +
                                                "' is not a finite number");
            }
            if (!svc.qos.emplace(attr_name, *v).second) {
              raise(Errc::schema_violation, "service '" + svc.id + "' repeats attribute '" +
                                                attr_name + "'");
            }
          }
        }
        reg.services.push_back(std::move(svc));
      }
      std::string id = reg.id;
      if (!net.registries.emplace(id, std::move(reg)).second) {
        raise(Errc::schema_violation, "duplicate registry id '" + id + "'");
      }
      net.adjacency.emplace(id, std::set<std::string>{});
    } else if (key == "edge") {
      edges.emplace_back(detail::xml_attr(node, "a", "<edge>"),
                         detail::xml_attr(node, "b", "<edge>"));
    } else {
      raise(Errc::schema_violation, "unexpected element <" + key + "> in <network>");
    }
  }
  for (const auto& [a, b] : edges) {
    if (a == b) raise(Errc::schema_violation, "edge from '" + a + "' to itself");
    if (!net.registries.count(a) || !net.registries.count(b)) {
      raise(Errc::schema_violation, "edge references unknown registry '" +
                                        (net.registries.count(a) ? b : a) + "'");
    }
    net.adjacency[a].insert(b);
    net.adjacency[b].insert(a);
  }
  net.validate(t);
  return net;
}

/// Deterministic emission: attributes, registries and edges in sorted order,
/// doubles in shortest round-trip form. load_network(emit_network(net))
/// reproduces net exactly.
inline std::string emit_network(const PeerNetwork& net) {
  using detail::format_double;
  using detail::xml_escape;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<network attributes=\"";
  bool first = true;
  for (const auto& [name, dir] : net.attributes) {
    if (!first) out += ',';
    first = false;
    out += xml_escape(name);
    out += dir == QosDirection::higher_better ? ":higher" : ":lower";
  }
  out += "\">\n";
  for (const auto& [id, reg] : net.registries) {
    out += "  <registry id=\"" + xml_escape(id) + "\" domain=\"" + xml_escape(reg.domain) + "\">\n";
    for (const ServiceDescriptor& s : reg.services) {
      out += "    <service id=\"" + xml_escape(s.id) + "\" name=\"" + xml_escape(s.name) +
             "\" url=\"" + xml_escape(s.url) + "\">\n      <qos";
      for (const auto& [attr, value] : s.qos) {
        out += ' ' + xml_escape(attr) + "=\"" + format_double(value) + "\"";
      }
      out += "/>\n    </service>\n";
    }
    out += "  </registry>\n";
  }
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& [a, nbrs] : net.adjacency) {
    for (const std::string& b : nbrs) edges.insert({std::min(a, b), std::max(a, b)});
  }
  for (const auto& [a, b] : edges) {
    out += "  <edge a=\"" + xml_escape(a) + "\" b=\"" + xml_escape(b) + "\"/>\n";
  }
  out += "</network>\n";
  return out;
}

/// Returns a registry's description and charges exactly one probe for it.
inline const Registry& probe_registry(const PeerNetwork& net, const std::string& rid) {
  auto it = net.registries.find(rid);
  if (it == net.registries.end()) raise(Errc::unknown_registry, "no registry '" + rid + "'");
  net.count_probe();
  return it->second;
}

/// Peer neighbors of a registry; never contains the registry itself.
inline const std::set<std::string>& neighbors_of(const PeerNetwork& net, const std::string& rid) {
  if (!net.registries.count(rid)) raise(Errc::unknown_registry, "no registry '" + rid + "'");
  static const std::set<std::string> kEmpty;
  auto it = net.adjacency.find(rid);
  return it == net.adjacency.end() ? kEmpty : it->second;
}

/// Finds the registry holding a service id.
inline const Registry* locate_service(const PeerNetwork& net, const std::string& service_id) {
  for (const auto& [id, reg] : net.registries) {
    for (const ServiceDescriptor& s : reg.services) {
      if (s.id == service_id) return &reg;
    }
  }
  return nullptr;
}

inline constexpr double kDefaultClassifyThreshold = 0.5;

/// Files a new service into the community whose domain is semantically
/// closest to svc_domain (ties toward the smallest registry id); below the
/// threshold a fresh registry is opened for the service's own domain.
/// Returns the id of the registry that now holds the service.
inline std::string classify_service(PeerNetwork& net, const Taxonomy& t, ServiceDescriptor svc,
                                    const ConceptId& svc_domain,
                                    double threshold = kDefaultClassifyThreshold) {
  ConceptId domain = normalize_concept(svc_domain);
  if (!t.contains(domain)) raise(Errc::unknown_concept, "no concept '" + domain + "' in taxonomy");
  if (locate_service(net, svc.id)) {
    raise(Errc::duplicate_service_id, "service id '" + svc.id + "' already present");
  }
  if (svc.qos.size() != net.attributes.size() ||
      !std::equal(svc.qos.begin(), svc.qos.end(), net.attributes.begin(),
                  [](const auto& q, const auto& a) { return q.first == a.first; })) {
    raise(Errc::missing_attribute, "service '" + svc.id + "' does not carry the declared attributes");
  }

  const Registry* best = nullptr;
  double best_sim = -1.0;
  for (const auto& [id, reg] : net.registries) {
    double sim = t.wu_palmer_similarity(domain, reg.domain);
    if (sim > best_sim) {
      best_sim = sim;
      best = &reg;
    }
  }
  if (best && best_sim >= threshold) {
    net.registries[best->id].services.push_back(std::move(svc));
    return best->id;
  }
  std::string rid = domain;
  for (int suffix = 2; net.registries.count(rid); ++suffix) {
    rid = domain + "-" + std::to_string(suffix);
  }
  net.registries.emplace(rid, Registry{rid, domain, {std::move(svc)}});
  net.adjacency.emplace(rid, std::set<std::string>{});
  return rid;
}

struct GeneratorParams {
  int registry_count = 10;
  int services_min = 3;
  int services_max = 8;
  QosDirections attributes{{"availability", QosDirection::higher_better},
                           {"response_time_ms", QosDirection::lower_better}};
  // taxonomy-proximity adjacency: each registry is wired to its k most
  // semantically similar peers, then the edge set is symmetrized.
  int neighbors_k = 2;
  bool unique_domains = true;

  void validate(const Taxonomy& t) const {
    if (registry_count < 1) raise(Errc::invalid_generator_params, "registry_count must be >= 1");
    if (services_min < 1 || services_min > services_max) {
      raise(Errc::invalid_generator_params, "need 1 <= services_min <= services_max");
    }
    if (attributes.empty()) raise(Errc::invalid_generator_params, "attribute set must be non-empty");
    if (neighbors_k < 0) raise(Errc::invalid_generator_params, "neighbors_k must be >= 0");
    if (unique_domains && t.leaves().size() < static_cast<std::size_t>(registry_count)) {
      raise(Errc::invalid_generator_params,
            "taxonomy has fewer leaf concepts than requested registries");
    }
    long long max_services = static_cast<long long>(registry_count) * services_max;
    if (max_services > 99999) {
      raise(Errc::invalid_generator_params, "would exceed the service id space (99999)");
    }
  }
};

/// Synthesizes a network whose registry domains are taxonomy leaves, with
/// taxonomy-proximity(k) adjacency. Deterministic per seed.
inline PeerNetwork generate_network(const GeneratorParams& gen, const Taxonomy& t,
                                    std::uint64_t seed) {
  gen.validate(t);
  std::mt19937_64 rng(seed);

  std::vector<ConceptId> domains;
  std::vector<ConceptId> leaves = t.leaves();
  if (gen.unique_domains) {
    domains = detail::pick_k(std::move(leaves), static_cast<std::size_t>(gen.registry_count), rng);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
    for (int i = 0; i < gen.registry_count; ++i) domains.push_back(leaves[pick(rng)]);
  }

  int id_width = 1;
  for (int v = gen.registry_count; v >= 10; v /= 10) ++id_width;

  PeerNetwork net;
  net.attributes = gen.attributes;
  std::uniform_int_distribution<int> service_count(gen.services_min, gen.services_max);
  int service_serial = 0;
  for (int i = 0; i < gen.registry_count; ++i) {
    Registry reg{detail::padded_id('r', i + 1, id_width), domains[static_cast<std::size_t>(i)], {}};
    int count = service_count(rng);
    for (int s = 0; s < count; ++s) {
      ServiceDescriptor svc;
      svc.id = detail::padded_id('s', ++service_serial, 5);
      svc.name = reg.domain + "-" + std::to_string(s + 1);
      svc.url = "http://services.test/" + reg.id + "/" + svc.id;
      for (const auto& [attr, dir] : gen.attributes) {
        svc.qos[attr] = dir == QosDirection::higher_better
                            ? std::uniform_real_distribution<double>(0.5, 1.0)(rng)
                            : std::uniform_real_distribution<double>(10.0, 1000.0)(rng);
      }
      reg.services.push_back(std::move(svc));
    }
    net.adjacency.emplace(reg.id, std::set<std::string>{});
    net.registries.emplace(reg.id, std::move(reg));
  }

  for (const auto& [id, reg] : net.registries) {
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [other_id, other] : net.registries) {
      if (other_id == id) continue;
      ranked.emplace_back(-t.wu_palmer_similarity(reg.domain, other.domain), other_id);
    }
    std::sort(ranked.begin(), ranked.end());
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(gen.neighbors_k), ranked.size());
    for (std::size_t j = 0; j < k; ++j) {
      net.adjacency[id].insert(ranked[j].second);
      net.adjacency[ranked[j].second].insert(id);
    }
  }

  net.validate(t);
  return net;
}

}  // namespace beehive
