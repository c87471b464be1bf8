#pragma once

#include <map>
#include <string>

namespace beehive {

/// Whether a larger raw value of an attribute is better (availability,
/// throughput) or worse (response time, cost).
enum class QosDirection { higher_better, lower_better };

/// Raw attribute values keyed by attribute name, e.g. {"availability": 0.97}.
using QosAttributes = std::map<std::string, double>;

/// Attribute name -> direction, as declared once per network.
using QosDirections = std::map<std::string, QosDirection>;

struct ServiceDescriptor {
  std::string id;
  std::string name;
  std::string url;
  QosAttributes qos;

  bool operator==(const ServiceDescriptor&) const = default;
};

}  // namespace beehive
