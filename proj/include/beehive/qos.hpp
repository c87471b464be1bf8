#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "beehive/errors.hpp"
#include "beehive/service.hpp"

namespace beehive {

/// Attribute name -> weight in [0, 1]; weights must cover exactly the
/// declared attribute set and sum to 1 within 1e-9.
using QosWeights = std::map<std::string, double>;

inline void validate_weights(const QosWeights& weights, const QosDirections& directions) {
  if (weights.size() != directions.size() ||
      !std::equal(weights.begin(), weights.end(), directions.begin(),
                  [](const auto& w, const auto& d) { return w.first == d.first; })) {
    raise(Errc::attribute_set_mismatch, "weights do not cover exactly the declared attributes");
  }
  double sum = 0.0;
  for (const auto& [name, w] : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      raise(Errc::invalid_params, "weight for '" + name + "' outside [0, 1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) raise(Errc::invalid_params, "weights must sum to 1");
}

/// Min-max normalization over the given service list. Higher-is-better maps
/// min -> 0 and max -> 1, lower-is-better the reverse; an attribute that is
/// constant across the list normalizes to 1.0 for every service.
inline std::vector<QosAttributes> normalize_attributes(const std::vector<ServiceDescriptor>& services,
                                                       const QosDirections& directions) {
  if (services.empty()) raise(Errc::empty_service_list, "no services to normalize");
  for (const ServiceDescriptor& s : services) {
    if (s.qos.size() != directions.size()) {
      raise(Errc::missing_attribute, "service '" + s.id + "' does not carry the declared attribute set");
    }
    for (const auto& [name, dir] : directions) {
      (void)dir;
      if (!s.qos.count(name)) {
        raise(Errc::missing_attribute, "service '" + s.id + "' lacks attribute '" + name + "'");
      }
    }
  }

  std::vector<QosAttributes> normalized(services.size());
  for (const auto& [name, dir] : directions) {
    double lo = services.front().qos.at(name);
    double hi = lo;
    for (const ServiceDescriptor& s : services) {
      lo = std::min(lo, s.qos.at(name));
      hi = std::max(hi, s.qos.at(name));
    }
    for (std::size_t i = 0; i < services.size(); ++i) {
      double v = services[i].qos.at(name);
      double norm;
      if (hi == lo) {
        norm = 1.0;
      } else if (dir == QosDirection::higher_better) {
        norm = (v - lo) / (hi - lo);
      } else {
        norm = (hi - v) / (hi - lo);
      }
      normalized[i][name] = norm;
    }
  }
  return normalized;
}

/// Weighted sum of normalized attribute values; always in [0, 1].
inline double qos_score(const QosAttributes& normalized, const QosWeights& weights) {
  if (normalized.size() != weights.size() ||
      !std::equal(normalized.begin(), normalized.end(), weights.begin(),
                  [](const auto& n, const auto& w) { return n.first == w.first; })) {
    raise(Errc::attribute_set_mismatch, "normalized values and weights use different attribute sets");
  }
  double score = 0.0;
  for (const auto& [name, w] : weights) score += w * normalized.at(name);
  return std::clamp(score, 0.0, 1.0);
}

/// Scores every service after normalizing over the whole list.
inline std::vector<double> qos_scores(const std::vector<ServiceDescriptor>& services,
                                      const QosDirections& directions, const QosWeights& weights) {
  validate_weights(weights, directions);
  std::vector<QosAttributes> normalized = normalize_attributes(services, directions);
  std::vector<double> scores(services.size());
  for (std::size_t i = 0; i < services.size(); ++i) scores[i] = qos_score(normalized[i], weights);
  return scores;
}

/// Index of the service whose score lies nearest to the requested level.
/// Ties prefer the higher score, then the lexicographically smallest id.
inline std::size_t nearest_qos_index(const std::vector<ServiceDescriptor>& services,
                                     const QosDirections& directions, const QosWeights& weights,
                                     double requested_level) {
  if (!(requested_level >= 0.0 && requested_level <= 1.0)) {
    raise(Errc::invalid_params, "requested level must be in [0, 1]");
  }
  std::vector<double> scores = qos_scores(services, directions, weights);
  std::size_t best = 0;
  for (std::size_t i = 1; i < services.size(); ++i) {
    double di = std::abs(scores[i] - requested_level);
    double db = std::abs(scores[best] - requested_level);
    if (di < db) {
      best = i;
    } else if (di == db) {
      if (scores[i] > scores[best] ||
          (scores[i] == scores[best] && services[i].id < services[best].id)) {
        best = i;
      }
    }
  }
  return best;
}

inline ServiceDescriptor nearest_qos_service(const std::vector<ServiceDescriptor>& services,
                                             const QosDirections& directions, const QosWeights& weights,
                                             double requested_level) {
  return services[nearest_qos_index(services, directions, weights, requested_level)];
}

}  // namespace beehive
