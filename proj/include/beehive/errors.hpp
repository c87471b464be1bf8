#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace beehive {

/// Every failure the library reports, as a stable machine-checkable code.
enum class Errc {
  // taxonomy
  duplicate_concept,
  cycle_detected,
  multiple_roots,
  orphan_concept,
  empty_document,
  unknown_concept,
  // optimizer
  invalid_params,
  empty_space,
  out_of_domain,
  // registry network
  schema_violation,
  unknown_domain_concept,
  duplicate_service_id,
  asymmetric_adjacency,
  unknown_registry,
  invalid_generator_params,
  // discovery
  empty_network,
  no_services_in_best_registry,
  // qos
  missing_attribute,
  attribute_set_mismatch,
  empty_service_list,
  // substitution
  self_substitution,
  unknown_failed_service,
  no_substitute_available,
  // tooling
  io_failure,
  bad_scenario,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::duplicate_concept: return "duplicate_concept";
    case Errc::cycle_detected: return "cycle_detected";
    case Errc::multiple_roots: return "multiple_roots";
    case Errc::orphan_concept: return "orphan_concept";
    case Errc::empty_document: return "empty_document";
    case Errc::unknown_concept: return "unknown_concept";
    case Errc::invalid_params: return "invalid_params";
    case Errc::empty_space: return "empty_space";
    case Errc::out_of_domain: return "out_of_domain";
    case Errc::schema_violation: return "schema_violation";
    case Errc::unknown_domain_concept: return "unknown_domain_concept";
    case Errc::duplicate_service_id: return "duplicate_service_id";
    case Errc::asymmetric_adjacency: return "asymmetric_adjacency";
    case Errc::unknown_registry: return "unknown_registry";
    case Errc::invalid_generator_params: return "invalid_generator_params";
    case Errc::empty_network: return "empty_network";
    case Errc::no_services_in_best_registry: return "no_services_in_best_registry";
    case Errc::missing_attribute: return "missing_attribute";
    case Errc::attribute_set_mismatch: return "attribute_set_mismatch";
    case Errc::empty_service_list: return "empty_service_list";
    case Errc::self_substitution: return "self_substitution";
    case Errc::unknown_failed_service: return "unknown_failed_service";
    case Errc::no_substitute_available: return "no_substitute_available";
    case Errc::io_failure: return "io_failure";
    case Errc::bad_scenario: return "bad_scenario";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace beehive
