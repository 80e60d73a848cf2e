#pragma once

#include <stdexcept>
#include <string>

namespace pramsey {

/// Error taxonomy shared by all modules. The kind is what callers (and the
/// CLI exit-code mapping) dispatch on; the message is for humans.
enum class ErrorKind {
  InvalidInput,          // malformed or precondition-violating input
  SizeLimit,             // request exceeds an explicit combinatorial budget
  NotEmbeddable,         // distance matrix not of negative type within tolerance
  DegenerateConfig,      // no circumcenter / singular geometry
  NotASimplex,           // strict negative type required but absent
  SearchFailure,         // budgeted search exhausted without a witness
  PipelineVerification,  // a pipeline stage identity failed post-hoc
  CertificateInvalid,    // density-certificate trial or margin validation failed
  Internal,              // "should be impossible" invariant broke
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::SizeLimit: return "size-limit";
    case ErrorKind::NotEmbeddable: return "not-embeddable";
    case ErrorKind::DegenerateConfig: return "degenerate-config";
    case ErrorKind::NotASimplex: return "not-a-simplex";
    case ErrorKind::SearchFailure: return "search-failure";
    case ErrorKind::PipelineVerification: return "pipeline-verification";
    case ErrorKind::CertificateInvalid: return "certificate-invalid";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace pramsey
