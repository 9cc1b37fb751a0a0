#pragma once

#include <stdexcept>
#include <string>

namespace medex {

/// Base for every harness error. `kind()` is a stable identifier suitable
/// for manifests and test assertions; `what()` carries the human detail
/// (including the offending key path for config errors).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define MEDEX_DEFINE_ERROR(NAME)                                        \
  class NAME : public Error {                                           \
   public:                                                              \
    explicit NAME(const std::string& message) : Error(#NAME, message) {} \
  }

MEDEX_DEFINE_ERROR(ParseError);
MEDEX_DEFINE_ERROR(SchemaError);
MEDEX_DEFINE_ERROR(CycleError);
MEDEX_DEFINE_ERROR(InsufficientExamples);
MEDEX_DEFINE_ERROR(MissingPromptSection);
MEDEX_DEFINE_ERROR(NoJsonFound);
MEDEX_DEFINE_ERROR(MalformedJson);
MEDEX_DEFINE_ERROR(EmptyInput);
MEDEX_DEFINE_ERROR(EmbeddingUnavailable);
MEDEX_DEFINE_ERROR(CandidateMismatch);
MEDEX_DEFINE_ERROR(NoVoters);
MEDEX_DEFINE_ERROR(IncompleteTable);
MEDEX_DEFINE_ERROR(EmptyClass);
MEDEX_DEFINE_ERROR(DegenerateDesign);
MEDEX_DEFINE_ERROR(FewerThanTwoRaters);
MEDEX_DEFINE_ERROR(Timeout);
MEDEX_DEFINE_ERROR(ExhaustedRetries);
MEDEX_DEFINE_ERROR(BindError);
MEDEX_DEFINE_ERROR(MissingAnnotation);

#undef MEDEX_DEFINE_ERROR

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& message)
      : Error("HttpError", "status " + std::to_string(status) + ": " + message),
        status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace medex
