#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace assertain {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- knowledge base ---

struct KnowledgeBaseError : Error {
  using Error::Error;
};

struct NoSuchCategoryError : Error {
  std::string nearest;
  NoSuchCategoryError(const std::string& what, std::string nearest_)
      : Error(what), nearest(std::move(nearest_)) {}
};

struct NoSuchThreatError : Error {
  std::string nearest;
  NoSuchThreatError(const std::string& what, std::string nearest_)
      : Error(what), nearest(std::move(nearest_)) {}
};

// --- design loading ---

struct DesignLoadError : Error {
  enum class Kind { MissingFile, DecodeFailure, EmptyDesign, NoModules };
  Kind kind;
  DesignLoadError(Kind k, const std::string& what) : Error(what), kind(k) {}
};

// --- alignment ---

struct ClassificationUnresolvableError : Error {
  std::string raw_reply;
  ClassificationUnresolvableError(const std::string& what, std::string reply)
      : Error(what), raw_reply(std::move(reply)) {}
};

// --- gateway ---

struct GatewayError : Error {
  using Error::Error;
};

struct MissingCredentialsError : GatewayError {
  using GatewayError::GatewayError;
};

struct FixtureMissingError : GatewayError {
  using GatewayError::GatewayError;
};

struct TransportExhaustedError : GatewayError {
  using GatewayError::GatewayError;
};

// --- pipeline ---

struct StageError : Error {
  using Error::Error;
};

struct WorkspaceError : Error {
  using Error::Error;
};

}  // namespace assertain
