#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tsis {

// Base for every error raised by the library. Callers that only need to
// distinguish "bad input data" from programming errors can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedSignature : public Error {
 public:
  explicit MalformedSignature(const std::string& text, const std::string& why)
      : Error("malformed type signature '" + text + "': " + why) {}
};

class CatalogParseError : public Error {
 public:
  using Error::Error;
};

class DuplicateInstruction : public Error {
 public:
  explicit DuplicateInstruction(const std::string& id)
      : Error("duplicate instruction id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class EmptyOutputTypes : public Error {
 public:
  explicit EmptyOutputTypes(const std::string& id)
      : Error("instruction '" + id + "' declares no output types"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class UnknownInstruction : public Error {
 public:
  explicit UnknownInstruction(const std::string& id, std::size_t line = 0)
      : Error(line == 0 ? "unknown instruction '" + id + "'"
                        : "unknown instruction '" + id + "' on line " + std::to_string(line)),
        id_(id),
        line_(line) {}
  const std::string& id() const { return id_; }
  // 1-based corpus line, 0 when not loading a file.
  std::size_t line() const { return line_; }

 private:
  std::string id_;
  std::size_t line_;
};

class CorpusParseError : public Error {
 public:
  CorpusParseError(std::size_t line, const std::string& why)
      : Error("corpus line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class OversizedPUIS : public Error {
 public:
  OversizedPUIS(std::size_t size, std::size_t cap)
      : Error("instruction subset of size " + std::to_string(size) + " exceeds cap " +
              std::to_string(cap)) {}
};

class NoCoveringSubset : public Error {
 public:
  explicit NoCoveringSubset(std::string what) : Error(std::move(what)) {}
};

class ProvenanceMismatch : public Error {
 public:
  using Error::Error;
};

class InconsistentArity : public Error {
 public:
  using Error::Error;
};

class InconsistentInputTypes : public Error {
 public:
  using Error::Error;
};

class EvaluationFault : public Error {
 public:
  using Error::Error;
};

class AtlasParseError : public Error {
 public:
  using Error::Error;
};

class CaseFileError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsis
