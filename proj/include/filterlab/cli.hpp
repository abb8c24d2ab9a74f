#pragma once

#include "filterlab/errors.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filterlab::cli {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNotCertified = 3, kExitInternal = 4 };

// Schema violation located by a JSON pointer.
class SpecError : public ValidationError {
public:
  SpecError(std::string pointer, const std::string& message)
      : ValidationError((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

private:
  std::string pointer_;
};

struct ProblemSpec {
  std::string version;
  std::string command;
  Json payload;
  Json document;  // the whole validated spec
};

struct Options {
  std::optional<std::size_t> cap;
  std::optional<std::uint64_t> seed;
};

struct Report {
  std::string command;
  std::string inputs_digest;
  Json results = Json::object();
  bool certified = false;
  std::vector<std::string> diagnostics;
  int exit_code = kExitOk;
};

const std::vector<std::string>& commands();

// Parses and checks the envelope; payload fields are checked by execute().
ProblemSpec parse_spec(std::string_view document);

// Hex SHA-256 of the canonical serialization of the spec and options.
std::string inputs_digest(const ProblemSpec& spec, const Options& options);

// Never throws for module errors: they become diagnostics and an exit code.
Report execute(const ProblemSpec& spec, const Options& options = {});

// Report for a document that failed to parse.
Report failure_report(const std::string& command, std::string_view document, const std::string& message,
                      int exit_code);

enum class Format { json, text };
std::string emit(const Report& report, Format format);
Json to_json(const Report& report);

// Sorted keys, no insignificant whitespace.
std::string canonical(const Json& j);

}  // namespace filterlab::cli
