#include "json_io.hpp"

#include <sstream>

namespace filterlab::cli {

namespace {

void flatten(const Json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [key, value] : j.items()) flatten(value, path.empty() ? key : path + "." + key, out);
  } else if (j.is_array() && !j.empty() && !j.front().is_primitive()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out << "  " << path << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

}  // namespace

Json to_json(const Report& report) {
  return {{"command", report.command},
          {"inputs_digest", report.inputs_digest},
          {"results", report.results},
          {"certified", report.certified},
          {"diagnostics", report.diagnostics},
          {"exit_code", report.exit_code}};
}

std::string emit(const Report& report, Format format) {
  if (format == Format::json) return canonical(to_json(report)) + "\n";
  std::ostringstream out;
  out << "command: " << report.command << "\n";
  out << "certified: " << (report.certified ? "yes" : "no") << "\n";
  out << "exit code: " << report.exit_code << "\n";
  out << "inputs digest: " << report.inputs_digest << "\n";
  if (!report.diagnostics.empty()) {
    out << "diagnostics:\n";
    for (const auto& d : report.diagnostics) out << "  - " << d << "\n";
  }
  out << "results:\n";
  flatten(report.results, "", out);
  return out.str();
}

Report failure_report(const std::string& command, std::string_view document, const std::string& message,
                      int exit_code) {
  Report r;
  r.command = command;
  r.inputs_digest = sha256_hex(document);
  r.certified = false;
  r.diagnostics.push_back(message);
  r.exit_code = exit_code;
  return r;
}

}  // namespace filterlab::cli
