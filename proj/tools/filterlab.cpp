#include "filterlab/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace filterlab::cli;

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return std::cout ? 0 : 1;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  return out ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite-window computations for product measures, small sets and filters."};
  app.name("filterlab");
  std::string command;
  std::string spec_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::size_t> cap;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(commands()));
  app.add_option("--spec", spec_path, "Problem specification (JSON)")->required();
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--cap", cap, "Enumeration cap (at most 30)");
  app.add_option("--seed", seed, "Override the Monte Carlo seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const Format fmt = format == "text" ? Format::text : Format::json;
  std::string document;
  {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) {
      std::cerr << "filterlab: cannot read " << spec_path << "\n";
      return kExitValidation;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    document = buf.str();
  }

  Report report;
  try {
    const auto spec = parse_spec(document);
    if (spec.command != command)
      report = failure_report(command, document,
                              "/command: spec is for \"" + spec.command + "\", not \"" + command + "\"",
                              kExitValidation);
    else
      report = execute(spec, Options{cap, seed});
  } catch (const filterlab::Error& e) {
    report = failure_report(command, document, e.what(), kExitValidation);
  } catch (const std::exception& e) {
    report = failure_report(command, document, std::string("internal error: ") + e.what(), kExitInternal);
  }

  if (write_output(emit(report, fmt), out_path) != 0) {
    std::cerr << "filterlab: cannot write report\n";
    return kExitInternal;
  }
  if (!report.diagnostics.empty() && report.exit_code != kExitOk)
    for (const auto& d : report.diagnostics) std::cerr << "filterlab: " << d << "\n";
  return report.exit_code;
}
