#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "filterlab/cli.hpp"
#include "filterlab/errors.hpp"
#include "filterlab/rational.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace filterlab;
using namespace filterlab::cli;

namespace {

std::string spec(const std::string& command, const std::string& payload) {
  return R"({"version":"1","command":")" + command + R"(","payload":)" + payload + "}";
}

Report run(const std::string& document, Options options = {}) { return execute(parse_spec(document), options); }

struct Process {
  std::string out;
  int status = -1;
};

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "filterlab_test_cli";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

Process invoke(const std::string& args) {
  Process p;
  const std::string cmd = std::string(FILTERLAB_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) p.out.append(buf, n);
  const int raw = pclose(pipe);
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

const std::string kMeasure =
    spec("measure", R"({"bias":"uniform","family":{"domain":[0,1],"traces":["11","10"]}})");

}  // namespace

TEST_CASE("parse_spec accepts a measure spec") {
  const auto s = parse_spec(kMeasure);
  CHECK(s.command == "measure");
  CHECK(s.version == "1");
  CHECK(s.payload.is_object());
}

TEST_CASE("parse_spec errors carry a JSON pointer") {
  try {
    parse_spec(spec("frobnicate", "{}"));
    FAIL("expected an error");
  } catch (const SpecError& e) {
    CHECK(e.pointer() == "/command");
  }
  try {
    parse_spec(R"({"version":"1","command":"measure","payload":{},"extra":1})");
    FAIL("expected an error");
  } catch (const SpecError& e) {
    CHECK(e.pointer() == "/extra");
  }
  CHECK_THROWS_AS(parse_spec(R"({"version":"2","command":"measure","payload":{}})"), SpecError);
  CHECK_THROWS_AS(parse_spec("{not json"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"version":"1","command":"measure","payload":[]})"), SpecError);
}

TEST_CASE("execute: measure example and validation errors") {
  const auto r = run(kMeasure);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.certified);
  CHECK(r.results.at("measure") == "1/2");
  CHECK(r.inputs_digest.rfind("sha256:", 0) == 0);
  CHECK(r.inputs_digest.size() == 7 + 64);

  const auto zero = run(spec("measure", R"({"bias":{"prefix":["3/0"]},"trace":{"window":1,"ones":[0]}})"));
  CHECK(zero.exit_code == kExitValidation);
  REQUIRE(zero.diagnostics.size() == 1);
  CHECK(zero.diagnostics[0].find("denominator zero") != std::string::npos);
  CHECK(zero.diagnostics[0].find("/payload/bias/prefix/0") != std::string::npos);

  const auto unknown = run(spec("measure", R"({"bias":"uniform","trace":{"window":1,"ones":[]},"bogus":1})"));
  CHECK(unknown.exit_code == kExitValidation);
  CHECK(unknown.diagnostics[0].find("/payload/bogus") != std::string::npos);

  const auto cap = run(kMeasure, Options{31, std::nullopt});
  CHECK(cap.exit_code == kExitValidation);
}

TEST_CASE("execute: exit codes") {
  const auto exhausted = run(spec("decompose", R"({"bias":"uniform","window":3,
      "epsilon":{"first":"1/2","ratio":"1/4","count":6},
      "prefix_cover":{"levels":[{"level":1,"traces":["1"]},{"level":2,"traces":["01"]}],"tail_bound":"1/4"}})"));
  CHECK(exhausted.exit_code == kExitNotCertified);
  CHECK_FALSE(exhausted.certified);

  const auto cert = run(spec("certificate", R"({"bias":{"prefix":[],"tail":{"kind":"power_law","scale":"1","exponent":"1"}},"exponent":2,"start":10})"));
  CHECK(cert.exit_code == kExitOk);
  CHECK(cert.results.at("tail_bound") == "1/10");
  CHECK(cert.results.at("verdict") == "converges");

  const auto diverges = run(spec("certificate", R"({"bias":{"prefix":[],"tail":{"kind":"power_law","scale":"1","exponent":"1"}},"exponent":1,"start":0})"));
  CHECK(diverges.results.at("verdict") == "diverges");
  CHECK(diverges.exit_code == kExitOk);

  const auto unknown = run(spec("certificate", R"({"bias":{"prefix":["1/3"]},"exponent":1,"start":1})"));
  CHECK(unknown.exit_code == kExitNotCertified);
}

TEST_CASE("execute: other commands") {
  const auto conj = run(spec("conjugate", R"({"bias":{"prefix":["1/4"]},"map":"max"})"));
  CHECK(conj.exit_code == kExitOk);
  CHECK(conj.results.at("conjugate").at("prefix").at(0) == "1/3");

  const auto push = run(spec("pushforward", R"({"bias":{"prefix":["1/4","1/3"]},"map":"max","domain":[0,1]})"));
  CHECK(push.results.at("all_hold") == true);
  CHECK(push.results.at("checks").size() == 4);

  const auto anti = run(spec("antichain", R"({"kernel":{"domain":[0,1,2],"traces":["110","111","011"]}})"));
  CHECK(anti.results.at("antichain") == Json::parse("[[0,1],[1,2]]"));

  const auto baire = run(spec("baire", R"({"filter":{"window":10,"canonical":{"kind":"frechet","k_max":3}}})"));
  CHECK(baire.certified);
  CHECK(baire.results.at("search").at("found") == true);

  const auto fail = run(spec("baire", R"({"filter":{"window":6,"margin":0,"generators":[[0,2,4],[1,3,5]]}})"));
  CHECK_FALSE(fail.certified);
  CHECK(fail.exit_code == kExitNotCertified);

  const auto halves = run(spec("halves", R"({"grid":{"cells":[{"k":2,"l":0,"coords":[0,1,2,3]}]},"constraints":[[0,1]]})"));
  CHECK(halves.results.at("selection").at("halves").at(0).at("half") == Json::parse("[0,2]"));
  CHECK(halves.results.at("selection").at("union_bound") == "3/4");
}

TEST_CASE("reports are canonical JSON with rationals as strings") {
  const auto r = run(kMeasure);
  const auto text = emit(r, Format::json);
  CHECK(text.back() == '\n');
  const auto j = Json::parse(text);
  CHECK(canonical(j) + "\n" == text);
  CHECK(Rational::parse(j.at("results").at("measure").get<std::string>()) == Rational(1, 2));
  CHECK(text.find("{\"certified\":true,\"command\":\"measure\"") == 0);

  const auto summary = emit(r, Format::text);
  CHECK(summary.find("measure = 1/2") != std::string::npos);
}

TEST_CASE("text summary of a baire report lists misses per probe") {
  const auto r = run(spec("baire", R"({"filter":{"window":6,"generators":[[0,2,4]]},"partition":[0,1,2,3,4,5,6]})"));
  const auto summary = emit(r, Format::text);
  CHECK(summary.find("check.probes[0].label = g0") != std::string::npos);
  CHECK(summary.find("check.probes[0].misses = [1,3,5]") != std::string::npos);
}

TEST_CASE("digest depends on the spec and the override flags") {
  const auto a = run(kMeasure);
  const auto b = run(kMeasure);
  CHECK(a.inputs_digest == b.inputs_digest);
  CHECK(run(kMeasure, Options{25, std::nullopt}).inputs_digest != a.inputs_digest);
  // Whitespace in the document does not matter.
  const auto spaced = run(spec("measure", R"({ "bias" : "uniform", "family" : {"domain":[0,1],"traces":["11","10"]} })"));
  CHECK(spaced.inputs_digest == a.inputs_digest);
}

TEST_CASE("binary: output, exit codes and determinism") {
  const auto good = write_temp("measure.json", kMeasure);
  const auto p = invoke("measure --spec " + good.string());
  CHECK(p.status == 0);
  CHECK(p.out == emit(run(kMeasure), Format::json));

  const auto mismatch = invoke("decompose --spec " + good.string());
  CHECK(mismatch.status == 2);

  CHECK(invoke("measure --spec /nonexistent/spec.json").status == 2);
  CHECK(invoke("nosuchcommand --spec " + good.string()).status == 2);
  CHECK(invoke("measure --spec " + good.string() + " --cap 40").status == 2);

  const auto mc = write_temp("halves.json", spec("halves", R"({"grid":{"k_max":2,"l_max":2},"constraints":[[0,2],[4,5,8]],
      "strategy":{"monte_carlo":{"seed":7,"trials":1000}}})"));
  const auto first = invoke("halves --spec " + mc.string());
  CHECK(first.status == 0);
  for (int i = 0; i < 3; ++i) CHECK(invoke("halves --spec " + mc.string()).out == first.out);
  const auto reseeded = invoke("halves --spec " + mc.string() + " --seed 9");
  CHECK(reseeded.out != first.out);
  CHECK(Json::parse(reseeded.out).at("results").at("selection").at("seed") == 9);

  const auto out = std::filesystem::temp_directory_path() / "filterlab_test_cli" / "report.txt";
  CHECK(invoke("measure --format text --out " + out.string() + " --spec " + good.string()).status == 0);
  std::ifstream in(out);
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line == "command: measure");
}
