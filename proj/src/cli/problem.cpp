#include "json_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>

namespace filterlab::cli {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"measure", "conjugate", "pushforward", "decompose", "antichain",
                                              "rapid",   "baire",     "halves",      "successor", "certificate"};
  return names;
}

std::string canonical(const Json& j) { return j.dump(); }

ProblemSpec parse_spec(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const Json::parse_error& e) {
    throw SpecError("", std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.allow({"version", "command", "payload"});
  ProblemSpec spec;
  spec.version = root.at("version").text();
  if (spec.version != kSchemaVersion)
    root.at("version").fail("unsupported version \"" + spec.version + "\" (expected \"" + kSchemaVersion + "\")");
  spec.command = root.at("command").text();
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), spec.command) == names.end())
    root.at("command").fail("unknown command \"" + spec.command + "\"");
  const auto payload = root.at("payload");
  if (!payload.json().is_object()) payload.fail("expected an object");
  spec.payload = payload.json();
  spec.document = std::move(doc);
  return spec;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("digest computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return "sha256:" + hex;
}

std::string inputs_digest(const ProblemSpec& spec, const Options& options) {
  Json hashed = {{"spec", spec.document}};
  if (options.cap) hashed["cap"] = *options.cap;
  if (options.seed) hashed["seed"] = *options.seed;
  return sha256_hex(canonical(hashed));
}

}  // namespace filterlab::cli
