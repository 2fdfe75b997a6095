#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>
#include <openssl/evp.h>

#include "treeshift/numerics.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/tree_io.hpp"

namespace treeshift::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::json;

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

/// Hash of the normalized tree, so formatting and key order of the file do
/// not matter.
inline std::string tree_hash(const Tree& t) { return sha256_hex(tree_to_json(t).dump()); }

inline Json rational_json(const Rational& r) { return to_string(r); }

inline Json profile_json(const DepthProfile& p) {
  Json out = Json::object();
  for (const auto& [n, e] : p.entries) out[std::to_string(n)] = e;
  return out;
}

inline Json base_report(const std::string& command) {
  return {{"schema", kSchemaVersion}, {"tool", "treeshift"}, {"version", kToolVersion}, {"command", command}};
}

inline std::string render(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace treeshift::cli
