#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cnma {

/// SHA-256 digest as lowercase hex.
std::string sha256_hex(std::string_view data);

/// Digest of a file's bytes; throws InputError when the file cannot be read.
std::string sha256_file(const std::string& path);

/// Everything needed to rerun a command and get bit-identical outputs: the
/// subcommand, its fully resolved configuration (flags and config-file
/// contents merged), digests of every input file, the seed, and the tool
/// version. The timestamp documents when the run happened; it is the one
/// field that varies between identical runs, which is why manifests live
/// next to outputs rather than inside them.
struct RunManifest {
  std::string command;
  nlohmann::json resolved_config;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // ISO-8601 UTC
};

/// The current time formatted as 2026-01-02T15:04:05Z.
std::string utc_timestamp();

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& doc);

}  // namespace cnma
