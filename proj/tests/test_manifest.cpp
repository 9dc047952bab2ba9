#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <string>

#include "cnma/errors.hpp"
#include "cnma/manifest.hpp"
#include "doctest.h"

using namespace cnma;

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
        "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 distinguishes messages around the block padding edge") {
  // 55/56/63/64/65 bytes straddle the padding edge cases of the 64-byte block.
  std::set<std::string> digests;
  for (std::size_t len : {55u, 56u, 63u, 64u, 65u, 127u, 128u}) {
    const std::string digest = sha256_hex(std::string(len, 'x'));
    CHECK(digest.size() == 64);
    CHECK(digest == sha256_hex(std::string(len, 'x')));
    digests.insert(digest);
  }
  CHECK(digests.size() == 7);
}

TEST_CASE("file hashing agrees with in-memory hashing") {
  std::string payload;
  for (int i = 0; i < 200000; ++i) payload.push_back(static_cast<char>('a' + i % 17));
  const std::string path = "manifest_hash_probe.tmp";
  {
    std::ofstream out(path, std::ios::binary);
    out << payload;
  }
  CHECK(sha256_file(path) == sha256_hex(payload));
  std::remove(path.c_str());
  CHECK_THROWS_AS(sha256_file(path), InputError);
}

TEST_CASE("timestamps are ISO-8601 UTC") {
  const std::string ts = utc_timestamp();
  CHECK(std::regex_match(ts, std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));
}

TEST_CASE("manifests round-trip through JSON") {
  RunManifest m;
  m.command = "fit";
  m.resolved_config = {{"model", "additive"}, {"reference", "P"}};
  m.input_digests = {{"data.csv", sha256_hex("abc")}};
  m.seed = 42;
  m.version = "0.1.0";
  m.timestamp = "2026-01-02T03:04:05Z";
  RunManifest back = manifest_from_json(manifest_to_json(m));
  CHECK(back.command == m.command);
  CHECK(back.resolved_config == m.resolved_config);
  CHECK(back.input_digests == m.input_digests);
  CHECK(back.seed == m.seed);
  CHECK(back.version == m.version);
  CHECK(back.timestamp == m.timestamp);

  CHECK_THROWS_AS(manifest_from_json(nlohmann::json{{"command", "fit"}}), InputError);
}
