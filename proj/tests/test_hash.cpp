#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "afdo/hash.hpp"

// Golden digests computed with an external SHA-256 implementation, not with
// this library, so a broken digest cannot certify itself.
TEST_CASE("sha256 known-answer vectors") {
  CHECK(afdo::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(afdo::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(afdo::sha256_hex("abc").size() == 64);
}

TEST_CASE("submitter hashing: salt-then-name, first 8 hex") {
  CHECK(afdo::kProjectSalt == "afdo-2026");
  // sha256("afdo-2026ClinicalLab-1") = c54db524 0e99f49e ...
  CHECK(afdo::hash_submitter("ClinicalLab-1") == "c54db524");
  CHECK(afdo::hash_submitter("ExpertPanel-0") == "04f59c2e");
  CHECK(afdo::hash_submitter("ClinicalLab-1") ==
        afdo::sha256_hex("afdo-2026ClinicalLab-1").substr(0, 8));
  // The order salt+name, not name+salt, is load-bearing.
  CHECK(afdo::hash_submitter("ClinicalLab-1") !=
        afdo::sha256_hex("ClinicalLab-1afdo-2026").substr(0, 8));
  CHECK(afdo::hash_submitter("ClinicalLab-1", "other-salt") !=
        afdo::hash_submitter("ClinicalLab-1"));
}

TEST_CASE("file digest matches the string digest of the same bytes") {
  auto path = std::filesystem::temp_directory_path() / "afdo-hash-test.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "abc";
  }
  CHECK(afdo::sha256_file_hex(path.string()) == afdo::sha256_hex("abc"));
  std::filesystem::remove(path);
  CHECK_THROWS(afdo::sha256_file_hex(path.string()));
}
