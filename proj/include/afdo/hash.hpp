#pragma once

#include <string>
#include <string_view>

namespace afdo {

// Fixed project salt for submitter pseudonymisation. Concatenation order is
// salt-then-name and is frozen by a golden test.
inline constexpr std::string_view kProjectSalt = "afdo-2026";

// Full lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// First 8 hex characters of SHA-256(salt + name).
std::string hash_submitter(std::string_view name, std::string_view salt = kProjectSalt);

// SHA-256 of a file's bytes (for run manifests).
std::string sha256_file_hex(const std::string& path);

}  // namespace afdo
