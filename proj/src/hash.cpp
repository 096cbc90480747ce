#include "afdo/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace afdo {

namespace {

std::string to_hex(const unsigned char* digest, std::size_t length) {
  static const char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0F]);
  }
  return out;
}

struct DigestContext {
  EVP_MD_CTX* ctx;

  DigestContext() : ctx(EVP_MD_CTX_new()) {
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("failed to initialise SHA-256 context");
    }
  }
  ~DigestContext() { EVP_MD_CTX_free(ctx); }

  void update(const void* data, std::size_t length) {
    if (EVP_DigestUpdate(ctx, data, length) != 1) {
      throw std::runtime_error("SHA-256 update failed");
    }
  }

  std::string finish() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_DigestFinal_ex(ctx, digest.data(), &length) != 1) {
      throw std::runtime_error("SHA-256 finalisation failed");
    }
    return to_hex(digest.data(), length);
  }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  DigestContext ctx;
  ctx.update(data.data(), data.size());
  return ctx.finish();
}

std::string hash_submitter(std::string_view name, std::string_view salt) {
  if (name.empty()) {
    throw std::invalid_argument("submitter name must be non-empty");
  }
  std::string salted;
  salted.reserve(salt.size() + name.size());
  salted.append(salt);
  salted.append(name);
  return sha256_hex(salted).substr(0, 8);
}

std::string sha256_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file for hashing: " + path);
  }
  DigestContext ctx;
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const std::streamsize got = in.gcount();
    if (got > 0) {
      ctx.update(buffer.data(), static_cast<std::size_t>(got));
    }
  }
  return ctx.finish();
}

}  // namespace afdo
