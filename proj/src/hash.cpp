#include "carto/hash.hpp"

#include <openssl/sha.h>

#include <array>

namespace carto {

std::string sha256Hex(std::string_view bytes) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest.size());
  for (unsigned char c : digest) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 15]);
  }
  return out;
}

std::string contentHash(const nlohmann::json& value) {
  if (value.is_object() && value.contains("hash")) {
    nlohmann::json copy = value;
    copy.erase("hash");
    return sha256Hex(copy.dump());
  }
  return sha256Hex(value.dump());
}

}  // namespace carto
