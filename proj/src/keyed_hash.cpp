#include "jtight/keyed_hash.hpp"

#include <cstring>
#include <mutex>
#include <stdexcept>

#include <sodium.h>

namespace jtight {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

}  // namespace

KeyedHash::KeyedHash(std::uint64_t seed, std::string_view label) {
  ensure_sodium();
  unsigned char seed_bytes[8];
  for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<unsigned char>(seed >> (8 * i));
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, key_.size());
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
  crypto_generichash_update(&st, seed_bytes, sizeof seed_bytes);
  crypto_generichash_final(&st, key_.data(), key_.size());
}

std::uint64_t KeyedHash::operator()(const VertexSet& s) const {
  static_assert(crypto_shorthash_KEYBYTES == 16 && crypto_shorthash_BYTES == 8);
  unsigned char msg[kMaxUniformity * 4];
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vertex v = s[i];
    msg[4 * i + 0] = static_cast<unsigned char>(v);
    msg[4 * i + 1] = static_cast<unsigned char>(v >> 8);
    msg[4 * i + 2] = static_cast<unsigned char>(v >> 16);
    msg[4 * i + 3] = static_cast<unsigned char>(v >> 24);
  }
  unsigned char out[8];
  crypto_shorthash(out, msg, 4 * s.size(), key_.data());
  std::uint64_t h = 0;
  for (int i = 7; i >= 0; --i) h = (h << 8) | out[i];
  return h;
}

double KeyedHash::unit(const VertexSet& s) const {
  return static_cast<double>((*this)(s) >> 11) * 0x1.0p-53;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  return mix64(mix64(parent) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace jtight
