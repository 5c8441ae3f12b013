#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace iwas {

// FNV-1a, 64 bit. Used everywhere a fixed, platform-independent hash is
// needed: feature hashing, mock-generator draws, derived seeds, config
// hashes. Integers are fed in as 8 little-endian bytes.
class Fnv1a64 {
 public:
  Fnv1a64& bytes(std::string_view s) {
    for (unsigned char c : s) step(c);
    return *this;
  }
  Fnv1a64& u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) step(static_cast<unsigned char>(v >> (8 * i)));
    return *this;
  }
  std::uint64_t value() const { return h_; }

 private:
  void step(unsigned char c) {
    h_ ^= c;
    h_ *= 1099511628211ULL;
  }
  std::uint64_t h_ = 14695981039346656037ULL;
};

inline std::uint64_t fnv1a64(std::string_view s) { return Fnv1a64().bytes(s).value(); }

// Fisher-Yates with an explicit generator so shuffles are reproducible
// across platforms (std::shuffle and the standard distributions are not).
template <typename Vec, typename Rng>
void seeded_shuffle(Vec& v, Rng& rng) {
  if (v.size() < 2) return;
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    using std::swap;
    swap(v[i], v[j]);
  }
}

inline std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace iwas
