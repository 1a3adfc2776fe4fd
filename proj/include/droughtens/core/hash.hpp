#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace droughtens {

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value));
}

// Per-task seed. Depends only on its arguments, so the order in which tasks
// are scheduled never changes a result.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view tag,
                                    std::string_view model_id, std::uint64_t repeat) {
  std::uint64_t h = splitmix64(global_seed);
  h = hash_combine(h, fnv1a64(tag));
  h = hash_combine(h, fnv1a64(model_id));
  h = hash_combine(h, repeat);
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Streaming content hash used for run manifests and stage markers.
class ContentHash {
 public:
  void update(std::string_view bytes) {
    a_ = fnv1a64(bytes, a_);
    b_ = hash_combine(b_, fnv1a64(bytes));
    b_ = hash_combine(b_, bytes.size());
  }
  std::string hex() const { return hex64(a_) + hex64(b_); }

 private:
  std::uint64_t a_ = 0xcbf29ce484222325ULL;
  std::uint64_t b_ = 0x84222325cbf29ce4ULL;
};

}  // namespace droughtens
