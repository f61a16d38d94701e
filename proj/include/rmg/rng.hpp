#pragma once

#include <cstdint>
#include <span>

namespace rmg {

// Purpose tags for keyed draws. Each sampling site in the solver and the
// generators owns a distinct tag so streams never collide across uses.
enum class StreamTag : std::uint64_t {
  kTransition = 1,
  kOpponentAction = 2,  // combined with the opponent's index
  kKernelGen = 3,
  kRewardGen = 4,
  kThetaPack = 5,
  kTestAux = 6,
};

// Position of one draw in the run: (step h, round k, agent i, state s,
// action a, tag). Unused coordinates stay 0.
struct StreamKey {
  std::uint64_t h = 0;
  std::uint64_t k = 0;
  std::uint64_t agent = 0;
  std::uint64_t state = 0;
  std::uint64_t action = 0;
  std::uint64_t tag = 0;

  static StreamKey tagged(StreamTag t, std::uint64_t sub = 0) {
    StreamKey key;
    key.tag = (static_cast<std::uint64_t>(t) << 32) | sub;
    return key;
  }
  StreamKey& at(std::uint64_t h_, std::uint64_t k_ = 0, std::uint64_t agent_ = 0,
                std::uint64_t state_ = 0, std::uint64_t action_ = 0) {
    h = h_;
    k = k_;
    agent = agent_;
    state = state_;
    action = action_;
    return *this;
  }
};

// Counter-based generator: every draw is a pure function of (seed, key), so
// any evaluation order or thread layout produces identical samples.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(const StreamKey& key) const {
    std::uint64_t x = mix(seed_ ^ 0x8f1bbcdcbfa53e0bULL);
    x = mix(x ^ key.h);
    x = mix(x ^ key.k);
    x = mix(x ^ key.agent);
    x = mix(x ^ key.state);
    x = mix(x ^ key.action);
    x = mix(x ^ key.tag);
    return x;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(const StreamKey& key) const {
    return static_cast<double>(bits(key) >> 11) * 0x1.0p-53;
  }

  // Inverse-CDF draw from a probability row. Returns the smallest index whose
  // cumulative mass exceeds the uniform; clamps to the last index so rows
  // summing to 1-epsilon cannot fall off the end.
  int categorical(std::span<const double> row, const StreamKey& key) const {
    const double u = uniform(key);
    double cum = 0.0;
    for (std::size_t idx = 0; idx < row.size(); ++idx) {
      cum += row[idx];
      if (u < cum) return static_cast<int>(idx);
    }
    return static_cast<int>(row.size()) - 1;
  }

 private:
  // SplitMix64 finalizer; absorbing each field through one round keeps the
  // key positional (h=1,k=0 never aliases h=0,k=1).
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace rmg
