#pragma once

#include <cstdint>

namespace fkflow {

// Counter-based random stream. Draw n of stream (seed, stream_id) is a pure
// mixing function of (key, n), so substreams indexed by path are reproducible
// regardless of execution order or how work is scheduled. One normal() call
// may consume one or two counter increments (Box-Muller pair caching), but
// each stream is consumed strictly sequentially by its owner.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform01();
  // Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fkflow
