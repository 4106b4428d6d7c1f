#pragma once

#include <cstdint>

namespace smdeim {

/// Per-thread operation counters. Offline kernels bump the call counts,
/// the reduced-Jacobian paths bump the flop tallies.
struct Counters {
  std::uint64_t svd_calls = 0;
  std::uint64_t deim_calls = 0;
  std::uint64_t reduced_flops = 0;      // reduced-space arithmetic (lifting + products)
  std::uint64_t entry_evaluations = 0;  // sampled Jacobian entries / rows evaluated
  std::uint64_t full_flops = 0;         // work that scales with the full dimension n
};

inline Counters& counters() {
  static thread_local Counters c;
  return c;
}

inline void reset_counters() { counters() = Counters{}; }

}  // namespace smdeim
