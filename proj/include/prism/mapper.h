#pragma once

// Global clock-value distribution and the pinning-threshold rule that turns
// it into per-key pin decisions.

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace prism {

class Tracker;

// Number of tracked keys at each clock value. Deltas arrive concurrently
// from readers (inserts, promotions) and the eviction task.
class ClockHistogram {
 public:
  // Insert: before empty. Eviction: after empty. Transition: both set.
  // A decrement that would go negative is clamped and counted as an
  // accounting error.
  void ApplyDelta(std::optional<uint8_t> before, std::optional<uint8_t> after);

  std::array<uint64_t, 4> Snapshot() const;
  uint64_t Total() const;
  uint64_t accounting_errors() const { return errors_.load(std::memory_order_relaxed); }
  void Reset();

 private:
  std::array<std::atomic<int64_t>, 4> counts_{};
  std::atomic<uint64_t> errors_{0};
};

struct PinPolicy {
  static constexpr int kPinNone = 4;

  double threshold = 0.0;
  // Clocks above boundary always pin, clocks equal to it pin with
  // probability boundary_prob, everything below never pins.
  int boundary = kPinNone;
  double boundary_prob = 0.0;

  bool pins_nothing() const {
    return boundary >= kPinNone || (boundary == 3 && boundary_prob <= 0.0);
  }
  // Probability that a key at the given clock (nullopt = untracked) pins.
  double PinProbability(std::optional<uint8_t> clock) const;
};

// Takes the highest clock values first and samples the lowest one needed
// to reach the threshold. threshold is a fraction of tracked keys.
PinPolicy DerivePolicy(const std::array<uint64_t, 4>& counts, double threshold);

// Per-job decision stream over a fixed policy snapshot. Deterministic for a
// given seed and sequence of calls.
class PinDecider {
 public:
  PinDecider(const Tracker* tracker, PinPolicy policy, uint64_t seed)
      : tracker_(tracker), policy_(policy), rng_(seed) {}

  bool ShouldPin(std::string_view key);
  // Same rule for an already looked-up clock value.
  bool Decide(std::optional<uint8_t> clock);

  const PinPolicy& policy() const { return policy_; }

 private:
  const Tracker* tracker_;
  PinPolicy policy_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
};

class Mapper {
 public:
  explicit Mapper(double threshold) : threshold_(threshold) {}

  ClockHistogram& histogram() { return histogram_; }
  const ClockHistogram& histogram() const { return histogram_; }

  double threshold() const { return threshold_.load(std::memory_order_relaxed); }
  void set_threshold(double t) { threshold_.store(t, std::memory_order_relaxed); }

  PinPolicy CurrentPolicy() const { return DerivePolicy(histogram_.Snapshot(), threshold()); }

 private:
  ClockHistogram histogram_;
  std::atomic<double> threshold_;
};

}  // namespace prism
