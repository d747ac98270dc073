#include "prism/mapper.h"

#include <algorithm>
#include <string>

#include "prism/log.h"
#include "prism/tracker.h"

namespace prism {

void ClockHistogram::ApplyDelta(std::optional<uint8_t> before, std::optional<uint8_t> after) {
  if (before && after && *before == *after) return;
  if (before) {
    auto& slot = counts_[*before & 3];
    int64_t cur = slot.load(std::memory_order_relaxed);
    while (true) {
      if (cur <= 0) {
        if (errors_.fetch_add(1, std::memory_order_relaxed) == 0) {
          Log(LogLevel::kWarn, "clock histogram underflow at clock " + std::to_string(*before & 3) +
                                   "; clamped to 0");
        }
        break;
      }
      if (slot.compare_exchange_weak(cur, cur - 1, std::memory_order_relaxed)) break;
    }
  }
  if (after) counts_[*after & 3].fetch_add(1, std::memory_order_relaxed);
}

std::array<uint64_t, 4> ClockHistogram::Snapshot() const {
  std::array<uint64_t, 4> out{};
  for (size_t c = 0; c < 4; ++c) {
    out[c] = static_cast<uint64_t>(std::max<int64_t>(0, counts_[c].load(std::memory_order_relaxed)));
  }
  return out;
}

uint64_t ClockHistogram::Total() const {
  const auto s = Snapshot();
  return s[0] + s[1] + s[2] + s[3];
}

void ClockHistogram::Reset() {
  for (auto& c : counts_) c.store(0);
  errors_.store(0);
}

double PinPolicy::PinProbability(std::optional<uint8_t> clock) const {
  if (!clock || boundary >= kPinNone) return 0.0;
  if (*clock > boundary) return 1.0;
  if (*clock == boundary) return boundary_prob;
  return 0.0;
}

PinPolicy DerivePolicy(const std::array<uint64_t, 4>& counts, double threshold) {
  PinPolicy policy;
  policy.threshold = threshold;
  const uint64_t total = counts[0] + counts[1] + counts[2] + counts[3];
  if (total == 0 || !(threshold > 0.0)) return policy;

  const double target = std::min(threshold, 1.0) * static_cast<double>(total);
  const double eps = 1e-9 * static_cast<double>(total);
  double above = 0.0;
  for (int c = 3; c >= 0; --c) {
    const auto mass = static_cast<double>(counts[static_cast<size_t>(c)]);
    if (mass == 0.0) continue;
    if (above + mass >= target - eps) {
      policy.boundary = c;
      policy.boundary_prob = std::clamp((target - above) / mass, 0.0, 1.0);
      return policy;
    }
    above += mass;
  }
  policy.boundary = 0;
  policy.boundary_prob = 1.0;
  return policy;
}

bool PinDecider::Decide(std::optional<uint8_t> clock) {
  if (!clock || policy_.boundary >= PinPolicy::kPinNone) return false;
  if (*clock > policy_.boundary) return true;
  if (*clock < policy_.boundary) return false;
  if (policy_.boundary_prob >= 1.0) return true;
  if (policy_.boundary_prob <= 0.0) return false;
  return coin_(rng_) < policy_.boundary_prob;
}

bool PinDecider::ShouldPin(std::string_view key) {
  if (tracker_ == nullptr || policy_.pins_nothing()) return false;
  const auto tracked = tracker_->Lookup(key);
  if (!tracked) return false;
  return Decide(tracked->clock);
}

}  // namespace prism
