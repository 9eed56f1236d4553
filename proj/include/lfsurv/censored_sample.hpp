#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lfsurv {

struct Observation {
  double time;  // min(failure, censoring), > 0
  bool event;   // true: failure observed; false: right-censored

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Right-censored survival data. Construction rejects non-positive or
/// non-finite times; an empty sample is allowed but cannot be fitted.
class CensoredSample {
 public:
  CensoredSample() = default;
  explicit CensoredSample(std::vector<Observation> observations);
  CensoredSample(const std::vector<double>& times, const std::vector<bool>& events);

  std::span<const Observation> observations() const noexcept { return obs_; }
  std::size_t size() const noexcept { return obs_.size(); }
  std::size_t event_count() const noexcept { return events_; }
  std::size_t censored_count() const noexcept { return obs_.size() - events_; }

  friend bool operator==(const CensoredSample&, const CensoredSample&) = default;

 private:
  std::vector<Observation> obs_;
  std::size_t events_ = 0;
};

}  // namespace lfsurv
