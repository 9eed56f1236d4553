#include "lfsurv/censored_sample.hpp"

#include <cmath>
#include <string>

#include "lfsurv/errors.hpp"

namespace lfsurv {

CensoredSample::CensoredSample(std::vector<Observation> observations) : obs_(std::move(observations)) {
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    if (!(obs_[i].time > 0.0) || !std::isfinite(obs_[i].time))
      throw DomainError("observation " + std::to_string(i) + ": time must be positive and finite");
    if (obs_[i].event) ++events_;
  }
}

namespace {

std::vector<Observation> zip(const std::vector<double>& times, const std::vector<bool>& events) {
  if (times.size() != events.size()) throw DomainError("times and events must have equal length");
  std::vector<Observation> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out.push_back({times[i], events[i]});
  return out;
}

}  // namespace

CensoredSample::CensoredSample(const std::vector<double>& times, const std::vector<bool>& events)
    : CensoredSample(zip(times, events)) {}

}  // namespace lfsurv
