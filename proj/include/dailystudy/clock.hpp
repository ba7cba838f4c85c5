// Copyright 2026 The dailystudy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DAILYSTUDY_CLOCK_HPP
#define DAILYSTUDY_CLOCK_HPP

#include <chrono>

#include "dailystudy/timeutil.hpp"

namespace dailystudy {

// Injectable time source. Tests and the simulator substitute VirtualClock
// so scheduler behavior is reproducible.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual UtcTime now() const = 0;
};

class SystemClock : public Clock {
 public:
  UtcTime now() const override {
    return std::chrono::time_point_cast<std::chrono::seconds>(
        std::chrono::system_clock::now());
  }
};

class VirtualClock : public Clock {
 public:
  explicit VirtualClock(UtcTime start = {}) : now_(start) {}

  UtcTime now() const override { return now_; }

  void set(UtcTime t) { now_ = t; }
  void advance(std::chrono::seconds d) { now_ += d; }

 private:
  UtcTime now_;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_CLOCK_HPP
