/*
  Copyright 2026 The loadcast Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef LOADCAST_SERIES_HPP
#define LOADCAST_SERIES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "channel.hpp"
#include "timegrid.hpp"

namespace loadcast {

/// Aligned hourly load and temperature on a regular grid. Missing values are
/// stored as NaN and flagged in a per-channel mask.
class HourlySeries {
 public:
  HourlySeries() = default;
  HourlySeries(HourGrid grid, std::vector<double> load, std::vector<double> temperature);

  const HourGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  std::span<const double> values(Channel c) const {
    return c == Channel::Load ? std::span<const double>(load_) : std::span<const double>(temp_);
  }
  std::span<const double> load() const { return load_; }
  std::span<const double> temperature() const { return temp_; }

  bool missing(Channel c, std::size_t i) const {
    return (c == Channel::Load ? load_missing_ : temp_missing_)[i] != 0;
  }
  const std::vector<std::uint8_t>& missing_mask(Channel c) const {
    return c == Channel::Load ? load_missing_ : temp_missing_;
  }

  /// Hours [begin, end) as a new series whose grid starts at `begin`.
  HourlySeries slice(std::int64_t begin, std::int64_t end) const;
  /// The first n hours.
  HourlySeries truncated(std::size_t n) const { return slice(0, static_cast<std::int64_t>(n)); }

 private:
  HourGrid grid_;
  std::vector<double> load_;
  std::vector<double> temp_;
  std::vector<std::uint8_t> load_missing_;
  std::vector<std::uint8_t> temp_missing_;
};

}  // namespace loadcast

#endif  // LOADCAST_SERIES_HPP
