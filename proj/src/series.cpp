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

#include "series.hpp"

#include <cmath>

#include "error.hpp"

namespace loadcast {

HourlySeries::HourlySeries(HourGrid grid, std::vector<double> load, std::vector<double> temperature)
    : grid_(grid), load_(std::move(load)), temp_(std::move(temperature)) {
  if (load_.size() != grid_.size() || temp_.size() != grid_.size())
    fail(ErrorKind::InvalidArgument, "series channels must match the grid length");
  load_missing_.resize(load_.size());
  temp_missing_.resize(temp_.size());
  for (std::size_t i = 0; i < load_.size(); ++i) {
    if (std::isinf(load_[i]) || std::isinf(temp_[i]))
      fail(ErrorKind::Data, "infinite value at " + format_timestamp(grid_.stamp_of(static_cast<std::int64_t>(i)).wall));
    load_missing_[i] = std::isnan(load_[i]) ? 1 : 0;
    temp_missing_[i] = std::isnan(temp_[i]) ? 1 : 0;
  }
}

HourlySeries HourlySeries::slice(std::int64_t begin, std::int64_t end) const {
  if (begin < 0 || end < begin || end > static_cast<std::int64_t>(size()))
    fail(ErrorKind::InvalidArgument, "series slice out of range");
  const auto b = static_cast<std::size_t>(begin);
  const auto e = static_cast<std::size_t>(end);
  HourGrid g(grid_.stamp_of(begin).wall, e - b);
  return HourlySeries(g, std::vector<double>(load_.begin() + b, load_.begin() + e),
                      std::vector<double>(temp_.begin() + b, temp_.begin() + e));
}

}  // namespace loadcast
