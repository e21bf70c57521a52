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

#ifndef LOADCAST_INGEST_HPP
#define LOADCAST_INGEST_HPP

#include <string>
#include <string_view>
#include <vector>

#include "series.hpp"

namespace loadcast {

/// Parsed `timestamp,load,temp1[,temp2,...]` table. Empty fields are NaN.
struct RawTable {
  HourGrid grid;
  std::vector<double> load;
  std::vector<std::vector<double>> stations;  // one column per station
  std::vector<std::string> station_names;
};

/// Parses CSV text. Timestamps must form a gap-free, strictly increasing
/// hourly grid; diagnostics carry line numbers.
RawTable parse_csv(std::string_view text, const std::string& source = "<input>");
RawTable read_csv(const std::string& path);

/// Virtual temperature rule: "avg:all", "avg:3,9" (1-based station columns)
/// or a single station number.
struct StationRule {
  bool all = true;
  std::vector<std::size_t> stations;  // 1-based

  static StationRule parse(std::string_view text);
  std::string to_string() const;
};

/// Averages the selected stations hour by hour; an hour is missing when any
/// selected station is.
HourlySeries virtual_series(const RawTable& table, const StationRule& rule);
HourlySeries ingest(const std::string& path, const StationRule& rule);

struct StationScore {
  std::vector<std::size_t> stations;  // 1-based; two entries for a pair average
  double rss = 0.0;
  std::size_t hours = 0;
};

struct StationRanking {
  std::vector<StationScore> singles;  // ascending rss, ties by station index
  std::vector<StationScore> pairs;    // ascending rss over pair averages
};

/// Ranks stations by the residual sum of squares of load regressed on a cubic
/// polynomial of temperature, over hours where load and all stations exist.
StationRanking station_rank(const RawTable& table, bool with_pairs = true);

}  // namespace loadcast

#endif  // LOADCAST_INGEST_HPP
