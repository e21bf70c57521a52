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

#include "ingest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace loadcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                      : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) {
    out = kNaN;
    return true;
  }
  const std::string s(field);
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

// Least-squares RSS of y on [1, x, x^2, x^3] over rows where both exist.
StationScore cubic_fit(const std::vector<double>& y, const std::vector<double>& x) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (std::isfinite(y[i]) && std::isfinite(x[i])) rows.push_back(i);
  StationScore score;
  score.hours = rows.size();
  if (rows.size() < 4) {
    score.rss = std::numeric_limits<double>::infinity();
    return score;
  }
  // Center and scale x so the cubic design stays well conditioned.
  double mean = 0.0;
  for (auto r : rows) mean += x[r];
  mean /= static_cast<double>(rows.size());
  double sd = 0.0;
  for (auto r : rows) sd += (x[r] - mean) * (x[r] - mean);
  sd = std::sqrt(sd / static_cast<double>(rows.size()));
  if (sd == 0.0) sd = 1.0;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 4);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double z = (x[rows[k]] - mean) / sd;
    const auto i = static_cast<Eigen::Index>(k);
    A(i, 0) = 1.0;
    A(i, 1) = z;
    A(i, 2) = z * z;
    A(i, 3) = z * z * z;
    b(i) = y[rows[k]];
  }
  const Eigen::VectorXd coef = A.completeOrthogonalDecomposition().solve(b);
  score.rss = (b - A * coef).squaredNorm();
  return score;
}

}  // namespace

RawTable parse_csv(std::string_view text, const std::string& source) {
  RawTable table;
  std::size_t line_no = 0;
  std::size_t n_fields = 0;
  std::optional<CivilHour> origin;
  std::int64_t prev_abs = 0;
  std::size_t rows = 0;

  auto bad = [&](const std::string& why) {
    fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": " + why);
  };

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);

    if (n_fields == 0) {
      if (fields.size() < 3) bad("header must be timestamp,load,temp1[,temp2,...]");
      if (lower(trim(fields[0])) != "timestamp" || lower(trim(fields[1])) != "load")
        bad("header must start with timestamp,load");
      n_fields = fields.size();
      for (std::size_t i = 2; i < fields.size(); ++i) table.station_names.emplace_back(trim(fields[i]));
      table.stations.resize(n_fields - 2);
      continue;
    }
    if (fields.size() != n_fields) {
      bad("expected " + std::to_string(n_fields) + " fields, found " + std::to_string(fields.size()));
    }
    const auto stamp = parse_timestamp(fields[0]);
    if (!stamp) bad("malformed timestamp '" + std::string(trim(fields[0])) + "'");
    const std::int64_t abs = absolute_hour(*stamp);
    if (!origin) {
      origin = stamp;
    } else if (abs == prev_abs) {
      bad("duplicate timestamp " + format_timestamp(*stamp));
    } else if (abs < prev_abs) {
      bad("timestamp " + format_timestamp(*stamp) + " is earlier than the preceding row");
    } else if (abs != prev_abs + 1) {
      bad("gap in hourly grid: missing " + format_timestamp(civil_from_absolute(prev_abs + 1)) +
          " through " + format_timestamp(civil_from_absolute(abs - 1)) + " (" +
          std::to_string(abs - prev_abs - 1) + " hours)");
    }
    prev_abs = abs;

    double v = 0.0;
    if (!parse_number(fields[1], v)) bad("malformed load value '" + std::string(fields[1]) + "'");
    table.load.push_back(v);
    for (std::size_t s = 2; s < n_fields; ++s) {
      if (!parse_number(fields[s], v))
        bad("malformed temperature value '" + std::string(fields[s]) + "'");
      table.stations[s - 2].push_back(v);
    }
    ++rows;
  }
  if (n_fields == 0) fail(ErrorKind::Parse, source + ": empty file");
  if (rows == 0) fail(ErrorKind::Parse, source + ": no data rows");
  table.grid = HourGrid(*origin, rows);
  return table;
}

RawTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

StationRule StationRule::parse(std::string_view text) {
  text = trim(text);
  StationRule rule;
  std::string_view body = text;
  if (text.substr(0, 4) == "avg:") body = text.substr(4);
  if (body == "all") return rule;
  rule.all = false;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view tok = trim(body.substr(0, comma));
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v == 0)
      fail(ErrorKind::InvalidArgument, "invalid station rule '" + std::string(text) + "'");
    rule.stations.push_back(v);
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
  }
  if (rule.stations.empty()) fail(ErrorKind::InvalidArgument, "station rule selects no stations");
  return rule;
}

std::string StationRule::to_string() const {
  if (all) return "avg:all";
  std::string s = "avg:";
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(stations[i]);
  }
  return s;
}

HourlySeries virtual_series(const RawTable& table, const StationRule& rule) {
  std::vector<std::size_t> cols;
  if (rule.all) {
    for (std::size_t i = 0; i < table.stations.size(); ++i) cols.push_back(i);
  } else {
    for (auto s : rule.stations) {
      if (s < 1 || s > table.stations.size()) {
        fail(ErrorKind::InvalidArgument, "station " + std::to_string(s) + " not in table with " +
                                             std::to_string(table.stations.size()) + " stations");
      }
      cols.push_back(s - 1);
    }
  }
  std::vector<double> temp(table.load.size());
  for (std::size_t i = 0; i < temp.size(); ++i) {
    double sum = 0.0;
    bool missing = false;
    for (auto c : cols) {
      const double v = table.stations[c][i];
      if (std::isnan(v)) {
        missing = true;
        break;
      }
      sum += v;
    }
    temp[i] = missing ? kNaN : sum / static_cast<double>(cols.size());
  }
  return HourlySeries(table.grid, table.load, std::move(temp));
}

HourlySeries ingest(const std::string& path, const StationRule& rule) {
  return virtual_series(read_csv(path), rule);
}

StationRanking station_rank(const RawTable& table, bool with_pairs) {
  const std::size_t s = table.stations.size();
  // Hours where load and every station are observed, so all scores share rows.
  std::vector<double> y = table.load;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t c = 0; c < s; ++c)
      if (std::isnan(table.stations[c][i])) y[i] = kNaN;

  StationRanking out;
  for (std::size_t c = 0; c < s; ++c) {
    StationScore sc = cubic_fit(y, table.stations[c]);
    sc.stations = {c + 1};
    out.singles.push_back(std::move(sc));
  }
  auto by_rss = [](const StationScore& a, const StationScore& b) { return a.rss < b.rss; };
  std::stable_sort(out.singles.begin(), out.singles.end(), by_rss);

  if (with_pairs) {
    std::vector<double> avg(y.size());
    for (std::size_t a = 0; a < s; ++a) {
      for (std::size_t b = a + 1; b < s; ++b) {
        for (std::size_t i = 0; i < y.size(); ++i)
          avg[i] = 0.5 * (table.stations[a][i] + table.stations[b][i]);
        StationScore sc = cubic_fit(y, avg);
        sc.stations = {a + 1, b + 1};
        out.pairs.push_back(std::move(sc));
      }
    }
    std::stable_sort(out.pairs.begin(), out.pairs.end(), by_rss);
  }
  return out;
}

}  // namespace loadcast
