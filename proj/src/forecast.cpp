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

#include "forecast.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "error.hpp"
#include "rng.hpp"

namespace loadcast {

namespace {

constexpr std::size_t kHourBlock = 168;

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

using HourSink = std::function<void(std::size_t h, std::span<const double> load,
                                    std::span<const double> temp)>;

struct Plan {
  CompiledEquation eq[2];  // indexed by Channel
  std::span<const double> pool[2];
  int ring = 1;
  std::int64_t start = 0;
};

// Paths [p0, p1) for hours [h0, h1); ring buffers persist across blocks.
class PathWorker {
 public:
  PathWorker(const Plan& plan, const HourlySeries& history, std::size_t p0, std::size_t p1)
      : plan_(plan), p0_(p0), m_(p1 - p0) {
    const auto R = static_cast<std::size_t>(plan.ring);
    for (int c = 0; c < 2; ++c) {
      ring_[c].assign(R * m_, 0.0);
      const auto src = history.values(static_cast<Channel>(c));
      for (std::int64_t s = std::max<std::int64_t>(0, plan.start - plan.ring + 1); s < plan.start; ++s) {
        double* row = ring_[c].data() + static_cast<std::size_t>(s % plan.ring) * m_;
        std::fill(row, row + m_, src[static_cast<std::size_t>(s)]);
      }
    }
    acc_.resize(m_);
  }

  // Writes value[(h - h0) * n_paths + path] for both channels.
  void run(std::size_t h0, std::size_t h1, const CounterRng& rng, std::size_t n_paths,
           double* out_load, double* out_temp) {
    for (std::size_t h = h0; h < h1; ++h) {
      const std::int64_t t = plan_.start + static_cast<std::int64_t>(h);
      step(Channel::Temperature, h, t, rng, out_temp + (h - h0) * n_paths + p0_);
      step(Channel::Load, h, t, rng, out_load + (h - h0) * n_paths + p0_);
    }
  }

 private:
  void step(Channel target, std::size_t h, std::int64_t t, const CounterRng& rng, double* out) {
    const int ci = static_cast<int>(target);
    const CompiledEquation& eq = plan_.eq[ci];
    const std::size_t m = m_;
    double* acc = acc_.data();
    std::fill(acc, acc + m, eq.base[h]);
    for (const auto& term : eq.terms) {
      const double phi = term.at(h);
      const double* src =
          ring_[static_cast<int>(term.regressor)].data() +
          static_cast<std::size_t>((t - term.lag) % plan_.ring) * m;
      if (term.threshold == kNoThreshold) {
        for (std::size_t p = 0; p < m; ++p) acc[p] += phi * src[p];
      } else {
        const double c = term.threshold;
        for (std::size_t p = 0; p < m; ++p) acc[p] += phi * (src[p] > c ? src[p] : c);
      }
    }
    const auto pool = plan_.pool[ci];
    const std::uint64_t counter = 2 * static_cast<std::uint64_t>(h) + static_cast<std::uint64_t>(ci);
    for (std::size_t p = 0; p < m; ++p)
      acc[p] += pool[rng.below(p0_ + p, counter, pool.size())];
    double* dst = ring_[ci].data() + static_cast<std::size_t>(t % plan_.ring) * m;
    std::copy(acc, acc + m, dst);
    std::copy(acc, acc + m, out);
  }

  const Plan& plan_;
  std::size_t p0_;
  std::size_t m_;
  std::vector<double> ring_[2];
  std::vector<double> acc_;
};

void run_simulation(const BivariateModel& model, const HourlySeries& history,
                    const SimulationConfig& cfg, const HourSink& sink) {
  if (cfg.n_paths < 1) fail(ErrorKind::InvalidArgument, "at least one sample path is required");
  if (cfg.horizon < 1) fail(ErrorKind::InvalidArgument, "forecast horizon must be positive");
  Plan plan;
  plan.start = static_cast<std::int64_t>(history.size());
  for (Channel c : {Channel::Load, Channel::Temperature}) {
    const int ci = static_cast<int>(c);
    plan.eq[ci] = compile(model.equation(c), history.grid(), plan.start, cfg.horizon);
    const auto& override_pool = c == Channel::Load ? cfg.load_residuals : cfg.temperature_residuals;
    plan.pool[ci] = override_pool.empty() ? std::span<const double>(model.equation(c).residuals())
                                          : std::span<const double>(override_pool);
    if (plan.pool[ci].empty())
      fail(ErrorKind::InvalidArgument, std::string(channel_name(c)) + " residual pool is empty");
  }
  const int max_lag = std::max({plan.eq[0].max_lag, plan.eq[1].max_lag, 1});
  plan.ring = max_lag + 1;
  if (plan.start < max_lag) {
    fail(ErrorKind::Data, "history of " + std::to_string(plan.start) + " hours is shorter than the " +
                              std::to_string(max_lag) + "-hour lag window");
  }
  for (Channel c : {Channel::Load, Channel::Temperature}) {
    for (std::int64_t s = plan.start - max_lag; s < plan.start; ++s) {
      if (history.missing(c, static_cast<std::size_t>(s))) {
        fail(ErrorKind::Data, std::string(channel_name(c)) + " is missing at " +
                                  format_timestamp(history.grid().stamp_of(s).wall) +
                                  ", inside the lag window before the forecast start");
      }
    }
  }

  const CounterRng rng(cfg.seed);
  const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_paths)));
  std::vector<PathWorker> workers;
  workers.reserve(nthreads);
  for (unsigned w = 0; w < nthreads; ++w) {
    const std::size_t p0 = cfg.n_paths * w / nthreads;
    const std::size_t p1 = cfg.n_paths * (w + 1) / nthreads;
    workers.emplace_back(plan, history, p0, p1);
  }
  std::vector<double> block_load(kHourBlock * cfg.n_paths);
  std::vector<double> block_temp(kHourBlock * cfg.n_paths);
  for (std::size_t h0 = 0; h0 < cfg.horizon; h0 += kHourBlock) {
    const std::size_t h1 = std::min(cfg.horizon, h0 + kHourBlock);
    if (nthreads == 1) {
      workers[0].run(h0, h1, rng, cfg.n_paths, block_load.data(), block_temp.data());
    } else {
      std::vector<std::thread> pool;
      for (auto& w : workers)
        pool.emplace_back([&, wp = &w] { wp->run(h0, h1, rng, cfg.n_paths, block_load.data(), block_temp.data()); });
      for (auto& t : pool) t.join();
    }
    for (std::size_t h = h0; h < h1; ++h) {
      const std::size_t off = (h - h0) * cfg.n_paths;
      sink(h, std::span<const double>(block_load.data() + off, cfg.n_paths),
           std::span<const double>(block_temp.data() + off, cfg.n_paths));
    }
  }
}

}  // namespace

void QuantileForecast::validate() const {
  for (std::size_t h = 0; h < rows.size(); ++h) {
    for (int l = 0; l < kQuantileLevels; ++l) {
      if (!std::isfinite(rows[h][static_cast<std::size_t>(l)]))
        fail(ErrorKind::Data, "non-finite quantile at hour " + std::to_string(h));
      if (l && rows[h][static_cast<std::size_t>(l)] < rows[h][static_cast<std::size_t>(l - 1)])
        fail(ErrorKind::Data, "quantiles decrease at hour " + std::to_string(h));
    }
  }
}

std::string QuantileForecast::to_csv() const {
  std::string out = "timestamp";
  for (int l = 1; l <= kQuantileLevels; ++l) out += ",q" + std::to_string(l);
  out += '\n';
  const std::int64_t a = absolute_hour(start);
  for (std::size_t h = 0; h < rows.size(); ++h) {
    out += format_timestamp(civil_from_absolute(a + static_cast<std::int64_t>(h)));
    for (double v : rows[h]) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

QuantileForecast QuantileForecast::from_csv(std::string_view text, const std::string& source) {
  QuantileForecast qf;
  std::size_t line_no = 0;
  bool header = false;
  std::int64_t prev = 0;
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": " + why);
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t s = 0;
    while (true) {
      const auto c = line.find(',', s);
      f.push_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    if (f.size() != 1 + kQuantileLevels) bad("expected 100 fields, found " + std::to_string(f.size()));
    if (!header) {
      if (f[0] != "timestamp") bad("header must be timestamp,q1,...,q99");
      for (int l = 1; l <= kQuantileLevels; ++l)
        if (f[static_cast<std::size_t>(l)] != "q" + std::to_string(l)) bad("header must be timestamp,q1,...,q99");
      header = true;
      continue;
    }
    const auto ts = parse_timestamp(f[0]);
    if (!ts) bad("malformed timestamp");
    const std::int64_t a = absolute_hour(*ts);
    if (qf.rows.empty())
      qf.start = *ts;
    else if (a != prev + 1)
      bad("timestamps must be consecutive hours");
    prev = a;
    QuantileRow row{};
    for (int l = 0; l < kQuantileLevels; ++l) {
      const auto fld = f[static_cast<std::size_t>(l + 1)];
      const auto res = std::from_chars(fld.data(), fld.data() + fld.size(), row[static_cast<std::size_t>(l)]);
      if (res.ec != std::errc{} || res.ptr != fld.data() + fld.size()) bad("malformed quantile value");
    }
    qf.rows.push_back(row);
  }
  if (!header) fail(ErrorKind::Parse, source + ": empty quantile file");
  return qf;
}

QuantileForecast QuantileForecast::read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str(), path);
}

double empirical_quantile(std::span<const double> sorted, int level) {
  if (sorted.empty()) fail(ErrorKind::InvalidArgument, "empty sample");
  if (level < 1 || level > 99) fail(ErrorKind::InvalidArgument, "quantile level must be 1..99");
  const std::size_t n = sorted.size();
  std::size_t k = (n * static_cast<std::size_t>(level) + 99) / 100;  // ceil(n * level / 100)
  k = std::clamp<std::size_t>(k, 1, n);
  return sorted[k - 1];
}

QuantileRow quantile_row(std::span<double> values) {
  std::sort(values.begin(), values.end());
  QuantileRow row{};
  for (int l = 1; l <= kQuantileLevels; ++l) row[static_cast<std::size_t>(l - 1)] = empirical_quantile(values, l);
  return row;
}

CompiledEquation compile(const EquationModel& eq, const HourGrid& grid, std::int64_t start,
                         std::size_t horizon) {
  CompiledEquation ce;
  ce.base.assign(horizon, eq.intercept);
  const EquationBases& bases = *eq.bases;

  std::map<std::tuple<int, double, int>, std::size_t> term_of;
  bool need_intercept = false;
  std::vector<bool> need_varying(bases.varying.size(), false);
  for (const auto& c : eq.coefficients) {
    if (c.meta.kind == ColumnMeta::Kind::InterceptBasis) {
      need_intercept = true;
      continue;
    }
    const auto key = std::make_tuple(static_cast<int>(c.meta.regressor), c.meta.threshold, c.meta.lag);
    auto [it, fresh] = term_of.try_emplace(key, ce.terms.size());
    if (fresh) {
      CompiledEquation::Term t;
      t.regressor = c.meta.regressor;
      t.threshold = c.meta.threshold;
      t.lag = c.meta.lag;
      ce.terms.push_back(std::move(t));
      ce.max_lag = std::max(ce.max_lag, c.meta.lag);
    }
    auto& term = ce.terms[it->second];
    if (c.meta.kind == ColumnMeta::Kind::Lagged) {
      term.constant += c.value;
    } else {
      need_varying[static_cast<std::size_t>(c.meta.varying)] = true;
      if (term.varying.empty()) term.varying.assign(horizon, 0.0);
    }
  }

  std::vector<double> ib(bases.intercept.size());
  std::vector<std::vector<double>> vb(bases.varying.size());
  for (std::size_t v = 0; v < vb.size(); ++v) vb[v].resize(bases.varying[v].size());
  for (std::size_t h = 0; h < horizon; ++h) {
    const HourStamp st = grid.stamp_of(start + static_cast<std::int64_t>(h));
    if (need_intercept) bases.intercept.evaluate(st, ib);
    for (std::size_t v = 0; v < vb.size(); ++v)
      if (need_varying[v]) bases.varying[v].evaluate(st, vb[v]);
    for (const auto& c : eq.coefficients) {
      const auto slot = static_cast<std::size_t>(c.meta.basis_slot);
      if (c.meta.kind == ColumnMeta::Kind::InterceptBasis) {
        ce.base[h] += c.value * ib[slot];
      } else if (c.meta.kind == ColumnMeta::Kind::LaggedBasis) {
        const auto key = std::make_tuple(static_cast<int>(c.meta.regressor), c.meta.threshold, c.meta.lag);
        ce.terms[term_of.at(key)].varying[h] += c.value * vb[static_cast<std::size_t>(c.meta.varying)][slot];
      }
    }
  }
  for (auto& t : ce.terms)
    for (auto& v : t.varying) v += t.constant;
  return ce;
}

PathEnsemble simulate_paths(const BivariateModel& model, const HourlySeries& history,
                            const SimulationConfig& cfg) {
  PathEnsemble e;
  e.horizon = cfg.horizon;
  e.n_paths = cfg.n_paths;
  e.load.resize(cfg.horizon * cfg.n_paths);
  e.temperature.resize(cfg.horizon * cfg.n_paths);
  run_simulation(model, history, cfg, [&](std::size_t h, std::span<const double> l, std::span<const double> t) {
    std::copy(l.begin(), l.end(), e.load.begin() + static_cast<std::ptrdiff_t>(h * cfg.n_paths));
    std::copy(t.begin(), t.end(), e.temperature.begin() + static_cast<std::ptrdiff_t>(h * cfg.n_paths));
  });
  return e;
}

QuantileForecast simulate_quantiles(const BivariateModel& model, const HourlySeries& history,
                                    const SimulationConfig& cfg) {
  QuantileForecast qf;
  qf.start = history.grid().stamp_of(static_cast<std::int64_t>(history.size())).wall;
  qf.rows.resize(cfg.horizon);
  std::vector<double> scratch(cfg.n_paths);
  run_simulation(model, history, cfg, [&](std::size_t h, std::span<const double> l, std::span<const double>) {
    std::copy(l.begin(), l.end(), scratch.begin());
    qf.rows[h] = quantile_row(scratch);
  });
  return qf;
}

QuantileForecast quantiles_from_paths(const PathEnsemble& ensemble, const CivilHour& start,
                                      Channel channel) {
  if (ensemble.n_paths == 0) fail(ErrorKind::InvalidArgument, "empty ensemble");
  const auto& v = channel == Channel::Load ? ensemble.load : ensemble.temperature;
  QuantileForecast qf;
  qf.start = start;
  qf.rows.resize(ensemble.horizon);
  std::vector<double> scratch(ensemble.n_paths);
  for (std::size_t h = 0; h < ensemble.horizon; ++h) {
    std::copy(v.begin() + static_cast<std::ptrdiff_t>(h * ensemble.n_paths),
              v.begin() + static_cast<std::ptrdiff_t>((h + 1) * ensemble.n_paths), scratch.begin());
    qf.rows[h] = quantile_row(scratch);
  }
  return qf;
}

std::optional<TaskKind> parse_task_kind(std::string_view s) {
  if (s == "month_ahead" || s == "month-ahead" || s == "month") return TaskKind::MonthAhead;
  if (s == "year_ahead" || s == "year-ahead" || s == "year") return TaskKind::YearAhead;
  return std::nullopt;
}

std::string task_kind_name(TaskKind k) { return k == TaskKind::MonthAhead ? "month_ahead" : "year_ahead"; }

TaskWindow task_window(TaskKind kind, std::chrono::year_month_day cutoff) {
  using namespace std::chrono;
  if (!cutoff.ok()) fail(ErrorKind::InvalidArgument, "invalid cutoff date");
  const sys_days first_day = sys_days{cutoff} + days{1};
  const year_month_day f{first_day};
  sys_days end_day;
  if (kind == TaskKind::MonthAhead) {
    end_day = sys_days{(f.year() / f.month() / 1) + months{1}};
  } else {
    const year_month_day e = f + years{1};
    end_day = e.ok() ? sys_days{e} : sys_days{e.year() / e.month() / last} + days{1};
  }
  TaskWindow w;
  w.first = civil_from_date(f, 0);
  w.hours = static_cast<std::size_t>((end_day - first_day).count()) * 24;
  return w;
}

std::int64_t cutoff_end(const HourGrid& grid, std::chrono::year_month_day cutoff) {
  const auto idx = grid.index_of(civil_from_date(cutoff, 23));
  if (!idx) {
    fail(ErrorKind::Data, "cutoff " + format_date(civil_from_date(cutoff, 0)) +
                              " 23:00 is outside the series");
  }
  return *idx + 1;
}

QuantileForecast rolling_task_forecast(const HourlySeries& series, const ModelSpec& spec,
                                       const HolidayCalendar& calendar, TaskKind task,
                                       std::chrono::year_month_day cutoff,
                                       const TaskForecastOptions& options, BivariateModel* fitted) {
  const std::int64_t end = cutoff_end(series.grid(), cutoff);
  const TaskWindow win = task_window(task, cutoff);
  const HourlySeries history = series.truncated(static_cast<std::size_t>(end));
  BivariateModel model = fit_bivariate(history, spec, calendar, options.fit);
  SimulationConfig sim = options.sim;
  sim.horizon = win.hours;
  QuantileForecast qf = simulate_quantiles(model, history, sim);
  if (fitted) *fitted = std::move(model);
  return qf;
}

}  // namespace loadcast
