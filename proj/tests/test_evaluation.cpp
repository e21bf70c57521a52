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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "error.hpp"
#include "evaluation.hpp"

using namespace loadcast;

namespace {

QuantileRow flat_row(double v) {
  QuantileRow r;
  r.fill(v);
  return r;
}

// Direct summation of the loss definition.
double pinball_oracle(const QuantileRow& q, double y) {
  double s = 0.0;
  for (int k = 1; k <= 99; ++k) {
    const double tau = k / 100.0, z = q[static_cast<std::size_t>(k - 1)];
    s += y >= z ? tau * (y - z) : (1 - tau) * (z - y);
  }
  return s / 99.0;
}

// Normal quantile by bisection on erfc.
double normal_quantile(double p) {
  double lo = -10, hi = 10;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("pinball identities") {
  QuantileForecast f;
  f.start = CivilHour{2011, 1, 1, 0};
  f.rows = {flat_row(100.0), flat_row(50.0)};
  CHECK(pinball(f, std::vector<double>{100.0, 50.0}).score == 0.0);

  QuantileForecast one;
  one.start = f.start;
  one.rows = {flat_row(90.0)};
  double tau_sum = 0.0;
  for (int k = 1; k <= 99; ++k) tau_sum += k / 100.0;
  const double closed = 10.0 * tau_sum / 99.0;
  CHECK(std::abs(pinball(one, std::vector<double>{100.0}).score - closed) < 1e-10);
  CHECK(std::abs(closed - 5.0) < 1e-12);

  const auto miss = pinball(f, std::vector<double>{std::nan(""), 60.0});
  CHECK(miss.missing == 1);
  CHECK(miss.hours == 1);
  CHECK(miss.score == doctest::Approx(pinball_oracle(f.rows[1], 60.0)));
  CHECK_THROWS_AS(pinball(f, std::vector<double>{1.0}), Error);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> d(99);
    for (auto& x : d) x = 100 + 10 * z(rng);
    const auto q = quantile_row(d);
    const double y = 100 + 10 * z(rng);
    CHECK(pinball_loss(q, y) == doctest::Approx(pinball_oracle(q, y)).epsilon(1e-12));
    QuantileRow scaled;
    for (std::size_t k = 0; k < 99; ++k) scaled[k] = 3.7 * q[k];
    CHECK(pinball_loss(scaled, 3.7 * y) == doctest::Approx(3.7 * pinball_loss(q, y)).epsilon(1e-12));
    CHECK(pinball_loss(q, y) >= 0.0);
  }
}

TEST_CASE("true quantiles minimize expected pinball") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0, 1);
  QuantileRow truth, wide, shifted;
  for (int k = 1; k <= 99; ++k) {
    const double zq = normal_quantile(k / 100.0);
    truth[static_cast<std::size_t>(k - 1)] = zq;
    wide[static_cast<std::size_t>(k - 1)] = 1.3 * zq;
    shifted[static_cast<std::size_t>(k - 1)] = zq + 0.2;
  }
  double t = 0, w = 0, s = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double y = z(rng);
    t += pinball_loss(truth, y);
    w += pinball_loss(wide, y);
    s += pinball_loss(shifted, y);
  }
  MESSAGE("true " << t / n << " wide " << w / n << " shifted " << s / n);
  CHECK(t < w);
  CHECK(t < s);
}

TEST_CASE("mape examples") {
  const std::vector<double> a{100, 200};
  CHECK(mape(a, a).mape == 0.0);
  CHECK(mape(std::vector<double>(5, 110.0), std::vector<double>(5, 100.0)).mape == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(mape(std::vector<double>{90, 220}, a).mape == doctest::Approx(10.0).epsilon(1e-14));
  const auto z = mape(std::vector<double>{1, 90}, std::vector<double>{0, 100});
  CHECK(z.zero == 1);
  CHECK(z.mape == doctest::Approx(10.0));
  CHECK_THROWS_AS(mape(a, std::vector<double>{1}), Error);
  CHECK(mape(std::vector<double>{45, 110}, std::vector<double>{50, 100}).mape ==
        doctest::Approx(mape(std::vector<double>{4.5, 11}, std::vector<double>{5, 10}).mape).epsilon(1e-12));
}

TEST_CASE("score table") {
  const std::vector<TaskScore> single{{"2011-01", "lasso", 7.4412, 5.0, 744, 0}};
  const auto t1 = score_table(single);
  CHECK(t1.find("7.44") != std::string::npos);
  CHECK(t1.find('*') == std::string::npos);

  std::vector<TaskScore> two;
  const double a[3] = {7.111, 8.25, 6.004}, b[3] = {8.0, 9.1, 6.5};
  const char* tasks[3] = {"m1", "m2", "m3"};
  for (int i = 0; i < 3; ++i) {
    two.push_back({tasks[i], "A", a[i], 1, 10, 0});
    two.push_back({tasks[i], "B", b[i], 1, 10, 0});
  }
  const auto t2 = score_table(two);
  std::istringstream in(t2);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("A") < line.find("B"));
  int rows = 0;
  double sum_a = 0;
  while (std::getline(in, line)) {
    if (line.rfind("--", 0) == 0) continue;
    std::istringstream ls(line);
    std::string label, ca, cb;
    ls >> label >> ca >> cb;
    CHECK(ca.back() == '*');
    CHECK(cb.back() != '*');
    if (label == "average") {
      CHECK(std::stod(ca) == doctest::Approx(sum_a / rows).epsilon(0.006));
    } else {
      sum_a += std::stod(ca);
      ++rows;
    }
  }
  CHECK(rows == 3);
  const auto csv = score_csv(two);
  CHECK(csv.rfind("task,model,pinball,mape", 0) == 0);
  CHECK(csv.find("m1,A,7.111,") != std::string::npos);
}

TEST_CASE("task scoring aligns by timestamp") {
  const HourGrid g(CivilHour{2011, 1, 1, 0}, 48);
  std::vector<double> load(48);
  for (std::size_t i = 0; i < 48; ++i) load[i] = 100.0 + static_cast<double>(i);
  const HourlySeries s(g, load, std::vector<double>(48, 50.0));
  QuantileForecast f;
  f.start = CivilHour{2011, 1, 2, 12};
  for (int h = 0; h < 24; ++h) f.rows.push_back(flat_row(136.0 + h));
  const auto sc = score_task("t", "m", f, s);
  CHECK(sc.hours == 12);
  CHECK(sc.missing == 12);
  CHECK(sc.pinball == 0.0);
  CHECK(sc.mape == 0.0);
  f.start = CivilHour{2010, 12, 31, 0};
  CHECK_THROWS_AS(score_task("t", "m", f, s), Error);
}
