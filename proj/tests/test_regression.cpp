#include <doctest.h>

#include <fmt/format.h>

#include <cmath>
#include <random>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"
#include "support/oracles.hpp"

using namespace mymove;

namespace {

struct Planted {
  DesignMatrix x;
  std::vector<double> y;
  std::vector<std::vector<double>> rows;
};

/// Intercept plus `signal` columns with the given betas and `noise` columns
/// with zero effect.
Planted plant(std::mt19937_64& rng, std::size_t n, const std::vector<double>& beta, std::size_t noise,
              double sigma = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  Planted p;
  p.x.rows = n;
  p.x.cols = beta.size() + noise;
  p.x.names.push_back("intercept");
  for (std::size_t j = 1; j < beta.size(); ++j) p.x.names.push_back(fmt::format("x{}", j));
  for (std::size_t j = 0; j < noise; ++j) p.x.names.push_back(fmt::format("noise{}", j));
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> row{1.0};
    for (std::size_t j = 1; j < p.x.cols; ++j) row.push_back(z(rng));
    double y = sigma * z(rng);
    for (std::size_t j = 0; j < beta.size(); ++j) y += beta[j] * row[j];
    p.x.values.insert(p.x.values.end(), row.begin(), row.end());
    p.rows.push_back(row);
    p.y.push_back(y);
  }
  return p;
}

ErrorCode error_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("noiseless line") {
  DesignMatrix x{5, 2, {1, 0, 1, 1, 1, 2, 1, 3, 1, 4}, {"intercept", "x"}};
  std::vector<double> y{1, 3, 5, 7, 9};
  auto r = ols_fit(x, y);
  CHECK(r.find("intercept")->coef == doctest::Approx(1.0));
  CHECK(r.find("x")->coef == doctest::Approx(2.0));
  CHECK(r.adjusted_r2 == doctest::Approx(1.0));
  CHECK(r.find("missing") == nullptr);
}

TEST_CASE("rank deficiency and shape errors") {
  DesignMatrix dup{4, 3, {1, 1, 1, 1, 2, 2, 1, 3, 3, 1, 5, 5}, {"intercept", "a", "b"}};
  std::vector<double> y{1, 2, 3, 4};
  CHECK(error_of([&] { ols_fit(dup, y); }) == ErrorCode::kRankDeficient);
  DesignMatrix wide{2, 3, {1, 2, 3, 1, 5, 6}, {"intercept", "a", "b"}};
  CHECK(error_of([&] { ols_fit(wide, std::vector<double>{1, 2}); }) == ErrorCode::kRankDeficient);
  DesignMatrix x{2, 1, {1, 1}, {"intercept"}};
  CHECK_THROWS_AS(ols_fit(x, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("ols matches the normal-equation oracle") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = plant(rng, 40 + trial * 5, {0.5, 1.0, -2.0, 0.25}, 2);
    auto fit = ols_fit(p.x, p.y);
    auto want = oracle::normal_equations(p.rows, p.y);
    for (std::size_t j = 0; j < p.x.cols; ++j) {
      REQUIRE(std::abs(fit.params[j].coef - want.coef[j]) < 1e-8);
      REQUIRE(std::abs(fit.params[j].se - want.se[j]) < 1e-8);
      REQUIRE(fit.params[j].t == doctest::Approx(fit.params[j].coef / fit.params[j].se));
    }
    REQUIRE(fit.df == p.x.rows - p.x.cols);
  }
}

TEST_CASE("planted coefficients are recovered within 3 SE at 500 rows") {
  std::mt19937_64 rng(2);
  const std::vector<double> beta{3.0, 0.8, -1.5, 0.3};
  auto p = plant(rng, 500, beta, 0, 2.0);
  auto fit = ols_fit(p.x, p.y);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    CAPTURE(j);
    CHECK(std::abs(fit.params[j].coef - beta[j]) <= 3 * fit.params[j].se);
    CHECK(fit.params[j].p < 0.05);
  }
}

TEST_CASE("p-values match a numerically integrated t density") {
  // Two-sided tail by Simpson's rule over [|t|, 60] of the Student t pdf.
  auto two_sided = [](double t, double df) {
    auto pdf = [&](double x) {
      return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI) *
             std::pow(1 + x * x / df, -(df + 1) / 2);
    };
    const int n = 200000;
    double a = std::abs(t), b = 60.0, h = (b - a) / n, sum = pdf(a) + pdf(b);
    for (int i = 1; i < n; ++i) sum += pdf(a + i * h) * (i % 2 ? 4 : 2);
    return 2 * sum * h / 3;
  };
  std::mt19937_64 rng(4);
  auto p = plant(rng, 12, {0.2, 0.3}, 1);
  auto fit = ols_fit(p.x, p.y);
  for (const auto& e : fit.params) {
    CAPTURE(e.name);
    CHECK(e.p == doctest::Approx(two_sided(e.t, static_cast<double>(fit.df))).epsilon(1e-6));
  }
}

TEST_CASE("backward elimination examples") {
  std::mt19937_64 rng(6);
  auto p = plant(rng, 300, {1.0, 1.2}, 1);
  auto r = backward_eliminate(p.x, p.y, 0.01);
  CHECK(r.model.find("x1"));
  CHECK_FALSE(r.model.find("noise0"));
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].dropped == "noise0");
  CHECK(r.trace[0].p >= 0.01);

  auto all_noise = plant(rng, 300, {1.0}, 4);
  r = backward_eliminate(all_noise.x, all_noise.y, 0.01);
  CHECK(r.model.params.size() == 1);
  CHECK(r.model.params[0].name == "intercept");

  auto single = plant(rng, 300, {1.0, 2.0}, 0);
  r = backward_eliminate(single.x, single.y);
  CHECK(r.trace.empty());
  CHECK(r.model.params.size() == 2);

  CHECK_THROWS_AS(backward_eliminate(single.x, single.y, 0.0), Error);
}

TEST_CASE("backward elimination removes planted noise in at least 95 of 100 trials") {
  int clean = 0, clean_default = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    auto p = plant(rng, 200, {1.0, 0.8, -0.6}, 3);
    auto keeps_only_signal = [&](const EliminationResult& r) {
      return r.model.params.size() == 3 && r.model.find("x1") && r.model.find("x2");
    };
    clean += keeps_only_signal(backward_eliminate(p.x, p.y, 0.01));
    clean_default += keeps_only_signal(backward_eliminate(p.x, p.y));
  }
  MESSAGE(fmt::format("alpha 0.01: {}/100, alpha 0.15: {}/100", clean, clean_default));
  CHECK(clean >= 95);
}
