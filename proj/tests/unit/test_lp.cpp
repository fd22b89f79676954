#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "doctest.h"

#include "railrecover/lp.hpp"

using namespace railrecover;

namespace {

// Maximum of c'x over {row_lb <= Ax <= row_ub, lb <= x <= ub} by enumerating
// every vertex: choose n tight constraints, solve, keep feasible points.
std::optional<double> vertex_optimum(const LpProblem& p) {
  const std::size_t n = p.num_cols();
  std::vector<std::vector<double>> dense(p.num_rows(), std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (auto [r, v] : p.columns[j]) dense[static_cast<std::size_t>(r)][j] = v;
  }
  // Candidate hyperplanes a'x = b.
  std::vector<std::pair<std::vector<double>, double>> planes;
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    if (std::isfinite(p.row_lb[i])) planes.push_back({dense[i], p.row_lb[i]});
    if (std::isfinite(p.row_ub[i])) planes.push_back({dense[i], p.row_ub[i]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    if (std::isfinite(p.col_lb[j])) planes.push_back({e, p.col_lb[j]});
    if (std::isfinite(p.col_ub[j])) planes.push_back({e, p.col_ub[j]});
  }
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = planes[pick[i]].first[j];
        a[i][n] = planes[pick[i]].second;
      }
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c; r < n; ++r) {
          if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        if (std::abs(a[piv][c]) < 1e-12) return;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == c) continue;
          const double f = a[r][c] / a[c][c];
          for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
      }
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
      for (std::size_t j = 0; j < n; ++j) {
        if (x[j] < p.col_lb[j] - 1e-7 || x[j] > p.col_ub[j] + 1e-7) return;
      }
      for (std::size_t i = 0; i < p.num_rows(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) s += dense[i][j] * x[j];
        if (s < p.row_lb[i] - 1e-7 || s > p.row_ub[i] + 1e-7) return;
      }
      double v = 0;
      for (std::size_t j = 0; j < n; ++j) v += p.objective[j] * x[j];
      if (!best || v > *best) best = v;
      return;
    }
    for (std::size_t i = start; i < planes.size(); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LpProblem random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> bound(0, 6);
  LpProblem p;
  p.objective.resize(n);
  p.col_lb.resize(n);
  p.col_ub.resize(n);
  p.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.objective[j] = coef(rng);
    p.col_lb[j] = -bound(rng) / 2.0;
    p.col_ub[j] = p.col_lb[j] + bound(rng);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) terms.push_back({static_cast<int>(j), c});
    }
    const double lo = -bound(rng) * 2.0;
    const int kind = bound(rng) % 3;
    p.add_row(terms, kind == 1 ? -kLpInfinity : lo, kind == 2 ? kLpInfinity : lo + bound(rng) * 2.0);
  }
  return p;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("textbook maximum") {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, 0 <= x <= 3, y >= 0 -> (3, 1), 11.
  LpProblem p;
  p.objective = {3, 2};
  p.col_lb = {0, 0};
  p.col_ub = {3, kLpInfinity};
  p.columns.resize(2);
  p.add_row({{0, 1}, {1, 1}}, -kLpInfinity, 4);
  p.add_row({{0, 1}, {1, 3}}, -kLpInfinity, 6);
  LpSolver lp(p);
  const LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(11));
  CHECK(r.x[0] == doctest::Approx(3));
  CHECK(r.x[1] == doctest::Approx(1));
}

TEST_CASE("infeasible rows") {
  LpProblem p;
  p.objective = {1};
  p.col_lb = {0};
  p.col_ub = {10};
  p.columns.resize(1);
  p.add_row({{0, 1}}, 2, kLpInfinity);
  p.add_row({{0, 1}}, -kLpInfinity, 1);
  LpSolver lp(p);
  CHECK(lp.solve().status == LpStatus::Infeasible);
}

TEST_CASE("unbounded direction") {
  LpProblem p;
  p.objective = {1, 0};
  p.col_lb = {0, 0};
  p.col_ub = {kLpInfinity, 1};
  p.columns.resize(2);
  p.add_row({{0, 1}, {1, -1}}, 0, kLpInfinity);
  LpSolver lp(p);
  CHECK(lp.solve().status == LpStatus::Unbounded);
}

TEST_CASE("equality rows") {
  // max x + y with x - y = 1, x + y <= 5 -> x = 3, y = 2.
  LpProblem p;
  p.objective = {1, 1};
  p.col_lb = {0, 0};
  p.col_ub = {kLpInfinity, kLpInfinity};
  p.columns.resize(2);
  p.add_row({{0, 1}, {1, -1}}, 1, 1);
  p.add_row({{0, 1}, {1, 1}}, -kLpInfinity, 5);
  LpSolver lp(p);
  const LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(5));
  CHECK(r.x[0] - r.x[1] == doctest::Approx(1));
}

TEST_CASE("random small LPs match vertex enumeration") {
  std::mt19937_64 rng(2024);
  int optimal = 0;
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + k % 3;
    const LpProblem p = random_lp(rng, n, 1 + k % 4);
    const auto expect = vertex_optimum(p);
    LpSolver lp(p);
    const LpResult r = lp.solve();
    if (expect) {
      REQUIRE_MESSAGE(r.status == LpStatus::Optimal, "instance " << k);
      CHECK_MESSAGE(r.objective == doctest::Approx(*expect).epsilon(1e-7), "instance " << k);
      ++optimal;
    } else {
      CHECK_MESSAGE(r.status == LpStatus::Infeasible, "instance " << k);
    }
  }
  CHECK(optimal > 100);
}

TEST_CASE("warm restarts after bound changes agree with cold solves") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int k = 0; k < 200; ++k) {
    LpProblem p = random_lp(rng, 4, 3);
    LpSolver warm(p);
    (void)warm.solve();
    for (int step = 0; step < 4; ++step) {
      const int j = pick(rng);
      const double lo = p.col_lb[static_cast<std::size_t>(j)];
      const double hi = p.col_ub[static_cast<std::size_t>(j)];
      const double mid = std::floor((lo + hi) / 2);
      const double nlo = step % 2 == 0 ? lo : std::min(mid, hi);
      const double nhi = step % 2 == 0 ? std::max(mid, lo) : hi;
      p.col_lb[static_cast<std::size_t>(j)] = nlo;
      p.col_ub[static_cast<std::size_t>(j)] = nhi;
      warm.set_col_bounds(j, nlo, nhi);
      const LpResult a = warm.solve();
      LpSolver cold_solver(p);
      const LpResult b = cold_solver.solve();
      REQUIRE_MESSAGE(a.status == b.status, "instance " << k << " step " << step);
      if (a.status == LpStatus::Optimal) CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
    }
  }
}

}  // TEST_SUITE
