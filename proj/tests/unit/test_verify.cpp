#include <set>

#include "support.hpp"

using namespace rrtest;

namespace {

bool has_check(const ValidationReport& r, const std::string& check) {
  for (const Violation& v : r.violations) {
    if (v.check == check) return true;
  }
  return false;
}

// Train whose event comes first in each chosen order, over orders between
// running trains; aligned when there is only one.
std::set<std::string> leaders(const Network& n, const Solution& sol) {
  std::set<std::string> out;
  for (const Activity& a : n.activities) {
    if (!is_headway(a.kind) || !sol.is_active(a.id)) continue;
    out.insert(n.event(a.tail).train);
  }
  return out;
}

bool all_drives(const Network& n, const Solution& sol) {
  for (const Activity& a : n.activities) {
    if (a.kind == ActivityKind::Drive && !sol.is_active(a.id)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("undisturbed original timetable passes") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = fixtures::undisturbed(fixtures::random_instance(seed));
    const Network n = build_network(s);
    const ValidationReport r = validate_solution(n, s, Solution::original(n));
    CHECK_MESSAGE(r.pass, "seed " << seed);
    CHECK(r.served == s.timetable.trips.size());
    CHECK(r.cancelled == 0);
    double weight = 0;
    for (const Trip& t : s.timetable.trips) {
      const auto it = s.policy.weight_overrides.find(t.id);
      weight += it == s.policy.weight_overrides.end() ? 1.0 : it->second;
    }
    CHECK(r.objective == doctest::Approx(weight));
  }
}

TEST_CASE("the planned timetable runs into the blockage") {
  const Scenario s = fixtures::mini_line();
  const Network n = build_network(s);
  const ValidationReport r = validate_solution(n, s, Solution::original(n));
  CHECK(!r.pass);
  CHECK(!r.violations.empty());
}

TEST_CASE("single faults are reported by family") {
  const Scenario s = fixtures::mini_line();
  const Network n = build_network(s);
  const BruteForceResult bf = brute_force_optimum(n);
  REQUIRE(bf.feasible);
  REQUIRE(validate_solution(n, s, bf.solution).pass);

  SUBCASE("delay above the cap") {
    Solution sol = bf.solution;
    for (const Event& e : n.events) {
      if (e.max_delay > 0) {
        sol.delay[e.id.index()] = e.max_delay + 1;
        break;
      }
    }
    CHECK(has_check(validate_solution(n, s, sol), "domain"));
  }
  SUBCASE("negative delay") {
    Solution sol = bf.solution;
    for (const Event& e : n.events) {
      if (e.time) {
        sol.delay[e.id.index()] = -1;
        break;
      }
    }
    CHECK(has_check(validate_solution(n, s, sol), "domain"));
  }
  SUBCASE("both orders chosen") {
    Solution sol = bf.solution;
    const auto track = of_kind(n, ActivityKind::TrackHeadway);
    REQUIRE(!track.empty());
    sol.active[track[0].index()] = 1;
    sol.active[n.activity(track[0]).partner.index()] = 1;
    CHECK(has_check(validate_solution(n, s, sol), "track_pair"));
  }
  SUBCASE("neither station order chosen") {
    Solution sol = bf.solution;
    const auto station = of_kind(n, ActivityKind::StationHeadway);
    REQUIRE(!station.empty());
    sol.active[station[0].index()] = 0;
    sol.active[n.activity(station[0]).partner.index()] = 0;
    CHECK(has_check(validate_solution(n, s, sol), "station_pair"));
  }
  SUBCASE("dropping one drive breaks flow") {
    Solution sol = bf.solution;
    for (const Activity& a : n.activities) {
      if (a.kind == ActivityKind::Drive && sol.is_active(a.id)) {
        sol.active[a.id.index()] = 0;
        break;
      }
    }
    CHECK(has_check(validate_solution(n, s, sol), "flow"));
  }
  SUBCASE("arriving before the minimal run") {
    Solution sol = bf.solution;
    bool changed = false;
    for (const Activity& a : n.activities) {
      if (a.kind == ActivityKind::Drive && sol.is_active(a.id) && n.event(a.tail).max_delay > 0) {
        sol.delay[a.tail.index()] = n.event(a.tail).max_delay;
        sol.delay[a.head.index()] = 0;
        changed = true;
        break;
      }
    }
    REQUIRE(changed);
    CHECK(has_check(validate_solution(n, s, sol), "min"));
  }
  SUBCASE("binary out of range") {
    Solution sol = bf.solution;
    sol.active[0] = 2;
    CHECK(has_check(validate_solution(n, s, sol), "domain"));
  }
  SUBCASE("violation cap") {
    Solution sol = bf.solution;
    for (auto& x : sol.delay) x = -1;
    VerifyOptions o;
    o.max_violations = 2;
    const ValidationReport r = validate_solution(n, s, sol, o);
    CHECK(!r.pass);
    CHECK(r.violations.size() == 2);
  }
}

TEST_CASE("delays outside the recovery window are rejected") {
  const Scenario s = fixtures::u6_like(600, 300);
  const Network n = build_network(s);
  // Take a verified solution and push a late event.
  const ReducedNetwork r = reduce(n);
  FormulateOptions fo;
  fo.fixed = &r.fixed;
  const SolveResult res = solve(formulate(r.network, fo));
  REQUIRE(res.solution.has_value());
  Solution sol = expand_solution(*res.solution, r.map, n);
  REQUIRE(validate_solution(n, s, sol).pass);
  bool pushed = false;
  for (const Event& e : n.events) {
    if (e.time && e.max_delay == 0 && *e.time > s.disruption.end + s.policy.recovery) {
      sol.delay[e.id.index()] = 30;
      pushed = true;
      break;
    }
  }
  REQUIRE(pushed);
  CHECK(has_check(validate_solution(n, s, sol), "recovery"));
}

TEST_CASE("objective counts served trips by weight") {
  Scenario s = fixtures::mini_line();
  s.policy.weight_overrides = {{"T1/U1/A-B", 2.5}};
  const Network n = build_network(s);
  Solution sol = Solution::empty(n);
  CHECK(objective_value(n, sol) == 0.0);
  double expect = 0;
  for (const Activity& a : n.activities) {
    if (a.kind != ActivityKind::Drive) continue;
    sol.active[a.id.index()] = 1;
    expect += a.trips.front() == "T1/U1/A-B" ? 2.5 : 1.0;
  }
  CHECK(objective_value(n, sol) == doctest::Approx(expect));
  CHECK(expect == doctest::Approx(5.5));
}

TEST_CASE("least and greatest delays bracket every feasible schedule") {
  for (std::uint64_t seed : seeds_with_binaries(8, 1, 12, 40)) {
    const Scenario s = fixtures::random_instance(seed);
    const Network n = build_network(s);
    enumerate_feasible(n, [&](const Solution& sol) {
      const auto lo = solve_delays(n, sol, DelayChoice::Least);
      const auto hi = solve_delays(n, sol, DelayChoice::Greatest);
      REQUIRE(lo.has_value());
      REQUIRE(hi.has_value());
      for (std::size_t v = 0; v < lo->size(); ++v) CHECK((*lo)[v] <= (*hi)[v]);
      Solution a = sol;
      a.delay = *lo;
      Solution b = sol;
      b.delay = *hi;
      CHECK(validate_solution(n, s, a).pass);
      CHECK(validate_solution(n, s, b).pass);
      return true;
    });
  }
}

TEST_CASE("pruned brute force equals plain enumeration of every mask") {
  for (std::uint64_t seed : seeds_with_binaries(10, 4, 16, 200)) {
    const Scenario s = fixtures::random_instance(seed);
    const Network n = build_network(s);
    const MilpModel m = formulate(n);
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
      if (m.vars[j].type == VarType::Binary && !m.vars[j].fixed()) free.push_back(j);
    }
    REQUIRE(free.size() <= 16);
    std::optional<double> best;
    std::uint64_t feasible = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
      std::vector<double> x(m.vars.size());
      for (std::size_t j = 0; j < m.vars.size(); ++j) x[j] = m.vars[j].lb;
      for (std::size_t k = 0; k < free.size(); ++k) x[free[k]] = (mask >> k) & 1U;
      Solution sol = decode(m, x);
      const auto d = solve_delays(n, sol);
      if (!d) continue;
      sol.delay = *d;
      if (!validate_solution(n, s, sol).pass) continue;
      ++feasible;
      const double v = objective_value(n, sol);
      if (!best || v > *best) best = v;
    }
    const BruteForceResult bf = brute_force_optimum(n);
    CHECK_MESSAGE(bf.feasible == best.has_value(), "seed " << seed);
    if (best) CHECK_MESSAGE(bf.objective == *best, "seed " << seed);
    CHECK(enumerate_feasible(n, [](const Solution&) { return true; }) == feasible);
  }
}

TEST_CASE("brute force respects its cap and tie rule") {
  const Network n = build_network(fixtures::mini_line());
  BruteForceOptions tiny;
  tiny.cap = 1;
  CHECK_THROWS((void)brute_force_optimum(n, tiny));
  const BruteForceResult a = brute_force_optimum(n);
  const BruteForceResult b = brute_force_optimum(n);
  CHECK(a.solution == b.solution);
  CHECK(a.free_binaries == brute_force_size(n));
  CHECK(a.objective == 2.0);
}

TEST_CASE("opposite trains through a station keep one order when the margin is large enough") {
  // fig1: drives may stretch by 120 s, so the bound is a margin above 60 s.
  const auto misaligned = [](Seconds margin) {
    const Scenario s = fixtures::fig1(margin);
    const Network n = build_network(s);
    std::size_t both = 0;
    std::size_t split = 0;
    enumerate_feasible(n, [&](const Solution& sol) {
      if (!all_drives(n, sol)) return true;
      ++both;
      if (leaders(n, sol).size() > 1) ++split;
      return true;
    });
    CHECK(both > 0);
    return split;
  };
  CHECK(misaligned(61) == 0);
  CHECK(misaligned(90) == 0);
  CHECK(misaligned(60) > 0);
  CHECK(misaligned(30) > 0);

  CHECK(validate_safety_margins(build_network(fixtures::fig1(61))).empty());
  const auto low = validate_safety_margins(build_network(fixtures::fig1(60)));
  REQUIRE(!low.empty());
  CHECK(low.front().required == 61);
  CHECK(low.front().max_slack == 120);
}

}  // TEST_SUITE
