// One line per acceptance criterion: PASS/FAIL, name, measured detail and
// wall time against the budget. Exit status is the number of failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "railrecover/fixtures.hpp"
#include "railrecover/milp.hpp"
#include "railrecover/pipeline.hpp"
#include "railrecover/reduce.hpp"
#include "railrecover/solve.hpp"
#include "railrecover/verify.hpp"

using namespace railrecover;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_seconds;
  const bool pass = o.pass && in_time;
  failures += pass ? 0 : 1;
  std::printf("%s  %-28s %s [%.2fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs,
              budget_seconds, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

// Seeds of random instances (at most 10 trips) whose exhaustive search
// branches over at most `cap` binaries.
std::vector<std::uint64_t> seeds(std::size_t count, std::size_t cap, std::uint64_t first) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = first; out.size() < count; ++s) {
    if (brute_force_size(build_network(fixtures::random_instance(s))) <= cap) out.push_back(s);
  }
  return out;
}

bool rows_hold(const MilpModel& m, const std::vector<double>& x) {
  for (const Row& r : m.rows) {
    if (!r.satisfied(x)) return false;
  }
  return true;
}

std::size_t count_active(const Network& n, const Solution& s, std::initializer_list<ActivityKind> kinds) {
  std::size_t k = 0;
  for (const Activity& a : n.activities) {
    for (ActivityKind kind : kinds) k += a.kind == kind && s.is_active(a.id) ? 1 : 0;
  }
  return k;
}

}  // namespace

int main() {
  std::printf("acceptance criteria\n");

  criterion("bottleneck exclusion", 1.0, [] {
    const Scenario s = fixtures::mini_line();
    const Network n = build_network(s);
    const BruteForceResult bf = brute_force_optimum(n);
    // No feasible assignment runs all four trips at their planned times.
    std::size_t both = 0;
    enumerate_feasible(n, [&](const Solution& sol) {
      bool planned = count_active(n, sol, {ActivityKind::Drive}) == n.count(ActivityKind::Drive);
      for (Seconds x : sol.delay) planned = planned && x == 0;
      both += planned ? 1 : 0;
      return true;
    });
    const SolveResult r = solve(formulate(n));
    const bool ok = r.status == SolveStatus::Optimal && r.primal == bf.objective && both == 0 &&
                    bf.objective < static_cast<double>(n.trip_count()) && validate_solution(n, s, *r.solution).pass;
    std::ostringstream d;
    d << "optimum " << r.primal << " = oracle " << bf.objective << " of " << n.trip_count()
      << " trips; both-on-time assignments " << both;
    return Outcome{ok, d.str()};
  });

  criterion("alignment lemma", 10.0, [] {
    // fig1 drives stretch by 120 s: bound ceil(120 / 2) + 1 = 61.
    const auto split = [](Seconds margin) {
      const Network n = build_network(fixtures::fig1(margin));
      std::size_t count = 0;
      enumerate_feasible(n, [&](const Solution& sol) {
        if (count_active(n, sol, {ActivityKind::Drive}) != n.count(ActivityKind::Drive)) return true;
        std::set<std::string> leaders;
        for (const Activity& a : n.activities) {
          if (is_headway(a.kind) && sol.is_active(a.id)) leaders.insert(n.event(a.tail).train);
        }
        count += leaders.size() > 1 ? 1 : 0;
        return true;
      });
      return count;
    };
    const std::size_t at_bound = split(61);
    const std::size_t below = split(60);
    std::ostringstream d;
    d << "misaligned feasible: S=61 -> " << at_bound << ", S=60 -> " << below;
    return Outcome{at_bound == 0 && below > 0, d.str()};
  });

  criterion("contraction equivalence", 300.0, [] {
    std::size_t agree = 0;
    std::size_t expanded = 0;
    std::string first_bad;
    const auto list = seeds(100, 20, 1);
    for (std::uint64_t seed : list) {
      const Scenario s = fixtures::random_instance(seed);
      const Network n = build_network(s);
      const ReducedNetwork r = reduce(n);
      const BruteForceResult a = brute_force_optimum(n);
      BruteForceOptions o;
      o.fixed = &r.fixed;
      const BruteForceResult b = brute_force_optimum(r.network, o);
      bool ok = a.feasible == b.feasible && a.objective == b.objective;
      if (b.feasible) {
        const Solution full = expand_solution(b.solution, r.map, n);
        const bool verified = validate_solution(n, s, full).pass && objective_value(n, full) == b.objective;
        expanded += verified ? 1 : 0;
        ok = ok && verified;
      } else {
        ++expanded;
      }
      agree += ok ? 1 : 0;
      if (!ok && first_bad.empty()) first_bad = " first mismatch seed " + std::to_string(seed);
    }
    std::ostringstream d;
    d << agree << "/" << list.size() << " equal optima, " << expanded << "/" << list.size() << " expansions verified"
      << first_bad;
    return Outcome{agree == list.size() && expanded == list.size(), d.str()};
  });

  criterion("reduction factor", 10.0, [] {
    const Network n = build_network(fixtures::u6_like(300, 1800));
    const std::size_t before = unreduced_binaries(n);
    const ReducedNetwork r = reduce(n);
    FormulateOptions fo;
    fo.fixed = &r.fixed;
    const std::size_t after = formulate(r.network, fo).binary_count();
    const double factor = static_cast<double>(before) / static_cast<double>(after);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu -> %zu binaries, factor %.2f (floor 2.00)", before, after, factor);
    return Outcome{2 * after <= before, buf};
  });

  criterion("solver vs oracle", 600.0, [] {
    std::size_t agree = 0;
    std::string first_bad;
    const auto list = seeds(50, 16, 5000);
    for (std::uint64_t seed : list) {
      const Network n = build_network(fixtures::random_instance(seed));
      const BruteForceResult bf = brute_force_optimum(n);
      SolveParams p;
      p.time_limit = 0;
      const SolveResult r = solve(formulate(n), p);
      const bool ok = bf.feasible ? r.status == SolveStatus::Optimal && r.primal == bf.objective
                                  : r.status == SolveStatus::Infeasible;
      agree += ok ? 1 : 0;
      if (!ok && first_bad.empty()) first_bad = " first mismatch seed " + std::to_string(seed);
    }
    std::ostringstream d;
    d << agree << "/" << list.size() << " optima equal" << first_bad;
    return Outcome{agree == list.size(), d.str()};
  });

  criterion("undisturbed identity", 1.0, [] {
    std::size_t ok = 0;
    std::size_t total = 0;
    for (const Scenario& base : {fixtures::mini_line(), fixtures::u6_like(600, 300)}) {
      const Scenario s = fixtures::undisturbed(base);
      const PipelineResult r = run_pipeline(s, pipeline_options(s));
      double sum = 0;
      for (const Activity& a : r.network.activities) sum += a.kind == ActivityKind::Drive ? a.cost : 0.0;
      bool zero = r.solution.has_value();
      if (zero) {
        for (Seconds x : r.solution->delay) zero = zero && x == 0;
      }
      ++total;
      ok += zero && r.report.pass && r.report.served == s.timetable.trips.size() && r.report.objective == sum ? 1 : 0;
    }
    std::ostringstream d;
    d << ok << "/" << total << " scenarios: all trips served, x = 0, objective = sum of weights";
    return Outcome{ok == total, d.str()};
  });

  criterion("desk-scale optimality", 60.0, [] {
    const Scenario s = fixtures::u6_like(600, 300);
    PipelineOptions o = pipeline_options(s);
    o.params.time_limit = 60;
    const PipelineResult r = run_pipeline(s, o);
    char buf[160];
    std::snprintf(buf, sizeof buf, "status %s, value %.2f, bound %.2f, %lld nodes, %.2fs solve", to_string(r.result.status),
                  r.result.primal, r.result.dual_bound, static_cast<long long>(r.result.nodes), r.result.wall_time);
    return Outcome{r.result.status == SolveStatus::Optimal && r.report.pass, buf};
  });

  criterion("big-M non-cutting", 600.0, [] {
    std::size_t instances = 0;
    std::size_t assignments = 0;
    std::size_t cut = 0;
    std::vector<Scenario> set = {fixtures::mini_line(), fixtures::mini_line(true), fixtures::fig1(60),
                                 fixtures::fig1(61)};
    for (std::uint64_t seed : seeds(50, 16, 5000)) set.push_back(fixtures::random_instance(seed));
    for (const Scenario& s : set) {
      const Network n = build_network(s);
      const MilpModel m = formulate(n);
      for (DelayChoice choice : {DelayChoice::Least, DelayChoice::Greatest}) {
        enumerate_feasible(
            n,
            [&](const Solution& sol) {
              ++assignments;
              cut += rows_hold(m, encode(m, sol)) ? 0 : 1;
              return true;
            },
            {}, choice);
      }
      ++instances;
    }
    std::ostringstream d;
    d << cut << " of " << assignments << " oracle-feasible assignments cut, " << instances << " instances";
    return Outcome{cut == 0 && assignments > 0, d.str()};
  });

  criterion("extended-objective trade-off", 10.0, [] {
    const auto optimum = [](double penalty) {
      Scenario s = fixtures::mini_line(true);
      s.policy.turn_penalty = penalty;
      s.policy.return_penalty = penalty;
      const Network n = build_network(s);
      FormulateOptions fo;
      fo.extended = true;
      const SolveResult r = solve(formulate(n, fo));
      const std::size_t served = count_active(n, *r.solution, {ActivityKind::Drive});
      const std::size_t turns = count_active(n, *r.solution, {ActivityKind::Turn, ActivityKind::Return});
      return std::pair{served, turns};
    };
    const auto [served0, turns0] = optimum(0);
    const auto [served1, turns1] = optimum(100);
    // Oracle: most trips servable without any turn or return.
    const Network n = build_network(fixtures::mini_line(true));
    BruteForceOptions o;
    o.accept = [&](const Solution& sol) { return count_active(n, sol, {ActivityKind::Turn, ActivityKind::Return}) == 0; };
    const BruteForceResult bf = brute_force_optimum(n, o);
    const auto allowed = served0 - static_cast<std::size_t>(bf.objective);
    const bool fewer = turns1 < turns0 || (turns0 == 0 && turns1 == 0);
    std::ostringstream d;
    d << "c_b 0: " << served0 << " trips, " << turns0 << " turns/returns; c_b 100: " << served1 << " trips, " << turns1
      << " turns/returns; allowed loss " << allowed;
    return Outcome{fewer && served0 - served1 <= allowed, d.str()};
  });

  std::printf("%d failed\n", failures);
  return failures;
}
