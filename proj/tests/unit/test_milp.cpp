#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace rrtest;

namespace {

Network two_events(Seconds t0, Seconds t1) {
  Network n;
  for (Seconds t : {t0, t1}) {
    Event e;
    e.id = EventId(static_cast<std::int32_t>(n.events.size()));
    e.kind = EventKind::Departure;
    e.time = t;
    n.events.push_back(e);
  }
  return n;
}

void add_pair(Network& n, Seconds headway, Seconds margin) {
  Activity a;
  a.kind = ActivityKind::TrackHeadway;
  a.id = ActivityId(static_cast<std::int32_t>(n.activities.size()));
  a.partner = ActivityId(a.id.value + 1);
  a.tail = EventId(0);
  a.head = EventId(1);
  a.headway = headway;
  a.margin = margin;
  Activity b = a;
  b.id = a.partner;
  b.partner = a.id;
  b.tail = a.head;
  b.head = a.tail;
  n.activities.push_back(a);
  n.activities.push_back(b);
  n.reindex();
}

std::size_t rows_tagged(const MilpModel& m, RowTag tag) {
  std::size_t k = 0;
  for (const Row& r : m.rows) k += r.tag == tag ? 1 : 0;
  return k;
}

std::size_t vars_of(const MilpModel& m, VarKind kind) {
  std::size_t k = 0;
  for (const Variable& v : m.vars) k += v.kind == kind ? 1 : 0;
  return k;
}

bool rows_hold(const MilpModel& m, const std::vector<double>& x) {
  for (const Row& r : m.rows) {
    if (!r.satisfied(x)) return false;
  }
  for (std::size_t j = 0; j < m.vars.size(); ++j) {
    if (x[j] < m.vars[j].lb - 1e-9 || x[j] > m.vars[j].ub + 1e-9) return false;
  }
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("milp") {

TEST_CASE("big M follows the displayed formula") {
  Network n = two_events(0, 0);
  add_pair(n, 600, 60);
  CHECK(compute_big_m(n, 300) == 960.0);

  Network flat = two_events(100, 100);
  add_pair(flat, 0, 0);
  CHECK(compute_big_m(flat, 0) == 0.0);

  CHECK(compute_big_m(two_events(0, 500), 240) == 240.0);  // no activities

  // Scheduled gaps enter the maximum.
  Network gap = two_events(0, 1000);
  add_pair(gap, 100, 20);
  CHECK(compute_big_m(gap, 300) == 300.0 + 1000 + 120);
}

TEST_CASE("mini line has two track pairs and one station pair") {
  const Network n = build_network(fixtures::mini_line());
  const MilpModel m = formulate(n);
  CHECK(vars_of(m, VarKind::Track) == 4);
  CHECK(vars_of(m, VarKind::Station) == 2);
  CHECK(rows_tagged(m, RowTag::TrackPair) == 2);
  CHECK(rows_tagged(m, RowTag::StationPair) == 1);
  CHECK(rows_tagged(m, RowTag::TrackPair) + rows_tagged(m, RowTag::StationPair) == 3);
  // One station row per coupled pair of each directed conflict.
  std::size_t coupled = 0;
  for (const auto& c : n.station_conflicts) coupled += c.pairs.size();
  CHECK(rows_tagged(m, RowTag::StationHeadway) == coupled);
  CHECK(m.big_m == compute_big_m(n, n.max_delay));
}

TEST_CASE("undisturbed model has no ordering variables") {
  const MilpModel m = formulate(build_network(fixtures::undisturbed(fixtures::mini_line())));
  CHECK(vars_of(m, VarKind::Track) == 0);
  CHECK(vars_of(m, VarKind::Station) == 0);
  CHECK(rows_tagged(m, RowTag::TrackHeadway) == 0);
  CHECK(rows_tagged(m, RowTag::StationHeadway) == 0);
}

TEST_CASE("extended objective subtracts turn penalties") {
  Scenario s = fixtures::mini_line(true);
  s.policy.turn_penalty = 5;
  const Network n = build_network(s);
  Solution sol = Solution::original(n);
  const auto turns = of_kind(n, ActivityKind::Turn);
  REQUIRE(!turns.empty());
  sol.active[turns.front().index()] = 1;
  FormulateOptions fo;
  fo.extended = true;
  const MilpModel m = formulate(n, fo);
  CHECK(m.objective(encode(m, sol)) == doctest::Approx(4.0 - 5.0));
  CHECK(objective_value(n, sol, true) == doctest::Approx(4.0 - 5.0));
  CHECK(formulate(n).objective(encode(formulate(n), sol)) == doctest::Approx(4.0));
}

TEST_CASE("formulate rejects negative weights and unpaired headways") {
  Network n = build_network(fixtures::mini_line());
  Network neg = n;
  for (Activity& a : neg.activities) {
    if (a.kind == ActivityKind::Drive) {
      a.cost = -1;
      break;
    }
  }
  CHECK_THROWS_AS((void)formulate(neg), ValidationError);
  Network lonely = n;
  for (Activity& a : lonely.activities) {
    if (a.kind == ActivityKind::TrackHeadway) {
      a.partner = ActivityId();
      break;
    }
  }
  CHECK_THROWS_AS((void)formulate(lonely), ValidationError);
}

TEST_CASE("fixed variables become bounds") {
  const Network n = build_network(fixtures::random_instance(3));
  const FixedVars f = fix_natural_precedences(n);
  FormulateOptions fo;
  fo.fixed = &f;
  const MilpModel m = formulate(n, fo);
  for (const auto& [id, v] : f.values) {
    const int j = m.activity_var[id.index()];
    REQUIRE(j >= 0);
    CHECK(m.vars[static_cast<std::size_t>(j)].lb == v.value);
    CHECK(m.vars[static_cast<std::size_t>(j)].ub == v.value);
  }
}

TEST_CASE("LP text export: empty model") {
  const std::string text = export_model(MilpModel{});
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
  CHECK(parse_model(text) == MilpModel{});
}

TEST_CASE("LP text export matches the golden file and round-trips") {
  const Network n = build_network(fixtures::mini_line());
  FormulateOptions fo;
  fo.name = "mini_line";
  const MilpModel m = formulate(n, fo);
  const std::string text = export_model(m);
  CHECK(text == export_model(formulate(n, fo)));
  CHECK(text == read_file(data_path("mini_line.lp.txt")));
  CHECK(parse_model(text) == m);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Network r = build_network(fixtures::random_instance(seed));
    const MilpModel rm = formulate(r);
    CHECK(parse_model(export_model(rm)) == rm);
  }
}

TEST_CASE("rows accept exactly the verified assignments") {
  std::size_t instances = 0;
  for (std::uint64_t seed : seeds_with_binaries(12, 1, 14, 300)) {
    const Scenario s = fixtures::random_instance(seed);
    const Network n = build_network(s);
    const MilpModel m = formulate(n);
    std::vector<int> free;
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
      if (m.vars[j].type == VarType::Binary && !m.vars[j].fixed()) free.push_back(static_cast<int>(j));
    }
    REQUIRE(free.size() <= 14);
    std::vector<double> base(m.vars.size(), 0.0);
    for (std::size_t j = 0; j < m.vars.size(); ++j) base[j] = m.vars[j].lb;
    std::size_t agree = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
      std::vector<double> x = base;
      for (std::size_t k = 0; k < free.size(); ++k) x[static_cast<std::size_t>(free[k])] = (mask >> k) & 1U;
      const auto full = check_delay_system(m, x);
      const bool model_ok = full.has_value() && rows_hold(m, *full);
      Solution sol = decode(m, x);
      bool verified = false;
      if (auto d = solve_delays(n, sol)) {
        sol.delay = *d;
        verified = validate_solution(n, s, sol).pass;
      }
      CHECK_MESSAGE(model_ok == verified, "seed " << seed << " mask " << mask);
      if (model_ok && verified) {
        CHECK(m.objective(*full) == doctest::Approx(objective_value(n, sol)));
        ++agree;
      }
    }
    CHECK(agree > 0);
    ++instances;
  }
  CHECK(instances == 12);
}

TEST_CASE("big M never cuts off a verified solution") {
  for (std::uint64_t seed : seeds_with_binaries(12, 1, 16, 500)) {
    const Scenario s = fixtures::random_instance(seed);
    const Network n = build_network(s);
    const MilpModel m = formulate(n);
    std::size_t seen = 0;
    for (DelayChoice choice : {DelayChoice::Least, DelayChoice::Greatest}) {
      enumerate_feasible(
          n,
          [&](const Solution& sol) {
            ++seen;
            CHECK(validate_solution(n, s, sol).pass);
            const auto x = encode(m, sol);
            for (const Row& r : m.rows) CHECK_MESSAGE(r.satisfied(x), "seed " << seed << " row " << r.name);
            // Complementarity of the ordering pairs.
            for (const Activity& a : n.activities) {
              if (is_headway(a.kind)) CHECK(sol.is_active(a.id) + sol.is_active(a.partner) == 1);
            }
            return true;
          },
          {}, choice);
    }
    CHECK(seen > 0);
  }
}

}  // TEST_SUITE
