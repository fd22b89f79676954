#include <sstream>

#include "support.hpp"

using namespace rrtest;

namespace {

std::size_t lines(const std::string& s) {
  std::size_t k = 0;
  for (char c : s) k += c == '\n' ? 1 : 0;
  return k;
}

}  // namespace

TEST_SUITE("benchmark") {

TEST_CASE("empty scenario set gives an empty table") {
  const auto rows = run_benchmark({}, {});
  CHECK(rows.empty());
  CHECK(lines(format_table(rows)) == 1);
  CHECK(lines(format_csv(rows)) == 1);
}

TEST_CASE("a five-minute blockage solves to optimality") {
  BenchmarkParams p;
  p.time_limit = 60;
  p.budget = 10;
  const Scenario s = with_duration(fixtures::u6_like(600, 300), 300);
  const auto rows = run_benchmark({s}, p);
  REQUIRE(rows.size() == 1);
  const RunSummaryRow& r = rows[0];
  CHECK(r.duration == 300);
  CHECK(r.status == "opt");
  REQUIRE(r.value.has_value());
  REQUIRE(r.upper_bound.has_value());
  CHECK(*r.upper_bound == doctest::Approx(*r.value));
  CHECK(r.value_60s.has_value());
  CHECK(r.reduction >= 1.0);
  CHECK(r.trips == s.timetable.trips.size());

  // The value column is the verifier's objective of an independent run.
  const PipelineResult pr = run_pipeline(s, pipeline_options(s));
  REQUIRE(pr.solution.has_value());
  CHECK(pr.report.pass);
  CHECK(*r.value == doctest::Approx(pr.report.objective));

  const std::string table = format_table(rows);
  CHECK(table.find(" opt ") != std::string::npos);
  CHECK(table.rfind("  dur", 0) == 0);
}

TEST_CASE("binary counts grow with the blockage duration") {
  BenchmarkParams p;
  p.time_limit = 1;
  p.budget_60s = false;
  std::vector<Scenario> set;
  for (Seconds minutes : {5, 10, 15, 20, 30}) set.push_back(with_duration(fixtures::u6_like(300, 300), minutes * 60));
  const auto rows = run_benchmark(set, p);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].error.empty());
    CHECK(rows[i].duration == (std::vector<Seconds>{5, 10, 15, 20, 30})[i] * 60);
    if (i > 0) CHECK(rows[i].binaries >= rows[i - 1].binaries);
    if (rows[i].value) CHECK(*rows[i].value <= *rows[i].upper_bound + 1e-9);
  }
  CHECK(rows.back().binaries > rows.front().binaries);
}

TEST_CASE("a failing row is recorded and the run continues") {
  Scenario bad = fixtures::mini_line();
  bad.disruption.tracks = {"nowhere"};
  BenchmarkParams p;
  p.time_limit = 10;
  p.budget_60s = false;
  const auto rows = run_benchmark({bad, fixtures::mini_line()}, p);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status == "error");
  CHECK(!rows[0].error.empty());
  CHECK(rows[1].status == "opt");
  CHECK(rows[1].value == 2.0);
  const std::string table = format_table(rows);
  CHECK(table.find("error:") != std::string::npos);
}

TEST_CASE("csv has one line per row and fixed columns") {
  BenchmarkParams p;
  p.time_limit = 10;
  p.budget = 5;
  const auto rows = run_benchmark({fixtures::mini_line(), fixtures::mini_line(true)}, p);
  const std::string csv = format_csv(rows);
  CHECK(lines(csv) == 3);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "dur,bin,int,trips,value,bound,time,status,value_60s,reduction,error");
  for (std::string line; std::getline(in, line);) {
    CHECK(std::count(line.begin(), line.end(), ',') == 10);
    CHECK(line.find(",opt,") != std::string::npos);
  }
}

TEST_CASE("with_duration moves only the blockage end") {
  const Scenario s = fixtures::u6_like(600, 300);
  const Scenario t = with_duration(s, 1200);
  CHECK(t.disruption.start == s.disruption.start);
  CHECK(t.disruption.end == s.disruption.start + 1200);
  CHECK(t.disruption.tracks == s.disruption.tracks);
}

}  // TEST_SUITE
