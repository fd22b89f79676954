#include <map>
#include <regex>
#include <sstream>

#include "support.hpp"

using namespace rrtest;

namespace {

struct Polyline {
  std::string cls;
  std::string vehicle;
  std::vector<std::string> trips;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

struct Rect {
  double x = 0, y = 0, w = 0, h = 0;
  std::vector<std::string> tracks;
};

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string unescape(std::string s) {
  for (auto [from, to] : {std::pair{"&gt;", ">"}, {"&lt;", "<"}, {"&quot;", "\""}, {"&amp;", "&"}}) {
    for (std::size_t p; (p = s.find(from)) != std::string::npos;) s.replace(p, std::string(from).size(), to);
  }
  return s;
}

std::vector<Polyline> polylines(const std::string& svg) {
  static const std::regex re(
      R"re(<polyline class="([a-z]+)" data-vehicle="([^"]*)" data-trips="([^"]*)" points="([^"]*)"[^>]*?(stroke-dasharray)?[^>]*/>)re");
  std::vector<Polyline> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    Polyline p;
    p.cls = (*it)[1];
    p.vehicle = unescape((*it)[2]);
    p.trips = words(unescape((*it)[3]));
    p.dashed = it->str().find("stroke-dasharray") != std::string::npos;
    for (const auto& pt : words((*it)[4])) {
      const auto comma = pt.find(',');
      p.points.push_back({std::stod(pt.substr(0, comma)), std::stod(pt.substr(comma + 1))});
    }
    out.push_back(p);
  }
  return out;
}

std::optional<Rect> blockage(const std::string& svg) {
  static const std::regex re(
      R"re(<rect class="blockage" data-tracks="([^"]*)" x="([0-9.]+)" y="([0-9.]+)" width="([0-9.]+)" height="([0-9.]+)")re");
  std::smatch m;
  if (!std::regex_search(svg, m, re)) return std::nullopt;
  return Rect{std::stod(m[2]), std::stod(m[3]), std::stod(m[4]), std::stod(m[5]), words(unescape(m[1]))};
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t k = 0;
  for (std::size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++k;
  return k;
}

// Every served trip is one drive segment of exactly one polyline, and no
// segment on a blocked track enters it inside the shaded interval. A train
// already in the section when the blockage starts is drawn across its left
// edge; returns how many such segments there are.
std::size_t check_fidelity(const Network& n, const Solution& sol, const std::string& svg) {
  std::size_t carried = 0;
  std::map<std::string, const Activity*> drive_of;
  for (const Activity& a : n.activities) {
    if (a.kind == ActivityKind::Drive && sol.is_active(a.id)) drive_of[a.trips.front()] = &a;
  }
  std::map<std::string, int> seen;
  const auto rect = blockage(svg);
  for (const Polyline& p : polylines(svg)) {
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
      const auto [x0, y0] = p.points[i];
      const auto [x1, y1] = p.points[i + 1];
      CHECK(x1 >= x0 - 1e-9);  // time runs forward
      if (y0 == y1) continue;
      REQUIRE(k < p.trips.size());
      const std::string& trip = p.trips[k++];
      ++seen[trip];
      REQUIRE(drive_of.count(trip) == 1);
      if (rect && std::find(rect->tracks.begin(), rect->tracks.end(), drive_of[trip]->track) != rect->tracks.end()) {
        const bool overlap = x1 > rect->x + 1e-9 && x0 < rect->x + rect->w - 1e-9;
        CHECK_MESSAGE(!(overlap && x0 >= rect->x - 1e-9), trip << " enters the blockage");
        carried += overlap ? 1 : 0;
      }
    }
    CHECK(k == p.trips.size());
  }
  CHECK(seen.size() == drive_of.size());
  for (const auto& [trip, times] : seen) CHECK_MESSAGE(times == 1, trip);
  return carried;
}

Solution solve_full(const Scenario& s, const Network& n) {
  const PipelineResult r = run_pipeline(s, pipeline_options(s));
  REQUIRE(r.solution.has_value());
  REQUIRE(r.report.pass);
  CHECK(r.network == n);
  return *r.solution;
}

}  // namespace

TEST_SUITE("diagram") {

TEST_CASE("undisturbed two trains: two plain polylines and no shading") {
  const Scenario s = fixtures::undisturbed(fixtures::mini_line());
  const Network n = build_network(s);
  const std::string svg = render_time_space_diagram(s, n, Solution::original(n));
  CHECK(!blockage(svg));
  const auto lines = polylines(svg);
  REQUIRE(lines.size() == 2);
  for (const Polyline& p : lines) {
    CHECK(p.cls == "regular");
    CHECK(!p.dashed);
    CHECK(p.trips.size() == 2);
  }
  CHECK(svg.find("cancelled trips (0): none") != std::string::npos);
  CHECK(check_fidelity(n, Solution::original(n), svg) == 0);
}

TEST_CASE("mini line recovery matches the golden drawing") {
  for (bool turn : {false, true}) {
    const Scenario s = fixtures::mini_line(turn);
    const Network n = build_network(s);
    const Solution sol = solve_full(s, n);
    const std::string svg = render_time_space_diagram(s, n, sol);
    CHECK(svg == render_time_space_diagram(s, n, sol));
    CHECK(svg == load_text(data_path(turn ? "mini_line_turn.svg" : "mini_line.svg")));
    REQUIRE(blockage(svg).has_value());
    CHECK(check_fidelity(n, sol, svg) == 0);
    const auto lines = polylines(svg);
    if (!turn) {
      // One train is cancelled and listed; the other runs as planned.
      REQUIRE(lines.size() == 1);
      CHECK(!lines[0].dashed);
      CHECK(count(svg, "class=\"cancelled\"") == 2);
    } else {
      // Both trains turn at B: their circulations are drawn dashed.
      REQUIRE(lines.size() == 2);
      for (const Polyline& p : lines) CHECK(p.dashed);
      CHECK(count(svg, "class=\"cancelled\"") == 0);
    }
  }
}

TEST_CASE("a turn reverses the polyline at the turn station") {
  const Scenario s = fixtures::mini_line(true);
  const Network n = build_network(s);
  const Solution sol = solve_full(s, n);
  const std::string svg = render_time_space_diagram(s, n, sol);
  const Topology& topo = s.topology;
  const auto pos = topo.cumulative_positions();
  const double b_y = 30.0 + 480.0 * static_cast<double>(pos[1]) / static_cast<double>(pos.back());
  for (const Polyline& p : polylines(svg)) {
    // Station positions along the path go out to B and come back.
    std::vector<double> ys;
    for (const auto& [x, y] : p.points) {
      if (ys.empty() || ys.back() != y) ys.push_back(y);
    }
    REQUIRE(ys.size() == 3);
    CHECK(ys[1] == doctest::Approx(b_y));
    CHECK(ys[0] == doctest::Approx(ys[2]));
  }
}

TEST_CASE("u6-like recovery keeps the drawing consistent") {
  const Scenario s = fixtures::u6_like(600, 300);
  const Network n = build_network(s);
  const Solution sol = solve_full(s, n);
  const std::string svg = render_time_space_diagram(s, n, sol);
  const std::size_t carried = check_fidelity(n, sol, svg);
  MESSAGE("segments in the section when the blockage starts: " << carried);
  const SolutionDetails d = describe(n, sol);
  CHECK(count(svg, "class=\"cancelled\"") == d.cancelled.size());
  std::size_t modified = 0;
  for (const auto& p : d.paths) modified += p.modified && p.vehicle.find('#') == std::string::npos ? 1 : 0;
  std::size_t dashed = 0;
  for (const Polyline& p : polylines(svg)) dashed += p.cls == "modified" ? 1 : 0;
  CHECK(dashed == modified);
}

TEST_CASE("station axis follows cumulative minimal driving time") {
  const Scenario s = fixtures::u6_like(600, 300);
  const Network n = build_network(s);
  const std::string svg = render_time_space_diagram(fixtures::undisturbed(s), n, Solution::original(n));
  static const std::regex re(R"re(<line class="station" x1="[0-9.]+" y1="([0-9.]+)")re");
  std::vector<double> ys;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    ys.push_back(std::stod((*it)[1]));
  }
  REQUIRE(ys.size() == s.topology.stations.size());
  const auto pos = s.topology.cumulative_positions();
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const double expect = 480.0 * static_cast<double>(pos[i] - pos[i - 1]) / static_cast<double>(pos.back());
    CHECK(ys[i] - ys[i - 1] == doctest::Approx(expect).epsilon(0.01));
  }
}

}  // TEST_SUITE
