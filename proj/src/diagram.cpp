#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "railrecover/io.hpp"

namespace railrecover {

namespace {

constexpr double kLeft = 90.0;
constexpr double kTop = 30.0;
constexpr double kWidth = 960.0;
constexpr double kHeight = 480.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string clock(Seconds t) {
  char buf[16];
  const Seconds day = ((t % 86400) + 86400) % 86400;
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(day / 3600), static_cast<int>(day / 60 % 60));
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_time_space_diagram(const Scenario& scenario, const Network& network, const Solution& solution) {
  const Topology& topo = scenario.topology;
  const auto positions = topo.cumulative_positions();
  const double span = std::max<double>(1.0, static_cast<double>(positions.back()));
  const TimeWindow horizon = scenario.timetable.horizon;
  const double duration = std::max<double>(1.0, static_cast<double>(horizon.length()));
  auto px = [&](Seconds t) { return kLeft + kWidth * static_cast<double>(t - horizon.start) / duration; };
  auto py = [&](const std::string& station) {
    const int i = topo.station_index(station);
    return kTop + kHeight * static_cast<double>(positions[static_cast<std::size_t>(std::max(i, 0))]) / span;
  };

  const SolutionDetails details = describe(network, solution);
  const double legend_top = kTop + kHeight + 50.0;
  const double total_height = legend_top + 60.0 + 14.0 * static_cast<double>((details.cancelled.size() + 5) / 6);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kLeft + kWidth + 30.0) << "\" height=\""
      << fmt(total_height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<title>" << escape(scenario.name) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Blocked section and interval.
  if (scenario.disruption.active()) {
    double y0 = kTop + kHeight;
    double y1 = kTop;
    for (const auto& id : scenario.disruption.tracks) {
      const Track& t = topo.track(id);
      y0 = std::min({y0, py(t.from), py(t.to)});
      y1 = std::max({y1, py(t.from), py(t.to)});
    }
    const Seconds t0 = std::max(scenario.disruption.start, horizon.start);
    const Seconds t1 = std::min(scenario.disruption.end, horizon.end);
    std::string tracks;
    for (const auto& id : scenario.disruption.tracks) tracks += (tracks.empty() ? "" : " ") + id;
    out << "<rect class=\"blockage\" data-tracks=\"" << escape(tracks) << "\" x=\"" << fmt(px(t0)) << "\" y=\""
        << fmt(y0) << "\" width=\"" << fmt(px(t1) - px(t0)) << "\" height=\"" << fmt(y1 - y0)
        << "\" fill=\"#f4a6a6\" fill-opacity=\"0.45\" stroke=\"#c0392b\" stroke-width=\"0.5\"/>\n";
  }

  // Station axis.
  for (const auto& st : topo.stations) {
    const double y = py(st);
    out << "<line class=\"station\" x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + kWidth)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 6.0) << "\" y=\"" << fmt(y + 4.0) << "\" text-anchor=\"end\">" << escape(st)
        << "</text>\n";
  }
  // Time axis, ticks every ten minutes.
  const Seconds tick = horizon.length() > 4 * 3600 ? 1800 : 600;
  for (Seconds t = (horizon.start + tick - 1) / tick * tick; t <= horizon.end; t += tick) {
    const double x = px(t);
    out << "<line class=\"tick\" x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(kTop + kHeight) << "\" stroke=\"#eeeeee\" stroke-width=\"0.5\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + kHeight + 16.0) << "\" text-anchor=\"middle\">" << clock(t)
        << "</text>\n";
  }

  // One polyline per vehicle path.
  std::size_t colour = 0;
  for (const auto& path : details.paths) {
    std::string points;
    for (EventId e : path.events) {
      const Event& ev = network.event(e);
      if (ev.kind == EventKind::Origin || ev.kind == EventKind::Sink || ev.kind == EventKind::ReplacementSource) continue;
      std::string station = ev.station;
      if (ev.kind == EventKind::DepotArrival) {
        for (const auto& d : topo.depots) {
          if (d.id == ev.depot) station = d.station;
        }
      }
      if (!points.empty()) points += ' ';
      points += fmt(px(solution.time_of(network, e))) + "," + fmt(py(station));
    }
    if (points.empty()) continue;
    const bool replacement = path.vehicle.find('#') != std::string::npos;
    std::string trips;
    for (const auto& t : path.trips) trips += (trips.empty() ? "" : " ") + t;
    out << "<polyline class=\"" << (replacement ? "replacement" : path.modified ? "modified" : "regular")
        << "\" data-vehicle=\"" << escape(path.vehicle) << "\" data-trips=\"" << escape(trips) << "\" points=\"" << points
        << "\" fill=\"none\" stroke=\"" << kPalette[colour++ % std::size(kPalette)] << "\" stroke-width=\"1.4\"";
    if (replacement) {
      out << " stroke-dasharray=\"2 3\"";
    } else if (path.modified) {
      out << " stroke-dasharray=\"7 4\"";
    }
    out << "/>\n";
  }

  // Legend.
  double y = legend_top;
  out << "<g class=\"legend\">\n";
  const double lx = kLeft;
  out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(lx + 30) << "\" y2=\"" << fmt(y)
      << "\" stroke=\"black\"/><text x=\"" << fmt(lx + 36) << "\" y=\"" << fmt(y + 4) << "\">planned circulation</text>\n";
  out << "<line x1=\"" << fmt(lx + 180) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(lx + 210) << "\" y2=\"" << fmt(y)
      << "\" stroke=\"black\" stroke-dasharray=\"7 4\"/><text x=\"" << fmt(lx + 216) << "\" y=\"" << fmt(y + 4)
      << "\">modified circulation</text>\n";
  out << "<line x1=\"" << fmt(lx + 360) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(lx + 390) << "\" y2=\"" << fmt(y)
      << "\" stroke=\"black\" stroke-dasharray=\"2 3\"/><text x=\"" << fmt(lx + 396) << "\" y=\"" << fmt(y + 4)
      << "\">replacement train</text>\n";
  y += 22.0;
  out << "<text class=\"cancelled-title\" x=\"" << fmt(lx) << "\" y=\"" << fmt(y) << "\">cancelled trips ("
      << details.cancelled.size() << ")" << (details.cancelled.empty() ? ": none" : ":") << "</text>\n";
  for (std::size_t i = 0; i < details.cancelled.size(); ++i) {
    const double cx = lx + 160.0 * static_cast<double>(i % 6);
    const double cy = y + 14.0 * static_cast<double>(i / 6 + 1);
    out << "<text class=\"cancelled\" x=\"" << fmt(cx) << "\" y=\"" << fmt(cy) << "\">" << escape(details.cancelled[i])
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace railrecover
