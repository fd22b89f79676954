#include "railrecover/milp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace railrecover {

const char* to_string(RowTag tag) {
  switch (tag) {
    case RowTag::MinDuration: return "min";
    case RowTag::MaxDuration: return "max";
    case RowTag::TrackHeadway: return "track";
    case RowTag::TrackPair: return "track_pair";
    case RowTag::StationHeadway: return "station";
    case RowTag::StationPair: return "station_pair";
    case RowTag::Flow: return "flow";
    case RowTag::DepotAbsorb: return "depot";
    case RowTag::DepotOutflow: return "depot_out";
    case RowTag::Supply: return "supply";
    case RowTag::Origin: return "origin";
  }
  return "?";
}

bool is_timing(RowTag tag) {
  return tag == RowTag::MinDuration || tag == RowTag::MaxDuration || tag == RowTag::TrackHeadway ||
         tag == RowTag::StationHeadway;
}

double Row::activity(const std::vector<double>& values) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * values.at(static_cast<std::size_t>(t.var));
  return s;
}

bool Row::satisfied(const std::vector<double>& values, double tol) const {
  const double a = activity(values);
  switch (sense) {
    case Sense::LessEqual: return a <= rhs + tol;
    case Sense::GreaterEqual: return a >= rhs - tol;
    case Sense::Equal: return std::abs(a - rhs) <= tol;
  }
  return false;
}

int MilpModel::find_variable(const std::string& n) const {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == n) return static_cast<int>(i);
  }
  return -1;
}

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count_if(
      vars.begin(), vars.end(), [](const Variable& v) { return v.type == VarType::Binary && !v.fixed(); }));
}

std::size_t MilpModel::integer_count() const {
  return static_cast<std::size_t>(std::count_if(
      vars.begin(), vars.end(), [](const Variable& v) { return v.type == VarType::Integer && !v.fixed(); }));
}

double MilpModel::objective(const std::vector<double>& values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < vars.size(); ++i) s += vars[i].objective * values.at(i);
  return s;
}

double MilpModel::objective_bound() const {
  double s = 0.0;
  for (const auto& v : vars) {
    if (v.objective > 0) s += v.objective * v.ub;
    if (v.objective < 0) s += v.objective * v.lb;
  }
  return s;
}

namespace {

std::int32_t parse_entity(const std::string& name) {
  const auto pos = name.find_last_of("ae");
  std::int32_t value = -1;
  if (pos == std::string::npos) return value;
  std::from_chars(name.data() + pos + 1, name.data() + name.size(), value);
  return value;
}

}  // namespace

void MilpModel::rebuild_index() {
  activity_var.assign(activity_count, -1);
  event_var.assign(event_count, -1);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto e = static_cast<std::size_t>(vars[i].entity);
    if (vars[i].kind == VarKind::Delay) {
      if (e >= event_var.size()) throw Error("variable " + vars[i].name + " refers to an unknown event");
      event_var[e] = static_cast<int>(i);
    } else {
      if (e >= activity_var.size()) throw Error("variable " + vars[i].name + " refers to an unknown activity");
      activity_var[e] = static_cast<int>(i);
    }
  }
  for (auto& row : rows) {
    if (!is_timing(row.tag)) continue;
    row.from = row.to = -1;
    row.indicators.clear();
    row.big_m = 0.0;
    for (const auto& t : row.terms) {
      if (vars.at(static_cast<std::size_t>(t.var)).kind == VarKind::Delay) {
        (t.coef > 0 ? row.to : row.from) = t.var;
      } else {
        row.indicators.push_back(t.var);
        row.big_m = -t.coef;
      }
    }
    row.constant = row.rhs + row.big_m * static_cast<double>(row.indicators.size());
  }
}

double compute_big_m(const Network& network, Seconds max_delay) {
  double worst = 0.0;
  for (const auto& a : network.activities) {
    const Event& v = network.event(a.tail);
    const Event& w = network.event(a.head);
    double term = 0.0;
    if (v.time && w.time) term += static_cast<double>(*w.time - *v.time);
    if (is_headway(a.kind)) term += static_cast<double>(a.headway + a.margin);
    worst = std::max(worst, term);
  }
  return static_cast<double>(max_delay) + worst;
}

MilpModel formulate(const Network& network, const FormulateOptions& options) {
  for (const auto& a : network.activities) {
    if (a.cost < 0 || a.penalty < 0) throw ValidationError("/activities/" + std::to_string(a.id.value), "negative weight");
    if (is_headway(a.kind)) {
      if (!a.partner.valid() || a.partner.index() >= network.activities.size() ||
          network.activity(a.partner).partner != a.id) {
        throw ValidationError("/activities/" + std::to_string(a.id.value), "headway without reverse partner");
      }
    }
  }
  MilpModel m;
  m.name = options.name;
  m.extended = options.extended;
  m.big_m = compute_big_m(network, network.max_delay);
  m.event_count = network.events.size();
  m.activity_count = network.activities.size();
  m.activity_var.assign(network.activities.size(), -1);
  m.event_var.assign(network.events.size(), -1);

  auto add_activity_vars = [&](auto pred, VarKind kind, const char* prefix) {
    for (const auto& a : network.activities) {
      if (!pred(a)) continue;
      Variable v;
      v.name = std::string(prefix) + "_a" + std::to_string(a.id.value);
      v.kind = kind;
      v.entity = a.id.value;
      if (kind == VarKind::Flow) {
        if (a.kind == ActivityKind::Drive) v.objective = a.cost;
        if (options.extended && (a.kind == ActivityKind::Turn || a.kind == ActivityKind::Return)) {
          v.objective = -a.penalty;
        }
        if (a.kind == ActivityKind::Drive && !a.selectable) v.ub = 0.0;
      } else if (options.fixed != nullptr) {
        if (auto f = options.fixed->value(a.id)) v.lb = v.ub = *f;
      }
      m.activity_var[a.id.index()] = static_cast<int>(m.vars.size());
      m.vars.push_back(std::move(v));
    }
  };
  add_activity_vars([](const Activity& a) { return is_flow(a.kind); }, VarKind::Flow, "y");
  add_activity_vars([](const Activity& a) { return a.kind == ActivityKind::TrackHeadway; }, VarKind::Track, "g");
  add_activity_vars([](const Activity& a) { return a.kind == ActivityKind::StationHeadway; }, VarKind::Station, "h");
  for (const auto& e : network.events) {
    if (!e.time) continue;
    Variable v;
    v.name = "x_e" + std::to_string(e.id.value);
    v.kind = VarKind::Delay;
    v.type = VarType::Integer;
    v.ub = static_cast<double>(e.max_delay);
    v.entity = e.id.value;
    m.event_var[e.id.index()] = static_cast<int>(m.vars.size());
    m.vars.push_back(std::move(v));
  }

  auto y = [&](ActivityId a) { return m.activity_var[a.index()]; };
  auto x = [&](EventId e) { return m.event_var[e.index()]; };
  auto pi = [&](EventId e) { return static_cast<double>(*network.event(e).time); };

  auto timing = [&](RowTag tag, std::string name, EventId from, EventId to, double constant,
                    std::vector<int> indicators) {
    Row r;
    r.name = std::move(name);
    r.tag = tag;
    r.sense = Sense::GreaterEqual;
    r.from = x(from);
    r.to = x(to);
    r.constant = constant;
    r.indicators = std::move(indicators);
    const double need = constant + m.vars[static_cast<std::size_t>(r.from)].ub - m.vars[static_cast<std::size_t>(r.to)].lb;
    r.big_m = options.per_row_m ? std::max(0.0, need) : m.big_m;
    if (!options.per_row_m && need > m.big_m) {
      r.big_m = need;
      ++m.raised_rows;
    }
    r.terms.push_back(Term{r.to, 1.0});
    r.terms.push_back(Term{r.from, -1.0});
    for (int ind : r.indicators) r.terms.push_back(Term{ind, -r.big_m});
    r.rhs = constant - r.big_m * static_cast<double>(r.indicators.size());
    m.rows.push_back(std::move(r));
  };
  auto linear = [&](RowTag tag, std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    Row r;
    r.name = std::move(name);
    r.tag = tag;
    r.terms = std::move(terms);
    r.sense = sense;
    r.rhs = rhs;
    m.rows.push_back(std::move(r));
  };

  for (const auto& a : network.activities) {
    if (!is_flow(a.kind)) continue;
    const Event& v = network.event(a.tail);
    const Event& w = network.event(a.head);
    if (!v.time || !w.time) continue;
    const std::string id = std::to_string(a.id.value);
    timing(RowTag::MinDuration, "min_a" + id, a.tail, a.head, static_cast<double>(a.l_min) + pi(a.tail) - pi(a.head),
           {y(a.id)});
    if (a.kind == ActivityKind::Drive && a.l_max) {
      timing(RowTag::MaxDuration, "max_a" + id, a.head, a.tail,
             pi(a.head) - pi(a.tail) - static_cast<double>(*a.l_max), {y(a.id)});
    }
  }
  for (const auto& a : network.activities) {
    if (a.kind != ActivityKind::TrackHeadway) continue;
    std::vector<int> ind;
    for (ActivityId o : network.flow_out(a.head)) ind.push_back(y(o));
    for (ActivityId o : network.flow_out(a.tail)) ind.push_back(y(o));
    ind.push_back(y(a.id));
    const std::string id = std::to_string(a.id.value);
    timing(RowTag::TrackHeadway, "track_a" + id, a.tail, a.head, static_cast<double>(a.headway) + pi(a.tail) - pi(a.head),
           ind);
    if (a.id < a.partner) {
      linear(RowTag::TrackPair, "track_pair_a" + id, {Term{y(a.id), 1.0}, Term{y(a.partner), 1.0}}, Sense::Equal, 1.0);
    }
  }
  for (const auto& a : network.activities) {
    if (a.kind != ActivityKind::StationHeadway) continue;
    const StationConflict* c = network.conflict_for(a.id);
    const std::string id = std::to_string(a.id.value);
    for (std::size_t p = 0; p < c->pairs.size(); ++p) {
      const auto& pair = c->pairs[p];
      const EventId w = network.activity(pair.own).head;
      timing(RowTag::StationHeadway, "station_a" + id + "_p" + std::to_string(p), w, c->other_arrival,
             pi(w) + static_cast<double>(c->margin) - pi(c->other_arrival), {y(pair.own), y(pair.other), y(a.id)});
    }
    if (a.id < a.partner) {
      linear(RowTag::StationPair, "station_pair_a" + id, {Term{y(a.id), 1.0}, Term{y(a.partner), 1.0}}, Sense::Equal,
             1.0);
    }
  }
  auto flow_terms = [&](EventId e, double in_sign) {
    std::vector<Term> t;
    for (ActivityId a : network.flow_in(e)) t.push_back(Term{y(a), in_sign});
    for (ActivityId a : network.flow_out(e)) t.push_back(Term{y(a), -in_sign});
    return t;
  };
  for (const auto& e : network.events) {
    const std::string id = std::to_string(e.id.value);
    switch (e.kind) {
      case EventKind::Departure:
      case EventKind::Arrival:
        linear(RowTag::Flow, "flow_e" + id, flow_terms(e.id, 1.0), Sense::Equal, 0.0);
        break;
      case EventKind::DepotArrival:
        linear(RowTag::DepotAbsorb, "depot_e" + id, flow_terms(e.id, 1.0), Sense::LessEqual, 1.0);
        linear(RowTag::DepotOutflow, "depot_out_e" + id, flow_terms(e.id, -1.0), Sense::LessEqual, 0.0);
        break;
      case EventKind::ReplacementSource: {
        auto it = network.depot_capacity.find(e.depot);
        const double cap = it == network.depot_capacity.end() ? 0.0 : it->second;
        linear(RowTag::Supply, "supply_e" + id, flow_terms(e.id, -1.0), Sense::LessEqual, cap);
        break;
      }
      case EventKind::Origin:
        linear(RowTag::Origin, "origin_e" + id, flow_terms(e.id, -1.0), Sense::LessEqual, 1.0);
        break;
      case EventKind::Sink: break;
    }
  }
  return m;
}

std::vector<double> encode(const MilpModel& model, const Solution& solution) {
  std::vector<double> values(model.vars.size(), 0.0);
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    const Variable& v = model.vars[i];
    if (v.kind == VarKind::Delay) {
      values[i] = static_cast<double>(solution.delay_of(EventId(v.entity)));
    } else {
      values[i] = solution.is_active(ActivityId(v.entity)) ? 1.0 : 0.0;
    }
  }
  return values;
}

Solution decode(const MilpModel& model, const std::vector<double>& values) {
  Solution s;
  s.active.assign(model.activity_count, 0);
  s.delay.assign(model.event_count, 0);
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    const Variable& v = model.vars[i];
    const double val = values.at(i);
    if (v.kind == VarKind::Delay) {
      s.delay[static_cast<std::size_t>(v.entity)] = static_cast<Seconds>(std::llround(val));
    } else {
      s.active[static_cast<std::size_t>(v.entity)] = val > 0.5 ? 1 : 0;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// LP text

namespace {

std::string num(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_terms(std::ostringstream& out, const MilpModel& m, const std::vector<Term>& terms) {
  for (const auto& t : terms) {
    out << (t.coef < 0 ? " - " : " + ") << num(std::abs(t.coef)) << ' ' << m.vars[static_cast<std::size_t>(t.var)].name;
  }
}

}  // namespace

std::string export_model(const MilpModel& m) {
  std::ostringstream out;
  out << "\\ railrecover model\n";
  out << "\\ name " << (m.name.empty() ? "-" : m.name) << '\n';
  out << "\\ objective " << (m.extended ? "extended" : "trips") << '\n';
  out << "\\ big_m " << num(m.big_m) << '\n';
  out << "\\ events " << m.event_count << '\n';
  out << "\\ activities " << m.activity_count << '\n';
  out << "\\ raised_rows " << m.raised_rows << '\n';
  out << "Maximize\n obj:";
  std::vector<Term> obj;
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (m.vars[i].objective != 0.0) obj.push_back(Term{static_cast<int>(i), m.vars[i].objective});
  }
  write_terms(out, m, obj);
  out << "\nSubject To\n";
  for (const auto& r : m.rows) {
    out << ' ' << r.name << ':';
    write_terms(out, m, r.terms);
    out << (r.sense == Sense::LessEqual ? " <= " : r.sense == Sense::GreaterEqual ? " >= " : " = ") << num(r.rhs)
        << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.fixed()) {
      out << ' ' << v.name << " = " << num(v.lb) << '\n';
    } else if (v.type == VarType::Integer || v.lb != 0.0 || v.ub != 1.0) {
      out << ' ' << num(v.lb) << " <= " << v.name << " <= " << num(v.ub) << '\n';
    }
  }
  auto list = [&](const char* header, VarType type) {
    out << header << '\n';
    int col = 0;
    for (const auto& v : m.vars) {
      if (v.type != type) continue;
      out << (col == 0 ? " " : " ") << v.name;
      if (++col == 10) {
        out << '\n';
        col = 0;
      }
    }
    if (col != 0) out << '\n';
  };
  list("Binaries", VarType::Binary);
  list("Generals", VarType::Integer);
  out << "End\n";
  return out.str();
}

namespace {

double parse_number(const std::string& tok, int line) {
  double value = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw Error("line " + std::to_string(line) + ": expected a number, got '" + tok + "'");
  }
  return value;
}

RowTag tag_of(const std::string& name, int line) {
  static const std::vector<std::pair<std::string, RowTag>> prefixes = {
      {"track_pair_", RowTag::TrackPair}, {"station_pair_", RowTag::StationPair}, {"depot_out_", RowTag::DepotOutflow},
      {"min_", RowTag::MinDuration},       {"max_", RowTag::MaxDuration},          {"track_", RowTag::TrackHeadway},
      {"station_", RowTag::StationHeadway}, {"flow_", RowTag::Flow},               {"depot_", RowTag::DepotAbsorb},
      {"supply_", RowTag::Supply},         {"origin_", RowTag::Origin},
  };
  for (const auto& [p, t] : prefixes) {
    if (name.rfind(p, 0) == 0) return t;
  }
  throw Error("line " + std::to_string(line) + ": unknown row '" + name + "'");
}

}  // namespace

MilpModel parse_model(const std::string& text) {
  MilpModel m;
  std::istringstream in(text);
  std::string raw;
  enum class Section { Header, Objective, Rows, Bounds, Binaries, Generals, End } section = Section::Header;
  std::vector<std::pair<std::vector<std::pair<double, std::string>>, int>> objective_lines;
  struct PendingRow {
    std::string name;
    std::vector<std::pair<double, std::string>> terms;
    Sense sense;
    double rhs;
  };
  std::vector<PendingRow> pending;
  std::vector<std::pair<std::string, std::pair<double, double>>> bounds;
  std::vector<std::string> binaries;
  std::vector<std::string> generals;
  std::vector<std::pair<double, std::string>> objective;
  int line = 0;

  auto parse_terms = [&](std::istringstream& toks, std::vector<std::pair<double, std::string>>& terms,
                         std::string& stop) {
    std::string tok;
    double sign = 1.0;
    while (toks >> tok) {
      if (tok == "+") {
        sign = 1.0;
      } else if (tok == "-") {
        sign = -1.0;
      } else if (tok == "<=" || tok == ">=" || tok == "=") {
        stop = tok;
        return;
      } else {
        const double coef = parse_number(tok, line);
        std::string var;
        if (!(toks >> var)) throw Error("line " + std::to_string(line) + ": dangling coefficient");
        terms.emplace_back(sign * coef, var);
        sign = 1.0;
      }
    }
  };

  while (std::getline(in, raw)) {
    ++line;
    if (raw.empty()) continue;
    if (raw[0] == '\\') {
      std::istringstream h(raw.substr(1));
      std::string key;
      h >> key;
      std::string value;
      h >> value;
      if (key == "name") m.name = value == "-" ? "" : value;
      if (key == "objective") m.extended = value == "extended";
      if (key == "big_m") m.big_m = parse_number(value, line);
      if (key == "events") m.event_count = static_cast<std::size_t>(parse_number(value, line));
      if (key == "activities") m.activity_count = static_cast<std::size_t>(parse_number(value, line));
      if (key == "raised_rows") m.raised_rows = static_cast<std::size_t>(parse_number(value, line));
      continue;
    }
    if (raw == "Maximize") { section = Section::Objective; continue; }
    if (raw == "Subject To") { section = Section::Rows; continue; }
    if (raw == "Bounds") { section = Section::Bounds; continue; }
    if (raw == "Binaries") { section = Section::Binaries; continue; }
    if (raw == "Generals") { section = Section::Generals; continue; }
    if (raw == "End") { section = Section::End; continue; }
    std::istringstream toks(raw);
    switch (section) {
      case Section::Objective: {
        std::string label;
        toks >> label;
        std::string stop;
        parse_terms(toks, objective, stop);
        break;
      }
      case Section::Rows: {
        PendingRow r;
        toks >> r.name;
        if (r.name.empty() || r.name.back() != ':') throw Error("line " + std::to_string(line) + ": row without name");
        r.name.pop_back();
        std::string stop;
        parse_terms(toks, r.terms, stop);
        r.sense = stop == "<=" ? Sense::LessEqual : stop == ">=" ? Sense::GreaterEqual : Sense::Equal;
        if (stop.empty()) throw Error("line " + std::to_string(line) + ": row without sense");
        std::string rhs;
        toks >> rhs;
        r.rhs = parse_number(rhs, line);
        pending.push_back(std::move(r));
        break;
      }
      case Section::Bounds: {
        std::vector<std::string> t;
        std::string tok;
        while (toks >> tok) t.push_back(tok);
        if (t.size() == 3 && t[1] == "=") {
          const double v = parse_number(t[2], line);
          bounds.push_back({t[0], {v, v}});
        } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
          bounds.push_back({t[2], {parse_number(t[0], line), parse_number(t[4], line)}});
        } else {
          throw Error("line " + std::to_string(line) + ": malformed bound");
        }
        break;
      }
      case Section::Binaries:
      case Section::Generals: {
        std::string tok;
        while (toks >> tok) (section == Section::Binaries ? binaries : generals).push_back(tok);
        break;
      }
      default:
        throw Error("line " + std::to_string(line) + ": unexpected content");
    }
  }
  if (section != Section::End) throw Error("model text has no End marker");

  std::map<std::string, int> index;
  auto declare = [&](const std::string& name, VarType type) {
    Variable v;
    v.name = name;
    v.type = type;
    v.entity = parse_entity(name);
    switch (name.empty() ? '?' : name[0]) {
      case 'y': v.kind = VarKind::Flow; break;
      case 'g': v.kind = VarKind::Track; break;
      case 'h': v.kind = VarKind::Station; break;
      case 'x': v.kind = VarKind::Delay; break;
      default: throw Error("unknown variable '" + name + "'");
    }
    if (type == VarType::Integer) v.ub = 0.0;
    index[name] = static_cast<int>(m.vars.size());
    m.vars.push_back(std::move(v));
  };
  for (const auto& b : binaries) declare(b, VarType::Binary);
  for (const auto& g : generals) declare(g, VarType::Integer);
  auto var = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw Error("undeclared variable '" + name + "'");
    return it->second;
  };
  for (const auto& [coef, name] : objective) m.vars[static_cast<std::size_t>(var(name))].objective = coef;
  for (const auto& [name, lu] : bounds) {
    Variable& v = m.vars[static_cast<std::size_t>(var(name))];
    v.lb = lu.first;
    v.ub = lu.second;
  }
  for (auto& p : pending) {
    Row r;
    r.name = p.name;
    r.tag = tag_of(p.name, 0);
    for (const auto& [coef, name] : p.terms) r.terms.push_back(Term{var(name), coef});
    r.sense = p.sense;
    r.rhs = p.rhs;
    m.rows.push_back(std::move(r));
  }
  m.rebuild_index();
  return m;
}

}  // namespace railrecover
