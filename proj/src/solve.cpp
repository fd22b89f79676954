#include "railrecover/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "railrecover/difference.hpp"
#include "railrecover/lp.hpp"

namespace railrecover {

SolveParams SolveParams::from(const SolverDefaults& d) {
  SolveParams p;
  p.time_limit = d.time_limit;
  p.node_limit = d.node_limit;
  p.gap = d.gap;
  p.node_selection = d.node_selection;
  p.branching = d.branching;
  p.seed = d.seed;
  return p;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Limit: return "limit";
  }
  return "?";
}

namespace {

constexpr double kIntTol = 1e-6;

bool is_binary(const MilpModel& m, std::size_t i) { return m.vars[i].type == VarType::Binary; }

// Difference system over the delay variables using the timing rows whose
// indicators are all known to be 1.
std::optional<std::vector<Seconds>> timing_least(const MilpModel& m, const std::vector<double>& lb,
                                                 const std::vector<double>& ub,
                                                 const std::function<bool(int)>& indicator_on) {
  std::vector<int> idx(m.vars.size(), -1);
  int n = 0;
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (m.vars[i].kind == VarKind::Delay) idx[i] = n++;
  }
  DifferenceSystem sys(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (idx[i] < 0) continue;
    sys.set_bounds(idx[i], static_cast<Seconds>(std::ceil(lb[i] - kIntTol)),
                   static_cast<Seconds>(std::floor(ub[i] + kIntTol)));
  }
  for (const auto& r : m.rows) {
    if (!is_timing(r.tag)) continue;
    bool on = true;
    for (int ind : r.indicators) on = on && indicator_on(ind);
    if (!on) continue;
    sys.add_at_least(idx[static_cast<std::size_t>(r.from)], idx[static_cast<std::size_t>(r.to)],
                     static_cast<Seconds>(std::ceil(r.constant - kIntTol)));
  }
  auto t = sys.least();
  if (!t) return std::nullopt;
  std::vector<Seconds> out(m.vars.size(), 0);
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    if (idx[i] >= 0) out[i] = (*t)[static_cast<std::size_t>(idx[i])];
  }
  return out;
}

std::vector<double> lower_bounds(const MilpModel& m) {
  std::vector<double> v(m.vars.size());
  for (std::size_t i = 0; i < m.vars.size(); ++i) v[i] = m.vars[i].lb;
  return v;
}

std::vector<double> upper_bounds(const MilpModel& m) {
  std::vector<double> v(m.vars.size());
  for (std::size_t i = 0; i < m.vars.size(); ++i) v[i] = m.vars[i].ub;
  return v;
}

// Relaxation of the model. Timing rows that can never become active are
// left out; the big-M keeps them slack for every point within the bounds.
LpProblem relaxation(const MilpModel& m) {
  LpProblem p;
  p.objective.resize(m.vars.size());
  p.col_lb.resize(m.vars.size());
  p.col_ub.resize(m.vars.size());
  p.columns.resize(m.vars.size());
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    p.objective[i] = m.vars[i].objective;
    p.col_lb[i] = m.vars[i].lb;
    p.col_ub[i] = m.vars[i].ub;
  }
  for (const auto& r : m.rows) {
    if (is_timing(r.tag)) {
      bool dead = false;
      for (int ind : r.indicators) dead = dead || m.vars[static_cast<std::size_t>(ind)].ub < 0.5;
      if (dead) continue;
    }
    std::vector<std::pair<int, double>> terms;
    for (const auto& t : r.terms) terms.emplace_back(t.var, t.coef);
    const double lo = r.sense == Sense::LessEqual ? -kLpInfinity : r.rhs;
    const double hi = r.sense == Sense::GreaterEqual ? kLpInfinity : r.rhs;
    p.add_row(terms, lo, hi);
  }
  return p;
}

bool integral_objective(const MilpModel& m) {
  for (const auto& v : m.vars) {
    if (std::abs(v.objective - std::round(v.objective)) > 1e-9) return false;
  }
  return true;
}

bool linear_rows_hold(const MilpModel& m, const std::vector<double>& values) {
  for (const auto& r : m.rows) {
    if (!is_timing(r.tag) && !r.satisfied(values)) return false;
  }
  return true;
}

}  // namespace

std::optional<std::vector<double>> check_delay_system(const MilpModel& model, const std::vector<double>& values) {
  auto t = timing_least(model, lower_bounds(model), upper_bounds(model),
                        [&](int i) { return values.at(static_cast<std::size_t>(i)) > 0.5; });
  if (!t) return std::nullopt;
  std::vector<double> out = values;
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    if (model.vars[i].kind == VarKind::Delay) out[i] = static_cast<double>((*t)[i]);
  }
  return out;
}

std::optional<double> lp_bound(const MilpModel& model, const PartialAssignment& partial) {
  LpSolver lp(relaxation(model));
  for (std::size_t i = 0; i < partial.size() && i < model.vars.size(); ++i) {
    if (partial[i] >= 0 && is_binary(model, i)) lp.set_col_bounds(static_cast<int>(i), partial[i], partial[i]);
  }
  LpResult r = lp.solve();
  if (r.status == LpStatus::Infeasible) return std::nullopt;
  return r.objective;
}

int branch_select(const MilpModel& model, const std::vector<double>& relaxation, const PartialAssignment& partial,
                  BranchingRule rule) {
  int best = -1;
  double best_dist = 1.0;
  bool best_headway = false;
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    const Variable& v = model.vars[i];
    if (v.type != VarType::Binary || v.fixed()) continue;
    if (i < partial.size() && partial[i] >= 0) continue;
    const double val = relaxation.at(i);
    const double frac = std::abs(val - std::round(val));
    if (frac <= kIntTol) continue;
    const double dist = std::abs(val - 0.5);
    const bool headway = v.kind == VarKind::Track || v.kind == VarKind::Station;
    bool take = false;
    if (best < 0) {
      take = true;
    } else if (rule == BranchingRule::HeadwayFirst && headway != best_headway) {
      take = headway;
    } else {
      take = dist < best_dist - 1e-12;
    }
    if (take) {
      best = static_cast<int>(i);
      best_dist = dist;
      best_headway = headway;
    }
  }
  return best;
}

namespace {

struct Node {
  std::int64_t id = 0;
  int depth = 0;
  double bound = 0.0;
  double score = 0.0;
  std::shared_ptr<const Node> parent;
  int var = -1;  // fixing added by this node
  std::int8_t value = 0;
};

using NodePtr = std::shared_ptr<const Node>;

}  // namespace

SolveResult solve(const MilpModel& model, const SolveParams& params, const SolveControl& control) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SolveResult res;
  const std::size_t nv = model.vars.size();
  const bool floor_bound = integral_objective(model);
  auto tighten = [&](double b) { return floor_bound ? std::floor(b + 1e-6) : b; };

  // Pair partner and headway rows of each ordering variable.
  std::vector<int> partner(nv, -1);
  std::vector<std::vector<const Row*>> order_rows(nv);
  std::vector<double> order_constant(nv, -kLpInfinity);
  for (const auto& r : model.rows) {
    if (r.tag == RowTag::TrackPair || r.tag == RowTag::StationPair) {
      partner[static_cast<std::size_t>(r.terms[0].var)] = r.terms[1].var;
      partner[static_cast<std::size_t>(r.terms[1].var)] = r.terms[0].var;
    }
    if ((r.tag == RowTag::TrackHeadway || r.tag == RowTag::StationHeadway) && !r.indicators.empty()) {
      const auto g = static_cast<std::size_t>(r.indicators.back());
      order_rows[g].push_back(&r);
      order_constant[g] = std::max(order_constant[g], r.constant);
    }
  }
  // How well the delays of `x` already respect the ordering of `var`.
  auto order_slack = [&](std::size_t var, const std::vector<double>& x) {
    double slack = kLpInfinity;
    for (const Row* r : order_rows[var]) {
      slack = std::min(slack, x[static_cast<std::size_t>(r->to)] - x[static_cast<std::size_t>(r->from)] - r->constant);
    }
    return slack;
  };
  // Preferred value: round the relaxation, and for an ordering variable pick
  // the order the relaxed delays violate least.
  auto preferred_value = [&](std::size_t var, const std::vector<double>& x) -> std::int8_t {
    const int p = partner[var];
    if (p < 0) return x[var] > 0.5 ? 1 : 0;
    const double own = order_slack(var, x);
    const double other = order_slack(static_cast<std::size_t>(p), x);
    if (own != other) return own > other ? 1 : 0;
    return static_cast<int>(var) < p ? 1 : 0;
  };

  LpSolver lp(relaxation(model));
  const std::vector<double> root_lb = lower_bounds(model);
  const std::vector<double> root_ub = upper_bounds(model);
  std::vector<double> node_lb = root_lb;
  std::vector<double> node_ub = root_ub;

  std::optional<double> incumbent;
  auto prunable = [&](double bound) {
    if (!incumbent) return false;
    const double tol = params.gap * std::max(1.0, std::abs(*incumbent));
    return bound <= *incumbent + tol + 1e-9;
  };

  auto cmp = [&](const NodePtr& a, const NodePtr& b) {
    // true if a has lower priority than b
    switch (params.node_selection) {
      case NodeSelection::DepthFirst:
        if (a->depth != b->depth) return a->depth < b->depth;
        break;
      case NodeSelection::BestEstimate:
        if (a->score != b->score) return a->score < b->score;
        if (a->depth != b->depth) return a->depth < b->depth;
        break;
      case NodeSelection::BestBound:
        if (a->bound != b->bound) return a->bound < b->bound;
        if (a->depth != b->depth) return a->depth < b->depth;
        break;
    }
    return a->id > b->id;
  };
  std::priority_queue<NodePtr, std::vector<NodePtr>, decltype(cmp)> open(cmp);
  std::int64_t next_id = 0;
  const double root_bound = tighten(model.objective_bound());
  open.push(std::make_shared<Node>(Node{next_id++, 0, root_bound, root_bound, nullptr, -1, 0}));

  double last_report = -1.0;
  auto open_bound = [&] {
    double b = incumbent ? *incumbent : -kLpInfinity;
    // The queue is ordered by bound only under best-bound selection.
    if (!open.empty()) {
      if (params.node_selection == NodeSelection::BestBound) {
        b = std::max(b, open.top()->bound);
      } else {
        auto copy = open;
        while (!copy.empty()) {
          b = std::max(b, copy.top()->bound);
          copy.pop();
        }
      }
    }
    return b;
  };
  double dual = root_bound;
  auto report = [&](bool force) {
    if (!control.on_progress) return;
    const double now = elapsed();
    if (!force && now - last_report < control.progress_interval) return;
    last_report = now;
    Progress p;
    p.nodes = res.nodes;
    p.primal = incumbent;
    p.dual_bound = dual;
    p.gap = incumbent ? (dual - *incumbent) / std::max(1.0, std::abs(*incumbent)) : 1.0;
    p.elapsed = now;
    control.on_progress(p);
  };

  auto set_bounds = [&](std::size_t i, double lo, double hi) {
    if (lo == node_lb[i] && hi == node_ub[i]) return;
    node_lb[i] = lo;
    node_ub[i] = hi;
    lp.set_col_bounds(static_cast<int>(i), lo, hi);
  };
  auto offer = [&](const std::vector<double>& x) {
    std::vector<double> values = x;
    for (std::size_t i = 0; i < nv; ++i) {
      if (is_binary(model, i)) values[i] = values[i] > 0.5 ? 1.0 : 0.0;
    }
    auto full = check_delay_system(model, values);
    if (!full || !linear_rows_hold(model, *full)) return false;
    const double value = model.objective(*full);
    if (!incumbent || value > *incumbent + 1e-9) {
      incumbent = value;
      res.values = std::move(*full);
    }
    return true;
  };
  // Fixes `i` to its preferred value, or the other one if that fails.
  // Returns false when neither admits delays and an optimal relaxation.
  auto fix_one = [&](std::size_t i, std::int8_t first, std::vector<double>& x) {
    for (std::int8_t v : {first, static_cast<std::int8_t>(1 - first)}) {
      set_bounds(i, v, v);
      if (!timing_least(model, node_lb, node_ub, [&](int k) { return node_lb[static_cast<std::size_t>(k)] > 0.5; })) {
        continue;
      }
      LpResult lr = lp.solve();
      res.lp_iterations += lr.iterations;
      if (lr.status != LpStatus::Optimal || prunable(tighten(lr.objective))) continue;
      x = std::move(lr.x);
      return true;
    }
    return false;
  };
  // Diving: fix one variable at a time until the relaxation is integral.
  // With `timetable_order` every open ordering first follows the scheduled
  // order (smaller headway constant first) and the dive then settles which
  // trips run.
  auto dive = [&](std::vector<double> x, bool timetable_order) {
    if (timetable_order) {
      for (std::size_t i = 0; i < nv; ++i) {
        const int p = partner[i];
        if (p < 0 || node_lb[i] == node_ub[i] || static_cast<int>(i) > p) continue;
        const auto up = static_cast<std::size_t>(p);
        if (node_lb[up] != node_ub[up]) {
          const bool first = order_constant[i] < order_constant[up] ||
                             (order_constant[i] == order_constant[up] && x[i] >= x[up]);
          set_bounds(i, first ? 1 : 0, first ? 1 : 0);
          set_bounds(up, first ? 0 : 1, first ? 0 : 1);
        }
      }
      if (!timing_least(model, node_lb, node_ub, [&](int k) { return node_lb[static_cast<std::size_t>(k)] > 0.5; })) return;
      LpResult lr = lp.solve();
      res.lp_iterations += lr.iterations;
      if (lr.status != LpStatus::Optimal) return;
      x = std::move(lr.x);
    }
    for (std::size_t round = 0; round < 4 * nv; ++round) {
      if (control.cancel != nullptr && control.cancel->load()) return;
      if (params.time_limit > 0 && elapsed() >= params.time_limit) return;
      int pick = -1;
      double pick_score = -1.0;
      for (std::size_t i = 0; i < nv; ++i) {
        if (!is_binary(model, i) || node_lb[i] == node_ub[i]) continue;
        const double f = std::abs(x[i] - std::round(x[i]));
        if (f <= kIntTol) continue;
        // Orderings first, then the flow variable closest to 1.
        const double score = partner[i] >= 0 ? 2.0 + f : x[i];
        if (score > pick_score) {
          pick_score = score;
          pick = static_cast<int>(i);
        }
      }
      if (pick < 0) {
        offer(x);
        return;
      }
      const auto i = static_cast<std::size_t>(pick);
      if (!fix_one(i, partner[i] >= 0 ? preferred_value(i, x) : std::int8_t{1}, x)) return;
    }
  };

  bool stopped = false;
  std::vector<std::int8_t> partial(nv, -1);
  while (!open.empty()) {
    if ((params.time_limit > 0 && elapsed() >= params.time_limit) ||
        (params.node_limit > 0 && res.nodes >= params.node_limit) ||
        (control.cancel != nullptr && control.cancel->load())) {
      stopped = true;
      break;
    }
    NodePtr node = open.top();
    open.pop();
    if (prunable(node->bound)) continue;
    ++res.nodes;

    // Reconstruct the node's bounds.
    std::fill(partial.begin(), partial.end(), -1);
    for (const Node* n = node.get(); n != nullptr; n = n->parent.get()) {
      if (n->var >= 0) partial[static_cast<std::size_t>(n->var)] = n->value;
    }
    for (std::size_t i = 0; i < nv; ++i) {
      if (!is_binary(model, i)) continue;
      set_bounds(i, partial[i] >= 0 ? partial[i] : root_lb[i], partial[i] >= 0 ? partial[i] : root_ub[i]);
    }
    // Timing rows already forced on must admit delays.
    if (!timing_least(model, node_lb, node_ub, [&](int i) { return node_lb[static_cast<std::size_t>(i)] > 0.5; })) {
      report(false);
      continue;
    }
    LpResult lr = lp.solve();
    res.lp_iterations += lr.iterations;
    if (lr.status == LpStatus::Infeasible) {
      report(false);
      continue;
    }
    double bound = node->bound;
    if (lr.status == LpStatus::Optimal) bound = std::min(bound, tighten(lr.objective));
    if (prunable(bound)) {
      report(false);
      continue;
    }
    int var = lr.status == LpStatus::Optimal ? branch_select(model, lr.x, partial, params.branching) : -1;
    if (var < 0 && lr.status != LpStatus::Optimal) {
      for (std::size_t i = 0; i < nv && var < 0; ++i) {
        if (is_binary(model, i) && node_lb[i] != node_ub[i]) var = static_cast<int>(i);
      }
    }
    if (var < 0) {
      // Binaries integral: delays follow from the difference system.
      offer(lr.x);
      dual = open_bound();
      report(false);
      continue;
    }
    if (params.dive_every > 0 && (res.nodes == 1 || (!incumbent && res.nodes % params.dive_every == 0))) {
      dive(lr.x, false);
      if (!incumbent) dive(lr.x, true);
    }
    const std::int8_t preferred = preferred_value(static_cast<std::size_t>(var), lr.x);
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < nv; ++i) free_count += (is_binary(model, i) && node_lb[i] != node_ub[i]) ? 1 : 0;
    for (std::int8_t v : {preferred, static_cast<std::int8_t>(1 - preferred)}) {
      auto child = std::make_shared<Node>();
      child->id = next_id++;
      child->depth = node->depth + 1;
      child->bound = bound;
      child->score = bound - params.estimate_weight * static_cast<double>(free_count - 1);
      child->parent = node;
      child->var = var;
      child->value = v;
      open.push(std::move(child));
    }
    dual = open_bound();
    report(false);
  }

  res.wall_time = elapsed();
  if (stopped) {
    dual = open_bound();
  } else {
    dual = incumbent ? *incumbent : 0.0;
  }
  res.dual_bound = dual;
  if (incumbent) {
    res.primal = *incumbent;
    res.gap = (dual - *incumbent) / std::max(1.0, std::abs(*incumbent));
    res.solution = decode(model, res.values);
    if (!stopped || res.gap <= params.gap + 1e-12) {
      res.status = SolveStatus::Optimal;
    } else {
      res.status = SolveStatus::Feasible;
    }
  } else {
    res.status = stopped ? SolveStatus::Limit : SolveStatus::Infeasible;
    res.gap = stopped ? 1.0 : 0.0;
  }
  report(true);
  return res;
}

}  // namespace railrecover
