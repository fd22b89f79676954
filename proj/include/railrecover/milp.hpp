#pragma once

#include <string>
#include <vector>

#include "railrecover/network.hpp"
#include "railrecover/reduce.hpp"

namespace railrecover {

enum class VarKind { Flow, Track, Station, Delay };  // y, g, h, x
enum class VarType { Binary, Integer };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Flow;
  VarType type = VarType::Binary;
  double lb = 0.0;
  double ub = 1.0;
  double objective = 0.0;
  std::int32_t entity = -1;  // activity id, or event id for delays

  [[nodiscard]] bool fixed() const { return lb == ub; }
  friend bool operator==(const Variable&, const Variable&) = default;
};

enum class RowTag {
  MinDuration,     // pi*_w >= pi*_v + L_min when y_a = 1
  MaxDuration,     // drive bounded by L_max
  TrackHeadway,    // departure order on a shared track
  TrackPair,       // g_vw + g_wv = 1
  StationHeadway,  // platform cleared before the opposing arrival
  StationPair,     // h_vv' + h_v'v = 1
  Flow,            // conservation at trip events
  DepotAbsorb,     // inflow - outflow <= 1 at depot arrivals
  DepotOutflow,    // a depot track releases no more trains than it received
  Supply,          // replacement capacity
  Origin,          // one vehicle per origin
};

[[nodiscard]] const char* to_string(RowTag tag);
[[nodiscard]] bool is_timing(RowTag tag);

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  int var = 0;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
  std::string name;
  RowTag tag = RowTag::Flow;
  std::vector<Term> terms;
  Sense sense = Sense::Equal;
  double rhs = 0.0;
  // Timing rows read  x[to] - x[from] >= constant  once every indicator is 1,
  // written as  x[to] - x[from] - big_m * sum(ind) >= constant - big_m * k.
  int from = -1;
  int to = -1;
  double constant = 0.0;
  std::vector<int> indicators;
  double big_m = 0.0;

  [[nodiscard]] double activity(const std::vector<double>& values) const;
  [[nodiscard]] bool satisfied(const std::vector<double>& values, double tol = 1e-6) const;
  friend bool operator==(const Row&, const Row&) = default;
};

struct MilpModel {
  std::string name;
  bool extended = false;
  double big_m = 0.0;
  std::size_t raised_rows = 0;  // timing rows whose M was raised to stay valid
  std::size_t event_count = 0;
  std::size_t activity_count = 0;
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<int> activity_var;  // per activity, -1 if none
  std::vector<int> event_var;     // per event, -1 for unscheduled events

  [[nodiscard]] int find_variable(const std::string& name) const;
  [[nodiscard]] std::size_t binary_count() const;   // binaries not fixed by bounds
  [[nodiscard]] std::size_t integer_count() const;  // delays not fixed by bounds
  [[nodiscard]] double objective(const std::vector<double>& values) const;
  [[nodiscard]] double objective_bound() const;  // sum of positive coefficients
  // Rebuilds lookups and timing data from names and terms (used by the reader).
  void rebuild_index();

  friend bool operator==(const MilpModel&, const MilpModel&) = default;
};

// Y + max over activities of (pi_w - pi_v + L_vw + S_vw); L and S count as 0
// where an activity has none, time terms only where both ends are scheduled.
[[nodiscard]] double compute_big_m(const Network& network, Seconds max_delay);

struct FormulateOptions {
  bool extended = false;
  // Use the smallest valid M per timing row instead of the global M.
  bool per_row_m = false;
  const FixedVars* fixed = nullptr;
  std::string name;
};

[[nodiscard]] MilpModel formulate(const Network& network, const FormulateOptions& options = {});

// Variable values of a network solution, in model order.
[[nodiscard]] std::vector<double> encode(const MilpModel& model, const Solution& solution);
[[nodiscard]] Solution decode(const MilpModel& model, const std::vector<double>& values);

// LP text: Maximize / Subject To / Bounds / Binaries / Generals / End.
[[nodiscard]] std::string export_model(const MilpModel& model);
[[nodiscard]] MilpModel parse_model(const std::string& text);

}  // namespace railrecover
