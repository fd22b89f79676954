#pragma once

#include <optional>
#include <vector>

#include "railrecover/types.hpp"

namespace railrecover {

// Integer system  lo_i <= t_i <= hi_i,  t_j - t_i >= w  over n variables.
// The feasible set is a lattice: when non-empty it has a least and a
// greatest element, found by longest-path relaxation from the bounds.
class DifferenceSystem {
 public:
  struct Edge {
    int from = 0;
    int to = 0;
    Seconds weight = 0;  // t_to >= t_from + weight
  };

  DifferenceSystem() = default;
  explicit DifferenceSystem(std::size_t n) : lo_(n, 0), hi_(n, 0), out_(n), in_(n) {}

  [[nodiscard]] std::size_t size() const { return lo_.size(); }
  void set_bounds(int i, Seconds lo, Seconds hi);
  void add_at_least(int from, int to, Seconds weight);  // t_to - t_from >= weight
  void add_at_most(int from, int to, Seconds weight);   // t_to - t_from <= weight
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }

  // Componentwise smallest / largest solution, or nullopt if infeasible.
  [[nodiscard]] std::optional<std::vector<Seconds>> least() const;
  [[nodiscard]] std::optional<std::vector<Seconds>> greatest() const;
  [[nodiscard]] bool feasible() const { return least().has_value(); }

 private:
  std::vector<Seconds> lo_;
  std::vector<Seconds> hi_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

}  // namespace railrecover
