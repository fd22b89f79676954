#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace railrecover {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

// maximize c'x  subject to  row_lb <= A x <= row_ub,  col_lb <= x <= col_ub.
struct LpProblem {
  std::vector<double> objective;
  std::vector<double> col_lb;
  std::vector<double> col_ub;
  std::vector<std::vector<std::pair<int, double>>> columns;  // (row, coefficient)
  std::vector<double> row_lb;
  std::vector<double> row_ub;

  [[nodiscard]] std::size_t num_cols() const { return objective.size(); }
  [[nodiscard]] std::size_t num_rows() const { return row_lb.size(); }
  int add_row(const std::vector<std::pair<int, double>>& terms, double lb, double ub);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::int64_t iterations = 0;
};

// Revised simplex with an explicit dense basis inverse. The basis survives
// between calls; after bound changes the dual method restores feasibility
// from the previous optimum.
class LpSolver {
 public:
  explicit LpSolver(LpProblem problem);

  void set_col_bounds(int col, double lb, double ub);
  [[nodiscard]] double col_lb(int col) const { return lb_[static_cast<std::size_t>(col)]; }
  [[nodiscard]] double col_ub(int col) const { return ub_[static_cast<std::size_t>(col)]; }
  LpResult solve(std::int64_t iteration_limit = 1'000'000);

  [[nodiscard]] std::int64_t total_iterations() const { return total_iterations_; }

 private:
  enum class State : std::uint8_t { Basic, Lower, Upper };

  void factorize();
  void compute_basic_values();
  double column_dot(int j, const std::vector<double>& y) const;
  void ftran(int j, std::vector<double>& out) const;
  void pivot(std::size_t r, int enter, const std::vector<double>& alpha);
  [[nodiscard]] bool primal_feasible() const;
  void reduced_costs(std::vector<double>& d) const;
  LpStatus primal_loop(std::int64_t limit, std::int64_t& iter);
  LpStatus dual_loop(std::int64_t limit, std::int64_t& iter);

  LpProblem p_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;  // structural columns; slacks follow
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<State> state_;
  std::vector<int> head_;       // basic variable per basis position
  std::vector<double> binv_;    // m x m row-major
  std::int64_t since_factor_ = 0;
  std::int64_t total_iterations_ = 0;
  bool warm_ = false;
  std::vector<std::size_t> nz_;  // scratch index list  // basis is optimal for the previous bounds
};

}  // namespace railrecover
