#include "railrecover/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace railrecover {

namespace {
constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-7;
constexpr double kPivotTol = 1e-9;
constexpr std::int64_t kRefactorEvery = 2000;
constexpr std::int64_t kRecomputeEvery = 64;
}  // namespace

int LpProblem::add_row(const std::vector<std::pair<int, double>>& terms, double lb, double ub) {
  const int r = static_cast<int>(row_lb.size());
  row_lb.push_back(lb);
  row_ub.push_back(ub);
  for (const auto& [col, coef] : terms) {
    if (coef != 0.0) columns.at(static_cast<std::size_t>(col)).emplace_back(r, coef);
  }
  return r;
}

LpSolver::LpSolver(LpProblem problem) : p_(std::move(problem)) {
  m_ = p_.num_rows();
  n_ = p_.num_cols();
  const std::size_t total = n_ + m_;
  lb_.resize(total);
  ub_.resize(total);
  cost_.assign(total, 0.0);
  x_.assign(total, 0.0);
  state_.assign(total, State::Lower);
  for (std::size_t j = 0; j < n_; ++j) {
    lb_[j] = p_.col_lb[j];
    ub_[j] = p_.col_ub[j];
    cost_[j] = p_.objective[j];
    if (!std::isfinite(lb_[j]) && !std::isfinite(ub_[j])) throw std::invalid_argument("free columns are not supported");
    state_[j] = std::isfinite(lb_[j]) ? State::Lower : State::Upper;
    x_[j] = state_[j] == State::Lower ? lb_[j] : ub_[j];
  }
  head_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    lb_[n_ + i] = p_.row_lb[i];
    ub_[n_ + i] = p_.row_ub[i];
    state_[n_ + i] = State::Basic;
    head_[i] = static_cast<int>(n_ + i);
  }
  binv_.assign(m_ * m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = -1.0;
}

void LpSolver::set_col_bounds(int col, double lb, double ub) {
  const auto j = static_cast<std::size_t>(col);
  lb_[j] = lb;
  ub_[j] = ub;
  if (state_[j] == State::Lower) x_[j] = lb;
  if (state_[j] == State::Upper) x_[j] = ub;
}

double LpSolver::column_dot(int j, const std::vector<double>& y) const {
  const auto uj = static_cast<std::size_t>(j);
  if (uj >= n_) return -y[uj - n_];
  double s = 0.0;
  for (const auto& [r, a] : p_.columns[uj]) s += a * y[static_cast<std::size_t>(r)];
  return s;
}

void LpSolver::ftran(int j, std::vector<double>& out) const {
  out.assign(m_, 0.0);
  const auto uj = static_cast<std::size_t>(j);
  if (uj >= n_) {
    const std::size_t k = uj - n_;
    for (std::size_t i = 0; i < m_; ++i) out[i] = -binv_[i * m_ + k];
    return;
  }
  for (const auto& [r, a] : p_.columns[uj]) {
    const auto k = static_cast<std::size_t>(r);
    for (std::size_t i = 0; i < m_; ++i) out[i] += binv_[i * m_ + k] * a;
  }
}

void LpSolver::factorize() {
  // Gauss-Jordan on the basis matrix.
  std::vector<double> b(m_ * m_, 0.0);
  for (std::size_t pos = 0; pos < m_; ++pos) {
    const auto j = static_cast<std::size_t>(head_[pos]);
    if (j >= n_) {
      b[(j - n_) * m_ + pos] = -1.0;
    } else {
      for (const auto& [r, a] : p_.columns[j]) b[static_cast<std::size_t>(r) * m_ + pos] = a;
    }
  }
  std::vector<double> inv(m_ * m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
  for (std::size_t c = 0; c < m_; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m_; ++r) {
      if (std::abs(b[r * m_ + c]) > std::abs(b[piv * m_ + c])) piv = r;
    }
    if (std::abs(b[piv * m_ + c]) < 1e-12) throw std::runtime_error("singular basis");
    if (piv != c) {
      for (std::size_t k = 0; k < m_; ++k) {
        std::swap(b[piv * m_ + k], b[c * m_ + k]);
        std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
      }
    }
    const double d = b[c * m_ + c];
    for (std::size_t k = 0; k < m_; ++k) {
      b[c * m_ + k] /= d;
      inv[c * m_ + k] /= d;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == c) continue;
      const double f = b[r * m_ + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) {
        b[r * m_ + k] -= f * b[c * m_ + k];
        inv[r * m_ + k] -= f * inv[c * m_ + k];
      }
    }
  }
  // inv is B^-1 with rows indexed by basis position (column c of B).
  binv_ = std::move(inv);
  since_factor_ = 0;
}

void LpSolver::compute_basic_values() {
  std::vector<double> v(m_, 0.0);  // N x_N
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::Basic || x_[j] == 0.0) continue;
    if (j >= n_) {
      v[j - n_] -= x_[j];
    } else {
      for (const auto& [r, a] : p_.columns[j]) v[static_cast<std::size_t>(r)] += a * x_[j];
    }
  }
  nz_.clear();
  for (std::size_t k = 0; k < m_; ++k) {
    if (v[k] != 0.0) nz_.push_back(k);
  }
  for (std::size_t i = 0; i < m_; ++i) {
    double s = 0.0;
    const double* row = &binv_[i * m_];
    for (std::size_t k : nz_) s += row[k] * v[k];
    x_[static_cast<std::size_t>(head_[i])] = -s;
  }
}

void LpSolver::pivot(std::size_t r, int enter, const std::vector<double>& alpha) {
  head_[r] = enter;
  state_[static_cast<std::size_t>(enter)] = State::Basic;
  const double piv = alpha[r];
  double* prow = &binv_[r * m_];
  nz_.clear();
  for (std::size_t k = 0; k < m_; ++k) {
    if (prow[k] == 0.0) continue;
    prow[k] /= piv;
    nz_.push_back(k);
  }
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r || alpha[i] == 0.0) continue;
    const double f = alpha[i];
    double* row = &binv_[i * m_];
    for (std::size_t k : nz_) row[k] -= f * prow[k];
  }
  if (++since_factor_ >= kRefactorEvery) factorize();
}

bool LpSolver::primal_feasible() const {
  for (std::size_t i = 0; i < m_; ++i) {
    const auto b = static_cast<std::size_t>(head_[i]);
    const double tol = kPrimalTol * (1.0 + std::abs(x_[b]));
    if (x_[b] < lb_[b] - tol || x_[b] > ub_[b] + tol) return false;
  }
  return true;
}

void LpSolver::reduced_costs(std::vector<double>& d) const {
  std::vector<double> y(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    const double c = cost_[static_cast<std::size_t>(head_[i])];
    if (c == 0.0) continue;
    const double* row = &binv_[i * m_];
    for (std::size_t k = 0; k < m_; ++k) y[k] += c * row[k];
  }
  d.assign(n_ + m_, 0.0);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] != State::Basic) d[j] = cost_[j] - column_dot(static_cast<int>(j), y);
  }
}

// Dual simplex from a dual feasible basis. Returns Optimal once the basis is
// primal feasible, Infeasible on a dual ray, IterationLimit if it gives up
// (the caller then continues with the primal method).
LpStatus LpSolver::dual_loop(std::int64_t limit, std::int64_t& iter) {
  std::vector<double> d;
  reduced_costs(d);
  // Make the basis dual feasible by moving boxed columns to the other bound.
  bool flipped = false;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::Basic || lb_[j] == ub_[j]) continue;
    const bool bad = (state_[j] == State::Lower && d[j] > kDualTol) || (state_[j] == State::Upper && d[j] < -kDualTol);
    if (!bad) continue;
    if (!std::isfinite(lb_[j]) || !std::isfinite(ub_[j])) return LpStatus::IterationLimit;
    state_[j] = state_[j] == State::Lower ? State::Upper : State::Lower;
    x_[j] = state_[j] == State::Lower ? lb_[j] : ub_[j];
    flipped = true;
  }
  if (flipped) compute_basic_values();

  std::vector<double> rho(m_);
  std::vector<double> alpha(m_);
  std::vector<double> arow(n_ + m_);
  std::vector<double> shift(m_);
  std::vector<std::pair<double, int>> cand;
  std::int64_t local = 0;
  while (true) {
    if (iter >= limit || local > 4 * static_cast<std::int64_t>(m_ + n_)) return LpStatus::IterationLimit;
    // Leaving row: largest bound violation.
    int r = -1;
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto b = static_cast<std::size_t>(head_[i]);
      const double tol = kPrimalTol * (1.0 + std::abs(x_[b]));
      double v = 0.0;
      if (x_[b] < lb_[b] - tol) v = lb_[b] - x_[b];
      if (x_[b] > ub_[b] + tol) v = x_[b] - ub_[b];
      if (v > worst) {
        worst = v;
        r = static_cast<int>(i);
      }
    }
    if (r < 0) return LpStatus::Optimal;
    const auto ur = static_cast<std::size_t>(r);
    const auto b = static_cast<std::size_t>(head_[ur]);
    const bool increase = x_[b] < lb_[b];
    std::copy(&binv_[ur * m_], &binv_[ur * m_] + m_, rho.begin());

    cand.clear();
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::Basic) {
        arow[j] = 0.0;
        continue;
      }
      const double a = column_dot(static_cast<int>(j), rho);
      arow[j] = a;
      if (lb_[j] == ub_[j] || std::abs(a) < kPivotTol) continue;
      const bool at_lower = state_[j] == State::Lower;
      const bool eligible = increase ? (at_lower ? a < 0 : a > 0) : (at_lower ? a > 0 : a < 0);
      if (eligible) cand.emplace_back(std::abs(d[j]) / std::abs(a), static_cast<int>(j));
    }
    std::sort(cand.begin(), cand.end(), [&](const auto& u, const auto& v) {
      if (u.first != v.first) return u.first < v.first;
      return std::abs(arow[static_cast<std::size_t>(u.second)]) > std::abs(arow[static_cast<std::size_t>(v.second)]);
    });
    // Long step: pass over boxed columns while the dual slope stays positive.
    int enter = -1;
    double slope = worst;
    std::size_t k = 0;
    for (; k < cand.size(); ++k) {
      const auto j = static_cast<std::size_t>(cand[k].second);
      const double range = ub_[j] - lb_[j];
      const double next = slope - std::abs(arow[j]) * range;
      if (!std::isfinite(range) || next <= 0.0 || k + 1 == cand.size()) {
        enter = cand[k].second;
        break;
      }
      slope = next;
    }
    if (enter < 0) return LpStatus::Infeasible;
    if (k > 0) {
      std::fill(shift.begin(), shift.end(), 0.0);
      for (std::size_t f = 0; f < k; ++f) {
        const auto j = static_cast<std::size_t>(cand[f].second);
        const double step = state_[j] == State::Lower ? ub_[j] - lb_[j] : lb_[j] - ub_[j];
        state_[j] = state_[j] == State::Lower ? State::Upper : State::Lower;
        x_[j] = state_[j] == State::Lower ? lb_[j] : ub_[j];
        if (j >= n_) {
          shift[j - n_] -= step;
        } else {
          for (const auto& [row, a] : p_.columns[j]) shift[static_cast<std::size_t>(row)] += a * step;
        }
      }
      nz_.clear();
      for (std::size_t c = 0; c < m_; ++c) {
        if (shift[c] != 0.0) nz_.push_back(c);
      }
      for (std::size_t i = 0; i < m_; ++i) {
        double sum = 0.0;
        const double* brow = &binv_[i * m_];
        for (std::size_t c : nz_) sum += brow[c] * shift[c];
        x_[static_cast<std::size_t>(head_[i])] -= sum;
      }
    }
    const auto q = static_cast<std::size_t>(enter);
    ftran(enter, alpha);
    const double bound = increase ? lb_[b] : ub_[b];
    const double delta = (x_[b] - bound) / alpha[ur];
    x_[q] += delta;
    for (std::size_t i = 0; i < m_; ++i) {
      if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= delta * alpha[i];
    }
    x_[b] = bound;
    state_[b] = increase ? State::Lower : State::Upper;
    const double theta = d[q] / arow[q];
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] != State::Basic && arow[j] != 0.0) d[j] -= theta * arow[j];
    }
    d[b] = -theta;
    d[q] = 0.0;
    pivot(ur, enter, alpha);
    if (since_factor_ == 0) {
      compute_basic_values();
      reduced_costs(d);
    }
    ++iter;
    ++local;
    ++total_iterations_;
    if (iter % kRecomputeEvery == 0) compute_basic_values();
  }
}

LpResult LpSolver::solve(std::int64_t iteration_limit) {
  LpResult res;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::Lower && !std::isfinite(lb_[j])) state_[j] = State::Upper;
    if (state_[j] == State::Upper && !std::isfinite(ub_[j])) state_[j] = State::Lower;
    if (state_[j] == State::Lower) x_[j] = lb_[j];
    if (state_[j] == State::Upper) x_[j] = ub_[j];
  }
  compute_basic_values();
  std::int64_t iter = 0;
  bool done = false;
  if (warm_ && !primal_feasible()) {
    const LpStatus st = dual_loop(iteration_limit, iter);
    if (st == LpStatus::Infeasible) {
      res.status = LpStatus::Infeasible;
      done = true;
    }
    compute_basic_values();
  }
  if (!done) res.status = primal_loop(iteration_limit, iter);
  warm_ = res.status == LpStatus::Optimal;
  res.iterations = iter;
  res.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  for (std::size_t j = 0; j < n_; ++j) res.objective += cost_[j] * x_[j];
  return res;
}

LpStatus LpSolver::primal_loop(std::int64_t iteration_limit, std::int64_t& iter) {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> cb(m_);
  std::vector<double> y(m_);
  std::vector<double> alpha(m_);
  int degenerate = 0;
  while (true) {
    if (iter >= iteration_limit) {
      status = LpStatus::IterationLimit;
      break;
    }
    bool phase1 = false;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto b = static_cast<std::size_t>(head_[i]);
      const double tol = kPrimalTol * (1.0 + std::abs(x_[b]));
      if (x_[b] < lb_[b] - tol) {
        cb[i] = 1.0;
        phase1 = true;
      } else if (x_[b] > ub_[b] + tol) {
        cb[i] = -1.0;
        phase1 = true;
      } else {
        cb[i] = 0.0;
      }
    }
    if (!phase1) {
      for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[static_cast<std::size_t>(head_[i])];
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (cb[i] == 0.0) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb[i] * row[k];
    }
    const bool bland = degenerate > 50;
    int enter = -1;
    double best = 0.0;
    double enter_d = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::Basic || lb_[j] == ub_[j]) continue;
      const double cj = phase1 ? 0.0 : cost_[j];
      const double d = cj - column_dot(static_cast<int>(j), y);
      const bool up = state_[j] == State::Lower && d > kDualTol;
      const bool down = state_[j] == State::Upper && d < -kDualTol;
      if (!up && !down) continue;
      if (bland) {
        enter = static_cast<int>(j);
        enter_d = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        enter = static_cast<int>(j);
        enter_d = d;
      }
    }
    if (enter < 0) {
      status = phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
      break;
    }
    const auto q = static_cast<std::size_t>(enter);
    const double dir = enter_d > 0 ? 1.0 : -1.0;
    ftran(enter, alpha);

    double theta = ub_[q] - lb_[q];
    int leave = -1;
    bool leave_to_upper = false;
    double leave_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = alpha[i];
      if (std::abs(a) < kPivotTol) continue;
      const double rate = -dir * a;
      const auto b = static_cast<std::size_t>(head_[i]);
      const double xv = x_[b];
      const double tol = kPrimalTol * (1.0 + std::abs(xv));
      double t = kLpInfinity;
      bool to_upper = false;
      if (rate < 0) {
        if (xv > ub_[b] + tol) {
          t = (xv - ub_[b]) / -rate;
          to_upper = true;
        } else if (xv >= lb_[b] - tol && std::isfinite(lb_[b])) {
          t = (xv - lb_[b]) / -rate;
        }
      } else {
        if (xv < lb_[b] - tol) {
          t = (lb_[b] - xv) / rate;
        } else if (xv <= ub_[b] + tol && std::isfinite(ub_[b])) {
          t = (ub_[b] - xv) / rate;
          to_upper = true;
        }
      }
      if (!std::isfinite(t)) continue;
      t = std::max(t, 0.0);
      const bool better = t < theta - 1e-12 ||
                          (leave >= 0 && t <= theta + 1e-12 &&
                           (bland ? head_[i] < head_[static_cast<std::size_t>(leave)] : std::abs(a) > std::abs(leave_pivot)));
      if (better || (leave < 0 && t < theta)) {
        theta = t;
        leave = static_cast<int>(i);
        leave_to_upper = to_upper;
        leave_pivot = a;
      }
    }
    if (!std::isfinite(theta)) {
      status = phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
      break;
    }
    ++iter;
    ++total_iterations_;
    degenerate = theta < 1e-12 ? degenerate + 1 : 0;
    x_[q] += dir * theta;
    for (std::size_t i = 0; i < m_; ++i) {
      if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= dir * theta * alpha[i];
    }
    if (leave < 0) {
      state_[q] = state_[q] == State::Lower ? State::Upper : State::Lower;
      x_[q] = state_[q] == State::Lower ? lb_[q] : ub_[q];
    } else {
      const auto r = static_cast<std::size_t>(leave);
      const auto b = static_cast<std::size_t>(head_[r]);
      state_[b] = leave_to_upper ? State::Upper : State::Lower;
      x_[b] = leave_to_upper ? ub_[b] : lb_[b];
      pivot(r, enter, alpha);
    }
    if (iter % kRecomputeEvery == 0) compute_basic_values();
  }
  return status;
}

}  // namespace railrecover
