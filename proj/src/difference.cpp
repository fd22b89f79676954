#include "railrecover/difference.hpp"

#include <deque>

namespace railrecover {

void DifferenceSystem::set_bounds(int i, Seconds lo, Seconds hi) {
  lo_.at(static_cast<std::size_t>(i)) = lo;
  hi_.at(static_cast<std::size_t>(i)) = hi;
}

void DifferenceSystem::add_at_least(int from, int to, Seconds weight) {
  const int e = static_cast<int>(edges_.size());
  edges_.push_back(Edge{from, to, weight});
  out_.at(static_cast<std::size_t>(from)).push_back(e);
  in_.at(static_cast<std::size_t>(to)).push_back(e);
}

void DifferenceSystem::add_at_most(int from, int to, Seconds weight) { add_at_least(to, from, -weight); }

std::optional<std::vector<Seconds>> DifferenceSystem::least() const {
  const std::size_t n = size();
  std::vector<Seconds> t = lo_;
  for (std::size_t i = 0; i < n; ++i) {
    if (lo_[i] > hi_[i]) return std::nullopt;
  }
  std::deque<int> queue;
  std::vector<char> queued(n, 1);
  std::vector<std::size_t> enqueued(n, 1);
  for (std::size_t i = 0; i < n; ++i) queue.push_back(static_cast<int>(i));
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    queued[static_cast<std::size_t>(u)] = 0;
    for (int e : out_[static_cast<std::size_t>(u)]) {
      const Edge& edge = edges_[static_cast<std::size_t>(e)];
      const auto v = static_cast<std::size_t>(edge.to);
      const Seconds cand = t[static_cast<std::size_t>(u)] + edge.weight;
      if (cand <= t[v]) continue;
      t[v] = cand;
      if (t[v] > hi_[v]) return std::nullopt;
      if (!queued[v]) {
        if (++enqueued[v] > n + 1) return std::nullopt;
        queued[v] = 1;
        queue.push_back(edge.to);
      }
    }
  }
  return t;
}

std::optional<std::vector<Seconds>> DifferenceSystem::greatest() const {
  const std::size_t n = size();
  std::vector<Seconds> t = hi_;
  for (std::size_t i = 0; i < n; ++i) {
    if (lo_[i] > hi_[i]) return std::nullopt;
  }
  std::deque<int> queue;
  std::vector<char> queued(n, 1);
  std::vector<std::size_t> enqueued(n, 1);
  for (std::size_t i = 0; i < n; ++i) queue.push_back(static_cast<int>(i));
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    queued[static_cast<std::size_t>(v)] = 0;
    for (int e : in_[static_cast<std::size_t>(v)]) {
      const Edge& edge = edges_[static_cast<std::size_t>(e)];
      const auto u = static_cast<std::size_t>(edge.from);
      const Seconds cand = t[static_cast<std::size_t>(v)] - edge.weight;
      if (cand >= t[u]) continue;
      t[u] = cand;
      if (t[u] < lo_[u]) return std::nullopt;
      if (!queued[u]) {
        if (++enqueued[u] > n + 1) return std::nullopt;
        queued[u] = 1;
        queue.push_back(edge.from);
      }
    }
  }
  return t;
}

}  // namespace railrecover
