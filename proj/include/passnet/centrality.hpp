#pragma once

// Betweenness, harmonic closeness and shot-flow centrality on weighted
// passmaps, plus the before/after spread comparison.
//
// Arc length is max_weight / w_ij: frequent passing lanes are short, the
// heaviest lane has length 1, and uniformly rescaling all weights leaves
// every score unchanged.

#include <optional>
#include <string_view>
#include <vector>

#include "passnet/common.hpp"
#include "passnet/passmap.hpp"

namespace passnet {

enum class Measure { Betweenness, Closeness, FlowCentrality };

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Betweenness: return "betweenness";
    case Measure::Closeness: return "closeness";
    case Measure::FlowCentrality: return "flow";
  }
  return "?";
}

struct CentralityVector {
  Measure measure{Measure::Betweenness};
  bool normalized{true};
  std::vector<std::pair<PlayerId, double>> scores;  // node order

  std::optional<double> at(PlayerId id) const {
    for (const auto& [p, s] : scores) {
      if (p == id) return s;
    }
    return std::nullopt;
  }

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(scores.size());
    for (const auto& [p, s] : scores) v.push_back(s);
    return v;
  }
};

namespace detail {

// Relative tolerance for treating two path lengths as equal.
inline constexpr double kPathTie = 1e-9;

inline bool same_length(double a, double b) {
  return std::abs(a - b) <= kPathTie * std::max({1.0, std::abs(a), std::abs(b)});
}

// Length matrix in node order; +inf where there is no arc.
inline std::vector<double> arc_lengths(const Passmap& g) {
  const std::size_t n = g.node_count();
  std::vector<double> len(n * n, std::numeric_limits<double>::infinity());
  int wmax = 0;
  for (const auto& [arc, w] : g.arcs()) wmax = std::max(wmax, w);
  for (const auto& [arc, w] : g.arcs()) {
    len[*g.index_of(arc.first) * n + *g.index_of(arc.second)] =
        static_cast<double>(wmax) / static_cast<double>(w);
  }
  return len;
}

// Unnormalized Brandes accumulation over a dense length matrix. Graphs here
// have a few dozen nodes, so Dijkstra runs on an O(n^2) scan.
inline std::vector<double> brandes(std::size_t n, const std::vector<double>& len) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> bc(n, 0.0);
  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<char> done(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;

  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(done.begin(), done.end(), 0);
    for (auto& p : preds) p.clear();
    order.clear();
    dist[s] = 0.0;
    sigma[s] = 1.0;

    for (;;) {
      std::size_t v = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && dist[i] < inf && (v == n || dist[i] < dist[v])) v = i;
      }
      if (v == n) break;
      done[v] = 1;
      order.push_back(v);
      for (std::size_t u = 0; u < n; ++u) {
        const double l = len[v * n + u];
        if (l == inf || done[u]) continue;
        const double cand = dist[v] + l;
        if (dist[u] < inf && same_length(cand, dist[u])) {
          sigma[u] += sigma[v];
          preds[u].push_back(v);
        } else if (cand < dist[u]) {
          dist[u] = cand;
          sigma[u] = sigma[v];
          preds[u].assign(1, v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  return bc;
}

inline CentralityVector betweenness_impl(const Passmap& g, Measure measure, bool normalize) {
  const std::size_t n = g.node_count();
  std::vector<double> bc = brandes(n, arc_lengths(g));
  if (normalize) {
    const double scale = n >= 3 ? 1.0 / static_cast<double>((n - 1) * (n - 2)) : 0.0;
    for (double& b : bc) b *= scale;
  }
  CentralityVector out{measure, normalize, {}};
  for (std::size_t i = 0; i < n; ++i) out.scores.emplace_back(g.nodes()[i].id, bc[i]);
  return out;
}

}  // namespace detail

// Shortest-path betweenness, normalized by (n-1)(n-2).
inline CentralityVector betweenness(const Passmap& g, bool normalize = true) {
  return detail::betweenness_impl(g, Measure::Betweenness, normalize);
}

// Harmonic closeness: sum over reachable targets of 1 / d(v, u), divided by
// n - 1. Unreachable targets contribute nothing.
inline CentralityVector closeness(const Passmap& g) {
  const std::size_t n = g.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  const auto len = detail::arc_lengths(g);
  CentralityVector out{Measure::Closeness, true, {}};
  std::vector<double> dist(n);
  std::vector<char> done(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    dist[s] = 0.0;
    for (;;) {
      std::size_t v = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && dist[i] < inf && (v == n || dist[i] < dist[v])) v = i;
      }
      if (v == n) break;
      done[v] = 1;
      for (std::size_t u = 0; u < n; ++u) {
        if (len[v * n + u] < inf) dist[u] = std::min(dist[u], dist[v] + len[v * n + u]);
      }
    }
    double h = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u != s && dist[u] < inf) h += 1.0 / dist[u];
    }
    out.scores.emplace_back(g.nodes()[s].id, n > 1 ? h / static_cast<double>(n - 1) : 0.0);
  }
  return out;
}

// Betweenness on the shot-augmented graph (normalized over all of its nodes),
// reported for players only.
inline CentralityVector flow_centrality(const AugmentedPassmap& aug, bool normalize = true) {
  CentralityVector full = detail::betweenness_impl(aug.graph, Measure::FlowCentrality, normalize);
  std::erase_if(full.scores, [](const auto& e) { return is_synthetic(e.first); });
  return full;
}

struct DeltaStd {
  KeyEventKind event{KeyEventKind::HalfTime};
  Measure measure{Measure::Betweenness};
  double std_before{0.0};
  double std_after{0.0};
  // std_after - std_before; absent when either half has no players.
  std::optional<double> value;
  // value / std_before; absent when std_before is 0.
  std::optional<double> relative;

  bool applicable() const { return value.has_value(); }
};

// Population standard deviation of player scores after the split minus
// before it. Positive means a larger spread after the event.
inline DeltaStd delta_std(const CentralityVector& before, const CentralityVector& after,
                          KeyEventKind event) {
  DeltaStd d;
  d.event = event;
  d.measure = before.measure;
  const auto b = before.values();
  const auto a = after.values();
  d.std_before = stats::pstdev(b);
  d.std_after = stats::pstdev(a);
  if (b.empty() || a.empty()) return d;
  d.value = d.std_after - d.std_before;
  if (d.std_before > 0.0) d.relative = *d.value / d.std_before;
  return d;
}

inline CentralityVector centrality(const Passmap& g, Measure m) {
  switch (m) {
    case Measure::Betweenness: return betweenness(g);
    case Measure::Closeness: return closeness(g);
    case Measure::FlowCentrality: break;
  }
  throw std::invalid_argument("flow centrality needs an augmented passmap");
}

inline DeltaStd delta_std(const KeyEventSplit& split, Measure measure) {
  if (measure == Measure::FlowCentrality) {
    throw std::invalid_argument("flow centrality needs augmented halves; use the vector overload");
  }
  return delta_std(centrality(split.before, measure), centrality(split.after, measure),
                   split.event.kind);
}

}  // namespace passnet
