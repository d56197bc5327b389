#pragma once

// Community structure of pruned passmaps: Leiden on weighted modularity,
// clique percolation, NMI against formation playing lines and the
// position-by-community-size profile.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "passnet/common.hpp"
#include "passnet/passmap.hpp"

namespace passnet {

enum class PartitionMethod { Leiden, CliquePercolation, PlayingLines };

inline std::string_view to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::Leiden: return "leiden";
    case PartitionMethod::CliquePercolation: return "clique_percolation";
    case PartitionMethod::PlayingLines: return "playing_lines";
  }
  return "?";
}

// Hard assignment of every node to a community. Indices are contiguous from
// 0 and numbered in order of first appearance along `nodes`.
struct Partition {
  PartitionMethod method{PartitionMethod::Leiden};
  std::vector<PlayerId> nodes;
  std::vector<int> community;

  std::size_t size() const { return nodes.size(); }

  int count() const {
    return community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  }

  std::optional<int> community_of(PlayerId id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] == id) return community[i];
    }
    return std::nullopt;
  }

  std::vector<std::vector<PlayerId>> blocks() const {
    std::vector<std::vector<PlayerId>> out(static_cast<std::size_t>(count()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      out[static_cast<std::size_t>(community[i])].push_back(nodes[i]);
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Relabels arbitrary non-negative labels to 0, 1, ... in order of first use.
inline std::vector<int> canonical_labels(const std::vector<int>& labels) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, fresh] = remap.emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

inline Partition make_partition(PartitionMethod method, std::vector<PlayerId> nodes,
                                const std::vector<int>& labels) {
  return Partition{method, std::move(nodes), canonical_labels(labels)};
}

// Undirected weights: a[i][j] = w_ij + w_ji, zero diagonal.
inline WeightMatrix symmetrized(const Passmap& g) {
  WeightMatrix m = weight_matrix(g);
  WeightMatrix s{m.n, std::vector<double>(m.n * m.n, 0.0)};
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (i != j) s.w[i * m.n + j] = m(i, j) + m(j, i);
  return s;
}

// Newman modularity with resolution on a symmetric weight matrix.
inline double modularity(const WeightMatrix& a, const std::vector<int>& labels,
                         double resolution = 1.0) {
  const std::size_t n = a.n;
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a(i, j);
    two_m += k[i];
  }
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (labels[i] == labels[j]) q += a(i, j) - resolution * k[i] * k[j] / two_m;
  return q / two_m;
}

inline double modularity(const Passmap& g, const Partition& p, double resolution = 1.0) {
  return modularity(symmetrized(g), p.community, resolution);
}

namespace detail {

// One level of the Leiden hierarchy: a weighted graph whose nodes are sets
// of original nodes. `w` may carry self-loops (internal weight of a merged
// node, counted in both directions).
struct LeidenLevel {
  std::size_t n{0};
  std::vector<double> w;
  std::vector<double> k;

  double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }
};

inline LeidenLevel make_level(const WeightMatrix& a) {
  LeidenLevel lv{a.n, a.w, std::vector<double>(a.n, 0.0)};
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < a.n; ++j) lv.k[i] += a(i, j);
  return lv;
}

class Leiden {
 public:
  Leiden(double resolution, Rng& rng, double two_m)
      : gamma_(resolution), rng_(rng), two_m_(two_m) {}

  // Queue-based local moving. Returns true if any node moved.
  bool move_nodes(const LeidenLevel& g, std::vector<int>& comm) const {
    const std::size_t n = g.n;
    std::vector<double> tot(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[static_cast<std::size_t>(comm[i])] += g.k[i];

    std::vector<std::size_t> queue(n);
    std::iota(queue.begin(), queue.end(), 0);
    rng_.shuffle(queue);
    std::vector<char> queued(n, 1);
    std::size_t head = 0;
    bool moved = false;
    std::vector<double> link(n + 1);

    while (head < queue.size()) {
      const std::size_t v = queue[head++];
      queued[v] = 0;
      const int cur = comm[v];
      std::fill(link.begin(), link.end(), 0.0);
      for (std::size_t u = 0; u < n; ++u) {
        if (u != v && g.at(v, u) > 0.0) link[static_cast<std::size_t>(comm[u])] += g.at(v, u);
      }
      tot[static_cast<std::size_t>(cur)] -= g.k[v];
      const int empty = empty_community(comm, v, n);
      auto gain = [&](int c) {
        return link[static_cast<std::size_t>(c)] -
               gamma_ * g.k[v] * tot[static_cast<std::size_t>(c)] / two_m_;
      };
      int best = cur;
      double best_gain = gain(cur);
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v || g.at(v, u) <= 0.0) continue;
        const int c = comm[u];
        if (gain(c) > best_gain + kEps) {
          best = c;
          best_gain = gain(c);
        }
      }
      if (empty >= 0 && gain(empty) > best_gain + kEps) best = empty;
      tot[static_cast<std::size_t>(best)] += g.k[v];
      if (best != cur) {
        comm[v] = best;
        moved = true;
        for (std::size_t u = 0; u < n; ++u) {
          if (u != v && g.at(v, u) > 0.0 && comm[u] != best && !queued[u]) {
            queued[u] = 1;
            queue.push_back(u);
          }
        }
      }
    }
    return moved;
  }

  // Refinement: within each community, merge singletons into well-connected
  // sub-communities. Moves are drawn at random among positive-gain choices,
  // weighted by exp(gain / theta).
  std::vector<int> refine(const LeidenLevel& g, const std::vector<int>& comm) const {
    const std::size_t n = g.n;
    std::vector<int> ref(n);
    std::iota(ref.begin(), ref.end(), 0);
    std::vector<double> ref_tot(g.k);
    std::vector<char> singleton(n, 1);

    std::vector<double> comm_tot(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) comm_tot[static_cast<std::size_t>(comm[i])] += g.k[i];

    // Weight from each refined community to the rest of its parent community.
    std::vector<double> ext(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && comm[i] == comm[j]) ext[i] += g.at(i, j);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(order);

    std::vector<double> link(n);
    for (std::size_t v : order) {
      if (!singleton[v]) continue;
      const double ctot = comm_tot[static_cast<std::size_t>(comm[v])];
      if (ext[v] < gamma_ * g.k[v] * (ctot - g.k[v]) / two_m_ - kEps) continue;

      std::fill(link.begin(), link.end(), 0.0);
      for (std::size_t u = 0; u < n; ++u) {
        if (u != v && comm[u] == comm[v] && g.at(v, u) > 0.0)
          link[static_cast<std::size_t>(ref[u])] += g.at(v, u);
      }
      std::vector<std::pair<int, double>> options;
      for (std::size_t c = 0; c < n; ++c) {
        if (link[c] <= 0.0 || static_cast<int>(c) == ref[v]) continue;
        const double stot = ref_tot[c];
        if (ext[c] < gamma_ * stot * (ctot - stot) / two_m_ - kEps) continue;
        const double gain = link[c] - gamma_ * g.k[v] * stot / two_m_;
        if (gain > kEps) options.emplace_back(static_cast<int>(c), gain);
      }
      if (options.empty()) continue;

      double gmax = 0.0;
      for (const auto& [c, gain] : options) gmax = std::max(gmax, gain);
      std::vector<double> cum;
      double acc = 0.0;
      for (const auto& [c, gain] : options) {
        acc += std::exp((gain - gmax) / kTheta);
        cum.push_back(acc);
      }
      const double r = rng_.uniform() * acc;
      std::size_t pick = 0;
      while (pick + 1 < cum.size() && cum[pick] <= r) ++pick;
      const int target = options[pick].first;

      // ext of the merged set: both sides lose the weight between them.
      const int old = ref[v];
      ext[static_cast<std::size_t>(target)] += ext[static_cast<std::size_t>(old)] - 2.0 * link[static_cast<std::size_t>(target)];
      ref_tot[static_cast<std::size_t>(target)] += g.k[v];
      ref_tot[static_cast<std::size_t>(old)] = 0.0;
      ext[static_cast<std::size_t>(old)] = 0.0;
      ref[v] = target;
      singleton[v] = 0;
      for (std::size_t u = 0; u < n; ++u)
        if (ref[u] == target) singleton[u] = 0;
    }
    return ref;
  }

 private:
  static constexpr double kEps = 1e-12;
  static constexpr double kTheta = 0.01;

  static int empty_community(const std::vector<int>& comm, std::size_t v, std::size_t n) {
    std::vector<char> used(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (i != v) used[static_cast<std::size_t>(comm[i])] = 1;
    if (!used[static_cast<std::size_t>(comm[v])]) return -1;  // already alone
    for (std::size_t c = 0; c <= n; ++c)
      if (!used[c]) return static_cast<int>(c);
    return -1;
  }

  double gamma_;
  Rng& rng_;
  double two_m_;
};

inline LeidenLevel aggregate(const LeidenLevel& g, const std::vector<int>& ref, std::size_t count) {
  LeidenLevel out{count, std::vector<double>(count * count, 0.0), std::vector<double>(count, 0.0)};
  for (std::size_t i = 0; i < g.n; ++i) {
    const auto ci = static_cast<std::size_t>(ref[i]);
    out.k[ci] += g.k[i];
    for (std::size_t j = 0; j < g.n; ++j) out.w[ci * count + static_cast<std::size_t>(ref[j])] += g.at(i, j);
  }
  return out;
}

// One full Leiden pass starting from `labels` on the original graph.
inline std::vector<int> leiden_pass(const WeightMatrix& a, std::vector<int> labels,
                                    double resolution, Rng& rng, double two_m) {
  const Leiden algo(resolution, rng, two_m);
  LeidenLevel level = make_level(a);
  // member[i] = level node of original node i
  std::vector<int> member(a.n);
  std::iota(member.begin(), member.end(), 0);
  std::vector<int> comm = canonical_labels(labels);

  for (;;) {
    algo.move_nodes(level, comm);
    comm = canonical_labels(comm);
    const auto ncomm = static_cast<std::size_t>(*std::max_element(comm.begin(), comm.end()) + 1);
    if (ncomm == level.n) break;

    std::vector<int> ref = canonical_labels(algo.refine(level, comm));
    const auto nref = static_cast<std::size_t>(*std::max_element(ref.begin(), ref.end()) + 1);
    std::vector<int> next_comm(nref);
    for (std::size_t i = 0; i < level.n; ++i) next_comm[static_cast<std::size_t>(ref[i])] = comm[i];
    for (auto& m : member) m = ref[static_cast<std::size_t>(m)];
    level = aggregate(level, ref, nref);
    comm = canonical_labels(next_comm);
    if (nref == ref.size()) {
      // Refinement merged nothing; aggregation cannot make progress.
      break;
    }
  }
  std::vector<int> out(a.n);
  for (std::size_t i = 0; i < a.n; ++i) out[i] = comm[static_cast<std::size_t>(member[i])];
  return canonical_labels(out);
}

}  // namespace detail

// Leiden on the symmetrized weights of `g`. Passes repeat from the previous
// result until a pass changes nothing, so the output admits no improving
// single-node move. Deterministic for a given seed.
inline Partition leiden(const Passmap& g, double resolution = 1.0, std::uint64_t seed = 0) {
  if (resolution <= 0.0) throw std::invalid_argument("resolution must be positive");
  const auto ids = node_ids(g);
  if (ids.empty()) return Partition{PartitionMethod::Leiden, {}, {}};
  const WeightMatrix a = symmetrized(g);
  double two_m = std::accumulate(a.w.begin(), a.w.end(), 0.0);
  std::vector<int> labels(a.n);
  std::iota(labels.begin(), labels.end(), 0);
  if (two_m == 0.0) return make_partition(PartitionMethod::Leiden, ids, labels);

  Rng rng(seed);
  for (int pass = 0; pass < 100; ++pass) {
    auto next = detail::leiden_pass(a, labels, resolution, rng, two_m);
    if (next == labels) break;
    labels = std::move(next);
  }
  return make_partition(PartitionMethod::Leiden, ids, labels);
}

// ---------------------------------------------------------------------------
// Clique percolation

// Undirected support of `g` as a boolean adjacency matrix.
inline std::vector<std::vector<char>> undirected_support(const Passmap& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& [arc, w] : g.arcs()) {
    const auto i = *g.index_of(arc.first), j = *g.index_of(arc.second);
    adj[i][j] = adj[j][i] = 1;
  }
  return adj;
}

namespace detail {

inline void bron_kerbosch(const std::vector<std::vector<char>>& adj, std::vector<std::size_t>& r,
                          std::vector<std::size_t> p, std::vector<std::size_t> x,
                          std::vector<std::vector<std::size_t>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  std::size_t pivot = p.empty() ? x.front() : p.front();
  std::size_t best = 0;
  for (const auto* set : {&p, &x}) {
    for (std::size_t u : *set) {
      std::size_t deg = 0;
      for (std::size_t v : p) deg += adj[u][v];
      if (deg >= best) {
        best = deg;
        pivot = u;
      }
    }
  }
  const std::vector<std::size_t> candidates = p;
  for (std::size_t v : candidates) {
    if (adj[pivot][v]) continue;
    std::vector<std::size_t> np, nx;
    for (std::size_t u : p)
      if (adj[v][u]) np.push_back(u);
    for (std::size_t u : x)
      if (adj[v][u]) nx.push_back(u);
    r.push_back(v);
    bron_kerbosch(adj, r, np, nx, out);
    r.pop_back();
    std::erase(p, v);
    x.push_back(v);
  }
}

}  // namespace detail

// k-clique communities as node-index sets, sorted, in order of their
// smallest member. Computed from maximal cliques of size >= k; two are
// adjacent when they share at least k - 1 nodes.
inline std::vector<std::vector<std::size_t>> k_clique_communities(
    const std::vector<std::vector<char>>& adj, std::size_t k) {
  const std::size_t n = adj.size();
  std::vector<std::vector<std::size_t>> maximal;
  std::vector<std::size_t> r, p(n);
  std::iota(p.begin(), p.end(), 0);
  detail::bron_kerbosch(adj, r, p, {}, maximal);
  std::erase_if(maximal, [k](const auto& c) { return c.size() < k; });
  for (auto& c : maximal) std::sort(c.begin(), c.end());

  std::vector<std::size_t> parent(maximal.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    for (std::size_t j = i + 1; j < maximal.size(); ++j) {
      std::vector<std::size_t> common;
      std::set_intersection(maximal[i].begin(), maximal[i].end(), maximal[j].begin(),
                            maximal[j].end(), std::back_inserter(common));
      if (common.size() + 1 >= k) parent[find(i)] = find(j);
    }
  }
  std::map<std::size_t, std::set<std::size_t>> groups;
  for (std::size_t i = 0; i < maximal.size(); ++i)
    groups[find(i)].insert(maximal[i].begin(), maximal[i].end());
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.emplace_back(members.begin(), members.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Clique percolation flattened to a partition: a node in several
// communities goes to the one with the largest internal weight (ties to the
// lower index); uncovered nodes become singletons.
inline Partition clique_percolation(const Passmap& g, std::size_t k = 3) {
  if (k < 3 || k > 4) throw std::invalid_argument("clique percolation supports k = 3 or 4");
  const auto ids = node_ids(g);
  const auto cover = k_clique_communities(undirected_support(g), k);
  const WeightMatrix a = symmetrized(g);

  std::vector<double> internal(cover.size(), 0.0);
  for (std::size_t c = 0; c < cover.size(); ++c)
    for (std::size_t i : cover[c])
      for (std::size_t j : cover[c])
        if (i < j) internal[c] += a(i, j);

  std::vector<int> label(ids.size(), -1);
  for (std::size_t c = 0; c < cover.size(); ++c) {
    for (std::size_t i : cover[c]) {
      const int cur = label[i];
      if (cur < 0 || internal[c] > internal[static_cast<std::size_t>(cur)]) label[i] = static_cast<int>(c);
    }
  }
  int next = static_cast<int>(cover.size());
  for (auto& l : label)
    if (l < 0) l = next++;
  return make_partition(PartitionMethod::CliquePercolation, ids, label);
}

// ---------------------------------------------------------------------------
// NMI

class PartitionMismatch : public std::invalid_argument {
 public:
  explicit PartitionMismatch(std::vector<PlayerId> diff)
      : std::invalid_argument(describe(diff)), diff_(std::move(diff)) {}
  const std::vector<PlayerId>& symmetric_difference() const { return diff_; }

 private:
  static std::string describe(const std::vector<PlayerId>& diff) {
    std::string s = "partitions cover different node sets; symmetric difference:";
    for (auto id : diff) s += fmt::format(" {}", id.value);
    return s;
  }
  std::vector<PlayerId> diff_;
};

// Mutual information over the arithmetic mean of the two entropies. Both
// single-block: 1. Exactly one single-block: 0.
inline double nmi(const Partition& p, const Partition& q) {
  std::set<PlayerId> ps(p.nodes.begin(), p.nodes.end()), qs(q.nodes.begin(), q.nodes.end());
  if (ps != qs) {
    std::vector<PlayerId> diff;
    std::set_symmetric_difference(ps.begin(), ps.end(), qs.begin(), qs.end(), std::back_inserter(diff));
    throw PartitionMismatch(std::move(diff));
  }
  const auto n = static_cast<double>(p.size());
  if (p.size() == 0) return 1.0;

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pa, qb;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int a = p.community[i];
    const int b = *q.community_of(p.nodes[i]);
    joint[{a, b}] += 1.0;
    pa[a] += 1.0;
    qb[b] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& m) {
    double h = 0.0;
    for (const auto& [k, c] : m) h -= c / n * std::log(c / n);
    return h;
  };
  const double hp = entropy(pa), hq = entropy(qb);
  if (hp == 0.0 && hq == 0.0) return 1.0;
  if (hp == 0.0 || hq == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [ab, c] : joint) mi += c / n * std::log(c * n / (pa[ab.first] * qb[ab.second]));
  return std::clamp(mi / (0.5 * (hp + hq)), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Formations

struct FormationGroundTruth {
  TeamId team;
  std::map<PlayingLine, std::vector<PlayerId>> lines;
  std::unordered_map<PlayerId, std::string> names;

  std::optional<PlayingLine> line_of(PlayerId id) const {
    for (const auto& [line, players] : lines)
      if (std::find(players.begin(), players.end(), id) != players.end()) return line;
    return std::nullopt;
  }
};

struct FormationEntry {
  PlayerId player;
  std::string name;
  PlayingLine line;
};

class FormationError : public std::runtime_error {
 public:
  FormationError(std::size_t line, const std::string& what)
      : std::runtime_error(fmt::format("formation line {}: {}", line, what)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// `player_id,display_name,line` per line; blank lines and '#' comments are
// skipped. A player may appear only once.
inline std::vector<FormationEntry> parse_formation(std::string_view text) {
  std::vector<FormationEntry> out;
  std::set<PlayerId> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string_view::npos || c1 == c2)
      throw FormationError(lineno, "expected 'player_id,display_name,line'");
    std::int64_t id = 0;
    if (!detail::parse_number(detail::trim(line.substr(0, c1)), id))
      throw FormationError(lineno, "player_id is not an integer");
    auto pl = playing_line_from(detail::trim(line.substr(c2 + 1)));
    if (!pl) throw FormationError(lineno, "line must be one of GK, DEF, MID, ATT");
    if (!seen.insert(PlayerId{id}).second)
      throw FormationError(lineno, fmt::format("player {} listed twice", id));
    out.push_back({PlayerId{id}, std::string(detail::trim(line.substr(c1 + 1, c2 - c1 - 1))), *pl});
  }
  return out;
}

inline std::vector<FormationEntry> load_formation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open formation file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_formation(ss.str());
}

// Ground truth for one team: the formation entries whose players belong to
// `team_players`.
inline FormationGroundTruth ground_truth_for(TeamId team, const std::vector<FormationEntry>& entries,
                                             const std::set<PlayerId>& team_players) {
  FormationGroundTruth gt{team, {}, {}};
  for (const auto& e : entries) {
    if (!team_players.contains(e.player)) continue;
    gt.lines[e.line].push_back(e.player);
    gt.names[e.player] = e.name;
  }
  return gt;
}

// Playing-line partition over `nodes` (restricted to players with a known
// line). With merge_goalkeeper the goalkeeper joins the defence, giving the
// three-line variant.
inline Partition playing_lines(const FormationGroundTruth& gt, const std::vector<PlayerId>& nodes,
                               bool merge_goalkeeper = false) {
  std::vector<PlayerId> kept;
  std::vector<int> labels;
  for (PlayerId id : nodes) {
    auto line = gt.line_of(id);
    if (!line) continue;
    if (merge_goalkeeper && *line == PlayingLine::GK) line = PlayingLine::DEF;
    kept.push_back(id);
    labels.push_back(static_cast<int>(*line));
  }
  return make_partition(PartitionMethod::PlayingLines, std::move(kept), labels);
}

// `p` restricted to the nodes in `keep`, relabelled contiguously.
inline Partition restrict_to(const Partition& p, const std::vector<PlayerId>& keep) {
  std::set<PlayerId> ks(keep.begin(), keep.end());
  std::vector<PlayerId> nodes;
  std::vector<int> labels;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!ks.contains(p.nodes[i])) continue;
    nodes.push_back(p.nodes[i]);
    labels.push_back(p.community[i]);
  }
  return make_partition(p.method, std::move(nodes), labels);
}

// ---------------------------------------------------------------------------
// Position profile

enum class LineSlot { GK, DEF, MID, ATT, Unknown };
inline constexpr std::size_t kLineSlots = 5;

inline std::string_view to_string(LineSlot s) {
  switch (s) {
    case LineSlot::GK: return "GK";
    case LineSlot::DEF: return "DEF";
    case LineSlot::MID: return "MID";
    case LineSlot::ATT: return "ATT";
    case LineSlot::Unknown: return "unknown";
  }
  return "?";
}

struct PositionProfileRow {
  std::size_t community_size{0};
  std::array<std::size_t, kLineSlots> counts{};

  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
  double proportion(LineSlot s) const {
    const auto t = total();
    return t == 0 ? 0.0 : static_cast<double>(counts[static_cast<std::size_t>(s)]) / static_cast<double>(t);
  }
};

struct PositionProfile {
  std::map<std::size_t, PositionProfileRow> rows;  // keyed by community size
  std::size_t unknown_players{0};
};

// For each community size, the share of member slots held by each playing
// line. Players without a ground-truth line are counted as unknown.
inline PositionProfile position_community_profile(
    const std::vector<std::pair<Partition, FormationGroundTruth>>& items) {
  PositionProfile prof;
  for (const auto& [part, gt] : items) {
    for (const auto& block : part.blocks()) {
      auto& row = prof.rows[block.size()];
      row.community_size = block.size();
      for (PlayerId id : block) {
        auto line = gt.line_of(id);
        const auto slot = line ? static_cast<std::size_t>(*line) : static_cast<std::size_t>(LineSlot::Unknown);
        if (!line) ++prof.unknown_players;
        ++row.counts[slot];
      }
    }
  }
  return prof;
}

}  // namespace passnet
