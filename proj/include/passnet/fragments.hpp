#pragma once

// Directed graphlets on two and three nodes, induced motif and orbit
// counting, orbit-occurrence-per-player profiles, degree-preserving null
// ensembles and motif significance profiles.
//
// Atlas ordering: graphlets sorted by (node count, arc count, canonical
// code), where the canonical code is the smallest arc bitmask over all node
// relabellings. Arc (a, b) of a k-node graph occupies bit a * (k - 1) +
// (b < a ? b : b - 1). Orbits are numbered in atlas order, then by the
// lowest canonical node position they contain.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "passnet/common.hpp"
#include "passnet/passmap.hpp"

namespace passnet {

inline constexpr std::size_t kGraphletCount = 15;
inline constexpr std::size_t kOrbitCount = 33;
// Divisor of orbit profiles: players on the pitch, regardless of dismissals.
inline constexpr double kPlayersOnPitch = 11.0;

struct Graphlet {
  std::size_t index{0};
  std::string name;
  int nodes{0};
  int arcs{0};
  std::uint32_t code{0};
  // Global orbit index of each canonical node position.
  std::vector<std::size_t> orbit_of_position;
  std::size_t first_orbit{0};
  std::size_t orbit_count{0};

  bool has_arc(int a, int b) const;
};

struct GraphletAtlas {
  std::vector<Graphlet> graphlets;
  std::size_t orbit_total{0};

  const Graphlet& by_name(std::string_view name) const {
    for (const auto& g : graphlets)
      if (g.name == name) return g;
    throw std::out_of_range("no graphlet named " + std::string(name));
  }
  // Graphlet index owning a global orbit index.
  std::size_t graphlet_of_orbit(std::size_t orbit) const {
    for (const auto& g : graphlets)
      if (orbit >= g.first_orbit && orbit < g.first_orbit + g.orbit_count) return g.index;
    throw std::out_of_range("orbit index out of range");
  }
};

namespace detail {

inline constexpr int arc_bit(int k, int a, int b) { return a * (k - 1) + (b < a ? b : b - 1); }

inline std::uint32_t permute_code(int k, std::uint32_t code, const std::array<int, 3>& perm) {
  std::uint32_t out = 0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b && (code >> arc_bit(k, a, b) & 1U)) out |= 1U << arc_bit(k, perm[a], perm[b]);
  return out;
}

inline std::vector<std::array<int, 3>> permutations(int k) {
  std::array<int, 3> p{0, 1, 2};
  std::vector<std::array<int, 3>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.begin() + k));
  return out;
}

inline bool weakly_connected(int k, std::uint32_t code) {
  std::array<int, 3> parent{0, 1, 2};
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b && (code >> arc_bit(k, a, b) & 1U)) parent[find(a)] = find(b);
  for (int a = 1; a < k; ++a)
    if (find(a) != find(0)) return false;
  return true;
}

inline std::uint32_t canonical_code(int k, std::uint32_t code) {
  std::uint32_t best = code;
  for (const auto& p : permutations(k)) best = std::min(best, permute_code(k, code, p));
  return best;
}

inline std::uint32_t code_of(int k, std::initializer_list<std::pair<int, int>> arcs) {
  std::uint32_t c = 0;
  for (auto [a, b] : arcs) c |= 1U << arc_bit(k, a, b);
  return c;
}

struct NamedShape {
  const char* name;
  int k;
  std::uint32_t code;
};

// Representatives for naming; nodes A = 0, B = 1, C = 2.
inline std::vector<NamedShape> named_shapes() {
  return {
      {"single arc", 2, code_of(2, {{0, 1}})},
      {"mutual dyad", 2, code_of(2, {{0, 1}, {1, 0}})},
      {"out-star", 3, code_of(3, {{0, 1}, {0, 2}})},
      {"in-star", 3, code_of(3, {{1, 0}, {2, 0}})},
      {"path", 3, code_of(3, {{0, 1}, {1, 2}})},
      {"mutual with out-arc", 3, code_of(3, {{0, 1}, {1, 0}, {1, 2}})},
      {"mutual with in-arc", 3, code_of(3, {{0, 1}, {1, 0}, {2, 1}})},
      {"feed-forward", 3, code_of(3, {{0, 1}, {1, 2}, {0, 2}})},
      {"3-cycle", 3, code_of(3, {{0, 1}, {1, 2}, {2, 0}})},
      {"pivot", 3, code_of(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}})},
      {"out-star with mutual", 3, code_of(3, {{2, 0}, {2, 1}, {0, 1}, {1, 0}})},
      {"in-star with mutual", 3, code_of(3, {{0, 2}, {1, 2}, {0, 1}, {1, 0}})},
      {"path with mutual", 3, code_of(3, {{0, 1}, {1, 2}, {0, 2}, {2, 0}})},
      {"pivot with arc", 3, code_of(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}})},
      {"complete mutual triad", 3, code_of(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}})},
  };
}

}  // namespace detail

inline bool Graphlet::has_arc(int a, int b) const {
  return a != b && (code >> detail::arc_bit(nodes, a, b) & 1U);
}

// Every weakly connected digraph on 2 or 3 nodes up to isomorphism, with
// automorphism orbits.
inline GraphletAtlas build_atlas() {
  struct Raw {
    int k;
    int arcs;
    std::uint32_t code;
  };
  std::vector<Raw> raw;
  for (int k = 2; k <= 3; ++k) {
    const std::uint32_t limit = 1U << (k * (k - 1));
    std::set<std::uint32_t> seen;
    for (std::uint32_t code = 1; code < limit; ++code) {
      if (!detail::weakly_connected(k, code)) continue;
      const auto c = detail::canonical_code(k, code);
      if (seen.insert(c).second) raw.push_back({k, std::popcount(c), c});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    return std::tie(a.k, a.arcs, a.code) < std::tie(b.k, b.arcs, b.code);
  });

  const auto shapes = detail::named_shapes();
  GraphletAtlas atlas;
  for (const Raw& r : raw) {
    Graphlet g;
    g.index = atlas.graphlets.size();
    g.nodes = r.k;
    g.arcs = r.arcs;
    g.code = r.code;
    for (const auto& s : shapes)
      if (s.k == r.k && detail::canonical_code(s.k, s.code) == r.code) g.name = s.name;

    // Orbits: union positions related by an automorphism.
    std::array<int, 3> orbit_root{0, 1, 2};
    for (const auto& p : detail::permutations(r.k)) {
      if (detail::permute_code(r.k, r.code, p) != r.code) continue;
      for (int v = 0; v < r.k; ++v) {
        const int a = orbit_root[v], b = orbit_root[p[v]];
        const int lo = std::min(a, b);
        for (int u = 0; u < r.k; ++u)
          if (orbit_root[u] == a || orbit_root[u] == b) orbit_root[u] = lo;
      }
    }
    g.first_orbit = atlas.orbit_total;
    g.orbit_of_position.resize(static_cast<std::size_t>(r.k));
    std::vector<int> roots;
    for (int v = 0; v < r.k; ++v) {
      auto it = std::find(roots.begin(), roots.end(), orbit_root[v]);
      if (it == roots.end()) {
        roots.push_back(orbit_root[v]);
        it = roots.end() - 1;
      }
      g.orbit_of_position[static_cast<std::size_t>(v)] =
          g.first_orbit + static_cast<std::size_t>(it - roots.begin());
    }
    g.orbit_count = roots.size();
    atlas.orbit_total += g.orbit_count;
    atlas.graphlets.push_back(std::move(g));
  }
  return atlas;
}

inline const GraphletAtlas& atlas() {
  static const GraphletAtlas a = build_atlas();
  return a;
}

namespace detail {

// Lookup from a labelled induced subgraph code to (graphlet, orbit of each
// labelled position).
struct Classification {
  int graphlet{-1};
  std::array<std::size_t, 3> orbit{};
};

struct Classifier {
  std::array<Classification, 4> dyad{};
  std::array<Classification, 64> triad{};

  Classifier() {
    const GraphletAtlas& at = atlas();
    for (int k = 2; k <= 3; ++k) {
      const std::uint32_t limit = 1U << (k * (k - 1));
      for (std::uint32_t code = 1; code < limit; ++code) {
        if (!weakly_connected(k, code)) continue;
        Classification c;
        for (const auto& p : permutations(k)) {
          const auto img = permute_code(k, code, p);
          for (const auto& g : at.graphlets) {
            if (g.nodes != k || g.code != img) continue;
            c.graphlet = static_cast<int>(g.index);
            for (int v = 0; v < k; ++v)
              c.orbit[static_cast<std::size_t>(v)] = g.orbit_of_position[static_cast<std::size_t>(p[v])];
          }
          if (c.graphlet >= 0) break;
        }
        (k == 2 ? dyad[code] : triad[code]) = c;
      }
    }
  }
};

inline const Classifier& classifier() {
  static const Classifier c;
  return c;
}

}  // namespace detail

using MotifCounts = std::array<std::int64_t, kGraphletCount>;
using OrbitVector = std::array<std::int64_t, kOrbitCount>;

struct FragmentCounts {
  MotifCounts motifs{};
  std::vector<PlayerId> players;      // node order
  std::vector<OrbitVector> orbits;    // per player
};

// Unweighted adjacency as a dense boolean matrix.
struct Adjacency {
  std::size_t n{0};
  std::vector<char> a;

  bool operator()(std::size_t i, std::size_t j) const { return a[i * n + j] != 0; }
};

inline Adjacency adjacency(const Passmap& g) {
  Adjacency m{g.node_count(), std::vector<char>(g.node_count() * g.node_count(), 0)};
  for (const auto& [arc, w] : g.arcs()) m.a[*g.index_of(arc.first) * m.n + *g.index_of(arc.second)] = 1;
  return m;
}

// Induced counts of every connected pair and weakly connected triple, and
// each node's tally per orbit. `orbits` may be null when only motif counts
// are needed.
inline MotifCounts count_fragments(const Adjacency& g, std::vector<OrbitVector>* orbits) {
  const auto& cls = detail::classifier();
  const std::size_t n = g.n;
  MotifCounts counts{};
  if (orbits) orbits->assign(n, OrbitVector{});

  auto linked = [&](std::size_t i, std::size_t j) { return g(i, j) || g(j, i); };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!linked(i, j)) continue;
      const std::uint32_t code = (g(i, j) ? 1U : 0U) | (g(j, i) ? 2U : 0U);
      const auto& c = cls.dyad[code];
      ++counts[static_cast<std::size_t>(c.graphlet)];
      if (orbits) {
        ++(*orbits)[i][c.orbit[0]];
        ++(*orbits)[j][c.orbit[1]];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool ij = linked(i, j);
      for (std::size_t k = j + 1; k < n; ++k) {
        const int links = int(ij) + int(linked(i, k)) + int(linked(j, k));
        if (links < 2) continue;
        const std::array<std::size_t, 3> v{i, j, k};
        std::uint32_t code = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            if (a != b && g(v[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(b)]))
              code |= 1U << detail::arc_bit(3, a, b);
        const auto& c = cls.triad[code];
        ++counts[static_cast<std::size_t>(c.graphlet)];
        if (orbits) {
          for (std::size_t p = 0; p < 3; ++p) ++(*orbits)[v[p]][c.orbit[p]];
        }
      }
    }
  }
  return counts;
}

inline FragmentCounts count_motifs_and_orbits(const Passmap& g) {
  FragmentCounts out;
  out.players = node_ids(g);
  out.motifs = count_fragments(adjacency(g), &out.orbits);
  return out;
}

using OppProfile = std::array<double, kOrbitCount>;

// Per-orbit player occurrences divided by 11.
inline OppProfile opp_profile(const FragmentCounts& counts) {
  OppProfile p{};
  for (const auto& row : counts.orbits)
    for (std::size_t o = 0; o < kOrbitCount; ++o) p[o] += static_cast<double>(row[o]);
  for (double& x : p) x /= kPlayersOnPitch;
  return p;
}

// ---------------------------------------------------------------------------
// Null ensembles

struct EnsembleOptions {
  std::size_t size{100};
  std::uint64_t master_seed{0};
  // Accepted swaps per sample, as a multiple of the arc count.
  std::size_t swaps_per_arc{10};
  // Proposals per sample are capped at this multiple of the swap target.
  std::size_t max_attempt_factor{100};
};

struct EnsembleStats {
  std::array<double, kGraphletCount> mean{};
  std::array<double, kGraphletCount> sd{};
  std::size_t size{0};
  std::uint64_t master_seed{0};
  // True when some sample could not reach its swap target; samples with no
  // legal swap are identical to the input.
  bool swap_starved{false};
  std::size_t min_accepted_swaps{0};
};

// Degree-preserving randomization by double arc swaps: (a->b, c->d) becomes
// (a->d, c->b) unless that creates a self-loop or a parallel arc. Returns
// the number of accepted swaps.
inline std::size_t rewire(Adjacency& g, std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                          std::size_t target, std::size_t max_attempts, Rng& rng) {
  if (arcs.size() < 2) return 0;
  std::size_t accepted = 0;
  for (std::size_t attempt = 0; attempt < max_attempts && accepted < target; ++attempt) {
    const std::size_t x = rng.below(arcs.size());
    std::size_t y = rng.below(arcs.size() - 1);
    if (y >= x) ++y;
    auto [a, b] = arcs[x];
    auto [c, d] = arcs[y];
    if (a == d || c == b || a == c || b == d) continue;
    if (g.a[a * g.n + d] || g.a[c * g.n + b]) continue;
    g.a[a * g.n + b] = 0;
    g.a[c * g.n + d] = 0;
    g.a[a * g.n + d] = 1;
    g.a[c * g.n + b] = 1;
    arcs[x] = {a, d};
    arcs[y] = {c, b};
    ++accepted;
  }
  return accepted;
}

inline std::vector<std::pair<std::size_t, std::size_t>> arc_list(const Adjacency& g) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j)
      if (g(i, j)) arcs.emplace_back(i, j);
  return arcs;
}

// One null-model sample; `index` selects the per-sample seed.
inline Adjacency configuration_sample(const Adjacency& g, const EnsembleOptions& opt,
                                      std::size_t index, std::size_t* accepted = nullptr) {
  Adjacency s = g;
  auto arcs = arc_list(s);
  Rng rng(derive_seed(opt.master_seed, index));
  const std::size_t target = opt.swaps_per_arc * arcs.size();
  const std::size_t done = rewire(s, arcs, target, target * opt.max_attempt_factor, rng);
  if (accepted) *accepted = done;
  return s;
}

inline EnsembleStats configuration_ensemble(const Passmap& g, const EnsembleOptions& opt = {}) {
  if (opt.size < 2) throw std::invalid_argument("ensemble size must be at least 2");
  const Adjacency base = adjacency(g);
  const std::size_t target = opt.swaps_per_arc * arc_list(base).size();

  std::vector<MotifCounts> samples(opt.size);
  std::vector<std::size_t> accepted(opt.size, 0);
  for (std::size_t s = 0; s < opt.size; ++s) {
    samples[s] = count_fragments(configuration_sample(base, opt, s, &accepted[s]), nullptr);
  }

  EnsembleStats st;
  st.size = opt.size;
  st.master_seed = opt.master_seed;
  st.min_accepted_swaps = *std::min_element(accepted.begin(), accepted.end());
  st.swap_starved = st.min_accepted_swaps < target;
  for (std::size_t i = 0; i < kGraphletCount; ++i) {
    std::vector<double> xs(opt.size);
    for (std::size_t s = 0; s < opt.size; ++s) xs[s] = static_cast<double>(samples[s][i]);
    st.mean[i] = stats::mean(xs);
    st.sd[i] = stats::sstdev(xs);
  }
  return st;
}

struct SignificanceProfile {
  std::array<double, kGraphletCount> z{};
  std::array<double, kGraphletCount> sp{};
  // Motifs whose null spread was zero and whose z was set to +-cap.
  std::array<bool, kGraphletCount> capped{};
};

// z_i = (n_i - mean_i) / sd_i, normalized to unit length. A zero spread
// gives z = 0 when the count equals the null mean and +-z_cap otherwise.
inline SignificanceProfile significance_profile(const MotifCounts& counts, const EnsembleStats& ens,
                                                double z_cap = 10.0) {
  SignificanceProfile p;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < kGraphletCount; ++i) {
    const double diff = static_cast<double>(counts[i]) - ens.mean[i];
    if (ens.sd[i] > 0.0) {
      p.z[i] = diff / ens.sd[i];
    } else if (std::abs(diff) > 1e-12) {
      p.z[i] = diff > 0 ? z_cap : -z_cap;
      p.capped[i] = true;
    }
    norm2 += p.z[i] * p.z[i];
  }
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (std::size_t i = 0; i < kGraphletCount; ++i) p.sp[i] = p.z[i] / norm;
  }
  return p;
}

}  // namespace passnet
