#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "../oracles/oracles.hpp"
#include "passnet/fragments.hpp"

using namespace passnet;

namespace {

Passmap from_arcs(std::initializer_list<std::pair<int, int>> arcs) {
  Passmap g;
  for (auto [a, b] : arcs) g.add_arc(PlayerId{a}, PlayerId{b});
  return g;
}

std::vector<std::size_t> out_degrees(const Adjacency& g) {
  std::vector<std::size_t> d(g.n, 0);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) d[i] += g(i, j);
  return d;
}

std::vector<std::size_t> in_degrees(const Adjacency& g) {
  std::vector<std::size_t> d(g.n, 0);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) d[j] += g(i, j);
  return d;
}

}  // namespace

TEST(Atlas, FifteenGraphletsThirtyThreeOrbits) {
  const auto& a = atlas();
  EXPECT_EQ(a.graphlets.size(), kGraphletCount);
  EXPECT_EQ(a.orbit_total, kOrbitCount);
  std::size_t next = 0;
  for (const auto& g : a.graphlets) {
    EXPECT_EQ(g.first_orbit, next);
    next += g.orbit_count;
    std::set<std::size_t> used(g.orbit_of_position.begin(), g.orbit_of_position.end());
    EXPECT_EQ(used.size(), g.orbit_count) << g.name;
    EXPECT_EQ(*used.begin(), g.first_orbit) << g.name;
    EXPECT_EQ(*used.rbegin(), g.first_orbit + g.orbit_count - 1) << g.name;
  }
  EXPECT_EQ(next, kOrbitCount);
}

TEST(Atlas, AgreesWithBruteForceIsomorphismClasses) {
  const auto classes = oracle::enumerate_classes();
  ASSERT_EQ(classes.size(), 15U);
  std::size_t orbits = 0;
  for (const auto& c : classes) orbits += oracle::orbit_count(c);
  ASSERT_EQ(orbits, 33U);

  const auto& a = atlas();
  std::vector<int> matched(classes.size(), 0);
  for (const auto& g : a.graphlets) {
    const auto d = oracle::graphlet_digraph(g);
    EXPECT_TRUE(oracle::weakly_connected(d)) << g.name;
    std::size_t hits = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (!oracle::isomorphic(classes[c].rep, d)) continue;
      ++hits;
      ++matched[c];
      EXPECT_EQ(g.orbit_count, oracle::orbit_count(classes[c])) << g.name;
    }
    EXPECT_EQ(hits, 1U) << g.name;
    // Two positions share an orbit iff an automorphism maps one to the other.
    const auto k = static_cast<std::size_t>(g.nodes);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = 0; q < k; ++q) {
        bool related = false;
        for (const auto& perm : oracle::all_perms(k))
          related = related || (oracle::permuted(d, perm) == d && perm[p] == q);
        EXPECT_EQ(related, g.orbit_of_position[p] == g.orbit_of_position[q]) << g.name;
      }
  }
  for (int m : matched) EXPECT_EQ(m, 1);
}

TEST(Atlas, NamedShapes) {
  const auto& a = atlas();
  EXPECT_EQ(a.by_name("3-cycle").orbit_count, 1U);
  EXPECT_EQ(a.by_name("feed-forward").orbit_count, 3U);
  EXPECT_EQ(a.by_name("complete mutual triad").arcs, 6);
  EXPECT_EQ(a.graphlet_of_orbit(0), 0U);
  EXPECT_EQ(a.graphlet_of_orbit(32), 14U);
  EXPECT_THROW(a.by_name("pentagon"), std::out_of_range);
  EXPECT_THROW(a.graphlet_of_orbit(33), std::out_of_range);
}

TEST(Fragments, SmallExamples) {
  // A 3-cycle: three single arcs and one 3-cycle triad.
  const auto cyc = count_motifs_and_orbits(from_arcs({{1, 2}, {2, 3}, {3, 1}}));
  const auto& a = atlas();
  EXPECT_EQ(cyc.motifs[a.by_name("single arc").index], 3);
  EXPECT_EQ(cyc.motifs[a.by_name("3-cycle").index], 1);
  EXPECT_EQ(std::accumulate(cyc.motifs.begin(), cyc.motifs.end(), std::int64_t{0}), 4);
  for (const auto& row : cyc.orbits) EXPECT_EQ(row[a.by_name("3-cycle").first_orbit], 1);

  // Out-star: centre holds one orbit, leaves the other.
  const auto star = count_motifs_and_orbits(from_arcs({{1, 2}, {1, 3}}));
  const auto& os = a.by_name("out-star");
  EXPECT_EQ(star.motifs[os.index], 1);
  std::multiset<std::size_t> seen;
  for (const auto& row : star.orbits)
    for (std::size_t o = os.first_orbit; o < os.first_orbit + os.orbit_count; ++o)
      for (int c = 0; c < row[o]; ++c) seen.insert(o);
  EXPECT_EQ(seen.size(), 3U);
  EXPECT_EQ(seen.count(os.first_orbit) + seen.count(os.first_orbit + 1), 3U);
  EXPECT_TRUE(seen.count(os.first_orbit) == 1 || seen.count(os.first_orbit + 1) == 1);
}

TEST(Fragments, MatchExhaustivePermutationOracle) {
  Rng rng(123);
  const auto& a = atlas();
  for (int i = 0; i < 200; ++i) {
    const auto g = oracle::random_passmap(rng, 1 + rng.below(9), rng.uniform(), 1);
    const auto got = count_motifs_and_orbits(g);
    const auto want = oracle::count_fragments(g);
    ASSERT_TRUE(want.consistent);
    EXPECT_EQ(got.motifs, want.motifs) << to_pajek(g);
    ASSERT_EQ(got.orbits.size(), want.orbits.size());
    for (std::size_t v = 0; v < got.orbits.size(); ++v) EXPECT_EQ(got.orbits[v], want.orbits[v]) << to_pajek(g);
    // Each occurrence of a k-node graphlet contributes k orbit occurrences.
    for (const auto& gr : a.graphlets) {
      std::int64_t occ = 0;
      for (const auto& row : got.orbits)
        for (std::size_t o = gr.first_orbit; o < gr.first_orbit + gr.orbit_count; ++o) occ += row[o];
      EXPECT_EQ(occ, gr.nodes * got.motifs[gr.index]);
    }
  }
}

TEST(Fragments, OppDividesByEleven) {
  const auto c = count_motifs_and_orbits(from_arcs({{1, 2}, {2, 3}, {3, 1}}));
  const auto opp = opp_profile(c);
  const auto& cyc = atlas().by_name("3-cycle");
  EXPECT_DOUBLE_EQ(opp[cyc.first_orbit], 3.0 / 11.0);
}

TEST(Ensemble, PreservesDegreesAndSimplicity) {
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    const auto g = oracle::random_passmap(rng, 4 + rng.below(10), 0.3, 1);
    const auto base = adjacency(g);
    EnsembleOptions opt{10, 77};
    for (std::size_t s = 0; s < 5; ++s) {
      const auto r = configuration_sample(base, opt, s);
      EXPECT_EQ(out_degrees(r), out_degrees(base));
      EXPECT_EQ(in_degrees(r), in_degrees(base));
      for (std::size_t v = 0; v < r.n; ++v) EXPECT_FALSE(r(v, v));
    }
  }
}

TEST(Ensemble, SeededAndSized) {
  Rng rng(10);
  const auto g = oracle::random_passmap(rng, 11, 0.35, 1);
  EnsembleOptions opt{20, 5};
  const auto a = configuration_ensemble(g, opt), b = configuration_ensemble(g, opt);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.sd, b.sd);
  EXPECT_EQ(a.size, 20U);
  opt.master_seed = 6;
  EXPECT_NE(configuration_ensemble(g, opt).mean, a.mean);
  EXPECT_THROW(configuration_ensemble(g, EnsembleOptions{1, 0}), std::invalid_argument);
}

TEST(Ensemble, CompleteGraphIsSwapStarved) {
  Passmap g;
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b) g.add_arc(PlayerId{a}, PlayerId{b});
  const auto st = configuration_ensemble(g, EnsembleOptions{5, 1});
  EXPECT_TRUE(st.swap_starved);
  EXPECT_EQ(st.min_accepted_swaps, 0U);
  for (double sd : st.sd) EXPECT_EQ(sd, 0.0);
  // Observed equals the null everywhere: Z is the zero vector.
  const auto sp = significance_profile(count_motifs_and_orbits(g).motifs, st);
  for (std::size_t i = 0; i < kGraphletCount; ++i) {
    EXPECT_EQ(sp.z[i], 0.0);
    EXPECT_EQ(sp.sp[i], 0.0);
    EXPECT_FALSE(sp.capped[i]);
  }
}

TEST(Significance, UnitLengthAndCapping) {
  MotifCounts n{};
  EnsembleStats ens;
  n[0] = 10;
  ens.mean[0] = 4;
  ens.sd[0] = 2;  // z = 3
  n[3] = 1;
  ens.mean[3] = 5;
  ens.sd[3] = 1;  // z = -4
  n[8] = 2;
  ens.mean[8] = 0;
  ens.sd[8] = 0;  // capped
  const auto p = significance_profile(n, ens, 10.0);
  EXPECT_DOUBLE_EQ(p.z[0], 3.0);
  EXPECT_DOUBLE_EQ(p.z[3], -4.0);
  EXPECT_DOUBLE_EQ(p.z[8], 10.0);
  EXPECT_TRUE(p.capped[8]);
  double s = 0;
  for (double v : p.sp) s += v * v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(p.sp[0], 3.0 / std::sqrt(125.0), 1e-12);
}

TEST(Significance, RandomProfilesAreUnitLength) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    MotifCounts n{};
    EnsembleStats ens;
    for (std::size_t k = 0; k < kGraphletCount; ++k) {
      n[k] = static_cast<std::int64_t>(rng.below(50));
      ens.mean[k] = rng.uniform() * 50;
      ens.sd[k] = rng.uniform() < 0.2 ? 0.0 : rng.uniform() * 5;
    }
    const auto p = significance_profile(n, ens);
    double s = 0;
    for (double v : p.sp) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
      s += v * v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}
