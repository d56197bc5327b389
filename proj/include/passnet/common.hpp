#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace passnet {

// Strongly typed integer identifier. Tag keeps team and player ids apart.
template <typename Tag>
struct Id {
  std::int64_t value{0};

  constexpr Id() = default;
  constexpr explicit Id(std::int64_t v) : value(v) {}

  friend constexpr auto operator<=>(const Id&, const Id&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Id& id) {
    return os << id.value;
  }
};

using TeamId = Id<struct TeamTag>;
using PlayerId = Id<struct PlayerTag>;

// Position inside a match: period number, then seconds since the period
// started. Ordered lexicographically.
struct MatchTime {
  int period{1};
  double clock{0.0};

  friend constexpr auto operator<=>(const MatchTime&, const MatchTime&) = default;
};

inline constexpr MatchTime kMatchStart{1, 0.0};
// Penalty shootouts (period 5) are not open play; every window ends here.
inline constexpr MatchTime kShootoutStart{5, 0.0};

// Half-open interval [start, end) over match time.
struct Window {
  MatchTime start{kMatchStart};
  MatchTime end{kShootoutStart};

  bool contains(MatchTime t) const { return start <= t && t < end; }
  bool empty() const { return !(start < end); }

  friend constexpr bool operator==(const Window&, const Window&) = default;
};

inline constexpr Window kWholeMatch{kMatchStart, kShootoutStart};

// Seeded generator with a portable bit stream. Distribution helpers are
// written out here because the standard distributions are not specified
// bit-for-bit across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound).
  std::size_t below(std::size_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  // Uniform real in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

// Derives independent child seeds, e.g. one per ensemble sample.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  Rng r(master ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  return r.next();
}

namespace stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

// Population standard deviation.
inline double pstdev(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
inline double sstdev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// Linear-interpolation quantile (type 7) of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

}  // namespace stats
}  // namespace passnet

template <typename Tag>
struct std::hash<passnet::Id<Tag>> {
  std::size_t operator()(const passnet::Id<Tag>& id) const noexcept {
    return std::hash<std::int64_t>{}(id.value);
  }
};
