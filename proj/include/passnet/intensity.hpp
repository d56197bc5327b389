#pragma once

#include <optional>
#include <string>

#include "passnet/passmap.hpp"

namespace passnet {

// Completed passes per second of ball possession.
struct IntensityRecord {
  TeamId team;
  std::string window;
  double possession_seconds{0.0};
  long total_weight{0};
  std::optional<double> intensity;  // absent when possession_seconds == 0

  bool defined() const { return intensity.has_value(); }
};

inline IntensityRecord intensity(const Passmap& g, double possession_seconds) {
  IntensityRecord r{g.team(), g.label(), possession_seconds, g.total_weight(), std::nullopt};
  if (possession_seconds > 0.0) {
    r.intensity = static_cast<double>(r.total_weight) / possession_seconds;
  }
  return r;
}

inline IntensityRecord intensity(const MatchEventStream& stream, TeamId team, const Window& w,
                                 std::string label = {}) {
  Passmap g = build_passmap(successful_passes(stream, team, w).passes, team, std::move(label));
  return intensity(g, possession_time(stream, team, w));
}

}  // namespace passnet
