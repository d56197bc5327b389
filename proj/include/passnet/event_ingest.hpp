#pragma once

// Parsing of provider event files (StatsBomb open-data schema) into a typed,
// time-ordered event stream, plus the derived queries the passmap builders
// need: key events, possession time and successful passes.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "passnet/common.hpp"

namespace passnet {

enum class EventKind {
  Pass,
  Shot,
  FoulCommitted,
  BadBehaviour,
  OwnGoalAgainst,
  HalfStart,
  HalfEnd,
  Other
};

enum class PassOutcome { Complete, Incomplete, Out, Offside, Unknown };
enum class ShotOutcome { Goal, OnTargetSaved, OffTarget, Blocked, Other };
enum class Card { Yellow, SecondYellow, Red };

struct PassDetail {
  std::optional<PlayerId> recipient;
  PassOutcome outcome{PassOutcome::Complete};
};

struct ShotDetail {
  ShotOutcome outcome{ShotOutcome::Other};

  bool on_target() const {
    return outcome == ShotOutcome::Goal || outcome == ShotOutcome::OnTargetSaved;
  }
};

struct RawEvent {
  std::string event_id;
  int period{1};
  double clock{0.0};
  EventKind kind{EventKind::Other};
  std::optional<TeamId> team;
  std::optional<PlayerId> player;
  std::int64_t possession_index{0};
  std::optional<TeamId> possession_team;
  std::optional<PassDetail> pass;
  std::optional<ShotDetail> shot;
  std::optional<Card> card;
  std::size_t file_index{0};

  MatchTime time() const { return {period, clock}; }
};

struct MatchEventStream {
  std::string match_id;
  TeamId home_team;
  TeamId away_team;
  std::vector<RawEvent> events;
  std::unordered_map<PlayerId, std::string> player_names;

  TeamId opponent_of(TeamId team) const {
    return team == home_team ? away_team : home_team;
  }
};

enum class KeyEventKind { HalfTime, FirstGoal, FirstDismissal };

inline constexpr std::array<KeyEventKind, 3> kKeyEventKinds{
    KeyEventKind::HalfTime, KeyEventKind::FirstGoal, KeyEventKind::FirstDismissal};

struct KeyEvent {
  KeyEventKind kind{KeyEventKind::HalfTime};
  bool occurred{false};
  std::optional<MatchTime> at;
  std::optional<TeamId> acting_team;

  // Boundary used to split windows. Half time is reported at the last clock
  // of period 1 but splits at the start of period 2, so nothing from the
  // first half can land in the after-window.
  std::optional<MatchTime> split_time() const {
    if (!occurred) return std::nullopt;
    if (kind == KeyEventKind::HalfTime) return MatchTime{2, 0.0};
    return at;
  }

  Window before_window() const {
    if (auto t = split_time()) return {kMatchStart, *t};
    return kWholeMatch;
  }

  // Empty window when the event never happened.
  Window after_window() const {
    if (auto t = split_time()) return {*t, kShootoutStart};
    return {kShootoutStart, kShootoutStart};
  }
};

inline std::string_view to_string(KeyEventKind k) {
  switch (k) {
    case KeyEventKind::HalfTime: return "HalfTime";
    case KeyEventKind::FirstGoal: return "FirstGoal";
    case KeyEventKind::FirstDismissal: return "FirstDismissal";
  }
  return "?";
}

inline std::optional<KeyEventKind> key_event_kind_from(std::string_view s) {
  for (auto k : kKeyEventKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Pass: return "Pass";
    case EventKind::Shot: return "Shot";
    case EventKind::FoulCommitted: return "FoulCommitted";
    case EventKind::BadBehaviour: return "BadBehaviour";
    case EventKind::OwnGoalAgainst: return "OwnGoalAgainst";
    case EventKind::HalfStart: return "HalfStart";
    case EventKind::HalfEnd: return "HalfEnd";
    case EventKind::Other: return "Other";
  }
  return "?";
}

// Malformed input. `byte_offset` is set for syntax errors, `event_index` for
// structural problems with a single array element.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> byte_offset,
             std::optional<std::size_t> event_index)
      : std::runtime_error(what), byte_offset_(byte_offset), event_index_(event_index) {}

  std::optional<std::size_t> byte_offset() const { return byte_offset_; }
  std::optional<std::size_t> event_index() const { return event_index_; }

 private:
  std::optional<std::size_t> byte_offset_;
  std::optional<std::size_t> event_index_;
};

// Well-formed JSON that is missing a field the event kind requires.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::size_t event_index, std::string field)
      : std::runtime_error(fmt::format("event {}: missing mandatory field '{}'",
                                       event_index, field)),
        event_index_(event_index),
        field_(std::move(field)) {}

  std::size_t event_index() const { return event_index_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t event_index_;
  std::string field_;
};

namespace detail {

using nlohmann::json;

inline EventKind map_kind(std::string_view name) {
  if (name == "Pass") return EventKind::Pass;
  if (name == "Shot") return EventKind::Shot;
  if (name == "Foul Committed") return EventKind::FoulCommitted;
  if (name == "Bad Behaviour") return EventKind::BadBehaviour;
  if (name == "Own Goal Against") return EventKind::OwnGoalAgainst;
  if (name == "Half Start") return EventKind::HalfStart;
  if (name == "Half End") return EventKind::HalfEnd;
  return EventKind::Other;
}

inline PassOutcome map_pass_outcome(std::string_view name) {
  if (name == "Incomplete") return PassOutcome::Incomplete;
  if (name == "Out") return PassOutcome::Out;
  if (name == "Pass Offside" || name == "Offside") return PassOutcome::Offside;
  return PassOutcome::Unknown;
}

inline ShotOutcome map_shot_outcome(std::string_view name) {
  if (name == "Goal") return ShotOutcome::Goal;
  if (name == "Saved" || name == "Saved To Post") return ShotOutcome::OnTargetSaved;
  if (name == "Off T" || name == "Wayward" || name == "Post" || name == "Saved Off T")
    return ShotOutcome::OffTarget;
  if (name == "Blocked") return ShotOutcome::Blocked;
  return ShotOutcome::Other;
}

inline std::optional<Card> map_card(std::string_view name) {
  if (name == "Yellow Card") return Card::Yellow;
  if (name == "Second Yellow") return Card::SecondYellow;
  if (name == "Red Card") return Card::Red;
  return std::nullopt;
}

// Seconds elapsed since the start of `period`. The provider's minute field
// runs on the match clock (period 2 starts at minute 45).
inline double period_clock(int period, std::int64_t minute, std::int64_t second) {
  static constexpr std::array<std::int64_t, 6> offset{0, 0, 45 * 60, 90 * 60, 105 * 60, 120 * 60};
  const auto off = (period >= 1 && period <= 5) ? offset[static_cast<std::size_t>(period)] : 0;
  return static_cast<double>(std::max<std::int64_t>(0, minute * 60 + second - off));
}

inline const json* find_path(const json& obj, std::initializer_list<const char*> path) {
  const json* cur = &obj;
  for (const char* key : path) {
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(key);
    if (it == cur->end() || it->is_null()) return nullptr;
    cur = &*it;
  }
  return cur;
}

inline std::optional<std::int64_t> find_int(const json& obj,
                                            std::initializer_list<const char*> path) {
  const json* v = find_path(obj, path);
  if (v == nullptr || !v->is_number_integer()) return std::nullopt;
  return v->get<std::int64_t>();
}

inline std::optional<std::string> find_string(const json& obj,
                                              std::initializer_list<const char*> path) {
  const json* v = find_path(obj, path);
  if (v == nullptr || !v->is_string()) return std::nullopt;
  return v->get<std::string>();
}

}  // namespace detail

// Parses one provider event file. Kinds outside EventKind map to Other; a
// pass without an outcome object is complete.
inline MatchEventStream parse_match(std::string_view file_bytes, std::string match_id = {}) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(file_bytes.begin(), file_bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed event file at byte {}: {}", e.byte, e.what()),
                     e.byte, std::nullopt);
  }
  if (!doc.is_array()) {
    throw ParseError("event file must be a JSON array of event objects", 0, std::nullopt);
  }

  MatchEventStream stream;
  stream.match_id = std::move(match_id);
  std::vector<TeamId> teams_seen;
  stream.events.reserve(doc.size());

  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    if (!obj.is_object()) {
      throw ParseError(fmt::format("event {} is not an object", i), std::nullopt, i);
    }
    auto type_name = detail::find_string(obj, {"type", "name"});
    if (!type_name) throw ValidationError(i, "type.name");

    RawEvent ev;
    ev.file_index = i;
    ev.kind = detail::map_kind(*type_name);
    ev.event_id = detail::find_string(obj, {"id"}).value_or(std::to_string(i));
    const bool required = ev.kind != EventKind::Other;

    auto period = detail::find_int(obj, {"period"});
    auto team = detail::find_int(obj, {"team", "id"});
    if (required && !period) throw ValidationError(i, "period");
    if (required && !team) throw ValidationError(i, "team.id");
    ev.period = static_cast<int>(period.value_or(1));
    ev.clock = detail::period_clock(ev.period, detail::find_int(obj, {"minute"}).value_or(0),
                                    detail::find_int(obj, {"second"}).value_or(0));
    if (team) {
      ev.team = TeamId{*team};
      if (std::find(teams_seen.begin(), teams_seen.end(), *ev.team) == teams_seen.end())
        teams_seen.push_back(*ev.team);
    }
    if (auto p = detail::find_int(obj, {"player", "id"})) {
      ev.player = PlayerId{*p};
      if (auto nm = detail::find_string(obj, {"player", "name"})) stream.player_names.try_emplace(*ev.player, *nm);
    }
    ev.possession_index = detail::find_int(obj, {"possession"}).value_or(0);
    if (auto pt = detail::find_int(obj, {"possession_team", "id"})) ev.possession_team = TeamId{*pt};

    switch (ev.kind) {
      case EventKind::Pass: {
        PassDetail pd;
        if (auto r = detail::find_int(obj, {"pass", "recipient", "id"})) {
          pd.recipient = PlayerId{*r};
          if (auto nm = detail::find_string(obj, {"pass", "recipient", "name"}))
            stream.player_names.try_emplace(*pd.recipient, *nm);
        }
        if (detail::find_path(obj, {"pass", "outcome"}) != nullptr) {
          pd.outcome = detail::map_pass_outcome(
              detail::find_string(obj, {"pass", "outcome", "name"}).value_or(""));
        }
        ev.pass = pd;
        break;
      }
      case EventKind::Shot: {
        auto outcome = detail::find_string(obj, {"shot", "outcome", "name"});
        if (!outcome) throw ValidationError(i, "shot.outcome.name");
        ev.shot = ShotDetail{detail::map_shot_outcome(*outcome)};
        break;
      }
      case EventKind::FoulCommitted:
        if (auto c = detail::find_string(obj, {"foul_committed", "card", "name"}))
          ev.card = detail::map_card(*c);
        break;
      case EventKind::BadBehaviour:
        if (auto c = detail::find_string(obj, {"bad_behaviour", "card", "name"}))
          ev.card = detail::map_card(*c);
        break;
      default:
        break;
    }
    stream.events.push_back(std::move(ev));
  }

  if (teams_seen.size() < 2) {
    throw ParseError(fmt::format("event file names {} team(s); a match needs two",
                                 teams_seen.size()),
                     std::nullopt, std::nullopt);
  }
  // Provider files list the home side's lineup first.
  stream.home_team = teams_seen[0];
  stream.away_team = teams_seen[1];

  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const RawEvent& a, const RawEvent& b) { return a.time() < b.time(); });
  return stream;
}

inline MatchEventStream load_match(const std::string& path, std::string match_id = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open event file '{}'", path));
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_match(bytes, std::move(match_id));
}

// Half time, first goal and first dismissal, in that order. Absent events
// come back with occurred = false. Shootout events are ignored.
inline std::array<KeyEvent, 3> detect_key_events(const MatchEventStream& stream) {
  KeyEvent half{KeyEventKind::HalfTime, true, MatchTime{1, 0.0}, std::nullopt};
  KeyEvent goal{KeyEventKind::FirstGoal, false, std::nullopt, std::nullopt};
  KeyEvent dismissal{KeyEventKind::FirstDismissal, false, std::nullopt, std::nullopt};

  for (const RawEvent& ev : stream.events) {
    if (ev.period == 1) half.at->clock = std::max(half.at->clock, ev.clock);
    if (ev.period >= kShootoutStart.period) continue;

    if (!goal.occurred) {
      if (ev.kind == EventKind::Shot && ev.shot && ev.shot->outcome == ShotOutcome::Goal) {
        goal.occurred = true;
        goal.at = ev.time();
        goal.acting_team = ev.team;
      } else if (ev.kind == EventKind::OwnGoalAgainst && ev.team) {
        goal.occurred = true;
        goal.at = ev.time();
        goal.acting_team = stream.opponent_of(*ev.team);
      }
    }
    if (!dismissal.occurred && ev.card &&
        (ev.kind == EventKind::FoulCommitted || ev.kind == EventKind::BadBehaviour) &&
        (*ev.card == Card::Red || *ev.card == Card::SecondYellow)) {
      dismissal.occurred = true;
      dismissal.at = ev.time();
      dismissal.acting_team = ev.team;
    }
  }
  return {half, goal, dismissal};
}

struct PossessionStint {
  TeamId team;
  std::int64_t possession_index{0};
  MatchTime start;
  MatchTime end;

  double duration() const { return end.clock - start.clock; }
};

// Maximal runs of consecutive events sharing (period, possession index).
inline std::vector<PossessionStint> possession_stints(const MatchEventStream& stream) {
  std::vector<PossessionStint> out;
  bool open = false;
  for (const RawEvent& ev : stream.events) {
    const bool same = open && out.back().start.period == ev.period &&
                      out.back().possession_index == ev.possession_index;
    if (same) {
      out.back().end = ev.time();
      continue;
    }
    // Events without a possessing team still break runs; those stints are
    // dropped below.
    out.push_back({ev.possession_team.value_or(TeamId{-1}), ev.possession_index, ev.time(),
                   ev.time()});
    open = true;
  }
  std::erase_if(out, [](const PossessionStint& s) { return s.team == TeamId{-1}; });
  return out;
}

// Seconds of possession for `team` inside `window`; stints crossing a window
// boundary are truncated at it.
inline double possession_time(const MatchEventStream& stream, TeamId team, const Window& window) {
  if (window.empty()) return 0.0;
  double total = 0.0;
  for (const PossessionStint& s : possession_stints(stream)) {
    if (s.team != team) continue;
    if (s.end < window.start || !(s.start < window.end)) continue;
    MatchTime lo = std::max(s.start, window.start);
    MatchTime hi = std::min(s.end, window.end);
    // Boundaries in another period clamp to this period's extent.
    if (lo.period != s.start.period) lo = s.start;
    if (hi.period != s.start.period) hi = s.end;
    if (lo < hi) total += hi.clock - lo.clock;
  }
  return total;
}

struct PassRecord {
  PlayerId passer;
  PlayerId recipient;
  MatchTime time;
};

struct PassList {
  std::vector<PassRecord> passes;
  // Complete passes dropped for lacking a passer or recipient.
  std::size_t dropped_missing_endpoint{0};
};

// Complete passes by `team` inside `window`.
inline PassList successful_passes(const MatchEventStream& stream, TeamId team,
                                  const Window& window) {
  PassList out;
  for (const RawEvent& ev : stream.events) {
    if (ev.kind != EventKind::Pass || ev.team != team || !window.contains(ev.time())) continue;
    if (!ev.pass || ev.pass->outcome != PassOutcome::Complete) continue;
    if (!ev.player || !ev.pass->recipient) {
      ++out.dropped_missing_endpoint;
      continue;
    }
    out.passes.push_back({*ev.player, *ev.pass->recipient, ev.time()});
  }
  return out;
}

}  // namespace passnet
