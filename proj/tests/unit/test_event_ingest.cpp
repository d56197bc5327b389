#include <gtest/gtest.h>

#include <fstream>
#include <map>

#include "json.hpp"
#include "passnet/event_ingest.hpp"
#include "passnet/intensity.hpp"
#include "passnet/passmap.hpp"

using namespace passnet;
using nlohmann::json;

namespace {

json ev(int period, int minute, int second, const char* type, int team, std::optional<int> player = {}) {
  json e = {{"period", period}, {"minute", minute}, {"second", second}, {"type", {{"name", type}}},
            {"team", {{"id", team}}}, {"possession", 1}, {"possession_team", {{"id", team}}}};
  if (player) e["player"] = {{"id", *player}, {"name", "P" + std::to_string(*player)}};
  return e;
}

json pass(int period, int minute, int second, int team, int from, std::optional<int> to,
          const char* outcome = nullptr) {
  json e = ev(period, minute, second, "Pass", team, from);
  e["pass"] = json::object();
  if (to) e["pass"]["recipient"] = {{"id", *to}, {"name", "P" + std::to_string(*to)}};
  if (outcome) e["pass"]["outcome"] = {{"name", outcome}};
  return e;
}

json shot(int period, int minute, int second, int team, int player, const char* outcome) {
  json e = ev(period, minute, second, "Shot", team, player);
  e["shot"] = {{"outcome", {{"name", outcome}}}};
  return e;
}

MatchEventStream parse(const json& arr) { return parse_match(arr.dump(), "t"); }

}  // namespace

TEST(Parse, ClockIsSecondsIntoPeriod) {
  const auto s = parse(json::array({ev(1, 0, 0, "Half Start", 1), ev(1, 12, 7, "Pass", 2),
                                    ev(2, 45, 3, "Carry", 1), ev(3, 91, 0, "Carry", 1),
                                    ev(4, 106, 30, "Carry", 2), ev(5, 121, 0, "Carry", 2)}));
  ASSERT_EQ(s.events.size(), 6U);
  EXPECT_EQ(s.events[1].clock, 727);
  EXPECT_EQ(s.events[2].clock, 3);
  EXPECT_EQ(s.events[3].clock, 60);
  EXPECT_EQ(s.events[4].clock, 90);
  EXPECT_EQ(s.events[5].clock, 60);
  EXPECT_EQ(s.home_team, TeamId{1});
  EXPECT_EQ(s.away_team, TeamId{2});
}

TEST(Parse, SortsStablyByTime) {
  auto a = ev(1, 5, 0, "Carry", 1);
  a["id"] = "a";
  auto b = ev(1, 1, 0, "Carry", 2);
  b["id"] = "b";
  auto c = ev(1, 5, 0, "Carry", 1);
  c["id"] = "c";
  const auto s = parse(json::array({a, b, c}));
  EXPECT_EQ(s.events[0].event_id, "b");
  EXPECT_EQ(s.events[1].event_id, "a");
  EXPECT_EQ(s.events[2].event_id, "c");
}

TEST(Parse, MalformedJsonReportsByteOffset) {
  try {
    parse_match("[{\"period\": 1,}]");
    FAIL();
  } catch (const ParseError& e) {
    ASSERT_TRUE(e.byte_offset().has_value());
    EXPECT_GT(*e.byte_offset(), 10U);
  }
  EXPECT_THROW(parse_match("{}"), ParseError);
  EXPECT_THROW(parse_match("[1, 2]"), ParseError);
}

TEST(Parse, MissingTypeNameIsValidationError) {
  auto bad = ev(1, 0, 0, "Pass", 1);
  bad.erase("type");
  try {
    parse(json::array({ev(1, 0, 0, "Carry", 2), bad}));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.event_index(), 1U);
    EXPECT_EQ(e.field(), "type.name");
  }
}

TEST(Parse, RelevantEventsNeedTeamAndPeriod) {
  auto no_team = ev(1, 0, 0, "Pass", 1);
  no_team.erase("team");
  EXPECT_THROW(parse(json::array({ev(1, 0, 0, "Carry", 2), ev(1, 0, 0, "Carry", 1), no_team})),
               ValidationError);
  auto shot_no_outcome = ev(1, 0, 0, "Shot", 1, 9);
  try {
    parse(json::array({ev(1, 0, 0, "Carry", 2), shot_no_outcome}));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "shot.outcome.name");
  }
  // Irrelevant events may omit the team.
  auto other = ev(1, 0, 0, "Starting XI", 1);
  other.erase("team");
  EXPECT_NO_THROW(parse(json::array({other, ev(1, 0, 0, "Carry", 1), ev(1, 0, 0, "Carry", 2)})));
}

TEST(Parse, NeedsTwoTeams) {
  EXPECT_THROW(parse(json::array({ev(1, 0, 0, "Carry", 1)})), ParseError);
}

TEST(Parse, RecordsPlayerNames) {
  const auto s = parse(json::array({pass(1, 0, 1, 1, 10, 11), ev(1, 0, 2, "Carry", 2)}));
  EXPECT_EQ(s.player_names.at(PlayerId{10}), "P10");
  EXPECT_EQ(s.player_names.at(PlayerId{11}), "P11");
}

TEST(KeyEvents, HalfTimeAtLastFirstPeriodClock) {
  const auto s = parse(json::array({ev(1, 0, 0, "Half Start", 1), ev(1, 46, 10, "Half End", 2),
                                    ev(2, 45, 0, "Half Start", 1)}));
  const auto k = detect_key_events(s);
  EXPECT_TRUE(k[0].occurred);
  EXPECT_EQ(k[0].at->period, 1);
  EXPECT_EQ(k[0].at->clock, 2770);
  EXPECT_EQ(*k[0].split_time(), (MatchTime{2, 0}));
  EXPECT_FALSE(k[1].occurred);
  EXPECT_FALSE(k[2].occurred);
  EXPECT_TRUE(k[1].after_window().empty());
  EXPECT_EQ(k[1].before_window(), kWholeMatch);
}

TEST(KeyEvents, FirstGoalAndOwnGoal) {
  auto og = ev(1, 20, 0, "Own Goal Against", 1);
  const auto s = parse(json::array({ev(1, 0, 0, "Carry", 1), ev(1, 0, 0, "Carry", 2), og,
                                    shot(1, 30, 0, 2, 5, "Goal")}));
  const auto k = detect_key_events(s);
  ASSERT_TRUE(k[1].occurred);
  EXPECT_EQ(*k[1].at, (MatchTime{1, 1200}));
  // The own goal was conceded by team 1, so team 2 scored.
  EXPECT_EQ(*k[1].acting_team, TeamId{2});
}

TEST(KeyEvents, ShootoutIgnored) {
  const auto s = parse(json::array({ev(1, 0, 0, "Carry", 1), ev(1, 0, 0, "Carry", 2),
                                    shot(5, 121, 0, 2, 5, "Goal")}));
  EXPECT_FALSE(detect_key_events(s)[1].occurred);
}

TEST(KeyEvents, DismissalFromSecondYellowOrRed) {
  auto yellow = ev(1, 10, 0, "Foul Committed", 1, 3);
  yellow["foul_committed"] = {{"card", {{"name", "Yellow Card"}}}};
  auto second = ev(2, 60, 0, "Bad Behaviour", 2, 4);
  second["bad_behaviour"] = {{"card", {{"name", "Second Yellow"}}}};
  auto red = ev(2, 70, 0, "Foul Committed", 1, 5);
  red["foul_committed"] = {{"card", {{"name", "Red Card"}}}};
  const auto s = parse(json::array({yellow, second, red}));
  const auto k = detect_key_events(s);
  ASSERT_TRUE(k[2].occurred);
  EXPECT_EQ(*k[2].at, (MatchTime{2, 900}));
  EXPECT_EQ(*k[2].acting_team, TeamId{2});
}

TEST(Possession, StintsAndWindowClamp) {
  json arr = json::array();
  auto add = [&](int period, int minute, int second, int owner, int idx) {
    auto e = ev(period, minute, second, "Carry", owner);
    e["possession"] = idx;
    arr.push_back(e);
  };
  add(1, 0, 0, 1, 1);
  add(1, 0, 30, 1, 1);
  add(1, 0, 40, 2, 2);
  add(1, 1, 40, 2, 2);
  add(1, 2, 0, 1, 3);
  add(1, 2, 10, 1, 3);
  add(2, 45, 0, 1, 3);  // same index, new period: new stint
  add(2, 45, 20, 1, 3);
  const auto s = parse(arr);
  const auto st = possession_stints(s);
  ASSERT_EQ(st.size(), 4U);
  EXPECT_EQ(st[0].duration(), 30);
  EXPECT_EQ(st[1].duration(), 60);
  EXPECT_EQ(st[2].duration(), 10);
  EXPECT_EQ(st[3].duration(), 20);
  EXPECT_EQ(possession_time(s, TeamId{1}, kWholeMatch), 60);
  EXPECT_EQ(possession_time(s, TeamId{2}, kWholeMatch), 60);
  EXPECT_EQ(possession_time(s, TeamId{1}, Window{{1, 10}, {2, 5}}), 20 + 10 + 5);
  EXPECT_EQ(possession_time(s, TeamId{2}, Window{{1, 70}, {1, 80}}), 10);
  EXPECT_EQ(possession_time(s, TeamId{1}, Window{{5, 0}, {5, 0}}), 0);
}

TEST(Passes, OnlyCompleteWithBothEndpoints) {
  const auto s = parse(json::array({pass(1, 0, 1, 1, 10, 11), pass(1, 0, 2, 1, 10, 12, "Incomplete"),
                                    pass(1, 0, 3, 1, 10, std::nullopt), pass(1, 0, 4, 2, 20, 21),
                                    pass(2, 45, 5, 1, 11, 10)}));
  const auto all = successful_passes(s, TeamId{1}, kWholeMatch);
  EXPECT_EQ(all.passes.size(), 2U);
  EXPECT_EQ(all.dropped_missing_endpoint, 1U);
  const auto first = successful_passes(s, TeamId{1}, Window{kMatchStart, {2, 0}});
  ASSERT_EQ(first.passes.size(), 1U);
  EXPECT_EQ(first.passes[0].passer, PlayerId{10});
  EXPECT_EQ(first.passes[0].recipient, PlayerId{11});
}

// ---------------------------------------------------------------------------
// Real matches against the independent Python aggregation (frozen output).

class Frozen : public ::testing::TestWithParam<const char*> {
 protected:
  void SetUp() override {
    const std::string id = GetParam();
    stream = load_match(std::string(PASSNET_TEST_DATA) + "/statsbomb/" + id + ".json", id);
    std::ifstream in(std::string(PASSNET_TEST_DATA) + "/expected/" + id + ".json");
    expected = json::parse(in);
  }

  static std::string window_label(const json& k) { return k.get<std::string>(); }

  Window window(const std::array<KeyEvent, 3>& key, const std::string& name) const {
    if (name == "whole") return kWholeMatch;
    const auto dot = name.find('.');
    const auto kind = *key_event_kind_from(name.substr(0, dot));
    const auto& k = key[static_cast<std::size_t>(kind)];
    return name.substr(dot + 1) == "before" ? k.before_window() : k.after_window();
  }

  MatchEventStream stream;
  json expected;
};

TEST_P(Frozen, CountsAndTeams) {
  EXPECT_EQ(stream.events.size(), expected["events"].get<std::size_t>());
  std::map<std::string, int> kinds;
  for (const auto& e : stream.events) ++kinds[std::string(to_string(e.kind))];
  for (const auto& [k, v] : expected["kinds"].items()) EXPECT_EQ(kinds[k], v.get<int>()) << k;
  EXPECT_EQ(stream.home_team.value, expected["home"].get<std::int64_t>());
  EXPECT_EQ(stream.away_team.value, expected["away"].get<std::int64_t>());
}

TEST_P(Frozen, KeyEvents) {
  const auto key = detect_key_events(stream);
  for (const auto& k : key) {
    const auto& x = expected["key_events"][std::string(to_string(k.kind))];
    ASSERT_EQ(k.occurred, x["occurred"].get<bool>()) << to_string(k.kind);
    if (!k.occurred) continue;
    EXPECT_EQ(k.at->period, x["period"].get<int>());
    EXPECT_EQ(k.at->clock, x["clock"].get<double>());
    if (x.contains("team")) {
      EXPECT_EQ(k.acting_team->value, x["team"].get<std::int64_t>());
    }
  }
}

TEST_P(Frozen, PerWindowTallies) {
  const auto key = detect_key_events(stream);
  for (TeamId team : {stream.home_team, stream.away_team}) {
    const auto& t = expected["teams"][std::to_string(team.value)];
    for (const auto& [wname, poss] : t["possession"].items()) {
      SCOPED_TRACE(std::to_string(team.value) + " " + wname);
      const Window w = window(key, wname);
      EXPECT_NEAR(possession_time(stream, team, w), poss.get<double>(), 1e-9);

      const auto passes = successful_passes(stream, team, w);
      EXPECT_EQ(passes.dropped_missing_endpoint, t["dropped"][wname].get<std::size_t>());
      const Passmap g = build_passmap(passes.passes, team);
      std::map<std::string, int> arcs;
      for (const auto& [arc, wt] : g.arcs()) arcs[fmt::format("{}-{}", arc.first.value, arc.second.value)] = wt;
      std::map<std::string, int> want;
      for (const auto& [k, v] : t["passes"][wname].items()) want[k] = v.get<int>();
      EXPECT_EQ(arcs, want);

      const auto aug = augment_with_shots(g, stream, team, w);
      for (const auto& [pid, onoff] : t["shots"][wname].items()) {
        const PlayerId p{std::stoll(pid)};
        EXPECT_EQ(aug.graph.weight(p, kShotOn), onoff[0].get<int>()) << pid;
        EXPECT_EQ(aug.graph.weight(p, kShotOff), onoff[1].get<int>()) << pid;
      }

      const auto rec = intensity(g, possession_time(stream, team, w));
      const auto& want_i = t["intensity"][wname];
      if (want_i.is_null()) {
        EXPECT_FALSE(rec.defined());
      } else {
        ASSERT_TRUE(rec.defined());
        EXPECT_NEAR(*rec.intensity, want_i.get<double>(), 1e-9);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(StatsBomb, Frozen, ::testing::Values("9880", "15986", "3788741", "barcelona-alaves"),
                         [](const auto& info) {
                           std::string s = info.param;
                           std::replace(s.begin(), s.end(), '-', '_');
                           return "m" + s;
                         });
