#pragma once

// Corpus orchestration: manifests, the persisted network tree, per-match
// analysis fan-out, result tables and corpus aggregation.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "passnet/centrality.hpp"
#include "passnet/community.hpp"
#include "passnet/event_ingest.hpp"
#include "passnet/fragments.hpp"
#include "passnet/intensity.hpp"
#include "passnet/passmap.hpp"

namespace passnet {

namespace fs = std::filesystem;

// Environment variable naming the directory that relative manifest paths
// resolve against.
inline constexpr const char* kDataRootEnv = "PASSNET_DATA_ROOT";

struct ManifestEntry {
  std::string match_id;
  fs::path events;
  std::optional<fs::path> formation;
};

struct AnalysisToggles {
  bool centrality{true};
  bool intensity{true};
  bool community{true};
  bool fragments{true};
};

struct CorpusManifest {
  std::vector<ManifestEntry> matches;
  fs::path output_root{"passnet-out"};
  std::uint64_t seed{0};
  AnalysisToggles toggles;
  std::size_t ensemble_size{100};
  double resolution{1.0};
  double z_cap{10.0};
  // Fragment and formation analyses run on the first N matches by id.
  std::size_t fragments_limit{32};
  std::size_t formations_limit{20};
  unsigned workers{0};  // 0: hardware concurrency
};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline fs::path resolve(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  return base / path;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", p.string()));
  out << content;
}

}  // namespace detail

// Checks unique match ids and that every referenced file exists.
inline void validate(const CorpusManifest& m) {
  std::set<std::string> ids;
  std::vector<std::string> problems;
  for (const auto& e : m.matches) {
    if (!ids.insert(e.match_id).second) problems.push_back(fmt::format("duplicate match id '{}'", e.match_id));
    if (!fs::exists(e.events)) problems.push_back(fmt::format("{}: missing event file {}", e.match_id, e.events.string()));
    if (e.formation && !fs::exists(*e.formation))
      problems.push_back(fmt::format("{}: missing formation file {}", e.match_id, e.formation->string()));
  }
  if (!problems.empty()) {
    std::string msg = "invalid manifest:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ManifestError(msg);
  }
}

// Manifest from CSV (`match_id,events[,formation]`, optional header) or JSON
// (`{"matches": [{"match_id", "events", "formation"}], "seed", ...}`).
// Relative paths resolve against `data_root`, else $PASSNET_DATA_ROOT, else
// the manifest's directory.
inline CorpusManifest load_manifest(const fs::path& path, std::optional<fs::path> data_root = {}) {
  if (!data_root) {
    if (const char* env = std::getenv(kDataRootEnv); env && *env) data_root = fs::path(env);
  }
  const fs::path base = data_root ? *data_root : path.parent_path();
  const std::string text = detail::read_file(path);
  CorpusManifest m;

  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
    }
    for (const auto& e : doc.value("matches", nlohmann::json::array())) {
      ManifestEntry me;
      me.match_id = e.at("match_id").is_string() ? e.at("match_id").get<std::string>()
                                                  : e.at("match_id").dump();
      me.events = detail::resolve(e.at("events").get<std::string>(), base);
      if (e.contains("formation") && !e["formation"].is_null())
        me.formation = detail::resolve(e["formation"].get<std::string>(), base);
      m.matches.push_back(std::move(me));
    }
    if (doc.contains("output_root")) m.output_root = doc["output_root"].get<std::string>();
    m.seed = doc.value("seed", m.seed);
    m.ensemble_size = doc.value("ensemble_size", m.ensemble_size);
    m.resolution = doc.value("resolution", m.resolution);
    m.fragments_limit = doc.value("fragments_limit", m.fragments_limit);
    m.formations_limit = doc.value("formations_limit", m.formations_limit);
    if (doc.contains("analyses")) {
      const auto& a = doc["analyses"];
      m.toggles = {a.value("centrality", true), a.value("intensity", true), a.value("community", true),
                   a.value("fragments", true)};
    }
  } else {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto cols = detail::split_csv_line(t);
      if (lineno == 1 && cols[0] == "match_id") continue;
      if (cols.size() < 2 || cols.size() > 3 || cols[0].empty() || cols[1].empty())
        throw ManifestError(fmt::format("{}:{}: expected 'match_id,events[,formation]'", path.string(), lineno));
      ManifestEntry me{cols[0], detail::resolve(cols[1], base), std::nullopt};
      if (cols.size() == 3 && !cols[2].empty()) me.formation = detail::resolve(cols[2], base);
      m.matches.push_back(std::move(me));
    }
  }
  validate(m);
  return m;
}

// Runs fn(i) for i in [0, n) on a bounded pool; blocks until all finish.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

// FNV-1a, for order-independent per-network seeds.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t network_seed(std::uint64_t master, std::string_view key) {
  return derive_seed(master, stable_hash(key));
}

// ---------------------------------------------------------------------------
// Per-match network material

struct TeamWindows {
  TeamId team;
  std::string role;  // acting | opposing | all | none
  KeyEvent event;
  Window before;
  Window after;
  Passmap before_map;
  Passmap after_map;
  AugmentedPassmap before_aug;
  AugmentedPassmap after_aug;
  double possession_before{0.0};
  double possession_after{0.0};
};

inline std::string team_role(const KeyEvent& ev, TeamId team) {
  if (ev.kind == KeyEventKind::HalfTime) return "all";
  if (!ev.occurred || !ev.acting_team) return "none";
  return *ev.acting_team == team ? "acting" : "opposing";
}

inline std::unordered_map<PlayerId, NodeInfo> player_metadata(const MatchEventStream& stream,
                                                              const std::vector<FormationEntry>* formation) {
  std::unordered_map<PlayerId, NodeInfo> info;
  for (const auto& [id, name] : stream.player_names) info[id] = NodeInfo{id, name, std::nullopt};
  if (formation) {
    for (const auto& e : *formation) {
      auto& n = info[e.player];
      n.id = e.player;
      if (!n.name) n.name = e.name;
      n.line = e.line;
    }
  }
  return info;
}

inline TeamWindows team_windows(const MatchEventStream& stream, TeamId team, const KeyEvent& ev,
                                const std::unordered_map<PlayerId, NodeInfo>& meta) {
  TeamWindows tw;
  tw.team = team;
  tw.role = team_role(ev, team);
  tw.event = ev;
  tw.before = ev.before_window();
  tw.after = ev.after_window();
  KeyEventSplit split = split_on_event(stream, team, ev);
  tw.before_map = std::move(split.before);
  tw.after_map = std::move(split.after);
  tw.before_map.annotate(meta);
  tw.after_map.annotate(meta);
  tw.before_aug = augment_with_shots(tw.before_map, stream, team, tw.before);
  tw.after_aug = ev.occurred ? augment_with_shots(tw.after_map, stream, team, tw.after)
                             : AugmentedPassmap{tw.after_map};
  tw.before_aug.graph.annotate(meta);
  tw.after_aug.graph.annotate(meta);
  tw.possession_before = possession_time(stream, team, tw.before);
  tw.possession_after = possession_time(stream, team, tw.after);
  return tw;
}

// ---------------------------------------------------------------------------
// Network tree

struct RunLog {
  std::vector<std::string> lines;

  void add(std::string line) { lines.push_back(std::move(line)); }
  std::string text() const {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
  }
};

struct NetworkRunSummary {
  std::size_t matches_written{0};
  std::size_t player_networks{0};
  std::size_t flow_networks{0};
  std::vector<std::pair<std::string, std::string>> skipped;  // (match_id, reason)
};

namespace detail {

inline nlohmann::json time_json(MatchTime t) { return {{"period", t.period}, {"clock", t.clock}}; }

inline nlohmann::json sidecar(const std::string& match_id, const MatchEventStream& stream,
                              const TeamWindows& tw, bool after) {
  const Passmap& g = after ? tw.after_map : tw.before_map;
  const Window& w = after ? tw.after : tw.before;
  nlohmann::json players = nlohmann::json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto& n = g.nodes()[i];
    nlohmann::json p = {{"vertex", i + 1}, {"player_id", n.id.value}};
    if (n.name) p["name"] = *n.name;
    if (n.line) p["line"] = std::string(to_string(*n.line));
    players.push_back(std::move(p));
  }
  nlohmann::json j = {
      {"match_id", match_id},
      {"team_id", tw.team.value},
      {"opponent_id", stream.opponent_of(tw.team).value},
      {"event", std::string(to_string(tw.event.kind))},
      {"split", after ? "after" : "before"},
      {"occurred", tw.event.occurred},
      {"team_role", tw.role},
      {"window", w.empty() ? nlohmann::json(nullptr)
                           : nlohmann::json{{"start", time_json(w.start)}, {"end", time_json(w.end)}}},
      {"nodes", g.node_count()},
      {"arcs", g.arc_count()},
      {"total_weight", g.total_weight()},
      {"possession_seconds", after ? tw.possession_after : tw.possession_before},
      {"flow_variant", after ? "after.flow.net" : "before.flow.net"},
      {"players", std::move(players)},
  };
  if (tw.event.at) j["event_time"] = time_json(*tw.event.at);
  if (tw.event.acting_team) j["acting_team_id"] = tw.event.acting_team->value;
  return j;
}

}  // namespace detail

inline fs::path network_dir(const fs::path& root, const std::string& match_id, TeamId team, KeyEventKind ev) {
  return root / "networks" / match_id / std::to_string(team.value) / std::string(to_string(ev));
}

// Writes networks/<match>/<team>/<event>/{before,after}.net, the flow
// variants (*.flow.net) and JSON sidecars for every manifest match.
// Unreadable matches are skipped and logged.
inline NetworkRunSummary run_networks(const CorpusManifest& m, RunLog* log = nullptr) {
  struct Outcome {
    std::vector<std::pair<fs::path, std::string>> files;
    std::optional<std::string> error;
  };
  std::vector<Outcome> outcomes(m.matches.size());

  parallel_for(m.matches.size(), m.workers, [&](std::size_t i) {
    const auto& entry = m.matches[i];
    try {
      const MatchEventStream stream = load_match(entry.events.string(), entry.match_id);
      std::vector<FormationEntry> formation;
      if (entry.formation) formation = load_formation(entry.formation->string());
      const auto meta = player_metadata(stream, entry.formation ? &formation : nullptr);
      const auto key = detect_key_events(stream);
      for (TeamId team : {stream.home_team, stream.away_team}) {
        for (const KeyEvent& ev : key) {
          const TeamWindows tw = team_windows(stream, team, ev, meta);
          const fs::path dir = network_dir(m.output_root, entry.match_id, team, ev.kind);
          auto& files = outcomes[i].files;
          files.emplace_back(dir / "before.net", to_pajek(tw.before_map));
          files.emplace_back(dir / "after.net", to_pajek(tw.after_map));
          files.emplace_back(dir / "before.flow.net", to_pajek(tw.before_aug.graph));
          files.emplace_back(dir / "after.flow.net", to_pajek(tw.after_aug.graph));
          files.emplace_back(dir / "before.json", detail::sidecar(entry.match_id, stream, tw, false).dump(1) + "\n");
          files.emplace_back(dir / "after.json", detail::sidecar(entry.match_id, stream, tw, true).dump(1) + "\n");
        }
      }
    } catch (const std::exception& e) {
      outcomes[i].files.clear();
      outcomes[i].error = e.what();
    }
  });

  NetworkRunSummary summary;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& id = m.matches[i].match_id;
    if (outcomes[i].error) {
      summary.skipped.emplace_back(id, *outcomes[i].error);
      if (log) log->add(fmt::format("networks: skip {}: {}", id, *outcomes[i].error));
      continue;
    }
    for (const auto& [path, content] : outcomes[i].files) {
      detail::write_file(path, content);
      const auto name = path.filename().string();
      if (name == "before.net" || name == "after.net") ++summary.player_networks;
      if (name.ends_with(".flow.net")) ++summary.flow_networks;
    }
    ++summary.matches_written;
    if (log) log->add(fmt::format("networks: wrote {}", id));
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Analysis

struct DeltaRow {
  std::string match_id;
  TeamId team;
  KeyEventKind event{KeyEventKind::HalfTime};
  std::string role;
  std::string measure;
  std::optional<double> before;
  std::optional<double> after;
  std::optional<double> delta;
  std::optional<double> relative;
};

struct IntensityRow {
  DeltaRow delta;
  double possession_before{0.0};
  double possession_after{0.0};
  long weight_before{0};
  long weight_after{0};
};

struct PartitionRow {
  std::string match_id;
  TeamId team;
  std::string window;
  PartitionMethod method{PartitionMethod::Leiden};
  PlayerId player;
  int community{0};
};

struct CommunityRow {
  std::string match_id;
  TeamId team;
  std::string window;
  std::string method;
  int community_count{0};
  double modularity{0.0};
  std::optional<double> nmi_lines4;
  std::optional<double> nmi_lines3;
  std::optional<double> lines_modularity;
};

struct ProfileRow {
  std::string match_id;
  TeamId team;
  std::string window;
  std::vector<double> values;
};

struct SignificanceRow {
  std::string match_id;
  TeamId team;
  std::string window;
  SignificanceProfile profile;
  bool swap_starved{false};
};

struct AnalysisResults {
  std::vector<DeltaRow> centrality;
  std::vector<IntensityRow> intensity;
  std::vector<PartitionRow> partitions;
  std::vector<CommunityRow> communities;
  std::vector<ProfileRow> opp;
  std::vector<SignificanceRow> significance;
  PositionProfile position_profile;
  std::vector<std::pair<std::string, std::string>> skipped;
  std::vector<std::string> notes;
};

namespace detail {

inline std::string window_name(KeyEventKind ev, bool after) {
  return fmt::format("{}.{}", to_string(ev), after ? "after" : "before");
}

struct MatchAnalysis {
  std::vector<DeltaRow> centrality;
  std::vector<IntensityRow> intensity;
  std::vector<PartitionRow> partitions;
  std::vector<CommunityRow> communities;
  std::vector<ProfileRow> opp;
  std::vector<SignificanceRow> significance;
  std::vector<std::pair<Partition, FormationGroundTruth>> profile_items;
  std::vector<std::string> notes;
};

inline std::set<PlayerId> team_players(const MatchEventStream& s, TeamId team) {
  std::set<PlayerId> out;
  for (const auto& ev : s.events) {
    if (ev.team != team) continue;
    if (ev.player) out.insert(*ev.player);
    if (ev.pass && ev.pass->recipient) out.insert(*ev.pass->recipient);
  }
  return out;
}

inline MatchAnalysis analyze_match(const CorpusManifest& m, const ManifestEntry& entry, bool run_fragments,
                                   bool run_formation) {
  MatchAnalysis out;
  const MatchEventStream stream = load_match(entry.events.string(), entry.match_id);
  std::vector<FormationEntry> formation;
  if (entry.formation && run_formation) formation = load_formation(entry.formation->string());
  const bool have_formation = !formation.empty();
  const auto meta = player_metadata(stream, have_formation ? &formation : nullptr);
  const auto key = detect_key_events(stream);

  for (TeamId team : {stream.home_team, stream.away_team}) {
    std::optional<FormationGroundTruth> gt;
    if (have_formation) gt = ground_truth_for(team, formation, team_players(stream, team));

    if (run_fragments && m.toggles.fragments) {
      // Whole-match reference network.
      Passmap whole = build_passmap(successful_passes(stream, team, kWholeMatch).passes, team, "whole");
      Passmap pruned = prune_median(whole);
      if (pruned.arc_count() > 0) {
        const auto counts = count_motifs_and_orbits(pruned);
        EnsembleOptions opt{m.ensemble_size, network_seed(m.seed, fmt::format("{}/{}/whole", entry.match_id, team.value))};
        const auto ens = configuration_ensemble(pruned, opt);
        out.significance.push_back({entry.match_id, team, "whole", significance_profile(counts.motifs, ens, m.z_cap),
                                    ens.swap_starved});
        const auto opp = opp_profile(counts);
        out.opp.push_back({entry.match_id, team, "whole", {opp.begin(), opp.end()}});
      }
    }

    for (const KeyEvent& ev : key) {
      const TeamWindows tw = team_windows(stream, team, ev, meta);
      const std::string kind{to_string(ev.kind)};

      if (m.toggles.centrality) {
        const CentralityVector bb = betweenness(tw.before_map), ba = betweenness(tw.after_map);
        const CentralityVector cb = closeness(tw.before_map), ca = closeness(tw.after_map);
        const CentralityVector fb = flow_centrality(tw.before_aug), fa = flow_centrality(tw.after_aug);
        for (const auto& d : {delta_std(bb, ba, ev.kind), delta_std(cb, ca, ev.kind), delta_std(fb, fa, ev.kind)}) {
          out.centrality.push_back({entry.match_id, team, ev.kind, tw.role, std::string(to_string(d.measure)),
                                    d.std_before, ev.occurred ? std::optional(d.std_after) : std::nullopt, d.value,
                                    d.relative});
        }
      }

      if (m.toggles.intensity) {
        const IntensityRecord ib = intensity(tw.before_map, tw.possession_before);
        const IntensityRecord ia = intensity(tw.after_map, tw.possession_after);
        DeltaRow row{entry.match_id, team, ev.kind, tw.role, "intensity", ib.intensity, ia.intensity, {}, {}};
        if (ev.occurred && ib.defined() && ia.defined()) {
          row.delta = *ia.intensity - *ib.intensity;
          if (*ib.intensity > 0.0) row.relative = *row.delta / *ib.intensity;
        } else if (ev.occurred) {
          out.notes.push_back(fmt::format("intensity: {}/{}/{} excluded, zero possession time in a window",
                                          entry.match_id, team.value, kind));
        }
        out.intensity.push_back({row, tw.possession_before, tw.possession_after, tw.before_map.total_weight(),
                                 tw.after_map.total_weight()});
      }

      for (bool after : {false, true}) {
        if (after && !ev.occurred) continue;
        const Passmap& g = after ? tw.after_map : tw.before_map;
        const std::string wname = window_name(ev.kind, after);
        const Passmap pruned = prune_median(g);

        if (m.toggles.community && !g.empty()) {
          const auto seed = network_seed(m.seed, fmt::format("{}/{}/{}", entry.match_id, team.value, wname));
          const Partition leid = leiden(pruned, m.resolution, seed);
          const Partition cpm = clique_percolation(pruned, 3);
          for (const Partition* p : {&leid, &cpm}) {
            for (std::size_t i = 0; i < p->size(); ++i)
              out.partitions.push_back({entry.match_id, team, wname, p->method, p->nodes[i], p->community[i]});
            CommunityRow row{entry.match_id, team, wname, std::string(to_string(p->method)), p->count(),
                             modularity(pruned, *p, m.resolution), {}, {}, {}};
            if (gt) {
              const Partition l4 = playing_lines(*gt, p->nodes, false);
              const Partition l3 = playing_lines(*gt, p->nodes, true);
              if (l4.size() > 0) {
                const Partition pr = restrict_to(*p, l4.nodes);
                row.nmi_lines4 = nmi(pr, l4);
                row.nmi_lines3 = nmi(pr, l3);
                const Partition full_lines = playing_lines(*gt, node_ids(pruned), false);
                if (full_lines.size() == pruned.node_count())
                  row.lines_modularity = modularity(pruned, full_lines, m.resolution);
              }
            }
            out.communities.push_back(std::move(row));
          }
          if (gt) out.profile_items.emplace_back(leid, *gt);
        }

        if (run_fragments && m.toggles.fragments) {
          const auto counts = count_motifs_and_orbits(pruned);
          const auto opp = opp_profile(counts);
          out.opp.push_back({entry.match_id, team, wname, {opp.begin(), opp.end()}});
          if (pruned.arc_count() > 0) {
            EnsembleOptions opt{m.ensemble_size,
                                network_seed(m.seed, fmt::format("{}/{}/{}/null", entry.match_id, team.value, wname))};
            const auto ens = configuration_ensemble(pruned, opt);
            out.significance.push_back(
                {entry.match_id, team, wname, significance_profile(counts.motifs, ens, m.z_cap), ens.swap_starved});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Matches selected for a size-limited analysis: the first `limit` ids in
// sorted order, so selection does not depend on manifest order.
inline std::set<std::string> subsample(const std::vector<ManifestEntry>& matches, std::size_t limit,
                                       bool need_formation) {
  std::vector<std::string> ids;
  for (const auto& e : matches)
    if (!need_formation || e.formation) ids.push_back(e.match_id);
  std::sort(ids.begin(), ids.end());
  if (ids.size() > limit) ids.resize(limit);
  return {ids.begin(), ids.end()};
}

inline AnalysisResults run_analysis(const CorpusManifest& m, RunLog* log = nullptr) {
  const auto frag_ids = subsample(m.matches, m.fragments_limit, false);
  const auto form_ids = subsample(m.matches, m.formations_limit, true);

  // Process in match-id order so outputs do not depend on manifest order.
  std::vector<const ManifestEntry*> order;
  for (const auto& e : m.matches) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->match_id < b->match_id; });

  std::vector<std::optional<detail::MatchAnalysis>> per(order.size());
  std::vector<std::string> errors(order.size());
  parallel_for(order.size(), m.workers, [&](std::size_t i) {
    const auto& e = *order[i];
    try {
      per[i] = detail::analyze_match(m, e, frag_ids.contains(e.match_id), form_ids.contains(e.match_id));
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });

  AnalysisResults r;
  std::vector<std::pair<Partition, FormationGroundTruth>> profile_items;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& id = order[i]->match_id;
    if (!per[i]) {
      r.skipped.emplace_back(id, errors[i]);
      if (log) log->add(fmt::format("analyze: skip {}: {}", id, errors[i]));
      continue;
    }
    auto& a = *per[i];
    auto append = [](auto& dst, auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    append(r.centrality, a.centrality);
    append(r.intensity, a.intensity);
    append(r.partitions, a.partitions);
    append(r.communities, a.communities);
    append(r.opp, a.opp);
    append(r.significance, a.significance);
    append(profile_items, a.profile_items);
    append(r.notes, a.notes);
    if (log) {
      log->add(fmt::format("analyze: {} fragments={} formation={}", id, frag_ids.contains(id) ? "yes" : "no",
                           form_ids.contains(id) ? "yes" : "no"));
      for (const auto& n : a.notes) log->add(n);
    }
  }
  r.position_profile = position_community_profile(profile_items);
  return r;
}

// ---------------------------------------------------------------------------
// Result tables

namespace detail {

inline std::string num(double x) { return fmt::format("{}", x); }
inline std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : "NA"; }

}  // namespace detail

inline std::string centrality_csv(const std::vector<DeltaRow>& rows) {
  std::string s = "match_id,team_id,event_kind,team_role,measure,std_before,std_after,delta,relative_delta\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.match_id, r.team.value, to_string(r.event), r.role, r.measure,
                     detail::opt_num(r.before), detail::opt_num(r.after), detail::opt_num(r.delta),
                     detail::opt_num(r.relative));
  return s;
}

inline std::string intensity_csv(const std::vector<IntensityRow>& rows) {
  std::string s =
      "match_id,team_id,event_kind,team_role,measure,value_before,value_after,delta,relative_delta,"
      "possession_before,possession_after,weight_before,weight_after\n";
  for (const auto& row : rows) {
    const auto& r = row.delta;
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.match_id, r.team.value, to_string(r.event), r.role,
                     r.measure, detail::opt_num(r.before), detail::opt_num(r.after), detail::opt_num(r.delta),
                     detail::opt_num(r.relative), detail::num(row.possession_before),
                     detail::num(row.possession_after), row.weight_before, row.weight_after);
  }
  return s;
}

inline std::string partitions_csv(const std::vector<PartitionRow>& rows) {
  std::string s = "match_id,team_id,window,method,player_id,community\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{},{}\n", r.match_id, r.team.value, r.window, to_string(r.method), r.player.value,
                     r.community);
  return s;
}

inline std::string communities_csv(const std::vector<CommunityRow>& rows) {
  std::string s = "match_id,team_id,window,method,community_count,modularity,nmi_lines4,nmi_lines3,lines_modularity\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.match_id, r.team.value, r.window, r.method, r.community_count,
                     detail::num(r.modularity), detail::opt_num(r.nmi_lines4), detail::opt_num(r.nmi_lines3),
                     detail::opt_num(r.lines_modularity));
  return s;
}

inline std::string opp_csv(const std::vector<ProfileRow>& rows) {
  std::string s = "match_id,team_id,window";
  for (std::size_t o = 0; o < kOrbitCount; ++o) s += fmt::format(",orbit_{}", o);
  s += "\n";
  for (const auto& r : rows) {
    s += fmt::format("{},{},{}", r.match_id, r.team.value, r.window);
    for (double v : r.values) s += "," + detail::num(v);
    s += "\n";
  }
  return s;
}

inline std::string significance_csv(const std::vector<SignificanceRow>& rows) {
  std::string s = "match_id,team_id,window";
  for (std::size_t i = 0; i < kGraphletCount; ++i) s += fmt::format(",sp_{}", i);
  s += "\n";
  for (const auto& r : rows) {
    s += fmt::format("{},{},{}", r.match_id, r.team.value, r.window);
    for (double v : r.profile.sp) s += "," + detail::num(v);
    s += "\n";
  }
  return s;
}

inline std::string zscores_csv(const std::vector<SignificanceRow>& rows) {
  std::string s = "match_id,team_id,window";
  for (std::size_t i = 0; i < kGraphletCount; ++i) s += fmt::format(",z_{}", i);
  s += ",capped,swap_starved\n";
  for (const auto& r : rows) {
    s += fmt::format("{},{},{}", r.match_id, r.team.value, r.window);
    for (double v : r.profile.z) s += "," + detail::num(v);
    std::string capped;
    for (std::size_t i = 0; i < kGraphletCount; ++i)
      if (r.profile.capped[i]) capped += (capped.empty() ? "" : ";") + std::to_string(i);
    s += fmt::format(",{},{}\n", capped.empty() ? "-" : capped, r.swap_starved ? 1 : 0);
  }
  return s;
}

inline std::string position_profile_csv(const PositionProfile& p) {
  std::string s = "community_size,members,GK,DEF,MID,ATT,unknown\n";
  for (const auto& [size, row] : p.rows) {
    s += fmt::format("{},{}", size, row.total());
    for (std::size_t k = 0; k < kLineSlots; ++k) s += "," + detail::num(row.proportion(static_cast<LineSlot>(k)));
    s += "\n";
  }
  return s;
}

inline void write_results(const AnalysisResults& r, const fs::path& root) {
  const fs::path dir = root / "results";
  detail::write_file(dir / "centrality.csv", centrality_csv(r.centrality));
  detail::write_file(dir / "intensity.csv", intensity_csv(r.intensity));
  detail::write_file(dir / "partitions.csv", partitions_csv(r.partitions));
  detail::write_file(dir / "communities.csv", communities_csv(r.communities));
  detail::write_file(dir / "opp.csv", opp_csv(r.opp));
  detail::write_file(dir / "significance.csv", significance_csv(r.significance));
  detail::write_file(dir / "zscores.csv", zscores_csv(r.significance));
  detail::write_file(dir / "position_profile.csv", position_profile_csv(r.position_profile));
}

// ---------------------------------------------------------------------------
// Aggregation

struct DistributionSummary {
  std::string event;
  std::string role;
  std::string measure;
  std::size_t count{0};
  std::size_t not_applicable{0};
  double mean{0.0};
  double median{0.0};
  double q1{0.0};
  double q3{0.0};
};

struct AggregateReport {
  std::vector<DistributionSummary> rows;  // sorted by (event, role, measure)

  const DistributionSummary* find(std::string_view event, std::string_view role, std::string_view measure) const {
    for (const auto& r : rows)
      if (r.event == event && r.role == role && r.measure == measure) return &r;
    return nullptr;
  }
};

namespace detail {

struct Samples {
  std::vector<double> values;
  std::size_t na{0};
};

inline DistributionSummary summarize(const std::string& ev, const std::string& role, const std::string& measure,
                                     Samples s) {
  DistributionSummary d{ev, role, measure, s.values.size(), s.na, 0, 0, 0, 0};
  std::sort(s.values.begin(), s.values.end());
  if (!s.values.empty()) {
    d.mean = stats::mean(s.values);
    d.median = stats::quantile(s.values, 0.5);
    d.q1 = stats::quantile(s.values, 0.25);
    d.q3 = stats::quantile(s.values, 0.75);
  }
  return d;
}

inline std::optional<double> parse_opt(const std::string& s) {
  if (s == "NA" || s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace detail

// Corpus distributions of every per-network delta. OPP deltas (after -
// before) are reported for every split; motif z-scores of whole-match
// networks appear under event "whole".
inline AggregateReport aggregate(const AnalysisResults& r) {
  std::map<std::tuple<std::string, std::string, std::string>, detail::Samples> groups;
  auto add = [&](const std::string& ev, const std::string& role, const std::string& measure,
                 std::optional<double> v) {
    auto& g = groups[{ev, role, measure}];
    if (v)
      g.values.push_back(*v);
    else
      ++g.na;
  };
  for (const auto& row : r.centrality) add(std::string(to_string(row.event)), row.role, row.measure, row.delta);
  for (const auto& row : r.intensity)
    add(std::string(to_string(row.delta.event)), row.delta.role, "intensity", row.delta.delta);

  // Roles per (match, team, event) for profile deltas.
  std::map<std::tuple<std::string, std::int64_t, std::string>, std::string> roles;
  for (const auto& row : r.centrality) roles[{row.match_id, row.team.value, std::string(to_string(row.event))}] = row.role;

  std::map<std::tuple<std::string, std::int64_t, std::string>, const ProfileRow*> opp;
  for (const auto& row : r.opp) opp[{row.match_id, row.team.value, row.window}] = &row;
  for (const auto& [key, before] : opp) {
    const auto& [match, team, window] = key;
    if (!window.ends_with(".before")) continue;
    const std::string ev = window.substr(0, window.size() - 7);
    auto it = opp.find({match, team, ev + ".after"});
    auto role_it = roles.find({match, team, ev});
    const std::string role = role_it == roles.end() ? "all" : role_it->second;
    for (std::size_t o = 0; o < kOrbitCount; ++o) {
      std::optional<double> d;
      if (it != opp.end()) d = it->second->values[o] - before->values[o];
      add(ev, role, fmt::format("opp_orbit_{}", o), d);
    }
  }
  for (const auto& row : r.significance) {
    if (row.window != "whole") continue;
    for (std::size_t i = 0; i < kGraphletCount; ++i) add("whole", "all", fmt::format("z_motif_{}", i), row.profile.z[i]);
  }
  // Community-count changes.
  std::map<std::tuple<std::string, std::int64_t, std::string, std::string>, int> counts;
  for (const auto& row : r.communities) counts[{row.match_id, row.team.value, row.window, row.method}] = row.community_count;
  for (const auto& [key, c] : counts) {
    const auto& [match, team, window, method] = key;
    if (!window.ends_with(".before")) continue;
    const std::string ev = window.substr(0, window.size() - 7);
    auto it = counts.find({match, team, ev + ".after", method});
    auto role_it = roles.find({match, team, ev});
    const std::string role = role_it == roles.end() ? "all" : role_it->second;
    add(ev, role, method + "_community_count",
        it == counts.end() ? std::nullopt : std::optional<double>(it->second - c));
  }

  AggregateReport rep;
  for (auto& [key, samples] : groups) {
    const auto& [ev, role, measure] = key;
    rep.rows.push_back(detail::summarize(ev, role, measure, std::move(samples)));
  }
  return rep;
}

inline std::string report_csv(const AggregateReport& rep) {
  std::string s = "event_kind,team_role,measure,count,not_applicable,mean,median,q1,q3\n";
  for (const auto& r : rep.rows)
    s += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.event, r.role, r.measure, r.count, r.not_applicable,
                     detail::num(r.mean), detail::num(r.median), detail::num(r.q1), detail::num(r.q3));
  return s;
}

// ---------------------------------------------------------------------------
// Reading result tables back (aggregate / plot subcommands)

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  return rows;
}

inline KeyEventKind parse_event(const std::string& s) {
  auto k = key_event_kind_from(s);
  if (!k) throw std::runtime_error("unknown event kind '" + s + "'");
  return *k;
}

}  // namespace detail

inline AnalysisResults load_results(const fs::path& root) {
  const fs::path dir = root / "results";
  AnalysisResults r;
  if (fs::exists(dir / "centrality.csv")) {
    for (const auto& c : detail::read_csv(dir / "centrality.csv"))
      r.centrality.push_back({c.at(0), TeamId{std::stoll(c.at(1))}, detail::parse_event(c.at(2)), c.at(3), c.at(4),
                              detail::parse_opt(c.at(5)), detail::parse_opt(c.at(6)), detail::parse_opt(c.at(7)),
                              detail::parse_opt(c.at(8))});
  }
  if (fs::exists(dir / "intensity.csv")) {
    for (const auto& c : detail::read_csv(dir / "intensity.csv"))
      r.intensity.push_back({{c.at(0), TeamId{std::stoll(c.at(1))}, detail::parse_event(c.at(2)), c.at(3), c.at(4),
                              detail::parse_opt(c.at(5)), detail::parse_opt(c.at(6)), detail::parse_opt(c.at(7)),
                              detail::parse_opt(c.at(8))},
                             std::stod(c.at(9)), std::stod(c.at(10)), std::stol(c.at(11)), std::stol(c.at(12))});
  }
  if (fs::exists(dir / "communities.csv")) {
    for (const auto& c : detail::read_csv(dir / "communities.csv"))
      r.communities.push_back({c.at(0), TeamId{std::stoll(c.at(1))}, c.at(2), c.at(3), std::stoi(c.at(4)),
                               std::stod(c.at(5)), detail::parse_opt(c.at(6)), detail::parse_opt(c.at(7)),
                               detail::parse_opt(c.at(8))});
  }
  if (fs::exists(dir / "opp.csv")) {
    for (const auto& c : detail::read_csv(dir / "opp.csv")) {
      ProfileRow row{c.at(0), TeamId{std::stoll(c.at(1))}, c.at(2), {}};
      for (std::size_t o = 0; o < kOrbitCount; ++o) row.values.push_back(std::stod(c.at(3 + o)));
      r.opp.push_back(std::move(row));
    }
  }
  if (fs::exists(dir / "zscores.csv") && fs::exists(dir / "significance.csv")) {
    const auto z = detail::read_csv(dir / "zscores.csv");
    const auto sp = detail::read_csv(dir / "significance.csv");
    for (std::size_t i = 0; i < z.size() && i < sp.size(); ++i) {
      SignificanceRow row{z[i].at(0), TeamId{std::stoll(z[i].at(1))}, z[i].at(2), {}, z[i].at(19) == "1"};
      for (std::size_t k = 0; k < kGraphletCount; ++k) {
        row.profile.z[k] = std::stod(z[i].at(3 + k));
        row.profile.sp[k] = std::stod(sp[i].at(3 + k));
      }
      if (z[i].at(18) != "-") {
        std::istringstream cs(z[i].at(18));
        std::string tok;
        while (std::getline(cs, tok, ';')) row.profile.capped[std::stoul(tok)] = true;
      }
      r.significance.push_back(std::move(row));
    }
  }
  return r;
}

}  // namespace passnet
