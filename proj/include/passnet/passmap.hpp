#pragma once

// Directed weighted pass networks: construction from pass lists, key-event
// splits, median pruning, shot augmentation and Pajek serialization.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "passnet/common.hpp"
#include "passnet/event_ingest.hpp"

namespace passnet {

enum class PlayingLine { GK, DEF, MID, ATT };

inline std::string_view to_string(PlayingLine l) {
  switch (l) {
    case PlayingLine::GK: return "GK";
    case PlayingLine::DEF: return "DEF";
    case PlayingLine::MID: return "MID";
    case PlayingLine::ATT: return "ATT";
  }
  return "?";
}

inline std::optional<PlayingLine> playing_line_from(std::string_view s) {
  if (s == "GK") return PlayingLine::GK;
  if (s == "DEF") return PlayingLine::DEF;
  if (s == "MID") return PlayingLine::MID;
  if (s == "ATT") return PlayingLine::ATT;
  return std::nullopt;
}

// Synthetic shot sinks of augmented passmaps.
inline constexpr PlayerId kShotOn{-1};
inline constexpr PlayerId kShotOff{-2};

inline bool is_synthetic(PlayerId id) { return id == kShotOn || id == kShotOff; }

struct NodeInfo {
  PlayerId id;
  std::optional<std::string> name;
  std::optional<PlayingLine> line;

  bool synthetic() const { return is_synthetic(id); }
  friend bool operator==(const NodeInfo&, const NodeInfo&) = default;
};

using Arc = std::pair<PlayerId, PlayerId>;

// Players as nodes, integer pass counts as arc weights. Nodes keep their
// insertion order, which is also their Pajek vertex order.
class Passmap {
 public:
  Passmap() = default;
  explicit Passmap(TeamId team, std::string label = {}) : team_(team), label_(std::move(label)) {}

  TeamId team() const { return team_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  std::size_t add_node(PlayerId id) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    index_.emplace(id, nodes_.size());
    nodes_.push_back(NodeInfo{id, std::nullopt, std::nullopt});
    return nodes_.size() - 1;
  }

  std::size_t add_node(NodeInfo info) {
    const std::size_t i = add_node(info.id);
    if (info.name) nodes_[i].name = std::move(info.name);
    if (info.line) nodes_[i].line = info.line;
    return i;
  }

  // Adds `weight` passes from `src` to `dst`. Self-arcs are ignored.
  void add_arc(PlayerId src, PlayerId dst, int weight = 1) {
    if (src == dst || weight <= 0) return;
    add_node(src);
    add_node(dst);
    arcs_[{src, dst}] += weight;
  }

  void remove_arc(PlayerId src, PlayerId dst) { arcs_.erase({src, dst}); }

  bool contains(PlayerId id) const { return index_.contains(id); }
  std::optional<std::size_t> index_of(PlayerId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int weight(PlayerId src, PlayerId dst) const {
    auto it = arcs_.find({src, dst});
    return it == arcs_.end() ? 0 : it->second;
  }

  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const std::map<Arc, int>& arcs() const { return arcs_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  bool empty() const { return nodes_.empty(); }

  long total_weight() const {
    long s = 0;
    for (const auto& [arc, w] : arcs_) s += w;
    return s;
  }

  // Node info with metadata from `info` copied onto matching ids.
  void annotate(const std::unordered_map<PlayerId, NodeInfo>& info) {
    for (auto& n : nodes_) {
      auto it = info.find(n.id);
      if (it == info.end()) continue;
      if (it->second.name) n.name = it->second.name;
      if (it->second.line) n.line = it->second.line;
    }
  }

  // Same nodes in the same order, same arcs and weights.
  friend bool operator==(const Passmap& a, const Passmap& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
      if (a.nodes_[i].id != b.nodes_[i].id) return false;
    }
    return a.arcs_ == b.arcs_;
  }

 private:
  TeamId team_{};
  std::string label_;
  std::vector<NodeInfo> nodes_;
  std::unordered_map<PlayerId, std::size_t> index_;
  std::map<Arc, int> arcs_;
};

inline std::vector<PlayerId> node_ids(const Passmap& g) {
  std::vector<PlayerId> ids;
  ids.reserve(g.node_count());
  for (const auto& n : g.nodes()) ids.push_back(n.id);
  return ids;
}

// Dense weight matrix in node order; w[i * n + j] is the i -> j pass count.
struct WeightMatrix {
  std::size_t n{0};
  std::vector<double> w;

  double operator()(std::size_t i, std::size_t j) const { return w[i * n + j]; }
};

inline WeightMatrix weight_matrix(const Passmap& g) {
  WeightMatrix m{g.node_count(), std::vector<double>(g.node_count() * g.node_count(), 0.0)};
  for (const auto& [arc, w] : g.arcs()) {
    m.w[*g.index_of(arc.first) * m.n + *g.index_of(arc.second)] = w;
  }
  return m;
}

inline Passmap build_passmap(const std::vector<PassRecord>& passes, TeamId team = {},
                             std::string label = {}) {
  Passmap g(team, std::move(label));
  for (const PassRecord& p : passes) g.add_arc(p.passer, p.recipient);
  return g;
}

struct KeyEventSplit {
  TeamId team;
  KeyEvent event;
  Passmap before;
  Passmap after;
};

// Passes strictly before the key event go to `before`, the rest to `after`.
// A key event that never happened leaves `after` empty.
inline KeyEventSplit split_on_event(const MatchEventStream& stream, TeamId team,
                                    const KeyEvent& event) {
  const std::string kind{to_string(event.kind)};
  KeyEventSplit s{team, event,
                  build_passmap(successful_passes(stream, team, event.before_window()).passes,
                                team, "before " + kind),
                  build_passmap(successful_passes(stream, team, event.after_window()).passes,
                                team, "after " + kind)};
  return s;
}

// Removes every arc whose weight is at most the median arc weight. Nodes are
// kept, possibly isolated.
inline Passmap prune_median(const Passmap& g) {
  if (g.arc_count() == 0) return g;
  std::vector<double> ws;
  ws.reserve(g.arc_count());
  for (const auto& [arc, w] : g.arcs()) ws.push_back(w);
  const double med = stats::median(ws);
  Passmap out = g;
  for (const auto& [arc, w] : g.arcs()) {
    if (w <= med) out.remove_arc(arc.first, arc.second);
  }
  return out;
}

// A passmap with the two shot sinks attached.
struct AugmentedPassmap {
  Passmap graph;
};

inline AugmentedPassmap augment_with_shots(const Passmap& g, const MatchEventStream& stream,
                                           TeamId team, const Window& window) {
  AugmentedPassmap aug{g};
  aug.graph.add_node(NodeInfo{kShotOn, std::string("SHOT_ON"), std::nullopt});
  aug.graph.add_node(NodeInfo{kShotOff, std::string("SHOT_OFF"), std::nullopt});
  for (const RawEvent& ev : stream.events) {
    if (ev.kind != EventKind::Shot || ev.team != team || !ev.player || !ev.shot) continue;
    if (!window.contains(ev.time())) continue;
    aug.graph.add_arc(*ev.player, ev.shot->on_target() ? kShotOn : kShotOff);
  }
  return aug;
}

// ---------------------------------------------------------------------------
// Pajek

class PajekError : public std::runtime_error {
 public:
  PajekError(std::size_t line, const std::string& what)
      : std::runtime_error(fmt::format("pajek line {}: {}", line, what)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline std::string pajek_label(PlayerId id) {
  if (id == kShotOn) return "SHOT_ON";
  if (id == kShotOff) return "SHOT_OFF";
  return std::to_string(id.value);
}

// Vertices numbered from 1 in node order, arcs sorted by (source, target)
// vertex number.
inline std::string to_pajek(const Passmap& g) {
  std::string out = fmt::format("*Vertices {}\n", g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    out += fmt::format("{} \"{}\"\n", i + 1, pajek_label(g.nodes()[i].id));
  }
  out += "*Arcs\n";
  std::vector<std::tuple<std::size_t, std::size_t, int>> rows;
  rows.reserve(g.arc_count());
  for (const auto& [arc, w] : g.arcs()) {
    rows.emplace_back(*g.index_of(arc.first) + 1, *g.index_of(arc.second) + 1, w);
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [s, d, w] : rows) out += fmt::format("{} {} {}\n", s, d, w);
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline Passmap from_pajek(std::string_view text, TeamId team = {}) {
  Passmap g(team);
  std::vector<std::string_view> lines;
  {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      lines.push_back(text.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  enum class Section { None, Vertices, Arcs } section = Section::None;
  std::size_t declared = 0;
  std::vector<PlayerId> ids;
  bool saw_arcs = false;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::size_t lineno = ln + 1;
    std::string_view line = detail::trim(lines[ln]);
    if (line.empty() || line.front() == '%') continue;

    if (line.front() == '*') {
      if (detail::iequals_prefix(line, "*vertices")) {
        if (section != Section::None) throw PajekError(lineno, "duplicate *Vertices section");
        auto parts = detail::split_ws(line);
        if (parts.size() != 2 || !detail::parse_number(parts[1], declared))
          throw PajekError(lineno, "expected '*Vertices <count>'");
        section = Section::Vertices;
      } else if (detail::iequals_prefix(line, "*arcs")) {
        if (section != Section::Vertices) throw PajekError(lineno, "*Arcs before *Vertices");
        if (ids.size() != declared)
          throw PajekError(lineno, fmt::format("declared {} vertices, found {}", declared, ids.size()));
        section = Section::Arcs;
        saw_arcs = true;
      } else {
        throw PajekError(lineno, fmt::format("unsupported section '{}'", line));
      }
      continue;
    }

    if (section == Section::Vertices) {
      const auto q1 = line.find('"');
      const auto q2 = q1 == std::string_view::npos ? q1 : line.find('"', q1 + 1);
      if (q2 == std::string_view::npos) throw PajekError(lineno, "expected '<n> \"<label>\"'");
      std::size_t number = 0;
      if (!detail::parse_number(detail::trim(line.substr(0, q1)), number) || number != ids.size() + 1)
        throw PajekError(lineno, fmt::format("expected vertex number {}", ids.size() + 1));
      const std::string_view label = line.substr(q1 + 1, q2 - q1 - 1);
      PlayerId id;
      if (label == "SHOT_ON") {
        id = kShotOn;
      } else if (label == "SHOT_OFF") {
        id = kShotOff;
      } else if (std::int64_t v = 0; detail::parse_number(label, v)) {
        id = PlayerId{v};
      } else {
        throw PajekError(lineno, fmt::format("vertex label '{}' is not a player id", label));
      }
      if (g.contains(id)) throw PajekError(lineno, fmt::format("duplicate vertex '{}'", label));
      if (ids.size() >= declared) throw PajekError(lineno, "more vertices than declared");
      ids.push_back(id);
      if (is_synthetic(id)) {
        g.add_node(NodeInfo{id, std::string(label), std::nullopt});
      } else {
        g.add_node(id);
      }
    } else if (section == Section::Arcs) {
      auto parts = detail::split_ws(line);
      std::size_t s = 0, d = 0;
      int w = 0;
      if (parts.size() != 3 || !detail::parse_number(parts[0], s) ||
          !detail::parse_number(parts[1], d) || !detail::parse_number(parts[2], w))
        throw PajekError(lineno, "expected '<src> <dst> <weight>'");
      if (s < 1 || s > ids.size() || d < 1 || d > ids.size())
        throw PajekError(lineno, "arc endpoint out of range");
      if (s == d) throw PajekError(lineno, "self-arc");
      if (w < 1) throw PajekError(lineno, "arc weight must be a positive integer");
      if (g.weight(ids[s - 1], ids[d - 1]) != 0) throw PajekError(lineno, "duplicate arc");
      g.add_arc(ids[s - 1], ids[d - 1], w);
    } else {
      throw PajekError(lineno, "content before *Vertices");
    }
  }
  if (section == Section::None) throw PajekError(lines.size(), "missing *Vertices section");
  if (!saw_arcs) throw PajekError(lines.size(), "missing *Arcs section");
  return g;
}

inline void export_pajek(const Passmap& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << to_pajek(g);
}

inline Passmap import_pajek(const std::string& path, TeamId team = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_pajek(ss.str(), team);
}

}  // namespace passnet
