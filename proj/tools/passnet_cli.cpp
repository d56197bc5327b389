// passnet: build pass networks from event files and run the corpus analyses.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "passnet/pipeline.hpp"
#include "passnet/plots.hpp"

namespace {

using namespace passnet;

struct Options {
  std::string manifest;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ensemble_size;
  std::optional<double> resolution;
  std::optional<std::size_t> fragments_limit;
  std::optional<std::size_t> formations_limit;
  std::optional<std::string> data_root;
  unsigned workers{0};
  std::vector<std::string> skip;
};

CorpusManifest manifest_from(const Options& o) {
  CorpusManifest m = load_manifest(o.manifest, o.data_root ? std::optional<fs::path>(*o.data_root) : std::nullopt);
  if (o.out) m.output_root = *o.out;
  if (o.seed) m.seed = *o.seed;
  if (o.ensemble_size) m.ensemble_size = *o.ensemble_size;
  if (o.resolution) m.resolution = *o.resolution;
  if (o.fragments_limit) m.fragments_limit = *o.fragments_limit;
  if (o.formations_limit) m.formations_limit = *o.formations_limit;
  m.workers = o.workers;
  for (const auto& s : o.skip) {
    if (s == "centrality") m.toggles.centrality = false;
    else if (s == "intensity") m.toggles.intensity = false;
    else if (s == "community") m.toggles.community = false;
    else if (s == "fragments") m.toggles.fragments = false;
    else throw CLI::ValidationError("--skip", "unknown analysis '" + s + "'");
  }
  return m;
}

void header(RunLog& log, const CorpusManifest& m, std::string_view cmd) {
  log.add(fmt::format("command: {}", cmd));
  log.add(fmt::format("matches: {}", m.matches.size()));
  log.add(fmt::format("seed: {}", m.seed));
  log.add(fmt::format("ensemble_size: {}", m.ensemble_size));
  log.add(fmt::format("resolution: {}", m.resolution));
  log.add(fmt::format("fragments_limit: {}", m.fragments_limit));
  log.add(fmt::format("formations_limit: {}", m.formations_limit));
}

void write_log(const RunLog& log, const fs::path& root, std::string_view name) {
  passnet::detail::write_file(root / name, log.text());
}

int cmd_ingest(const Options& o) {
  const CorpusManifest m = manifest_from(o);
  int failures = 0;
  for (const auto& e : m.matches) {
    try {
      const auto s = load_match(e.events.string(), e.match_id);
      const auto key = detect_key_events(s);
      std::string evs;
      for (const auto& k : key)
        if (k.occurred && k.at) evs += fmt::format(" {}@{}:{}", to_string(k.kind), k.at->period, k.at->clock);
      std::cout << fmt::format("{}\tevents={}\thome={}\taway={}\tpasses={}/{}{}\n", e.match_id, s.events.size(),
                               s.home_team.value, s.away_team.value,
                               successful_passes(s, s.home_team, kWholeMatch).passes.size(),
                               successful_passes(s, s.away_team, kWholeMatch).passes.size(), evs);
    } catch (const std::exception& ex) {
      ++failures;
      std::cout << fmt::format("{}\tERROR\t{}\n", e.match_id, ex.what());
    }
  }
  return failures == 0 ? 0 : 2;
}

int cmd_networks(const Options& o) {
  const CorpusManifest m = manifest_from(o);
  RunLog log;
  header(log, m, "networks");
  const auto s = run_networks(m, &log);
  log.add(fmt::format("player_networks: {}", s.player_networks));
  log.add(fmt::format("flow_networks: {}", s.flow_networks));
  write_log(log, m.output_root, "networks.log");
  std::cout << fmt::format("{} matches, {} player networks, {} flow networks, {} skipped -> {}\n", s.matches_written,
                           s.player_networks, s.flow_networks, s.skipped.size(), (m.output_root / "networks").string());
  for (const auto& [id, why] : s.skipped) std::cerr << fmt::format("skipped {}: {}\n", id, why);
  return 0;
}

int cmd_analyze(const Options& o) {
  const CorpusManifest m = manifest_from(o);
  RunLog log;
  header(log, m, "analyze");
  const AnalysisResults r = run_analysis(m, &log);
  write_results(r, m.output_root);
  const AggregateReport rep = aggregate(r);
  passnet::detail::write_file(m.output_root / "results" / "report.csv", report_csv(rep));
  log.add(fmt::format("skipped: {}", r.skipped.size()));
  write_log(log, m.output_root, "analyze.log");
  std::cout << fmt::format("{} matches analysed, {} skipped -> {}\n", m.matches.size() - r.skipped.size(),
                           r.skipped.size(), (m.output_root / "results").string());
  for (const auto& [id, why] : r.skipped) std::cerr << fmt::format("skipped {}: {}\n", id, why);
  return 0;
}

int cmd_aggregate(const fs::path& root) {
  const AnalysisResults r = load_results(root);
  const std::string csv = report_csv(aggregate(r));
  passnet::detail::write_file(root / "results" / "report.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_plot(const fs::path& root) {
  const auto s = emit_plots(load_results(root), root);
  std::cout << fmt::format("{} plots -> {}\n", s.files.size(), (root / "plots").string());
  return 0;
}

int cmd_atlas() {
  const auto& a = atlas();
  for (std::size_t g = 0; g < a.graphlets.size(); ++g) {
    const auto& gr = a.graphlets[g];
    std::cout << fmt::format("{:2}  k={}  arcs={}  {:<22} orbits {}-{}\n", g, gr.nodes, gr.arcs, gr.name,
                             gr.first_orbit, gr.first_orbit + gr.orbit_count - 1);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pass-network construction and analysis for football event data"};
  app.require_subcommand(1);
  Options o;
  std::string root = "passnet-out";

  auto corpus_flags = [&](CLI::App* sub) {
    sub->add_option("--matches", o.manifest, "Manifest file (CSV or JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--data-root", o.data_root, std::string("Base for relative manifest paths (default $") +
                                                    kDataRootEnv + ", else the manifest directory)");
    sub->add_option("--out", o.out, "Output root (overrides the manifest)");
    sub->add_option("--workers", o.workers, "Worker threads, 0 for all cores");
  };

  auto* ingest = app.add_subcommand("ingest", "Parse every match and print a summary");
  corpus_flags(ingest);

  auto* networks = app.add_subcommand("networks", "Write before/after Pajek networks for all key events");
  corpus_flags(networks);

  auto* analyze = app.add_subcommand("analyze", "Run the analyses and write result tables");
  corpus_flags(analyze);
  analyze->add_option("--seed", o.seed, "Master seed");
  analyze->add_option("--ensemble-size", o.ensemble_size, "Null-model samples per network")
      ->check(CLI::Range(2, 100000));
  analyze->add_option("--resolution", o.resolution, "Modularity resolution")->check(CLI::PositiveNumber);
  analyze->add_option("--fragments-limit", o.fragments_limit, "Matches in the fragments subsample");
  analyze->add_option("--formations-limit", o.formations_limit, "Matches in the formation subsample");
  analyze->add_option("--skip", o.skip, "Analyses to skip: centrality, intensity, community, fragments")
      ->delimiter(',');

  auto* aggregate_cmd = app.add_subcommand("aggregate", "Summarize result tables into results/report.csv");
  aggregate_cmd->add_option("--out", root, "Output root holding results/")->check(CLI::ExistingDirectory);

  auto* plot = app.add_subcommand("plot", "Render SVG profile plots and histograms");
  plot->add_option("--out", root, "Output root holding results/")->check(CLI::ExistingDirectory);

  auto* atlas_cmd = app.add_subcommand("atlas", "Print the graphlet and orbit numbering");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(o);
    if (*networks) return cmd_networks(o);
    if (*analyze) return cmd_analyze(o);
    if (*aggregate_cmd) return cmd_aggregate(root);
    if (*plot) return cmd_plot(root);
    if (*atlas_cmd) return cmd_atlas();
  } catch (const ManifestError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
