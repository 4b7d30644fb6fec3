// Copyright 2026 The Facetmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// facetmap: ingest Overpass data, analyze facets offline, serve maps.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "facetmap/facetmap.hpp"
#include "facetmap/http_api.hpp"

namespace fs = std::filesystem;
using namespace facetmap;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BoundingBox parse_bbox_arg(const std::string& arg) {
  std::vector<double> v;
  std::stringstream ss(arg);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InvalidArgument("--bbox: '" + part + "' is not a number");
    }
  }
  if (v.size() != 4) throw InvalidArgument("--bbox expects south,west,north,east");
  BoundingBox b{v[0], v[1], v[2], v[3]};
  validate(b);
  return b;
}

ReportFormat parse_format(const std::string& s) {
  return s == "csv" ? ReportFormat::csv : ReportFormat::markdown;
}

std::vector<GeoItem> category_items(const DatasetSnapshot& snap, const std::string& category) {
  std::vector<GeoItem> items;
  for (const auto& item : snap.items)
    if (item.category_id == category) items.push_back(item);
  if (items.empty())
    throw NotFoundError("category '" + category + "' has no items in snapshot " + snap.id);
  return items;
}

struct IngestArgs {
  std::string input, config, bbox, out, snapshot_id, created;
};

int run_ingest(const IngestArgs& a) {
  const auto bbox = parse_bbox_arg(a.bbox);
  const auto config = parse_category_config(slurp(a.config));
  OverpassDocument doc;
  try {
    doc = parse_overpass(slurp(a.input));
  } catch (const ParseError& e) {
    throw ParseError(a.input + ": byte " + std::to_string(e.offset()) + ": " + e.what(),
                     e.offset());
  }
  SnapshotOptions opts;
  opts.snapshot_id = a.snapshot_id.empty() ? fs::path(a.out).stem().string() : a.snapshot_id;
  opts.created = a.created;
  IngestSummary summary;
  const auto snap = build_snapshot(doc.elements, config, bbox, opts, &summary);

  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + a.out);
  out << write_snapshot(snap);
  if (!out.flush()) throw Error("short write to " + a.out);

  std::cout << summary.kept() << " items";
  if (!summary.kept_per_category.empty()) {
    std::cout << " (";
    bool first = true;
    for (const auto& [cat, n] : summary.kept_per_category) {
      std::cout << (first ? "" : ", ") << cat << ": " << n;
      first = false;
    }
    std::cout << ")";
  }
  std::cout << "\n";
  std::cout << "dropped: " << doc.dropped << " without coordinates, " << summary.uncategorized
            << " uncategorized, " << summary.outside_bbox << " outside bbox, "
            << summary.invalid_geometry << " invalid geometry, " << summary.duplicate_ids
            << " duplicate ids\n";
  return 0;
}

struct AnalyzeArgs {
  std::string snapshot, category, format = "md";
  std::size_t max_facets = 12;
  double min_coverage = 0.03;
  double mu = 2.0;
  double sigma = 4.9;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto snap = read_snapshot(slurp(a.snapshot));
  const auto items = category_items(snap, a.category);
  RankingConfig cfg;
  cfg.max_facets = a.max_facets;
  cfg.min_coverage = a.min_coverage;
  const auto ranked = rank_facets(items, cfg, {a.mu, a.sigma, true});
  std::cout << format_stats_report(ranked, parse_format(a.format));
  return 0;
}

// Every facet of the category, ordered by exploration cost (unusable last).
int run_compare(const AnalyzeArgs& a) {
  const auto snap = read_snapshot(slurp(a.snapshot));
  const auto items = category_items(snap, a.category);
  const NavigationQualityParams params{a.mu, a.sigma, true};
  std::vector<FacetStats> stats;
  for (const auto& h : build_histograms(items)) stats.push_back(compute_stats(h, params));
  std::stable_sort(stats.begin(), stats.end(), [](const FacetStats& x, const FacetStats& y) {
    const double cx = x.exploration_cost.value_or(HUGE_VAL);
    const double cy = y.exploration_cost.value_or(HUGE_VAL);
    if (cx != cy) return cx < cy;
    return x.facet_key < y.facet_key;
  });
  if (stats.size() > a.max_facets) stats.resize(a.max_facets);
  std::cout << format_metric_comparison(stats, parse_format(a.format));
  return 0;
}

struct ServeArgs {
  std::string data_dir, config, host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> snapshots;
};

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

int run_serve(const ServeArgs& a) {
  if (a.data_dir.empty()) throw InvalidArgument("--data-dir (or FACET_DATA_DIR) is required");
  fs::create_directories(a.data_dir);
  const auto config_path =
      a.config.empty() ? (fs::path(a.data_dir) / "categories.json").string() : a.config;
  MapService service(parse_category_config(slurp(config_path)),
                     MapService::Options{a.data_dir, {}, {}});
  for (const auto& path : a.snapshots) service.register_snapshot(read_snapshot(slurp(path)));

  HttpApi api(service);
  if (!api.bind(a.host, a.port)) {
    std::cerr << "error: cannot bind " << a.host << ":" << a.port << "\n";
    return 1;
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&api] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    api.stop();
  });
  std::cout << "listening on " << a.host << ":" << a.port << std::endl;
  api.listen_after_bind();
  g_interrupted = true;
  watcher.join();
  service.flush();
  std::cout << "map documents flushed to " << a.data_dir << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Faceted projection of geographic data"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "Build a dataset snapshot from Overpass JSON");
  cmd_ingest->add_option("--input", ingest.input, "Overpass JSON file")->required();
  cmd_ingest->add_option("--config", ingest.config, "Category mapping JSON")->required();
  cmd_ingest->add_option("--bbox", ingest.bbox, "south,west,north,east")->required();
  cmd_ingest->add_option("--out", ingest.out, "Snapshot file to write")->required();
  cmd_ingest->add_option("--snapshot-id", ingest.snapshot_id, "Defaults to the --out stem");
  cmd_ingest->add_option("--created", ingest.created, "ISO-8601 creation time (default: now)");

  AnalyzeArgs analyze;
  auto* cmd_analyze = app.add_subcommand("analyze", "Rank the facets of a category");
  cmd_analyze->add_option("--snapshot", analyze.snapshot)->required();
  cmd_analyze->add_option("--category", analyze.category)->required();
  cmd_analyze->add_option("--max-facets", analyze.max_facets)->check(CLI::PositiveNumber);
  cmd_analyze->add_option("--min-coverage", analyze.min_coverage)->check(CLI::Range(0.0, 1.0));
  cmd_analyze->add_option("--format", analyze.format)->check(CLI::IsMember({"md", "csv"}));

  AnalyzeArgs compare;
  compare.max_facets = std::numeric_limits<std::size_t>::max();
  auto* cmd_compare =
      app.add_subcommand("compare-metrics", "Exploration cost vs. navigation quality");
  cmd_compare->add_option("--snapshot", compare.snapshot)->required();
  cmd_compare->add_option("--category", compare.category)->required();
  cmd_compare->add_option("--mu", compare.mu);
  cmd_compare->add_option("--sigma", compare.sigma)->check(CLI::PositiveNumber);
  cmd_compare->add_option("--max-facets", compare.max_facets)->check(CLI::PositiveNumber);
  cmd_compare->add_option("--format", compare.format)->check(CLI::IsMember({"md", "csv"}));

  ServeArgs serve;
  auto* cmd_serve = app.add_subcommand("serve", "Run the map service");
  cmd_serve->add_option("--data-dir", serve.data_dir)->envname("FACET_DATA_DIR");
  cmd_serve->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
  cmd_serve->add_option("--host", serve.host);
  cmd_serve->add_option("--config", serve.config, "Defaults to <data-dir>/categories.json");
  cmd_serve->add_option("--snapshot", serve.snapshots, "Snapshot files to register at start");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_ingest) return run_ingest(ingest);
    if (*cmd_analyze) return run_analyze(analyze);
    if (*cmd_compare) return run_compare(compare);
    if (*cmd_serve) return run_serve(serve);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
