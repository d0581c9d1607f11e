#include "methane/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "methane/band_select.hpp"
#include "methane/bench.hpp"
#include "methane/cube_io.hpp"
#include "methane/error.hpp"
#include "methane/log.hpp"
#include "methane/metrics.hpp"
#include "methane/parallel.hpp"
#include "methane/postprocess.hpp"
#include "methane/synth.hpp"

namespace methane {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalArgs {
  int threads = 0;
  std::uint64_t seed = 0;
  bool json_output = false;
  bool verbose = false;
};

struct ProductArgs {
  std::string product = "mf";
  std::string mode;  // empty: product default
  double fraction = 0.01;
  std::size_t iters = 30;
  double epsilon = 1e-6;
  std::string bands = "all";
  std::size_t n_bands = 0;
  double low = 2100.0;
  double high = 2500.0;
  bool time_includes_subset = false;
};

struct MorphArgs {
  std::optional<double> threshold;
  std::string config;
  std::size_t kernel = 3;
  std::size_t erode = 1;
  std::size_t dilate = 1;
};

void add_product_options(CLI::App& cmd, ProductArgs& a) {
  cmd.add_option("--product", a.product, "mf, cem, ace, mag1c or mag1c-sas")->required();
  cmd.add_option("--mode", a.mode, "tile or column (default: tile, column for mag1c)")
      ->check(CLI::IsMember({"tile", "column"}));
  cmd.add_option("--fraction", a.fraction, "mag1c-sas sample fraction")->capture_default_str();
  cmd.add_option("--iters", a.iters, "mag1c iterations")->capture_default_str();
  cmd.add_option("--epsilon", a.epsilon, "mag1c sparsity epsilon")->capture_default_str();
  cmd.add_option("--bands", a.bands, "all, top-mag, var-inc or even")
      ->check(CLI::IsMember({"all", "top-mag", "var-inc", "even"}))
      ->capture_default_str();
  cmd.add_option("--n-bands", a.n_bands, "number of bands to select");
  cmd.add_option("--low", a.low, "selection range low (nm)")->capture_default_str();
  cmd.add_option("--high", a.high, "selection range high (nm)")->capture_default_str();
  cmd.add_flag("--time-includes-subset", a.time_includes_subset, "count band subsetting in the timed region");
}

void add_morph_options(CLI::App& cmd, MorphArgs& a) {
  cmd.add_option("--threshold", a.threshold, "enhancement threshold (overrides --config)");
  cmd.add_option("--config", a.config, "INI file with <product>.threshold entries");
  cmd.add_option("--kernel", a.kernel, "odd square kernel side")->capture_default_str();
  cmd.add_option("--erode", a.erode, "erosion iterations")->capture_default_str();
  cmd.add_option("--dilate", a.dilate, "dilation iterations")->capture_default_str();
}

ProductSpec make_spec(const ProductArgs& a) {
  ProductSpec spec = default_spec(parse_product(a.product));
  if (!a.mode.empty()) spec.mode = parse_mode(a.mode);
  spec.mag1c.n_iter = a.iters;
  spec.mag1c.epsilon = a.epsilon;
  spec.mag1c.fraction = a.fraction;
  spec.mag1c.mode = spec.mode;
  spec.mag1c.validate();
  return spec;
}

std::optional<BandSelection> make_selection(const ProductArgs& a, const TargetSpectrum& spectrum) {
  if (a.bands == "all") return std::nullopt;
  if (a.n_bands == 0) throw UsageError("--bands " + a.bands + " requires --n-bands");
  return select_bands(spectrum, parse_strategy(a.bands), a.n_bands, WavelengthRange{a.low, a.high});
}

json selection_json(const std::optional<BandSelection>& sel, const TargetSpectrum& aligned) {
  if (!sel) return nullptr;
  std::vector<double> wl;
  for (std::size_t i : sel->indices) wl.push_back(aligned.wavelengths()[i]);
  return {{"strategy", to_string(sel->strategy)},
          {"n_requested", sel->n_requested},
          {"indices", sel->indices},
          {"wavelengths", wl}};
}

MorphConfig make_morph(const MorphArgs& a, std::string_view product, bool required) {
  MorphConfig cfg;
  cfg.kernel = a.kernel;
  cfg.erode_iters = a.erode;
  cfg.dilate_iters = a.dilate;
  if (a.threshold) {
    cfg.threshold = *a.threshold;
  } else if (!a.config.empty()) {
    cfg.threshold = ThresholdTable::load(a.config).at(product);
  } else if (required) {
    throw UsageError("a threshold is required: pass --threshold or --config");
  }
  cfg.validate();
  return cfg;
}

bool has_threshold(const MorphArgs& a) { return a.threshold.has_value() || !a.config.empty(); }

json morph_json(const MorphConfig& c) {
  return {{"threshold", c.threshold}, {"kernel", c.kernel}, {"erode", c.erode_iters}, {"dilate", c.dilate_iters}};
}

fs::path meta_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".meta.json");
  return p;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

json run_info(const GlobalArgs& g, const std::vector<std::string>& argv) {
  return {{"version", kVersion}, {"threads", num_threads()}, {"seed", g.seed}, {"command_line", argv}};
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Containers are `<stem>.json` files with a `<stem>.bin` payload next to them.
std::vector<std::string> list_containers(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    fs::path bin = entry.path();
    bin.replace_extension(".bin");
    if (fs::exists(bin)) stems.push_back(entry.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

bool is_binary(const EnhancementMap& map) {
  return std::all_of(map.values.begin(), map.values.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

// ---- evaluation ---------------------------------------------------------

struct TileEval {
  std::string name;
  PlumeStratum stratum = PlumeStratum::kEmpty;
  ConfusionCounts counts;
  std::optional<double> auprc;
};

json scores_json(const ConfusionCounts& c) {
  const auto s = scores(c);
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
          {"tp", c.tp},               {"fp", c.fp},         {"fn", c.fn},  {"tn", c.tn}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> mean_auprc(const std::vector<TileEval>& tiles, std::optional<PlumeStratum> only) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : tiles) {
    if (!t.auprc || (only && t.stratum != *only)) continue;
    sum += *t.auprc;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

json eval_report(const std::vector<TileEval>& tiles, const json& config) {
  ConfusionCounts total;
  std::map<PlumeStratum, ConfusionCounts> by_stratum;
  std::map<PlumeStratum, std::size_t> stratum_tiles;
  json per_tile = json::array();
  for (const auto& t : tiles) {
    total += t.counts;
    by_stratum[t.stratum] += t.counts;
    ++stratum_tiles[t.stratum];
    json row = scores_json(t.counts);
    row["name"] = t.name;
    row["stratum"] = to_string(t.stratum);
    row["auprc"] = optional_json(t.auprc);
    per_tile.push_back(row);
  }
  const auto overall = scores(total);
  json strata = json::object();
  for (auto s : {PlumeStratum::kStrong, PlumeStratum::kWeak, PlumeStratum::kEmpty}) {
    json entry = scores_json(by_stratum[s]);
    entry["tiles"] = stratum_tiles[s];
    entry["auprc_mean"] = optional_json(mean_auprc(tiles, s));
    strata[std::string(to_string(s))] = entry;
  }
  json f1_strong = nullptr;
  if (stratum_tiles[PlumeStratum::kStrong] > 0) f1_strong = scores(by_stratum[PlumeStratum::kStrong]).f1;
  return {{"precision", overall.precision},
          {"recall", overall.recall},
          {"f1", overall.f1},
          {"f1_strong", f1_strong},
          {"auprc", optional_json(mean_auprc(tiles, std::nullopt))},
          {"averaging", "micro"},
          {"counts", scores_json(total)},
          {"strata", strata},
          {"tiles", per_tile},
          {"config", config}};
}

TileEval evaluate_tile(std::string name, const EnhancementMap& map, const PlumeMask& gt,
                       const std::optional<MorphConfig>& morph, std::size_t min_strong) {
  if (map.height != gt.height || map.width != gt.width) {
    throw SizeMismatchError(name + ": prediction is " + std::to_string(map.height) + "x" + std::to_string(map.width) +
                            " but ground truth is " + std::to_string(gt.height) + "x" + std::to_string(gt.width));
  }
  TileEval t;
  t.name = std::move(name);
  t.stratum = stratify(gt, min_strong);
  PlumeMask pred;
  if (morph) {
    pred = morphological_baseline(map, *morph);
  } else {
    pred = threshold_map(map, 0.5);
  }
  t.counts = confusion(pred, gt);
  if (gt.count() > 0) t.auprc = auprc(map, gt);
  return t;
}

// ---- subcommands --------------------------------------------------------

struct Prepared {
  HyperCube cube;               // aligned, before band selection
  TargetSpectrum spectrum;      // aligned
  std::optional<BandSelection> selection;
  HyperCube selected_cube;
  TargetSpectrum selected_spectrum;
};

Prepared prepare(const HyperCube& cube, const TargetSpectrum& spectrum, const ProductArgs& a) {
  auto aligned = align(cube, spectrum);
  Prepared p{std::move(aligned.cube), std::move(aligned.spectrum), std::nullopt, {}, {}};
  p.selection = make_selection(a, p.spectrum);
  if (p.selection) {
    std::tie(p.selected_cube, p.selected_spectrum) = subset(p.cube, p.spectrum, *p.selection);
  } else {
    p.selected_cube = p.cube;
    p.selected_spectrum = p.spectrum;
  }
  return p;
}

HyperCube parse_synthetic(const std::string& shape, std::uint64_t seed, TargetSpectrum& spectrum, json& echo) {
  std::size_t h = 0, w = 0, p = 0;
  char x1 = 0, x2 = 0;
  std::istringstream in(shape);
  if (!(in >> h >> x1 >> w >> x2 >> p) || x1 != 'x' || x2 != 'x' || !in.eof() || h == 0 || w == 0 || p < 2) {
    throw UsageError("--synthetic expects HxWxP, e.g. 512x512x72");
  }
  const auto cfg = strong_plume_scene(h, w, p, seed);
  echo = json::parse(to_json(cfg));
  auto scene = generate_scene(cfg);
  spectrum = scene.spectrum;
  return std::move(scene.cube);
}

int cmd_compute(const GlobalArgs& g, const ProductArgs& a, const MorphArgs& m, const std::string& cube_path,
                const std::string& spectrum_path, const std::string& out_path, const std::string& mask_out,
                const std::string& pgm_out, const std::vector<std::string>& argv, std::ostream& out) {
  const ProductSpec spec = make_spec(a);
  const auto cube = read_cube(cube_path);
  const auto spectrum = load_spectrum(spectrum_path);

  const auto start = std::chrono::steady_clock::now();
  auto prepared = prepare(cube, spectrum, a);
  const double subset_seconds = seconds_since(start);
  const auto product_start = std::chrono::steady_clock::now();
  auto map = run_product(spec, prepared.selected_cube, prepared.selected_spectrum);
  const double product_seconds = seconds_since(product_start);
  const double wall = a.time_includes_subset ? subset_seconds + product_seconds : product_seconds;

  write_map(map, out_path);
  json meta = {{"command", "compute"},
               {"product", json::parse(to_json(spec))},
               {"inputs", {{"cube", cube_path}, {"spectrum", spectrum_path}}},
               {"shape", {cube.height(), cube.width(), cube.bands()}},
               {"aligned_bands", prepared.cube.bands()},
               {"aligned_wavelengths", prepared.cube.wavelengths()},
               {"band_selection", selection_json(prepared.selection, prepared.spectrum)},
               {"bands_used", prepared.selected_cube.bands()},
               {"wall_seconds", wall},
               {"time_includes_subset", a.time_includes_subset},
               {"run", run_info(g, argv)}};
  if (!mask_out.empty()) {
    const auto morph = make_morph(m, a.product, true);
    write_mask(morphological_baseline(map, morph), mask_out);
    meta["mask"] = {{"path", mask_out}, {"morphology", morph_json(morph)}};
  }
  if (!pgm_out.empty()) write_pgm(map, pgm_out);
  write_json(meta, meta_path(out_path));
  if (g.json_output) {
    out << meta.dump(2) << '\n';
  } else {
    out << label(spec) << ": wrote " << out_path << " (" << map.height << "x" << map.width << ", " << wall
        << " s)\n";
  }
  return kExitOk;
}

int cmd_bench(const GlobalArgs& g, const ProductArgs& a, const std::string& cube_path,
              const std::string& spectrum_path, const std::string& synthetic, const BenchOptions& options,
              const std::vector<std::string>& argv, std::ostream& out) {
  const ProductSpec spec = make_spec(a);
  HyperCube cube;
  TargetSpectrum spectrum;
  json input;
  if (!synthetic.empty()) {
    json echo;
    cube = parse_synthetic(synthetic, g.seed, spectrum, echo);
    input = {{"synthetic", synthetic}, {"scene", echo}};
  } else {
    if (cube_path.empty() || spectrum_path.empty()) {
      throw UsageError("bench needs --cube and --spectrum, or --synthetic HxWxP");
    }
    cube = read_cube(cube_path);
    spectrum = load_spectrum(spectrum_path);
    input = {{"cube", cube_path}, {"spectrum", spectrum_path}};
  }
  auto prepared = prepare(cube, spectrum, a);

  BenchReport report;
  report.product = label(spec);
  report.height = cube.height();
  report.width = cube.width();
  report.bands = prepared.selected_cube.bands();
  if (a.time_includes_subset) {
    report.run_seconds = time_runs(
        [&] {
          auto p = prepare(cube, spectrum, a);
          (void)run_product(spec, p.selected_cube, p.selected_spectrum);
        },
        options);
  } else {
    report.run_seconds =
        time_runs([&] { (void)run_product(spec, prepared.selected_cube, prepared.selected_spectrum); }, options);
  }
  report.median_seconds = median(report.run_seconds);
  report.working_set_bytes = working_set_estimate(spec, cube.height(), cube.width(), report.bands);
  report.max_rss_bytes = process_max_rss_bytes();
  json config = {{"product", json::parse(to_json(spec))},
                 {"input", input},
                 {"band_selection", selection_json(prepared.selection, prepared.spectrum)},
                 {"runs", options.runs},
                 {"warmup", options.warmup},
                 {"time_includes_subset", a.time_includes_subset},
                 {"run", run_info(g, argv)}};
  report.config_json = config.dump();
  out << to_json(report) << '\n';
  return kExitOk;
}

int cmd_eval(const GlobalArgs& g, const std::string& pred_dir, const std::string& gt_dir, const MorphArgs& m,
             const std::string& product, std::size_t min_strong, const std::vector<std::string>& argv,
             std::ostream& out) {
  const auto gt_stems = list_containers(gt_dir);
  const auto pred_stems = list_containers(pred_dir);
  if (gt_stems.empty()) throw UsageError("no containers in " + gt_dir);
  if (pred_stems.empty()) throw UsageError("no containers in " + pred_dir);
  std::vector<std::string> unpaired;
  std::set_symmetric_difference(gt_stems.begin(), gt_stems.end(), pred_stems.begin(), pred_stems.end(),
                                std::back_inserter(unpaired));
  if (!unpaired.empty()) {
    std::string list;
    for (const auto& s : unpaired) list += (list.empty() ? "" : ", ") + s;
    throw ValidationError("unpaired files between " + pred_dir + " and " + gt_dir + ": " + list);
  }
  std::optional<MorphConfig> morph;
  if (has_threshold(m)) {
    if (!m.threshold && product.empty()) throw UsageError("--config needs --product to pick the threshold");
    morph = make_morph(m, product, true);
  }
  std::vector<TileEval> tiles;
  for (const auto& stem : gt_stems) {
    const auto gt = read_mask(fs::path(gt_dir) / (stem + ".json"));
    const auto map = read_map(fs::path(pred_dir) / (stem + ".json"));
    if (!morph && !is_binary(map)) {
      throw UsageError(stem + ": prediction is not a binary mask; pass --threshold or --config");
    }
    tiles.push_back(evaluate_tile(stem, map, gt, morph, min_strong));
  }
  json config = {{"pred_dir", pred_dir},
                 {"gt_dir", gt_dir},
                 {"product", product},
                 {"min_strong_pixels", min_strong},
                 {"morphology", morph ? morph_json(*morph) : json(nullptr)},
                 {"version", kVersion},
                 {"command_line", argv}};
  (void)g;
  out << eval_report(tiles, config).dump(2) << '\n';
  return kExitOk;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      values.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (values.empty()) throw UsageError(std::string("empty ") + what + " list");
  return values;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    (void)parse_strategy(item);
    names.push_back(item);
  }
  if (names.empty()) throw UsageError("empty strategy list");
  return names;
}

struct SweepTile {
  std::string name;
  HyperCube cube;
  PlumeMask gt;
};

int cmd_sweep(const GlobalArgs& g, const ProductArgs& a, const std::string& strategies_text,
              const std::string& channels_text, const std::string& tiles_dir, std::size_t scenes, std::size_t height,
              std::size_t width, std::size_t full_bands, std::size_t min_strong, const BenchOptions& options,
              const std::string& out_path, const std::vector<std::string>& argv, std::ostream& out) {
  const ProductSpec spec = make_spec(a);
  const auto strategies = parse_name_list(strategies_text);
  const auto channels = parse_size_list(channels_text, "channel");

  std::vector<SweepTile> tiles;
  TargetSpectrum spectrum;
  json input;
  if (!tiles_dir.empty()) {
    const fs::path dir(tiles_dir);
    spectrum = load_spectrum(dir / "spectrum.csv");
    const auto stems = list_containers(dir);
    if (stems.empty()) throw UsageError("no cubes in " + tiles_dir);
    for (const auto& stem : stems) {
      const fs::path gt_path = dir / "gt" / (stem + ".json");
      if (!fs::exists(gt_path)) throw ValidationError("unpaired cube " + stem + ": missing " + gt_path.string());
      tiles.push_back({stem, read_cube(dir / (stem + ".json")), read_mask(gt_path)});
    }
    input = {{"tiles_dir", tiles_dir}, {"tiles", stems}};
  } else {
    if (scenes == 0) throw UsageError("--scenes must be positive");
    json echo = json::array();
    for (std::size_t j = 0; j < scenes; ++j) {
      const auto cfg = strong_plume_scene(height, width, methane_range_grid(full_bands), g.seed + j);
      echo.push_back(json::parse(to_json(cfg)));
      auto scene = generate_scene(cfg);
      spectrum = scene.spectrum;
      tiles.push_back({"scene_" + std::to_string(j), std::move(scene.cube), std::move(scene.mask)});
    }
    input = {{"synthetic", {{"scenes", scenes}, {"height", height}, {"width", width}, {"bands", full_bands}}},
             {"scene_configs", echo}};
  }

  struct Row {
    std::string strategy;
    std::size_t n = 0;
    Prepared timed;  // inputs for the timed tile
    ProductArgs args;
    std::optional<double> auprc;
    std::size_t strong = 0;
    std::vector<double> seconds;
  };
  std::vector<Row> table;
  for (const auto& name : strategies) {
    for (std::size_t n : channels) {
      Row row{name, n, {}, a, std::nullopt, 0, {}};
      row.args.bands = name;
      row.args.n_bands = n;
      double auprc_sum = 0.0;
      for (std::size_t k = 0; k < tiles.size(); ++k) {
        auto prepared = prepare(tiles[k].cube, spectrum, row.args);
        if (stratify(tiles[k].gt, min_strong) == PlumeStratum::kStrong) {
          auprc_sum += auprc(run_product(spec, prepared.selected_cube, prepared.selected_spectrum), tiles[k].gt);
          ++row.strong;
        }
        if (k == 0) {
          prepared.cube = HyperCube();  // only the selected bands are timed
          row.timed = std::move(prepared);
        }
      }
      if (row.strong > 0) row.auprc = auprc_sum / static_cast<double>(row.strong);
      table.push_back(std::move(row));
    }
  }

  // Timed runs go round-robin over the rows so that drift in machine speed
  // hits every row alike instead of whichever rows happen to run during it.
  const auto run_row = [&](const Row& row) {
    if (a.time_includes_subset) {
      auto p = prepare(tiles.front().cube, spectrum, row.args);
      (void)run_product(spec, p.selected_cube, p.selected_spectrum);
    } else {
      (void)run_product(spec, row.timed.selected_cube, row.timed.selected_spectrum);
    }
  };
  if (options.runs < 1) throw ValidationError("sweep needs at least one timed run");
  for (std::size_t w = 0; w < options.warmup; ++w) {
    for (const auto& row : table) run_row(row);
  }
  for (std::size_t r = 0; r < options.runs; ++r) {
    for (auto& row : table) {
      row.seconds.push_back(time_runs([&] { run_row(row); }, {1, 0}).front());
    }
  }

  std::ostringstream csv;
  csv << "strategy,n_bands,auprc_strong,median_seconds\n";
  json rows = json::array();
  for (const auto& row : table) {
    const double med = median(row.seconds);
    csv << row.strategy << ',' << row.n << ',';
    if (row.auprc) {
      csv << fmt_double(*row.auprc);
    } else {
      csv << "nan";
    }
    csv << ',' << fmt_double(med) << '\n';
    rows.push_back({{"strategy", row.strategy},
                    {"n_bands", row.n},
                    {"n_selected", row.timed.selected_cube.bands()},
                    {"band_selection", selection_json(row.timed.selection, row.timed.spectrum)},
                    {"auprc_strong", optional_json(row.auprc)},
                    {"strong_tiles", row.strong},
                    {"run_seconds", row.seconds},
                    {"median_seconds", med}});
  }
  json meta = {{"command", "sweep"},
               {"product", json::parse(to_json(spec))},
               {"input", input},
               {"runs", options.runs},
               {"warmup", options.warmup},
               {"timing", {{"tile", tiles.front().name}, {"order", "round-robin over rows"}}},
               {"min_strong_pixels", min_strong},
               {"time_includes_subset", a.time_includes_subset},
               {"rows", rows},
               {"run", run_info(g, argv)}};
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write " + out_path);
    f << csv.str();
    write_json(meta, meta_path(out_path));
  }
  if (g.json_output) {
    out << meta.dump(2) << '\n';
  } else {
    out << csv.str();
  }
  return kExitOk;
}

int cmd_synth(const GlobalArgs& g, const std::string& out_dir, std::size_t scenes, std::size_t height,
              std::size_t width, std::size_t bands, double peak_factor, const std::string& injection,
              const std::vector<std::string>& argv, std::ostream& out) {
  if (scenes == 0) throw UsageError("--scenes must be positive");
  const fs::path dir(out_dir);
  fs::create_directories(dir / "gt");
  json written = json::array();
  for (std::size_t j = 0; j < scenes; ++j) {
    auto cfg = strong_plume_scene(height, width, methane_range_grid(bands), g.seed + j);
    if (peak_factor != 5.0) {
      for (auto& plume : cfg.plumes) plume.peak_alpha = strong_plume_peak(cfg, peak_factor);
    }
    cfg.injection = injection == "multiplicative" ? Injection::kMultiplicative : Injection::kAdditive;
    const auto scene = generate_scene(cfg);
    char stem[32];
    std::snprintf(stem, sizeof stem, "scene_%03zu", j);
    write_cube(scene.cube, dir / (std::string(stem) + ".json"));
    write_mask(scene.mask, dir / "gt" / (std::string(stem) + ".json"));
    json echo = json::parse(to_json(cfg));
    echo["run"] = run_info(g, argv);
    write_json(echo, dir / (std::string(stem) + ".config.json"));
    if (j == 0) write_spectrum(scene.spectrum, dir / "spectrum.csv");
    written.push_back({{"name", stem}, {"seed", cfg.seed}, {"gt_pixels", scene.mask.count()}});
  }
  if (g.json_output) {
    out << json{{"out_dir", out_dir}, {"scenes", written}}.dump(2) << '\n';
  } else {
    out << "wrote " << scenes << " scene(s) to " << out_dir << '\n';
  }
  return kExitOk;
}

int cmd_bands(const GlobalArgs& g, const std::string& spectrum_path, const std::string& strategy, std::size_t n,
              double low, double high, std::ostream& out) {
  const auto spectrum = load_spectrum(spectrum_path);
  const auto sel = select_bands(spectrum, parse_strategy(strategy), n, WavelengthRange{low, high});
  const json j = selection_json(sel, spectrum);
  if (g.json_output) {
    out << j.dump(2) << '\n';
  } else {
    for (std::size_t i : sel.indices) out << i << ' ' << spectrum.wavelengths()[i] << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Methane plume enhancement products, evaluation and benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalArgs g;
  app.add_option("--threads", g.threads, "worker threads (0: all cores)")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed for synthetic scenes")->capture_default_str();
  app.add_flag("--json", g.json_output, "machine-readable output");
  app.add_flag("-v,--verbose", g.verbose, "log progress to stderr");
  app.set_version_flag("--version", std::string(kVersion));

  ProductArgs pa;
  MorphArgs ma;
  std::string cube_path, spectrum_path, out_path, mask_out, pgm_out;
  auto* compute = app.add_subcommand("compute", "compute one enhancement product");
  add_product_options(*compute, pa);
  add_morph_options(*compute, ma);
  compute->add_option("--cube", cube_path, "cube container (.bin or .json)")->required();
  compute->add_option("--spectrum", spectrum_path, "target spectrum CSV")->required();
  compute->add_option("--out", out_path, "output map container")->required();
  compute->add_option("--mask-out", mask_out, "also write the morphological baseline mask");
  compute->add_option("--pgm", pgm_out, "also write a PGM preview");

  BenchOptions bo;
  std::string synthetic;
  auto* bench = app.add_subcommand("bench", "time one product (median of runs)");
  add_product_options(*bench, pa);
  bench->add_option("--cube", cube_path, "cube container");
  bench->add_option("--spectrum", spectrum_path, "target spectrum CSV");
  bench->add_option("--synthetic", synthetic, "generate an HxWxP strong-plume tile instead of reading one");
  bench->add_option("--runs", bo.runs, "timed runs")->capture_default_str();
  bench->add_option("--warmup", bo.warmup, "untimed warm-up runs")->capture_default_str();

  std::string pred_dir, gt_dir, eval_product;
  std::size_t min_strong = kDefaultMinStrongPixels;
  MorphArgs em;
  auto* eval = app.add_subcommand("eval", "score predictions against ground-truth masks");
  eval->add_option("--pred-dir", pred_dir, "directory of map or mask containers")->required();
  eval->add_option("--gt-dir", gt_dir, "directory of ground-truth mask containers")->required();
  eval->add_option("--product", eval_product, "product whose threshold to read from --config")
      ->check(CLI::IsMember(product_names()));
  eval->add_option("--min-strong", min_strong, "pixels needed for a strong plume")->capture_default_str();
  add_morph_options(*eval, em);

  std::string strategies = "top-mag,var-inc,even", channels = "10,30,50,72,90", tiles_dir, sweep_out;
  std::size_t scenes = 10, height = 256, width = 256, full_bands = 122;
  auto* sweep = app.add_subcommand("sweep", "AUPRC and runtime across band strategies and counts");
  add_product_options(*sweep, pa);
  sweep->add_option("--strategies", strategies, "comma-separated strategies")->capture_default_str();
  sweep->add_option("--channels", channels, "comma-separated band counts")->capture_default_str();
  sweep->add_option("--tiles-dir", tiles_dir, "directory written by `synth` (default: generate scenes)");
  sweep->add_option("--scenes", scenes, "synthetic scenes")->capture_default_str();
  sweep->add_option("--height", height, "synthetic scene height")->capture_default_str();
  sweep->add_option("--width", width, "synthetic scene width")->capture_default_str();
  sweep->add_option("--full-bands", full_bands, "bands before selection")->capture_default_str();
  sweep->add_option("--min-strong", min_strong, "pixels needed for a strong plume")->capture_default_str();
  sweep->add_option("--runs", bo.runs, "timed runs per row")->capture_default_str();
  sweep->add_option("--warmup", bo.warmup, "untimed warm-up runs per row")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV output path (default: stdout)");

  std::string synth_dir, injection = "additive";
  std::size_t synth_scenes = 1, synth_h = 256, synth_w = 256, synth_p = 50;
  double peak_factor = 5.0;
  auto* synth = app.add_subcommand("synth", "write synthetic scenes with ground truth");
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--scenes", synth_scenes, "number of scenes")->capture_default_str();
  synth->add_option("--height", synth_h, "scene height")->capture_default_str();
  synth->add_option("--width", synth_w, "scene width")->capture_default_str();
  synth->add_option("--bands", synth_p, "bands over 1573-2480 nm")->capture_default_str();
  synth->add_option("--peak-factor", peak_factor, "plume peak in background sigmas")->capture_default_str();
  synth->add_option("--injection", injection, "additive or multiplicative")
      ->check(CLI::IsMember({"additive", "multiplicative"}))
      ->capture_default_str();

  std::string band_strategy;
  std::size_t band_n = 0;
  double band_low = 2100.0, band_high = 2500.0;
  auto* bands = app.add_subcommand("bands", "print a band selection");
  bands->add_option("--spectrum", spectrum_path, "target spectrum CSV")->required();
  bands->add_option("--strategy", band_strategy, "top-mag, var-inc or even")
      ->check(CLI::IsMember({"top-mag", "var-inc", "even"}))
      ->required();
  bands->add_option("--n", band_n, "bands to select")->required();
  bands->add_option("--low", band_low, "range low (nm)")->capture_default_str();
  bands->add_option("--high", band_high, "range high (nm)")->capture_default_str();

  for (auto* cmd : {compute, bench, sweep}) {
    cmd->get_option("--product")->check(CLI::IsMember(product_names()));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto previous_level = log::level();
  if (g.verbose) log::set_level(log::Level::kInfo);
  struct Restore {
    log::Level level;
    ~Restore() {
      log::set_level(level);
      set_num_threads(0);
    }
  } restore{previous_level};
  if (g.threads < 0) {
    err << "error: --threads must be non-negative\n";
    return kExitUsage;
  }
  set_num_threads(g.threads);

  try {
    if (compute->parsed()) {
      return cmd_compute(g, pa, ma, cube_path, spectrum_path, out_path, mask_out, pgm_out, args, out);
    }
    if (bench->parsed()) return cmd_bench(g, pa, cube_path, spectrum_path, synthetic, bo, args, out);
    if (eval->parsed()) return cmd_eval(g, pred_dir, gt_dir, em, eval_product, min_strong, args, out);
    if (sweep->parsed()) {
      return cmd_sweep(g, pa, strategies, channels, tiles_dir, scenes, height, width, full_bands, min_strong, bo,
                       sweep_out, args, out);
    }
    if (synth->parsed()) {
      return cmd_synth(g, synth_dir, synth_scenes, synth_h, synth_w, synth_p, peak_factor, injection, args, out);
    }
    if (bands->parsed()) return cmd_bands(g, spectrum_path, band_strategy, band_n, band_low, band_high, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace methane
