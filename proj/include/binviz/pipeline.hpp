// binviz - binary-to-image conversion and noise augmentation pipeline
// End-to-end steps behind the command line: convert, augment, split,
// score, sweep and stats

#pragma once

#include <binviz/augmentation.hpp>
#include <binviz/corpus.hpp>
#include <binviz/error.hpp>
#include <binviz/imaging.hpp>
#include <binviz/manifest.hpp>
#include <binviz/metrics.hpp>
#include <binviz/parallel.hpp>
#include <binviz/png_io.hpp>
#include <binviz/split.hpp>

#include <sys/wait.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace binviz {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::string_view kManifestFileName = "manifest.jsonl";

/// Default seed, overridable through the BINVIZ_SEED environment variable.
inline std::uint64_t default_seed() {
  const char* env = std::getenv("BINVIZ_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t v = 0;
  std::string_view s(env);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw ValidationError("BINVIZ_SEED must be an unsigned integer, got '" + std::string(s) + "'");
  }
  return v;
}

// convert ----------------------------------------------------------------------

struct ConvertOptions {
  fs::path root;
  fs::path labels;
  fs::path out_dir;
  ConversionConfig config;
  CorpusOptions corpus;
  unsigned jobs = 0;
};

struct ConvertResult {
  Manifest manifest;
  fs::path manifest_path;
  std::vector<std::string> warnings;
};

/// Converts every labeled binary to `<id>__orig.png` under out_dir and writes
/// out_dir/manifest.jsonl.
inline ConvertResult run_convert(const ConvertOptions& opts) {
  opts.config.validate();
  auto corpus_opts = opts.corpus;
  corpus_opts.jobs = opts.jobs;
  Corpus corpus = load_corpus(opts.root, opts.labels, corpus_opts);

  ConvertResult res;
  res.warnings = corpus.warnings;
  res.manifest_path = opts.out_dir / kManifestFileName;
  res.manifest.config = opts.config;
  res.manifest.classes = corpus.classes;
  res.manifest.entries.resize(corpus.records.size());

  fs::create_directories(opts.out_dir);
  parallel_for(corpus.records.size(), opts.jobs, [&](std::size_t i) {
    const auto& rec = corpus.records[i];
    const Image img = convert(rec, opts.config, opts.corpus.max_file_size);
    const std::string rel = img.stem() + ".png";
    const fs::path out = opts.out_dir / fs::path(rel);
    fs::create_directories(out.parent_path());
    encode_png(img, out);
    res.manifest.entries[i] = {rel, rec.id, rec.label, std::nullopt, img.width, img.height};
  });

  write_manifest(res.manifest_path, res.manifest);
  return res;
}

// augment ----------------------------------------------------------------------

struct AugmentOptions {
  fs::path manifest;
  fs::path out_dir;
  AugmentationPlan plan;
  unsigned jobs = 0;
};

/// Loads the image behind a manifest entry and restores its provenance.
inline Image load_entry_image(const fs::path& manifest_path, const ManifestEntry& e) {
  Image img = decode_png(resolve_entry(manifest_path, e));
  if (img.width != e.width || img.height != e.height) {
    throw ValidationError("image '" + e.path + "' is " + std::to_string(img.width) + "x" +
                          std::to_string(img.height) + " but the manifest says " + std::to_string(e.width) + "x" +
                          std::to_string(e.height));
  }
  img.source_id = e.source_id;
  img.label = e.label;
  img.lineage = e.lineage;
  return img;
}

/**
 * Applies every plan spec to every original entry of the manifest, writes
 * the noised PNGs as `<id>__<kind>_<ratio>_<seed>.png` under out_dir and
 * writes out_dir/manifest.jsonl holding the input entries plus the new ones,
 * sorted by path.
 */
inline Manifest run_augment(const AugmentOptions& opts) {
  opts.plan.validate();
  Manifest in = read_manifest(opts.manifest);
  const fs::path out_manifest = opts.out_dir / kManifestFileName;
  fs::create_directories(opts.out_dir);

  std::vector<const ManifestEntry*> originals;
  for (const auto& e : in.entries) {
    if (e.is_original()) originals.push_back(&e);
  }
  if (originals.empty()) throw ValidationError("manifest has no original entries to augment");

  const std::size_t t = opts.plan.specs.size();
  std::vector<ManifestEntry> added(originals.size() * t);
  parallel_for(originals.size(), opts.jobs, [&](std::size_t i) {
    const Image src = load_entry_image(opts.manifest, *originals[i]);
    const Image one[] = {src};
    auto enhanced = enhance(one, opts.plan);
    std::size_t k = 0;
    for (const auto& img : enhanced) {
      if (!img.lineage) continue;
      const std::string rel = img.stem() + ".png";
      const fs::path out = opts.out_dir / fs::path(rel);
      fs::create_directories(out.parent_path());
      encode_png(img, out);
      added[i * t + k++] = {rel, img.source_id, img.label, img.lineage, img.width, img.height};
    }
  });

  Manifest out = rebase_manifest(std::move(in), opts.manifest, out_manifest);
  std::set<std::string> existing;
  for (const auto& e : out.entries) existing.insert(e.path);
  for (auto& e : added) {
    if (existing.contains(e.path)) throw ValidationError("augmented output collides with existing entry '" + e.path + "'");
    out.entries.push_back(std::move(e));
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  write_manifest(out_manifest, out);
  return out;
}

// split ------------------------------------------------------------------------

struct SplitFiles {
  fs::path train;
  fs::path test;
  std::vector<std::string> warnings;
};

/// Writes out_dir/train.jsonl and out_dir/test.jsonl.
inline SplitFiles run_split(const fs::path& manifest_path, double fraction, std::uint64_t seed,
                            const fs::path& out_dir) {
  auto res = split_manifest(read_manifest(manifest_path), fraction, seed);
  SplitFiles files{out_dir / "train.jsonl", out_dir / "test.jsonl", std::move(res.warnings)};
  write_manifest(files.train, rebase_manifest(std::move(res.train), manifest_path, files.train));
  write_manifest(files.test, rebase_manifest(std::move(res.test), manifest_path, files.test));
  return files;
}

// score ------------------------------------------------------------------------

/// Scores predictions against the manifest's class set.
inline ClassificationReport run_score(const fs::path& manifest_path, const fs::path& predictions_path,
                                      AveragingMode mode) {
  const Manifest m = read_manifest(manifest_path);
  PredictionSet preds{read_predictions_csv(predictions_path), m.classes};
  return evaluate(preds, mode);
}

// trainer ----------------------------------------------------------------------

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''"; else out += c;
  }
  out += "'";
  return out;
}

/// Runs `<cmd> --train <train> --test <test> --out <out>` through the shell
/// and returns the exit code (-1 if it did not exit normally).
inline int invoke_trainer(const std::string& cmd, const fs::path& train, const fs::path& test,
                          const fs::path& out, const fs::path& log_file = {}) {
  std::string line = cmd + " --train " + shell_quote(train.string()) + " --test " + shell_quote(test.string()) +
                     " --out " + shell_quote(out.string());
  if (!log_file.empty()) line += " > " + shell_quote(log_file.string()) + " 2>&1";
  std::fflush(nullptr);
  const int status = std::system(line.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

// sweep ------------------------------------------------------------------------

struct SweepConfig {
  std::vector<double> ratios{0.01, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::string> configurations{"poisson", "gaussian", "laplace"};
  std::uint64_t seed = kDefaultSeed;
  double split_fraction = 0.8;
  std::uint64_t split_seed = kDefaultSeed;
  ChannelMask channels{kAllChannels};
  AveragingMode mode = AveragingMode::weighted;
  unsigned parallel_cells = 1;
  unsigned jobs = 0;

  void validate() const {
    for (double r : ratios) {
      if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("sweep ratio must be in [0, 1], got " + format_ratio(r));
    }
    for (const auto& c : configurations) preset_kinds(c);
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ValidationError("split fraction must be in (0, 1)");
    if (channels.none()) throw ValidationError("channel mask is empty");
  }
};

struct CellOutcome {
  std::optional<double> accuracy;
  std::string error;  // set when the cell failed
};

struct SweepCell {
  std::string configuration;
  double ratio = 0.0;
  CellOutcome outcome;
};

struct SweepResult {
  std::vector<double> ratios;
  std::vector<std::string> configurations;
  CellOutcome baseline;
  std::vector<SweepCell> cells;  // ratio-major

  const SweepCell* cell(const std::string& configuration, double ratio) const {
    for (const auto& c : cells) {
      if (c.configuration == configuration && c.ratio == ratio) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline CellOutcome train_and_score(const std::string& trainer, const fs::path& train, const fs::path& test,
                                   const fs::path& cell_dir, AveragingMode mode) {
  CellOutcome out;
  const fs::path predictions = cell_dir / "predictions.csv";
  std::error_code ec;
  fs::remove(predictions, ec);
  const int code = invoke_trainer(trainer, train, test, predictions, cell_dir / "trainer.log");
  if (code != 0) {
    out.error = "trainer exited with code " + std::to_string(code);
    return out;
  }
  try {
    const Manifest test_manifest = read_manifest(test);
    PredictionSet preds{read_predictions_csv(predictions), test_manifest.classes};
    if (preds.rows.size() != test_manifest.entries.size()) {
      throw ValidationError("trainer wrote " + std::to_string(preds.rows.size()) + " predictions for " +
                            std::to_string(test_manifest.entries.size()) + " test entries");
    }
    const auto report = evaluate(preds, mode);
    write_text_file(cell_dir / "report.json", to_json(report).dump(2) + "\n");
    out.accuracy = report.accuracy;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

inline std::string format_accuracy(const CellOutcome& c) {
  if (!c.accuracy) return "failed";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << *c.accuracy;
  return os.str();
}

}  // namespace detail

/**
 * Runs the noise-ratio sweep: split the originals once, train the baseline
 * on the original training set, then for every (configuration, ratio) cell
 * enhance the training set, train, and score on the untouched test set.
 * A failing trainer marks its cell failed; the sweep carries on.
 */
inline SweepResult run_sweep(const fs::path& manifest_path, const SweepConfig& cfg, const std::string& trainer,
                             const fs::path& work_dir, std::ostream* log = nullptr) {
  cfg.validate();
  if (trainer.empty()) throw ValidationError("sweep needs a trainer command");

  Manifest originals = read_manifest(manifest_path);
  std::erase_if(originals.entries, [](const ManifestEntry& e) { return !e.is_original(); });
  const fs::path source_copy = work_dir / "originals.jsonl";
  write_manifest(source_copy, rebase_manifest(std::move(originals), manifest_path, source_copy));

  const auto split = run_split(source_copy, cfg.split_fraction, cfg.split_seed, work_dir / "split");
  if (log) {
    for (const auto& w : split.warnings) *log << "warning: " << w << "\n";
  }

  SweepResult res;
  res.ratios = cfg.ratios;
  res.configurations = cfg.configurations;

  if (log) *log << "[sweep] baseline\n" << std::flush;
  const fs::path base_dir = work_dir / "baseline";
  fs::create_directories(base_dir);
  res.baseline = detail::train_and_score(trainer, split.train, split.test, base_dir, cfg.mode);

  for (double r : cfg.ratios) {
    for (const auto& c : cfg.configurations) res.cells.push_back({c, r, {}});
  }

  parallel_for(res.cells.size(), cfg.parallel_cells == 0 ? 1 : cfg.parallel_cells, [&](std::size_t i) {
    auto& cell = res.cells[i];
    const fs::path cell_dir = work_dir / "cells" / (cell.configuration + "_" + format_ratio(cell.ratio));
    if (log) *log << "[sweep] " << cell.configuration << " @ " << format_ratio(cell.ratio) << "\n" << std::flush;
    try {
      AugmentOptions aug;
      aug.manifest = split.train;
      aug.out_dir = cell_dir;
      aug.jobs = cfg.jobs;
      for (auto kind : preset_kinds(cell.configuration)) {
        aug.plan.specs.push_back({kind, cell.ratio, cfg.seed, cfg.channels});
      }
      run_augment(aug);
      cell.outcome = detail::train_and_score(trainer, cell_dir / kManifestFileName, split.test, cell_dir, cfg.mode);
    } catch (const std::exception& e) {
      cell.outcome.error = e.what();
    }
    if (log && !cell.outcome.accuracy) *log << "[sweep] cell failed: " << cell.outcome.error << "\n" << std::flush;
  });
  return res;
}

/// Results table as CSV: one row per ratio, the baseline column, then one
/// column per noise configuration.
inline std::string sweep_results_csv(const SweepResult& res) {
  std::string out = "ratio,original";
  for (const auto& c : res.configurations) out += "," + c;
  out += "\n";
  const std::vector<double> ratios = res.ratios;
  if (ratios.empty()) return out + "-," + detail::format_accuracy(res.baseline) + "\n";
  for (double r : ratios) {
    out += format_ratio(r) + "," + detail::format_accuracy(res.baseline);
    for (const auto& c : res.configurations) {
      const auto* cell = res.cell(c, r);
      out += "," + (cell ? detail::format_accuracy(cell->outcome) : std::string("failed"));
    }
    out += "\n";
  }
  return out;
}

/// The same table with aligned columns.
inline std::string sweep_results_text(const SweepResult& res) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(sweep_results_csv(res));
  for (std::string line; std::getline(in, line);) rows.push_back(detail::split_csv_line(line));
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::ostringstream os;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      os << (i ? " | " : "") << std::setw(static_cast<int>(widths[i])) << rows[r][i];
    }
    os << "\n";
    if (r == 0) {
      for (std::size_t i = 0; i < widths.size(); ++i) os << (i ? "-+-" : "") << std::string(widths[i], '-');
      os << "\n";
    }
  }
  return os.str();
}

// stats ------------------------------------------------------------------------

/// Summary of a manifest: class histogram split by lineage.
inline std::string manifest_stats(const Manifest& m) {
  std::map<std::string, std::size_t> originals, augmented, by_lineage;
  std::size_t n_orig = 0;
  for (const auto& e : m.entries) {
    if (e.is_original()) {
      ++originals[e.label];
      ++n_orig;
    } else {
      ++augmented[e.label];
      ++by_lineage[e.lineage->tag()];
    }
  }
  std::ostringstream os;
  os << "entries:   " << m.entries.size() << " (" << n_orig << " original, " << m.entries.size() - n_orig
     << " augmented)\n";
  os << "classes:   " << m.classes.size() << "\n";
  os << "config:    width=" << m.config.width << " entropy_window=" << m.config.entropy_window << " resize_to=";
  if (m.config.resize_to) os << m.config.resize_to->width << "x" << m.config.resize_to->height;
  else os << "none";
  os << "\n\n";
  std::size_t w = 8;
  for (const auto& n : m.classes.names()) w = std::max(w, n.size());
  os << std::left << std::setw(static_cast<int>(w)) << "class" << std::right << std::setw(10) << "original"
     << std::setw(11) << "augmented" << std::setw(8) << "total" << "\n";
  for (const auto& n : m.classes.names()) {
    os << std::left << std::setw(static_cast<int>(w)) << n << std::right << std::setw(10) << originals[n]
       << std::setw(11) << augmented[n] << std::setw(8) << originals[n] + augmented[n] << "\n";
  }
  if (!by_lineage.empty()) {
    os << "\nlineage\n";
    for (const auto& [tag, count] : by_lineage) os << "  " << tag << ": " << count << "\n";
  }
  return os.str();
}

}  // namespace binviz
