// binviz - binary-to-image conversion and noise augmentation pipeline
// Command line front end

#include <binviz/binviz.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace binviz;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::optional<ImageSize> parse_resize(const std::string& text) {
  if (text == "none") return std::nullopt;
  auto x = text.find('x');
  if (x == std::string::npos) throw ValidationError("--resize expects WxH or 'none', got '" + text + "'");
  try {
    std::size_t used = 0;
    const auto w = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const auto h = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
    return ImageSize{w, h};
  } catch (const std::logic_error&) {
    throw ValidationError("--resize expects WxH or 'none', got '" + text + "'");
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

/// Plan file: {"seed": 42, "channels": [0, 1, 2], "noise": ["gaussian:0.2", ...]}
AugmentationPlan read_plan_file(const fs::path& path, std::uint64_t seed, ChannelMask channels) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("channels")) {
    channels.reset();
    for (int c : j["channels"].get<std::vector<int>>()) {
      if (c < 0 || c > 2) throw ValidationError(path.string() + ": channel out of range");
      channels.set(static_cast<std::size_t>(c));
    }
  }
  AugmentationPlan plan;
  for (const auto& n : j.at("noise").get<std::vector<std::string>>()) {
    for (auto& s : parse_noise_arg(n, seed, channels)) plan.specs.push_back(s);
  }
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binviz: binaries to 3-channel images, noise augmentation and scoring"};
  app.require_subcommand(1);

  unsigned jobs = 0;
  app.add_option("-j,--jobs", jobs, "Worker threads (0 = hardware concurrency)");

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert labeled binaries to PNG images and a manifest");
  ConvertOptions conv;
  std::string resize = "256x256";
  std::string interpolation = "bilinear";
  convert_cmd->add_option("--root", conv.root, "Corpus root directory")->required()->check(CLI::ExistingDirectory);
  convert_cmd->add_option("--labels", conv.labels, "Label CSV (id,label)")->required()->check(CLI::ExistingFile);
  convert_cmd->add_option("--out", conv.out_dir, "Output directory")->required();
  convert_cmd->add_option("--width", conv.config.width, "Native image width")->capture_default_str();
  convert_cmd->add_option("--entropy-window", conv.config.entropy_window, "Entropy window in bytes")
      ->capture_default_str();
  convert_cmd->add_option("--resize", resize, "Resize to WxH, or 'none'")->capture_default_str();
  convert_cmd->add_option("--interpolation", interpolation, "Resize interpolation")->capture_default_str();
  convert_cmd->add_option("--max-size", conv.corpus.max_file_size, "Largest accepted file in bytes")
      ->capture_default_str();
  convert_cmd->add_flag("--lenient", conv.corpus.lenient, "Skip empty or oversized files with a warning");

  // augment
  auto* augment_cmd = app.add_subcommand("augment", "Add noised copies of every original image");
  AugmentOptions aug;
  std::vector<std::string> noise_args;
  std::optional<std::uint64_t> aug_seed;
  std::string aug_channels = "0,1,2";
  fs::path plan_file;
  augment_cmd->add_option("--manifest", aug.manifest, "Input manifest")->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--out", aug.out_dir, "Output directory")->required();
  augment_cmd->add_option("--noise", noise_args, "kind:ratio, repeatable (kind may be a preset like all)");
  augment_cmd->add_option("--seed", aug_seed, "Noise seed (default $BINVIZ_SEED or 42)");
  augment_cmd->add_option("--channels", aug_channels, "Channels to perturb")->capture_default_str();
  augment_cmd->add_option("--plan", plan_file, "JSON plan file")->check(CLI::ExistingFile);

  // split
  auto* split_cmd = app.add_subcommand("split", "Stratified train/test split of a manifest");
  fs::path split_manifest_path, split_out;
  double split_fraction = 0.8;
  std::optional<std::uint64_t> split_seed;
  split_cmd->add_option("--manifest", split_manifest_path, "Input manifest")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--fraction", split_fraction, "Train fraction")->capture_default_str();
  split_cmd->add_option("--seed", split_seed, "Split seed (default $BINVIZ_SEED or 42)");
  split_cmd->add_option("--out", split_out, "Output directory")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Noise-ratio sweep with an external trainer");
  fs::path sweep_manifest, sweep_work;
  std::string trainer, sweep_channels = "0,1,2", sweep_mode = "weighted";
  SweepConfig sweep_cfg;
  std::optional<std::uint64_t> sweep_seed, sweep_split_seed;
  sweep_cmd->add_option("--manifest", sweep_manifest, "Manifest of original images")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--trainer", trainer, "Trainer command")->required();
  sweep_cmd->add_option("--work", sweep_work, "Working directory")->required();
  sweep_cmd->add_option("--ratios", sweep_cfg.ratios, "Noise ratios")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--kinds", sweep_cfg.configurations, "Noise configurations (kinds or presets)")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_flag("--no-kinds", "Run the baseline only")->each([&](const std::string&) {
    sweep_cfg.configurations.clear();
  });
  sweep_cmd->add_option("--seed", sweep_seed, "Noise seed (default $BINVIZ_SEED or 42)");
  sweep_cmd->add_option("--split-fraction", sweep_cfg.split_fraction, "Train fraction")->capture_default_str();
  sweep_cmd->add_option("--split-seed", sweep_split_seed, "Split seed (default $BINVIZ_SEED or 42)");
  sweep_cmd->add_option("--channels", sweep_channels, "Channels to perturb")->capture_default_str();
  sweep_cmd->add_option("--mode", sweep_mode, "Averaging mode")->capture_default_str();
  sweep_cmd->add_option("--parallel-cells", sweep_cfg.parallel_cells, "Cells trained concurrently")
      ->capture_default_str();

  // score
  auto* score_cmd = app.add_subcommand("score", "Score a predictions CSV");
  fs::path score_manifest, predictions, json_out;
  std::string score_mode = "weighted";
  score_cmd->add_option("--manifest", score_manifest, "Manifest providing the class set")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--predictions", predictions, "sample_id,true_label,predicted_label CSV")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--mode", score_mode, "weighted or unnormalized")->capture_default_str();
  score_cmd->add_option("--json", json_out, "Also write the report as JSON");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a manifest");
  fs::path stats_manifest;
  stats_cmd->add_option("--manifest", stats_manifest, "Manifest")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*convert_cmd) {
      conv.config.resize_to = parse_resize(resize);
      conv.config.interpolation = parse_interpolation(interpolation);
      conv.jobs = jobs;
      auto res = run_convert(conv);
      print_warnings(res.warnings);
      std::cout << "wrote " << res.manifest.entries.size() << " images, manifest " << res.manifest_path.string()
                << "\n";
    } else if (*augment_cmd) {
      const std::uint64_t seed = aug_seed ? *aug_seed : default_seed();
      const ChannelMask channels = parse_channels(aug_channels);
      if (!plan_file.empty()) aug.plan = read_plan_file(plan_file, seed, channels);
      for (const auto& n : noise_args) {
        for (auto& s : parse_noise_arg(n, seed, channels)) aug.plan.specs.push_back(s);
      }
      if (aug.plan.specs.empty()) {
        std::cerr << "augment: no noise given (use --noise kind:ratio or --plan)\n";
        return kExitUsage;
      }
      aug.jobs = jobs;
      auto m = run_augment(aug);
      std::cout << "manifest " << (aug.out_dir / kManifestFileName).string() << " now has " << m.entries.size()
                << " entries\n";
    } else if (*split_cmd) {
      auto files = run_split(split_manifest_path, split_fraction, split_seed ? *split_seed : default_seed(), split_out);
      print_warnings(files.warnings);
      std::cout << "train " << files.train.string() << "\ntest  " << files.test.string() << "\n";
    } else if (*sweep_cmd) {
      sweep_cfg.seed = sweep_seed ? *sweep_seed : default_seed();
      sweep_cfg.split_seed = sweep_split_seed ? *sweep_split_seed : default_seed();
      sweep_cfg.channels = parse_channels(sweep_channels);
      sweep_cfg.mode = parse_averaging_mode(sweep_mode);
      sweep_cfg.jobs = jobs;
      auto res = run_sweep(sweep_manifest, sweep_cfg, trainer, sweep_work, &std::cerr);
      write_text_file(sweep_work / "results.csv", sweep_results_csv(res));
      const auto text = sweep_results_text(res);
      write_text_file(sweep_work / "results.txt", text);
      std::cout << text;
    } else if (*score_cmd) {
      auto report = run_score(score_manifest, predictions, parse_averaging_mode(score_mode));
      std::cout << to_text(report);
      if (!json_out.empty()) write_text_file(json_out, to_json(report).dump(2) + "\n");
    } else if (*stats_cmd) {
      std::cout << manifest_stats(read_manifest(stats_manifest));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
