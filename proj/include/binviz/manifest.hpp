// binviz - binary-to-image conversion and noise augmentation pipeline
// Dataset manifest: JSON-lines, one header line then one line per image

#pragma once

#include <binviz/corpus.hpp>
#include <binviz/error.hpp>
#include <binviz/image.hpp>
#include <binviz/imaging.hpp>

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace binviz {

inline constexpr std::string_view kManifestVersion = "binviz-manifest/1";

/// One image on disk. `path` is relative to the manifest's directory.
struct ManifestEntry {
  std::string path;
  std::string source_id;
  std::string label;
  Lineage lineage;
  std::size_t width = 0;
  std::size_t height = 0;

  bool is_original() const noexcept { return !lineage.has_value(); }
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::string version{kManifestVersion};
  ConversionConfig config;
  ClassSet classes;
  std::vector<ManifestEntry> entries;

  /// Per-class entry counts, in class-set order.
  std::map<std::string, std::size_t> class_histogram() const {
    std::map<std::string, std::size_t> h;
    for (const auto& n : classes.names()) h[n] = 0;
    for (const auto& e : entries) ++h[e.label];
    return h;
  }

  void validate() const {
    std::set<std::string> paths;
    for (const auto& e : entries) {
      if (!paths.insert(e.path).second) throw ValidationError("manifest repeats path '" + e.path + "'");
      if (!classes.contains(e.label)) {
        throw ValidationError("manifest entry '" + e.path + "' has label '" + e.label + "' outside the class set");
      }
      if (e.lineage) e.lineage->validate();
    }
  }
};

// JSON mapping ---------------------------------------------------------------

inline nlohmann::json lineage_to_json(const Lineage& lineage) {
  if (!lineage) return "original";
  std::vector<int> ch;
  for (std::size_t i = 0; i < kChannels; ++i) {
    if (lineage->channels.test(i)) ch.push_back(static_cast<int>(i));
  }
  return {{"kind", to_string(lineage->kind)},
          {"ratio", lineage->ratio},
          {"seed", lineage->seed},
          {"channels", ch}};
}

inline Lineage lineage_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "original") throw ValidationError("unknown lineage '" + j.get<std::string>() + "'");
    return std::nullopt;
  }
  AugmentationSpec spec;
  spec.kind = parse_noise_kind(j.at("kind").get<std::string>());
  spec.ratio = j.at("ratio").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.channels.reset();
  for (int c : j.at("channels").get<std::vector<int>>()) {
    if (c < 0 || c >= static_cast<int>(kChannels)) throw ValidationError("lineage channel out of range");
    spec.channels.set(static_cast<std::size_t>(c));
  }
  spec.validate();
  return spec;
}

inline nlohmann::json config_to_json(const ConversionConfig& cfg) {
  nlohmann::json j{{"width", cfg.width},
                   {"entropy_window", cfg.entropy_window},
                   {"interpolation", to_string(cfg.interpolation)}};
  if (cfg.resize_to) {
    j["resize_to"] = {cfg.resize_to->width, cfg.resize_to->height};
  } else {
    j["resize_to"] = nullptr;
  }
  return j;
}

inline ConversionConfig config_from_json(const nlohmann::json& j) {
  ConversionConfig cfg;
  cfg.width = j.at("width").get<std::size_t>();
  cfg.entropy_window = j.at("entropy_window").get<std::size_t>();
  cfg.interpolation = parse_interpolation(j.at("interpolation").get<std::string>());
  const auto& r = j.at("resize_to");
  if (r.is_null()) {
    cfg.resize_to.reset();
  } else {
    cfg.resize_to = ImageSize{r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()};
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json entry_to_json(const ManifestEntry& e) {
  return {{"path", e.path},           {"source_id", e.source_id}, {"label", e.label},
          {"lineage", lineage_to_json(e.lineage)}, {"width", e.width}, {"height", e.height}};
}

inline ManifestEntry entry_from_json(const nlohmann::json& j) {
  ManifestEntry e;
  e.path = j.at("path").get<std::string>();
  e.source_id = j.at("source_id").get<std::string>();
  e.label = j.at("label").get<std::string>();
  e.lineage = lineage_from_json(j.at("lineage"));
  e.width = j.at("width").get<std::size_t>();
  e.height = j.at("height").get<std::size_t>();
  return e;
}

// Serialization ----------------------------------------------------------------

/// Keys are emitted sorted, so equal manifests serialize to equal bytes.
inline std::string serialize_manifest(const Manifest& m) {
  nlohmann::json header{{"manifest", m.version}, {"config", config_to_json(m.config)}, {"classes", m.classes.names()}};
  std::string out = header.dump();
  out += '\n';
  for (const auto& e : m.entries) {
    out += entry_to_json(e).dump();
    out += '\n';
  }
  return out;
}

inline Manifest parse_manifest(const std::string& text) {
  auto lines = detail::text_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ValidationError("manifest is empty");

  Manifest m;
  try {
    auto header = nlohmann::json::parse(lines[i]);
    m.version = header.at("manifest").get<std::string>();
    if (m.version != kManifestVersion) throw ValidationError("unsupported manifest version '" + m.version + "'");
    m.config = config_from_json(header.at("config"));
    m.classes = ClassSet(header.at("classes").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest header: ") + e.what());
  }

  for (++i; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    try {
      m.entries.push_back(entry_from_json(nlohmann::json::parse(lines[i])));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("manifest line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  m.validate();
  return m;
}

inline Manifest read_manifest(const fs::path& path) {
  try {
    return parse_manifest(detail::read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
}

inline void write_manifest(const fs::path& path, const Manifest& m) {
  m.validate();
  write_text_file(path, serialize_manifest(m));
}

// Paths ------------------------------------------------------------------------

/// Absolute location of an entry's image for a manifest stored at `manifest_path`.
inline fs::path resolve_entry(const fs::path& manifest_path, const ManifestEntry& e) {
  return (fs::absolute(manifest_path).parent_path() / fs::path(e.path)).lexically_normal();
}

/// Path of `target` relative to `dir`, '/'-separated.
inline std::string relative_to(const fs::path& target, const fs::path& dir) {
  auto rel = fs::absolute(target).lexically_normal().lexically_relative(fs::absolute(dir).lexically_normal());
  if (rel.empty()) return fs::absolute(target).lexically_normal().generic_string();
  return rel.generic_string();
}

/// Rewrites entry paths written for a manifest at `from` so they stay valid
/// for a manifest written at `to`.
inline Manifest rebase_manifest(Manifest m, const fs::path& from, const fs::path& to) {
  const auto to_dir = fs::absolute(to).parent_path();
  for (auto& e : m.entries) e.path = relative_to(resolve_entry(from, e), to_dir);
  return m;
}

}  // namespace binviz
