// binviz - binary-to-image conversion and noise augmentation pipeline
// Stratified, leakage-free train/test split

#pragma once

#include <binviz/error.hpp>
#include <binviz/manifest.hpp>
#include <binviz/noise.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace binviz {

struct SplitResult {
  Manifest train;
  Manifest test;
  std::vector<std::string> warnings;
};

/// Fisher-Yates over an explicit stream (std::shuffle is not portable).
template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

/**
 * Splits the original entries per class: round(fraction * n) go to train,
 * the rest to test, chosen by a seeded shuffle of the class's source ids.
 * Augmented entries go wherever their source went. A class with fewer than
 * two originals goes entirely to train (with a warning). When a class has at
 * least two originals both sides receive at least one.
 */
inline SplitResult split_manifest(const Manifest& manifest, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split fraction must be in (0, 1), got " + format_ratio(fraction));
  }

  std::map<std::string, std::vector<std::string>> originals_by_class;
  std::set<std::string> original_ids;
  for (const auto& e : manifest.entries) {
    if (!e.is_original()) continue;
    if (!original_ids.insert(e.source_id).second) {
      throw ValidationError("manifest has two original entries for source '" + e.source_id + "'");
    }
    originals_by_class[e.label].push_back(e.source_id);
  }

  SplitResult out;
  std::set<std::string> test_ids;
  Rng rng(splitmix64(seed));
  for (const auto& cls : manifest.classes.names()) {
    auto it = originals_by_class.find(cls);
    if (it == originals_by_class.end()) continue;
    auto ids = it->second;
    std::sort(ids.begin(), ids.end());
    if (ids.size() < 2) {
      out.warnings.push_back("class '" + cls + "' has " + std::to_string(ids.size()) +
                             " original(s); all assigned to train");
      continue;
    }
    seeded_shuffle(ids, rng);
    auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ids.size()) + 0.5));
    n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
    test_ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  }

  out.train.version = out.test.version = manifest.version;
  out.train.config = out.test.config = manifest.config;
  out.train.classes = out.test.classes = manifest.classes;
  for (const auto& e : manifest.entries) {
    if (!original_ids.contains(e.source_id)) {
      throw ValidationError("augmented entry '" + e.path + "' has no original entry for source '" + e.source_id + "'");
    }
    (test_ids.contains(e.source_id) ? out.test : out.train).entries.push_back(e);
  }
  return out;
}

}  // namespace binviz
