// binviz - test helpers: scratch directories, synthetic corpora and
// from-scratch oracles that never call into the code they check.

#pragma once

#include <binviz/binviz.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace binviz::testing {

namespace fs = std::filesystem;

/// Directory removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag = "binviz") {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline void write_string(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline std::string read_string(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::uint8_t> random_bytes(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(gen() & 0xff);
  return v;
}

/// Random bytes drawn from a small alphabet so windows repeat values.
inline std::vector<std::uint8_t> low_entropy_bytes(std::mt19937_64& gen, std::size_t n, unsigned alphabet) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>((gen() % alphabet) * 7);
  return v;
}

/// Writes `count` files per family into root and a matching label CSV.
/// Each family has its own byte pattern with random perturbation.
inline fs::path make_corpus(const fs::path& root, const std::vector<std::string>& families, std::size_t count,
                            std::uint64_t seed = 1, std::size_t min_size = 300, std::size_t max_size = 3000) {
  std::mt19937_64 gen(seed);
  std::string labels = "id,label\n";
  for (std::size_t f = 0; f < families.size(); ++f) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t n = min_size + gen() % (max_size - min_size + 1);
      std::vector<std::uint8_t> bytes(n);
      for (std::size_t j = 0; j < n; ++j) {
        bytes[j] = static_cast<std::uint8_t>((j * (f + 1) * 13 + f * 40) & 0xff);
        if (gen() % 10 == 0) bytes[j] = static_cast<std::uint8_t>(gen() & 0xff);
      }
      const std::string id = families[f] + "/sample_" + std::to_string(i) + ".bin";
      write_bytes(root / id, bytes);
      labels += id + "," + families[f] + "\n";
    }
  }
  const fs::path label_file = root.parent_path() / (root.filename().string() + "_labels.csv");
  write_string(label_file, labels);
  return label_file;
}

// Oracles ---------------------------------------------------------------------

/// Entropy intensity at j, recounting the trailing window from scratch.
inline int entropy_oracle(const std::vector<std::uint8_t>& payload, std::size_t j, std::size_t window) {
  const std::size_t start = j + 1 >= window ? j + 1 - window : 0;
  std::array<std::size_t, 256> counts{};
  for (std::size_t k = start; k <= j; ++k) counts[payload[k]]++;
  const double n = static_cast<double>(j - start + 1);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  const double scaled = std::floor(h * 255.0 / 8.0 + 0.5);
  return static_cast<int>(std::min(255.0, std::max(0.0, scaled)));
}

struct RecountMetrics {
  std::vector<std::vector<std::uint64_t>> confusion;
  std::vector<double> precision, recall, f1;
  std::vector<std::uint64_t> support;
  double accuracy = 0.0;
  double wprec = 0.0, wrec = 0.0, wf1 = 0.0;
};

/// Per-class counts by scanning every row once per class.
inline RecountMetrics recount(const std::vector<PredictionRow>& rows, const std::vector<std::string>& classes) {
  const std::size_t k = classes.size();
  RecountMetrics out;
  out.confusion.assign(k, std::vector<std::uint64_t>(k, 0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      for (const auto& r : rows) {
        if (r.true_label == classes[a] && r.predicted_label == classes[b]) ++out.confusion[a][b];
      }
    }
  }
  std::uint64_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (const auto& r : rows) {
      const bool t = r.true_label == classes[c];
      const bool p = r.predicted_label == classes[c];
      if (t && p) ++tp;
      if (!t && p) ++fp;
      if (t && !p) ++fn;
    }
    correct += tp;
    const double prec = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double rec = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    out.precision.push_back(prec);
    out.recall.push_back(rec);
    out.f1.push_back(prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0);
    out.support.push_back(tp + fn);
  }
  out.accuracy = rows.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(rows.size());
  double total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    out.wprec += out.precision[c] * static_cast<double>(out.support[c]);
    out.wrec += out.recall[c] * static_cast<double>(out.support[c]);
    total += static_cast<double>(out.support[c]);
  }
  if (total > 0) {
    out.wprec /= total;
    out.wrec /= total;
  }
  out.wf1 = out.wprec + out.wrec > 0 ? 2 * out.wprec * out.wrec / (out.wprec + out.wrec) : 0.0;
  return out;
}

inline std::vector<PredictionRow> random_predictions(std::mt19937_64& gen, const std::vector<std::string>& classes,
                                                     std::size_t rows) {
  std::vector<PredictionRow> out;
  for (std::size_t i = 0; i < rows; ++i) {
    out.push_back({"s" + std::to_string(i), classes[gen() % classes.size()], classes[gen() % classes.size()]});
  }
  return out;
}

/// Small image with pseudo-random pixels and the given identity.
inline Image random_image(std::mt19937_64& gen, std::size_t w, std::size_t h, std::string source_id,
                          std::string label) {
  Image img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() & 0xff);
  img.source_id = std::move(source_id);
  img.label = std::move(label);
  return img;
}

inline std::map<std::string, std::size_t> label_histogram(const std::vector<Image>& images) {
  std::map<std::string, std::size_t> h;
  for (const auto& i : images) ++h[i.label];
  return h;
}

}  // namespace binviz::testing
