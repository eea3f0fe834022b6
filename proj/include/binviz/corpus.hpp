// binviz - binary-to-image conversion and noise augmentation pipeline
// Corpus ingestion: binaries on disk plus an `id,label` CSV

#pragma once

#include <binviz/error.hpp>
#include <binviz/parallel.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace binviz {

namespace fs = std::filesystem;

inline constexpr std::uintmax_t kDefaultMaxFileSize = 32u * 1024u * 1024u;

/// One input binary.
struct SampleRecord {
  std::string id;  // path relative to the corpus root, '/'-separated
  std::vector<std::uint8_t> payload;
  std::string label;

  std::size_t size_bytes() const noexcept { return payload.size(); }
};

/// Ordered, distinct family names. The order defines confusion-matrix axes.
class ClassSet {
 public:
  ClassSet() = default;

  explicit ClassSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) {
      throw ValidationError("class set needs at least 2 classes, got " +
                            std::to_string(names_.size()));
    }
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw ValidationError("class names must be nonempty");
      if (!seen.insert(n).second) throw ValidationError("duplicate class name '" + n + "'");
    }
  }

  /// Sorted distinct labels.
  template <typename Range>
  static ClassSet from_labels(const Range& labels) {
    std::set<std::string> s(std::begin(labels), std::end(labels));
    return ClassSet(std::vector<std::string>(s.begin(), s.end()));
  }

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  friend bool operator==(const ClassSet&, const ClassSet&) = default;

 private:
  std::vector<std::string> names_;
};

struct CorpusOptions {
  std::uintmax_t max_file_size = kDefaultMaxFileSize;
  bool lenient = false;  // skip empty/oversized files instead of failing
  unsigned jobs = 1;
};

struct Corpus {
  std::vector<SampleRecord> records;  // sorted by id
  ClassSet classes;
  std::vector<std::string> warnings;
  std::size_t unlabeled_files = 0;
};

struct LabelRow {
  std::string id;
  std::string label;
  std::size_t line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  return ss.str();
}

/// Splits text into lines and strips a leading UTF-8 BOM.
inline std::vector<std::string> text_lines(std::string text) {
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace detail

/// Parses an `id,label` CSV with a mandatory header row.
/// Duplicate ids are a hard error (a sample with two labels is ambiguous).
inline std::vector<LabelRow> parse_label_csv(const std::string& text) {
  auto lines = detail::text_lines(text);
  if (lines.empty() || detail::split_csv_line(lines[0]) != std::vector<std::string>{"id", "label"}) {
    throw ValidationError("label file must start with the header row 'id,label'");
  }

  std::vector<LabelRow> rows;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    auto fields = detail::split_csv_line(lines[i]);
    const std::size_t lineno = i + 1;
    if (fields.size() != 2) {
      throw ValidationError("label file line " + std::to_string(lineno) + ": expected 2 fields, got " +
                            std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ValidationError("label file line " + std::to_string(lineno) + ": empty id or label");
    }
    if (!seen.insert(fields[0]).second) {
      throw SampleError(fields[0], "duplicate id in label file (line " + std::to_string(lineno) + ")");
    }
    rows.push_back({std::move(fields[0]), std::move(fields[1]), lineno});
  }
  return rows;
}

inline std::vector<LabelRow> read_label_file(const fs::path& path) {
  return parse_label_csv(detail::read_text_file(path));
}

/// Reads the whole file into memory.
inline std::vector<std::uint8_t> read_binary_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open file");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path, "read failed");
  return data;
}

/// Loads every labeled file under `root`. Records come back sorted by id and
/// the class set is the sorted set of their labels.
inline Corpus load_corpus(const fs::path& root, const fs::path& labels_path,
                          const CorpusOptions& opts = {}) {
  if (!fs::is_directory(root)) throw IoError(root, "corpus root is not a directory");

  auto rows = read_label_file(labels_path);
  std::sort(rows.begin(), rows.end(), [](const LabelRow& a, const LabelRow& b) { return a.id < b.id; });

  // Optional slot per row: nullopt means skipped in lenient mode.
  std::vector<std::optional<SampleRecord>> loaded(rows.size());
  std::vector<std::string> skip_reasons(rows.size());

  parallel_for(rows.size(), opts.jobs, [&](std::size_t i) {
    const auto& row = rows[i];
    const fs::path path = root / fs::path(row.id);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw SampleError(row.id, "labeled file not found under corpus root");
    auto size = fs::file_size(path, ec);
    if (ec) throw SampleError(row.id, "cannot stat file: " + ec.message());
    if (size == 0 || size > opts.max_file_size) {
      std::string why = size == 0 ? "file is empty"
                                  : "file exceeds size cap (" + std::to_string(size) + " > " +
                                        std::to_string(opts.max_file_size) + " bytes)";
      if (!opts.lenient) throw SampleError(row.id, why);
      skip_reasons[i] = "skipped '" + row.id + "': " + why;
      return;
    }
    SampleRecord rec;
    rec.id = row.id;
    rec.label = row.label;
    try {
      rec.payload = read_binary_file(path);
    } catch (const IoError& e) {
      throw SampleError(row.id, e.what());
    }
    if (rec.payload.empty()) {
      if (!opts.lenient) throw SampleError(row.id, "file is empty");
      skip_reasons[i] = "skipped '" + row.id + "': file is empty";
      return;
    }
    loaded[i] = std::move(rec);
  });

  Corpus corpus;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (loaded[i]) {
      corpus.records.push_back(std::move(*loaded[i]));
    } else {
      corpus.warnings.push_back(std::move(skip_reasons[i]));
    }
  }

  std::set<std::string> labeled_ids;
  for (const auto& r : rows) labeled_ids.insert(r.id);
  std::error_code labels_ec;
  const auto labels_abs = fs::weakly_canonical(labels_path, labels_ec);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::error_code ec;
    if (!labels_ec && fs::weakly_canonical(entry.path(), ec) == labels_abs) continue;
    auto id = entry.path().lexically_relative(root).generic_string();
    if (!labeled_ids.contains(id)) ++corpus.unlabeled_files;
  }
  if (corpus.unlabeled_files > 0) {
    corpus.warnings.push_back(std::to_string(corpus.unlabeled_files) +
                              " file(s) under the corpus root have no label and were skipped");
  }

  std::vector<std::string> labels;
  labels.reserve(corpus.records.size());
  for (const auto& r : corpus.records) labels.push_back(r.label);
  corpus.classes = ClassSet::from_labels(labels);
  return corpus;
}

}  // namespace binviz
