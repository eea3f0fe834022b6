// binviz - binary-to-image conversion and noise augmentation pipeline
// Confusion matrix, precision/recall/F1 and classification reports

#pragma once

#include <binviz/corpus.hpp>
#include <binviz/error.hpp>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace binviz {

struct PredictionRow {
  std::string sample_id;
  std::string true_label;
  std::string predicted_label;
};

struct PredictionSet {
  std::vector<PredictionRow> rows;
  ClassSet classes;
};

/// Parses a `sample_id,true_label,predicted_label` CSV (header required).
/// Labels are validated later against a class set, not here.
inline std::vector<PredictionRow> parse_predictions_csv(const std::string& text) {
  auto lines = detail::text_lines(text);
  const std::vector<std::string> header{"sample_id", "true_label", "predicted_label"};
  if (lines.empty() || detail::split_csv_line(lines[0]) != header) {
    throw ValidationError("predictions file must start with the header row "
                          "'sample_id,true_label,predicted_label'");
  }
  std::vector<PredictionRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    auto f = detail::split_csv_line(lines[i]);
    if (f.size() != 3) {
      throw ValidationError("predictions line " + std::to_string(i + 1) + ": expected 3 fields, got " +
                            std::to_string(f.size()));
    }
    rows.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2])});
  }
  return rows;
}

inline std::vector<PredictionRow> read_predictions_csv(const fs::path& path) {
  return parse_predictions_csv(detail::read_text_file(path));
}

inline std::string write_predictions_csv(const std::vector<PredictionRow>& rows) {
  std::string out = "sample_id,true_label,predicted_label\n";
  for (const auto& r : rows) out += r.sample_id + "," + r.true_label + "," + r.predicted_label + "\n";
  return out;
}

/// k x k counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t k = 0) : k_(k), counts_(k * k, 0) {}

  std::size_t size() const noexcept { return k_; }
  std::uint64_t& operator()(std::size_t t, std::size_t p) { return counts_[t * k_ + p]; }
  std::uint64_t operator()(std::size_t t, std::size_t p) const { return counts_[t * k_ + p]; }

  std::uint64_t row_sum(std::size_t i) const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < k_; ++j) s += (*this)(i, j);
    return s;
  }
  std::uint64_t col_sum(std::size_t j) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += (*this)(i, j);
    return s;
  }
  std::uint64_t trace() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += (*this)(i, i);
    return s;
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

/// Builds the confusion matrix; unknown labels or repeated ids are errors.
inline ConfusionMatrix confusion_matrix(const PredictionSet& preds) {
  const auto& cls = preds.classes;
  ConfusionMatrix m(cls.size());
  std::set<std::string_view> ids;
  for (std::size_t r = 0; r < preds.rows.size(); ++r) {
    const auto& row = preds.rows[r];
    auto where = [&] { return "prediction row " + std::to_string(r + 1) + " ('" + row.sample_id + "')"; };
    if (!ids.insert(row.sample_id).second) throw ValidationError(where() + ": duplicate sample_id");
    auto t = cls.index_of(row.true_label);
    if (!t) throw ValidationError(where() + ": unknown true label '" + row.true_label + "'");
    auto p = cls.index_of(row.predicted_label);
    if (!p) throw ValidationError(where() + ": unknown predicted label '" + row.predicted_label + "'");
    ++m(*t, *p);
  }
  return m;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  bool zero_division = false;  // some ratio was 0/0 and reported as 0
};

inline double harmonic_mean(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

inline std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m) {
  std::vector<ClassMetrics> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto& c = out[i];
    const auto tp = static_cast<double>(m(i, i));
    const auto predicted = m.col_sum(i);
    const auto actual = m.row_sum(i);
    c.support = actual;
    if (predicted > 0) c.precision = tp / static_cast<double>(predicted); else c.zero_division = true;
    if (actual > 0) c.recall = tp / static_cast<double>(actual); else c.zero_division = true;
    if (c.precision + c.recall > 0.0) c.f1 = harmonic_mean(c.precision, c.recall); else c.zero_division = true;
  }
  return out;
}

enum class AveragingMode { weighted, unnormalized };

inline std::string_view to_string(AveragingMode m) {
  return m == AveragingMode::weighted ? "weighted" : "unnormalized";
}

inline AveragingMode parse_averaging_mode(std::string_view s) {
  if (s == "weighted") return AveragingMode::weighted;
  if (s == "unnormalized") return AveragingMode::unnormalized;
  throw ValidationError("unknown averaging mode '" + std::string(s) + "'");
}

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/**
 * Support-weighted precision and recall, then F1 of the two averages.
 *
 * `weighted` divides the support-weighted sums by the total support.
 * `unnormalized` divides them by the number of classes instead; that is not
 * a normalized average and can exceed 1.
 */
inline AveragedMetrics averaged_metrics(const std::vector<ClassMetrics>& per_class, AveragingMode mode) {
  AveragedMetrics avg;
  if (per_class.empty()) return avg;
  double wp = 0.0, wr = 0.0, support = 0.0;
  for (const auto& c : per_class) {
    const auto s = static_cast<double>(c.support);
    wp += c.precision * s;
    wr += c.recall * s;
    support += s;
  }
  const double denom = mode == AveragingMode::weighted ? support : static_cast<double>(per_class.size());
  if (denom > 0.0) {
    avg.precision = wp / denom;
    avg.recall = wr / denom;
  }
  avg.f1 = harmonic_mean(avg.precision, avg.recall);
  return avg;
}

inline double accuracy(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw ValidationError("accuracy of an empty prediction set is undefined");
  return static_cast<double>(m.trace()) / static_cast<double>(total);
}

struct ClassificationReport {
  ClassSet classes;
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  AveragedMetrics averaged;
  AveragingMode mode = AveragingMode::weighted;
};

inline ClassificationReport evaluate(const PredictionSet& preds, AveragingMode mode = AveragingMode::weighted) {
  ClassificationReport rep;
  rep.classes = preds.classes;
  rep.confusion = confusion_matrix(preds);
  rep.per_class = per_class_metrics(rep.confusion);
  rep.accuracy = accuracy(rep.confusion);
  rep.averaged = averaged_metrics(rep.per_class, mode);
  rep.mode = mode;
  return rep;
}

inline nlohmann::json to_json(const ClassificationReport& rep) {
  nlohmann::json j;
  j["classes"] = rep.classes.names();
  j["averaging_mode"] = to_string(rep.mode);
  j["accuracy"] = rep.accuracy;
  j["avg_precision"] = rep.averaged.precision;
  j["avg_recall"] = rep.averaged.recall;
  j["f1"] = rep.averaged.f1;
  j["total"] = rep.confusion.total();
  auto conf = nlohmann::json::array();
  for (std::size_t i = 0; i < rep.confusion.size(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t k = 0; k < rep.confusion.size(); ++k) row.push_back(rep.confusion(i, k));
    conf.push_back(std::move(row));
  }
  j["confusion"] = std::move(conf);
  auto pc = nlohmann::json::array();
  for (std::size_t i = 0; i < rep.per_class.size(); ++i) {
    const auto& c = rep.per_class[i];
    pc.push_back({{"label", rep.classes.names()[i]},
                  {"precision", c.precision},
                  {"recall", c.recall},
                  {"f1", c.f1},
                  {"support", c.support},
                  {"zero_division", c.zero_division}});
  }
  j["per_class"] = std::move(pc);
  return j;
}

/// Human-readable classification report and confusion matrix.
inline std::string to_text(const ClassificationReport& rep) {
  std::size_t name_w = 12;
  for (const auto& n : rep.classes.names()) name_w = std::max(name_w, n.size() + 2);

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::setw(static_cast<int>(name_w)) << "" << std::setw(11) << "precision" << std::setw(9) << "recall"
     << std::setw(9) << "f1" << std::setw(10) << "support" << "\n";
  for (std::size_t i = 0; i < rep.per_class.size(); ++i) {
    const auto& c = rep.per_class[i];
    os << std::setw(static_cast<int>(name_w)) << rep.classes.names()[i] << std::setw(11) << c.precision
       << std::setw(9) << c.recall << std::setw(9) << c.f1 << std::setw(10) << c.support
       << (c.zero_division ? "  (zero division)" : "") << "\n";
  }
  os << "\n";
  os << std::setw(static_cast<int>(name_w)) << "accuracy" << std::setw(29) << rep.accuracy << std::setw(10)
     << rep.confusion.total() << "\n";
  os << std::setw(static_cast<int>(name_w)) << ("avg (" + std::string(to_string(rep.mode)) + ")")
     << std::setw(11) << rep.averaged.precision << std::setw(9) << rep.averaged.recall << std::setw(9)
     << rep.averaged.f1 << std::setw(10) << rep.confusion.total() << "\n\n";

  os << "confusion matrix (rows = true, columns = predicted)\n";
  os << std::setw(static_cast<int>(name_w)) << "";
  for (const auto& n : rep.classes.names()) os << std::setw(static_cast<int>(std::max<std::size_t>(n.size(), 6) + 2)) << n;
  os << "\n";
  for (std::size_t i = 0; i < rep.confusion.size(); ++i) {
    os << std::setw(static_cast<int>(name_w)) << rep.classes.names()[i];
    for (std::size_t k = 0; k < rep.confusion.size(); ++k) {
      const auto& n = rep.classes.names()[k];
      os << std::setw(static_cast<int>(std::max<std::size_t>(n.size(), 6) + 2)) << rep.confusion(i, k);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace binviz
