// binviz - binary-to-image conversion and noise augmentation pipeline
// Majority-class trainer honoring the trainer contract. Used by the tests
// and for dry runs of `binviz sweep`.

#include <binviz/manifest.hpp>
#include <binviz/metrics.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Predicts the most frequent training label for every test image"};
  binviz::fs::path train, test, out;
  app.add_option("--train", train, "Training manifest")->required()->check(CLI::ExistingFile);
  app.add_option("--test", test, "Test manifest")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "Predictions CSV")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto train_m = binviz::read_manifest(train);
    const auto test_m = binviz::read_manifest(test);
    if (!(train_m.classes == test_m.classes)) throw binviz::ValidationError("train and test class sets differ");
    if (train_m.entries.empty()) throw binviz::ValidationError("training manifest is empty");

    // Ties go to the class listed first.
    const auto hist = train_m.class_histogram();
    std::string majority = train_m.classes.names().front();
    for (const auto& name : train_m.classes.names()) {
      if (hist.at(name) > hist.at(majority)) majority = name;
    }

    std::vector<binviz::PredictionRow> rows;
    for (const auto& e : test_m.entries) rows.push_back({e.path, e.label, majority});
    binviz::write_text_file(out, binviz::write_predictions_csv(rows));
  } catch (const std::exception& e) {
    std::cerr << "stub trainer: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
