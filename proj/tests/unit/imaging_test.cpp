#include <support/test_support.hpp>

#include <gtest/gtest.h>

#include <numeric>

using namespace binviz;

namespace {

SampleRecord record(std::vector<std::uint8_t> payload, std::string id = "s", std::string label = "a") {
  return {std::move(id), std::move(payload), std::move(label)};
}

ConversionConfig native(std::size_t width, std::size_t window = 256) {
  ConversionConfig cfg;
  cfg.width = width;
  cfg.entropy_window = window;
  cfg.resize_to.reset();
  return cfg;
}

}  // namespace

TEST(Convert, TenBytesWidthFourIsFourByThree) {
  std::vector<std::uint8_t> p(10);
  std::iota(p.begin(), p.end(), 1);
  const auto img = convert(record(p), native(4));
  EXPECT_EQ(img.width, 4u);
  EXPECT_EQ(img.height, 3u);
  for (std::size_t ch = 0; ch < kChannels; ++ch) {
    EXPECT_EQ(img.at(2, 2, ch), 0);
    EXPECT_EQ(img.at(2, 3, ch), 0);
  }
  EXPECT_EQ(img.at(2, 1, 0), 10);
}

TEST(Convert, FullAlphabetEnumeratesRowMajor) {
  std::vector<std::uint8_t> p(256);
  std::iota(p.begin(), p.end(), 0);
  const auto img = convert(record(p), native(16));
  ASSERT_EQ(img.height, 16u);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(img.at(r, c, 0), r * 16 + c);
  }
}

TEST(Convert, LayoutAndChannelsMatchDefinitions) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + gen() % 5000;
    const std::size_t width = 1 + gen() % 300;
    const std::size_t window = 2 + gen() % 512;
    auto p = binviz::testing::low_entropy_bytes(gen, n, 1 + static_cast<unsigned>(gen() % 40));
    const auto img = convert(record(p, "id" + std::to_string(trial)), native(width, window));
    ASSERT_EQ(img.width, width);
    ASSERT_EQ(img.height, (n + width - 1) / width);
    ASSERT_GE(img.width * img.height, n);
    EXPECT_FALSE(img.lineage);
    for (std::size_t j = 0; j < img.width * img.height; ++j) {
      const std::size_t r = j / width, c = j % width;
      if (j < n) {
        ASSERT_EQ(img.at(r, c, 0), p[j]);
        ASSERT_EQ(img.at(r, c, 1), binviz::testing::entropy_oracle(p, j, window));
      } else {
        ASSERT_EQ(img.at(r, c, 0), 0);
        ASSERT_EQ(img.at(r, c, 1), 0);
      }
      ASSERT_EQ(img.at(r, c, 2), 0);
    }
  }
}

TEST(Convert, ResizedImageKeepsZeroBlueChannel) {
  std::mt19937_64 gen(11);
  auto p = binviz::testing::random_bytes(gen, 4000);
  ConversionConfig cfg;  // defaults: width 256, resize 256x256
  const auto img = convert(record(p), cfg);
  EXPECT_EQ(img.width, 256u);
  EXPECT_EQ(img.height, 256u);
  for (std::size_t i = 2; i < img.pixels.size(); i += 3) ASSERT_EQ(img.pixels[i], 0);
}

TEST(Convert, IsDeterministic) {
  std::mt19937_64 gen(12);
  auto rec = record(binviz::testing::random_bytes(gen, 3000));
  ConversionConfig cfg;
  cfg.resize_to = ImageSize{64, 48};
  EXPECT_EQ(convert(rec, cfg).pixels, convert(rec, cfg).pixels);
}

TEST(Convert, RejectsInvalidInput) {
  EXPECT_THROW(convert(record({}), native(4)), SampleError);
  EXPECT_THROW(convert(record({1, 2, 3}), native(0)), ValidationError);
  EXPECT_THROW(convert(record({1, 2, 3}), native(4, 1)), ValidationError);
  ConversionConfig small;
  small.resize_to = ImageSize{4, 4};
  EXPECT_THROW(convert(record({1, 2, 3}), small), ValidationError);
  EXPECT_THROW(convert(record(std::vector<std::uint8_t>(100, 1)), native(4), 50), SampleError);
}

TEST(ResizeBilinear, IdentityWhenSizeUnchanged) {
  std::mt19937_64 gen(3);
  auto img = binviz::testing::random_image(gen, 17, 9, "x", "a");
  EXPECT_EQ(resize_bilinear(img, {17, 9}).pixels, img.pixels);
}

TEST(ResizeBilinear, ConstantImageStaysConstant) {
  Image img(5, 3);
  for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
    img.pixels[i] = 200;
    img.pixels[i + 1] = 17;
  }
  auto out = resize_bilinear(img, {32, 40});
  for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
    ASSERT_EQ(out.pixels[i], 200);
    ASSERT_EQ(out.pixels[i + 1], 17);
    ASSERT_EQ(out.pixels[i + 2], 0);
  }
}

TEST(ResizeBilinear, UpsampleInterpolatesBetweenNeighbours) {
  // 2x1 image [0, 100] -> 4x1: source x = (i + .5) / 2 - .5 = -0.25, 0.25, 0.75, 1.25
  Image img(2, 1);
  img.at(0, 1, 0) = 100;
  auto out = resize_bilinear(img, {4, 1});
  EXPECT_EQ(out.at(0, 0, 0), 0);
  EXPECT_EQ(out.at(0, 1, 0), 25);
  EXPECT_EQ(out.at(0, 2, 0), 75);
  EXPECT_EQ(out.at(0, 3, 0), 100);
}
