#include <gradpres/dataset.hpp>
#include <gradpres/feature_io.hpp>
#include <gradpres/visualize.hpp>
#include <gtest/gtest.h>
#include <png.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace gradpres;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               (std::string("gradpres_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir_;
};

GrayImage noise_image(std::size_t H, std::size_t W, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return GrayImage::generate(H, W, [&](std::size_t, std::size_t) { return u(rng); });
}

void write_bytes(const fs::path& p, const std::string& data) {
    std::ofstream(p, std::ios::binary) << data;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct Collect {
    std::vector<std::string> messages;
    WarningSink sink() {
        return [this](const std::string& m) { messages.push_back(m); };
    }
};

} // namespace

using ImageIo = TempDir;

TEST_F(ImageIo, RoundTripWithinQuantization) {
    const auto img = noise_image(13, 17, 1);
    for (const char* name : {"a.pgm", "a.png"}) {
        save_image(img, dir_ / name);
        const auto back = load_image(dir_ / name);
        ASSERT_EQ(back.height(), 13u);
        ASSERT_EQ(back.width(), 17u);
        for (std::size_t i = 0; i < img.pixels().size(); ++i)
            EXPECT_LE(std::abs(back.pixels()[i] - img.pixels()[i]), 0.5 / 255.0 + 1e-12);
    }
}

TEST_F(ImageIo, ReloadIsLosslessAtByteResolution) {
    const auto img = noise_image(9, 9, 2);
    for (const char* name : {"b.pgm", "b.png"}) {
        save_image(img, dir_ / name);
        const auto once = load_image(dir_ / name);
        save_image(once, dir_ / name);
        EXPECT_EQ(load_image(dir_ / name), once);
    }
}

TEST_F(ImageIo, AllBlackPgm) {
    write_bytes(dir_ / "black.pgm", "P5\n# comment\n4 3\n255\n" + std::string(12, '\0'));
    const auto img = load_image(dir_ / "black.pgm");
    EXPECT_EQ(img.height(), 3u);
    EXPECT_EQ(img.width(), 4u);
    for (double v : img.pixels()) EXPECT_EQ(v, 0.0);
}

TEST_F(ImageIo, PgmByteLayout) {
    RealGrid g(3, 3, 1.0);
    g(0, 0) = 0.0;
    save_image(GrayImage(g), dir_ / "c.pgm");
    EXPECT_EQ(read_bytes(dir_ / "c.pgm"), "P5\n3 3\n255\n" + std::string(1, '\0') + std::string(8, '\xff'));
}

TEST_F(ImageIo, SixteenBitPgm) {
    std::string raster;
    for (int i = 0; i < 9; ++i) {
        const unsigned v = i == 4 ? 65535 : 32768;
        raster += char(v >> 8);
        raster += char(v & 0xff);
    }
    write_bytes(dir_ / "d.pgm", "P5 3 3 65535\n" + raster);
    const auto img = load_image(dir_ / "d.pgm");
    EXPECT_EQ(img(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(img(0, 0), 32768.0 / 65535.0);
}

TEST_F(ImageIo, TruncatedFileThrows) {
    write_bytes(dir_ / "t.pgm", "P5\n4 4\n255\n" + std::string(10, 'x'));
    try {
        load_image(dir_ / "t.pgm");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(e.path().find("t.pgm"), std::string::npos);
    }
    save_image(noise_image(8, 8, 3), dir_ / "t.png");
    const auto full = read_bytes(dir_ / "t.png");
    write_bytes(dir_ / "t.png", full.substr(0, full.size() / 2));
    EXPECT_THROW(load_image(dir_ / "t.png"), IoError);
}

TEST_F(ImageIo, GarbageAndMissingFiles) {
    write_bytes(dir_ / "g.pgm", "hello world");
    EXPECT_THROW(load_image(dir_ / "g.pgm"), IoError);
    write_bytes(dir_ / "g.png", "not a png at all");
    EXPECT_THROW(load_image(dir_ / "g.png"), IoError);
    EXPECT_THROW(load_image(dir_ / "missing.pgm"), IoError);
    EXPECT_THROW(load_image(dir_ / "x.jpg"), IoError);
    write_bytes(dir_ / "small.pgm", "P5 2 2 255\n" + std::string(4, '\0'));
    EXPECT_THROW(load_image(dir_ / "small.pgm"), IoError);
}

TEST_F(ImageIo, SaveNeedsParentDirectory) {
    EXPECT_THROW(save_image(noise_image(4, 4, 1), dir_ / "nope" / "x.pgm"), IoError);
    EXPECT_THROW(save_image(noise_image(4, 4, 1), dir_ / "x.tiff"), IoError);
}

TEST_F(ImageIo, ColorPpmConvertedToLuma) {
    std::string raster;
    for (int i = 0; i < 9; ++i) raster += std::string{char(255), char(0), char(0)};
    write_bytes(dir_ / "c.ppm", "P6 3 3 255\n" + raster);
    Collect c;
    const auto img = load_image(dir_ / "c.ppm", c.sink());
    for (double v : img.pixels()) EXPECT_NEAR(v, 0.299, 1e-12);
    EXPECT_EQ(c.messages.size(), 1u);
}

TEST_F(ImageIo, ColorPngConvertedToLuma) {
    std::vector<png_byte> rgb;
    for (int i = 0; i < 16; ++i) {
        rgb.push_back(0);
        rgb.push_back(255);
        rgb.push_back(0);
    }
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = 4;
    img.height = 4;
    img.format = PNG_FORMAT_RGB;
    ASSERT_TRUE(png_image_write_to_file(&img, (dir_ / "rgb.png").c_str(), 0, rgb.data(), 0, nullptr));
    Collect c;
    const auto g = load_image(dir_ / "rgb.png", c.sink());
    for (double v : g.pixels()) EXPECT_NEAR(v, 0.587, 1e-12);
    EXPECT_EQ(c.messages.size(), 1u);
}

using FeatureIo = TempDir;

TEST_F(FeatureIo, CsvRoundTripIsExact) {
    const std::vector<double> v{0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 0.999999999999};
    write_features(dir_ / "f.csv", v);
    EXPECT_EQ(read_features_csv(dir_ / "f.csv"), v);
    const auto text = read_bytes(dir_ / "f.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), long(v.size()));
}

TEST_F(FeatureIo, BinaryLayout) {
    const std::vector<double> v{1.0, -2.5};
    write_features(dir_ / "f.bin", v);
    const auto bytes = read_bytes(dir_ / "f.bin");
    ASSERT_EQ(bytes.size(), 8u + 16u);
    EXPECT_EQ(bytes.substr(0, 8), std::string("\x02\0\0\0\0\0\0\0", 8));
    // 1.0 = 0x3FF0000000000000, little-endian.
    EXPECT_EQ(bytes.substr(8, 8), std::string("\0\0\0\0\0\0\xf0\x3f", 8));
    EXPECT_EQ(read_features_binary(dir_ / "f.bin"), v);
}

TEST_F(FeatureIo, BinaryLengthMismatchThrows) {
    write_features(dir_ / "f.bin", std::vector<double>{1, 2, 3});
    const auto bytes = read_bytes(dir_ / "f.bin");
    write_bytes(dir_ / "f.bin", bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_features_binary(dir_ / "f.bin"), IoError);
}

TEST_F(FeatureIo, BadCsvThrows) {
    write_bytes(dir_ / "bad.csv", "0.5\nbanana\n");
    EXPECT_THROW(read_features_csv(dir_ / "bad.csv"), IoError);
}

using Dataset = TempDir;

TEST_F(Dataset, OrderingSkipAndExclude) {
    fs::create_directories(dir_ / "yaleB02");
    fs::create_directories(dir_ / "yaleB01");
    fs::create_directories(dir_ / "yaleB03");
    save_image(noise_image(8, 8, 1), dir_ / "yaleB02" / "a.pgm");
    save_image(noise_image(8, 8, 2), dir_ / "yaleB02" / "b.png");
    save_image(noise_image(8, 8, 3), dir_ / "yaleB01" / "a.pgm");
    save_image(noise_image(8, 8, 4), dir_ / "yaleB01" / "a_Ambient.pgm");
    write_bytes(dir_ / "yaleB01" / "broken.pgm", "P5 8 8 255\nxx");
    write_bytes(dir_ / "yaleB01" / "notes.txt", "ignored");
    write_bytes(dir_ / "yaleB03" / "broken.pgm", "P5");

    Collect c;
    const auto ds = load_dataset(dir_, {.exclude = {"Ambient"}}, c.sink());
    EXPECT_EQ(ds.manifest.class_names, (std::vector<std::string>{"yaleB01", "yaleB02"}));
    ASSERT_EQ(ds.images.size(), 3u);
    EXPECT_EQ(ds.images[0].label, 0);
    EXPECT_EQ(ds.images[1].label, 1);
    EXPECT_EQ(ds.manifest.entries[2].format, ImageFormat::PNG);
    EXPECT_EQ(ds.manifest.entries[0].relative_path, fs::path("yaleB01") / "a.pgm");
    EXPECT_EQ(ds.manifest.skipped.size(), 2u);
    EXPECT_EQ(c.messages.size(), 2u);
    EXPECT_EQ(ds.images[0].image, load_image(dir_ / "yaleB01" / "a.pgm"));
}

TEST_F(Dataset, WriteThenLoad) {
    const auto data = synth_dataset({.classes = 3, .per_class = 2, .size = 32});
    write_dataset(data, dir_ / "ds");
    const auto ds = load_dataset(dir_ / "ds");
    ASSERT_EQ(ds.images.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(ds.images[i].label, data[i].label);
}

TEST_F(Dataset, EmptyOrMissingRoot) {
    EXPECT_THROW(load_dataset(dir_ / "missing"), IoError);
    EXPECT_THROW(load_dataset(dir_), IoError);
}

using Visualize = TempDir;

TEST_F(Visualize, ZeroGdmIsMidGray) {
    const GradientDirectionMap m(RealGrid(5, 6, 0.0), 1e-8);
    for (auto b : render_gdm(m)) EXPECT_EQ(b, 128);
    save_gdm(m, dir_ / "g.png");
    const auto loaded = load_image(dir_ / "g.png");
    for (double v : loaded.pixels()) EXPECT_DOUBLE_EQ(v, 128.0 / 255.0);
}

TEST_F(Visualize, WhiteImageIsWhite) {
    for (auto b : render_image(GrayImage(4, 4, 1.0))) EXPECT_EQ(b, 255);
}

TEST_F(Visualize, PanelLayout) {
    const auto x = noise_image(10, 12, 1), y = noise_image(10, 12, 2);
    save_protection_panel(x, y, {}, dir_ / "p.png");
    const auto p = load_image(dir_ / "p.png");
    EXPECT_EQ(p.height(), 10u);
    EXPECT_EQ(p.width(), 3u * 12u + 8u);
    EXPECT_EQ(p(3, 12), 1.0); // gutter
    EXPECT_EQ(to_byte(p(3, 0)), to_byte(x(3, 0)));
    EXPECT_EQ(to_byte(p(3, 16)), to_byte(y(3, 0)));
}

TEST(Ssim, IdentityAndDifference) {
    const auto x = noise_image(20, 20, 1);
    EXPECT_NEAR(ssim(x, x), 1.0, 1e-12);
    EXPECT_LT(ssim(x, noise_image(20, 20, 2)), 0.2);
    EXPECT_THROW(ssim(x, noise_image(20, 21, 2)), ShapeMismatch);
}
