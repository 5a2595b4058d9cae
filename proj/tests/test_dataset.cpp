#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "structhash/dataset.hpp"

using namespace structhash;

namespace {

const std::string kDataDir = STRUCTHASH_TEST_DATA_DIR;

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST(LoadIdx, TinyFixtureRoundTrip) {
    const auto ds = load_idx(kDataDir + "/tiny/images-idx3-ubyte",
                             kDataDir + "/tiny/labels-idx1-ubyte");
    EXPECT_EQ(ds.count(), 2u);
    EXPECT_EQ(ds.dim, 784u);
    ASSERT_TRUE(ds.labels.has_value());
    EXPECT_EQ((*ds.labels)[0], 3);
    EXPECT_EQ((*ds.labels)[1], 7);
    for (std::size_t i = 0; i < ds.count(); ++i) {
        double norm = 0.0;
        for (double v : ds.row(i)) norm += v * v;
        EXPECT_NEAR(norm, 1.0, 1e-9);
    }
}

TEST(LoadIdx, WrongMagicNamesBothValues) {
    const auto path = temp_file("structhash_bad_magic.idx");
    std::string bytes = {0, 0, 8, 2};  // 0x00000802
    bytes += std::string(8, 0);
    write_file(path, bytes);
    try {
        load_idx(path.string());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("802"), std::string::npos);
        EXPECT_NE(msg.find("803"), std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST(LoadIdx, TruncationAndZeroImages) {
    // Header promises 1 image of 2x2 but provides a single byte.
    const auto path = temp_file("structhash_truncated.idx");
    std::string bytes = {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2};
    bytes += '\x05';
    write_file(path, bytes);
    EXPECT_THROW(load_idx(path.string()), ParseError);

    // All-zero image is rejected with its index.
    std::string zero = {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2};
    zero += std::string(4, 0);
    write_file(path, zero);
    try {
        load_idx(path.string());
        FAIL() << "expected domain_error";
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("image 0"), std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST(LoadCsv, BasicRows) {
    const auto path = temp_file("structhash_basic.csv");
    write_file(path, "1,0,0\n0,1,0\n");
    const auto ds = load_csv(path.string(), false);
    EXPECT_EQ(ds.count(), 2u);
    EXPECT_EQ(ds.dim, 3u);
    EXPECT_DOUBLE_EQ(ds.row(0)[0], 1.0);
    EXPECT_DOUBLE_EQ(ds.row(1)[1], 1.0);
    EXPECT_FALSE(ds.labels.has_value());
    std::filesystem::remove(path);
}

TEST(LoadCsv, NormalizesThreeFourFive) {
    const auto path = temp_file("structhash_345.csv");
    write_file(path, "3,4\n");
    const auto ds = load_csv(path.string(), false);
    EXPECT_DOUBLE_EQ(ds.row(0)[0], 0.6);
    EXPECT_DOUBLE_EQ(ds.row(0)[1], 0.8);
    std::filesystem::remove(path);
}

TEST(LoadCsv, LabelsInLastColumn) {
    const auto path = temp_file("structhash_labels.csv");
    write_file(path, "1,0,5\n0,2,9\n");
    const auto ds = load_csv(path.string(), true);
    EXPECT_EQ(ds.dim, 2u);
    ASSERT_TRUE(ds.labels.has_value());
    EXPECT_EQ((*ds.labels)[0], 5);
    EXPECT_EQ((*ds.labels)[1], 9);
    std::filesystem::remove(path);
}

TEST(LoadCsv, ErrorsCarryLineNumbers) {
    const auto path = temp_file("structhash_bad.csv");
    write_file(path, "1,2,3\n4,5\n");
    try {
        load_csv(path.string(), false);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    write_file(path, "1,2\n3,x\n");
    EXPECT_THROW(load_csv(path.string(), false), ParseError);
    write_file(path, "0,0\n");
    EXPECT_THROW(load_csv(path.string(), false), std::domain_error);
    std::filesystem::remove(path);
}

TEST(KnnEval, TrainEqualsTestGivesZeroError) {
    Dataset ds;
    ds.dim = 8;
    ds.labels.emplace();
    rng::GaussianStream gs(2);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> row(8);
        double norm = 0.0;
        for (auto& v : row) {
            v = gs.next();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : row) v /= norm;
        ds.data.insert(ds.data.end(), row.begin(), row.end());
        ds.labels->push_back(i % 4);
    }
    const Pipeline pipeline(make_spec(MatrixKind::Random, 64, 8), HashMode::Short, 5);
    const auto report = knn_eval(ds, ds, pipeline);
    EXPECT_EQ(report.error_rate, 0.0);
    EXPECT_EQ(report.k, 64u);
    EXPECT_EQ(angular_1nn_error(ds, ds), 0.0);
}

TEST(KnnEval, ValidatesInputs) {
    Dataset unlabeled;
    unlabeled.dim = 4;
    unlabeled.data = {1, 0, 0, 0};
    const Pipeline pipeline(make_spec(MatrixKind::Random, 8, 4), HashMode::Short, 5);
    EXPECT_THROW(knn_eval(unlabeled, unlabeled, pipeline), std::invalid_argument);
    Dataset labeled = unlabeled;
    labeled.labels = std::vector<int>{1};
    Dataset mismatch;
    mismatch.dim = 3;
    mismatch.data = {1, 0, 0};
    mismatch.labels = std::vector<int>{0};
    EXPECT_THROW(knn_eval(labeled, mismatch, pipeline), std::invalid_argument);
}

TEST(KnnEval, DeterministicAcrossThreadCounts) {
    const auto train = load_idx(kDataDir + "/digits/train-images-idx3-ubyte",
                                kDataDir + "/digits/train-labels-idx1-ubyte");
    Dataset small_train;
    small_train.dim = train.dim;
    small_train.labels.emplace();
    for (std::size_t i = 0; i < 200; ++i) {
        auto row = train.row(i);
        small_train.data.insert(small_train.data.end(), row.begin(), row.end());
        small_train.labels->push_back((*train.labels)[i]);
    }
    Dataset small_test;
    small_test.dim = train.dim;
    small_test.labels.emplace();
    for (std::size_t i = 200; i < 260; ++i) {
        auto row = train.row(i);
        small_test.data.insert(small_test.data.end(), row.begin(), row.end());
        small_test.labels->push_back((*train.labels)[i]);
    }
    const Pipeline pipeline(make_spec(MatrixKind::Toeplitz, 256, train.dim), HashMode::Extended,
                            42);
    const auto a = knn_eval(small_train, small_test, pipeline, 1);
    const auto b = knn_eval(small_train, small_test, pipeline, 4);
    EXPECT_EQ(a.error_rate, b.error_rate);
    // Hashed 1-NN should do far better than the 90% chance level here.
    EXPECT_LT(a.error_rate, 0.5);
}
