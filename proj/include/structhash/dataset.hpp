#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "structhash/io.hpp"
#include "structhash/parallel.hpp"
#include "structhash/pipeline.hpp"

namespace structhash {

// Collection of L2-normalized row vectors with optional integer labels.
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> data;  // row-major, count x dim
    std::optional<std::vector<int>> labels;

    std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

namespace detail {

inline std::uint32_t read_be_u32(std::istream& in, const std::string& path, std::size_t offset) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw ParseError(path + ": truncated at byte " + std::to_string(offset));
    return std::uint32_t(b[0]) << 24 | std::uint32_t(b[1]) << 16 | std::uint32_t(b[2]) << 8 |
           std::uint32_t(b[3]);
}

// Normalizes one row in place; returns false if the row is all zeros.
inline bool normalize_row(std::span<double> row) {
    double norm = 0.0;
    for (double v : row) norm += v * v;
    if (norm == 0.0) return false;
    norm = std::sqrt(norm);
    for (auto& v : row) v /= norm;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// IDX (MNIST container) loader
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Big-endian IDX files: images are a 3-dimensional u8 tensor (count, rows,
// cols); labels a 1-dimensional u8 tensor. Pixels are scaled to [0,1] and
// each image L2-normalized. All-zero images are rejected with their index.
inline Dataset load_idx(const std::string& images_path,
                        const std::optional<std::string>& labels_path = std::nullopt) {
    std::ifstream in(images_path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + images_path);
    const std::uint32_t magic = detail::read_be_u32(in, images_path, 0);
    if (magic != kIdxImagesMagic) {
        std::ostringstream msg;
        msg << images_path << ": bad magic 0x" << std::hex << magic << " at byte 0 (expected 0x"
            << kIdxImagesMagic << ")";
        throw ParseError(msg.str());
    }
    const std::uint32_t count = detail::read_be_u32(in, images_path, 4);
    const std::uint32_t rows = detail::read_be_u32(in, images_path, 8);
    const std::uint32_t cols = detail::read_be_u32(in, images_path, 12);
    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    if (dim == 0) throw ParseError(images_path + ": zero image dimensions");

    Dataset ds;
    ds.dim = dim;
    ds.data.resize(static_cast<std::size_t>(count) * dim);
    std::vector<unsigned char> buf(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim));
        if (!in)
            throw ParseError(images_path + ": truncated at byte " +
                             std::to_string(16 + static_cast<std::size_t>(i) * dim));
        double* row = ds.data.data() + static_cast<std::size_t>(i) * dim;
        for (std::size_t j = 0; j < dim; ++j) row[j] = buf[j] / 255.0;
        if (!detail::normalize_row({row, dim}))
            throw std::domain_error(images_path + ": image " + std::to_string(i) +
                                    " is all zeros");
    }

    if (labels_path) {
        std::ifstream lin(*labels_path, std::ios::binary);
        if (!lin) throw ParseError("cannot open: " + *labels_path);
        const std::uint32_t lmagic = detail::read_be_u32(lin, *labels_path, 0);
        if (lmagic != kIdxLabelsMagic) {
            std::ostringstream msg;
            msg << *labels_path << ": bad magic 0x" << std::hex << lmagic
                << " at byte 0 (expected 0x" << kIdxLabelsMagic << ")";
            throw ParseError(msg.str());
        }
        const std::uint32_t lcount = detail::read_be_u32(lin, *labels_path, 4);
        if (lcount != count)
            throw ParseError(*labels_path + ": label count " + std::to_string(lcount) +
                             " does not match image count " + std::to_string(count));
        std::vector<unsigned char> lbuf(lcount);
        lin.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(lcount));
        if (!lin) throw ParseError(*labels_path + ": truncated label data");
        ds.labels = std::vector<int>(lbuf.begin(), lbuf.end());
    }
    return ds;
}

// ---------------------------------------------------------------------------
// CSV loader
// ---------------------------------------------------------------------------

// Rectangular numeric CSV; when has_labels the last column is an integer
// label. Rows are L2-normalized.
inline Dataset load_csv(const std::string& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    Dataset ds;
    if (has_labels) ds.labels.emplace();
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    std::vector<double> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        fields.clear();
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            const std::string cell = line.substr(pos, comma - pos);
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                fields.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(path + ": line " + std::to_string(line_no) +
                                 ": non-numeric cell '" + cell + "'");
            }
            pos = comma + 1;
        }
        if (columns == 0) {
            columns = fields.size();
            if (has_labels && columns < 2)
                throw ParseError(path + ": need at least one feature column plus a label");
            ds.dim = has_labels ? columns - 1 : columns;
        } else if (fields.size() != columns) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns) + " cells, got " +
                             std::to_string(fields.size()));
        }
        if (has_labels) {
            const double lab = fields.back();
            fields.pop_back();
            ds.labels->push_back(static_cast<int>(std::llround(lab)));
        }
        const std::size_t at = ds.data.size();
        ds.data.insert(ds.data.end(), fields.begin(), fields.end());
        if (!detail::normalize_row({ds.data.data() + at, ds.dim}))
            throw std::domain_error(path + ": line " + std::to_string(line_no) +
                                    " is a zero vector");
    }
    if (ds.count() == 0) throw ParseError(path + ": no data rows");
    return ds;
}

// ---------------------------------------------------------------------------
// 1-NN evaluation
// ---------------------------------------------------------------------------

struct KnnReport {
    MatrixKind kind = MatrixKind::Random;
    HashMode mode = HashMode::Short;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    double error_rate = 0.0;
};

// Hashes both sets once with the shared pipeline and classifies each test
// point by the label of the Hamming-nearest training hash (ties broken by
// the lowest training index).
inline KnnReport knn_eval(const Dataset& train, const Dataset& test, const Pipeline& pipeline,
                          unsigned threads = 0) {
    if (!train.labels || !test.labels)
        throw std::invalid_argument("knn_eval: both datasets need labels");
    if (train.dim != pipeline.input_dim() || test.dim != pipeline.input_dim())
        throw std::invalid_argument("knn_eval: dataset dimension does not match the pipeline");
    if (train.count() == 0 || test.count() == 0)
        throw std::invalid_argument("knn_eval: empty dataset");

    auto hash_all = [&](const Dataset& ds) {
        std::vector<BinaryHash> hashes(ds.count());
        parallel_for(ds.count(), threads,
                     [&](std::size_t i) { hashes[i] = pipeline.hash(ds.row(i)); });
        return hashes;
    };
    const auto train_hashes = hash_all(train);
    const auto test_hashes = hash_all(test);

    std::vector<unsigned char> wrong(test.count(), 0);
    parallel_for(test.count(), threads, [&](std::size_t i) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < train_hashes.size(); ++j) {
            const std::size_t d = hamming(test_hashes[i], train_hashes[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        wrong[i] = (*train.labels)[best_j] != (*test.labels)[i];
    });

    KnnReport report;
    report.kind = pipeline.config().spec.kind;
    report.mode = pipeline.config().mode;
    report.n = pipeline.input_dim();
    report.k = pipeline.hash_bits();
    report.train_count = train.count();
    report.test_count = test.count();
    std::size_t errors = 0;
    for (auto w : wrong) errors += w;
    report.error_rate = static_cast<double>(errors) / static_cast<double>(test.count());
    return report;
}

// Reference 1-NN on exact angular distance (equivalently, maximum dot
// product for unit rows). Same tie-break rule as the hashed path.
inline double angular_1nn_error(const Dataset& train, const Dataset& test, unsigned threads = 0) {
    if (!train.labels || !test.labels)
        throw std::invalid_argument("angular_1nn_error: both datasets need labels");
    if (train.dim != test.dim)
        throw std::invalid_argument("angular_1nn_error: dimension mismatch");
    std::vector<unsigned char> wrong(test.count(), 0);
    parallel_for(test.count(), threads, [&](std::size_t i) {
        auto q = test.row(i);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < train.count(); ++j) {
            auto r = train.row(j);
            double dot = 0.0;
            for (std::size_t d = 0; d < train.dim; ++d) dot += q[d] * r[d];
            if (dot > best) {
                best = dot;
                best_j = j;
            }
        }
        wrong[i] = (*train.labels)[best_j] != (*test.labels)[i];
    });
    std::size_t errors = 0;
    for (auto w : wrong) errors += w;
    return static_cast<double>(errors) / static_cast<double>(test.count());
}

}  // namespace structhash
