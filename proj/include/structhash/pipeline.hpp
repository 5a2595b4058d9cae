#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "structhash/matrix.hpp"
#include "structhash/parallel.hpp"
#include "structhash/rng.hpp"
#include "structhash/transforms.hpp"

namespace structhash {

enum class HashMode { Short, Extended };

inline const char* to_string(HashMode mode) {
    return mode == HashMode::Short ? "short" : "extended";
}

inline HashMode hash_mode_from_string(const std::string& s) {
    if (s == "short") return HashMode::Short;
    if (s == "extended") return HashMode::Extended;
    throw std::invalid_argument("unknown mode: " + s);
}

// ---------------------------------------------------------------------------
// Binary hashes
// ---------------------------------------------------------------------------

// k-bit code packed into 64-bit words; bit i set means hash coordinate i is
// +1. Padding bits beyond k are zero.
struct BinaryHash {
    std::size_t k = 0;
    std::vector<std::uint64_t> words;

    static std::size_t words_for(std::size_t k) { return (k + 63) / 64; }

    bool bit(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }

    void set_bit(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }

    bool operator==(const BinaryHash&) const = default;
};

// Elementwise sign with the convention sign(0) = +1.
inline std::vector<std::int8_t> sign_phi(std::span<const double> v) {
    std::vector<std::int8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] >= 0.0 ? 1 : -1;
    return out;
}

inline BinaryHash pack_signs(std::span<const double> v) {
    BinaryHash h;
    h.k = v.size();
    h.words.assign(BinaryHash::words_for(v.size()), 0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] >= 0.0) h.set_bit(i);
    return h;
}

inline std::size_t hamming(const BinaryHash& a, const BinaryHash& b) {
    if (a.k != b.k) throw std::invalid_argument("hamming: hash sizes differ");
    std::size_t d = 0;
    for (std::size_t w = 0; w < a.words.size(); ++w)
        d += static_cast<std::size_t>(std::popcount(a.words[w] ^ b.words[w]));
    return d;
}

// Normalized approximate angle in [0, 1]: Hamming distance / k, which equals
// (1/2k)*||h(p) - h(r)||_1 for +-1-valued hashes. Multiply by pi for radians.
inline double approx_angle(const BinaryHash& a, const BinaryHash& b) {
    return static_cast<double>(hamming(a, b)) / static_cast<double>(a.k);
}

inline double approx_angle_radians(const BinaryHash& a, const BinaryHash& b) {
    return std::numbers::pi * approx_angle(a, b);
}

// Exact angle between two nonzero vectors, in [0, pi].
inline double true_angle(std::span<const double> p, std::span<const double> r) {
    if (p.size() != r.size()) throw std::invalid_argument("true_angle: dimension mismatch");
    double dot = 0.0, np = 0.0, nr = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * r[i];
        np += p[i] * p[i];
        nr += r[i] * r[i];
    }
    if (np == 0.0 || nr == 0.0) throw std::domain_error("true_angle: zero vector");
    double c = dot / (std::sqrt(np) * std::sqrt(nr));
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

// ---------------------------------------------------------------------------
// Hashing pipelines
// ---------------------------------------------------------------------------

// Short pipeline: x -> D -> P -> sign. Extended pipeline: x (zero-padded to
// the next power of two) -> R -> H -> D -> P -> sign, with P built over the
// padded dimension. The pool, R, D and BinPerm permutation streams are
// derived from master_seed with the fixed stream ids in rng.hpp.
struct PipelineConfig {
    HashMode mode = HashMode::Short;
    MatrixSpec spec;
    std::uint64_t master_seed = 0;
    std::size_t padded_n = 0;  // extended mode only; smallest power of two >= spec.n
};

inline PipelineConfig make_pipeline_config(MatrixSpec spec, HashMode mode,
                                           std::uint64_t master_seed) {
    PipelineConfig cfg;
    cfg.mode = mode;
    cfg.spec = spec;
    cfg.master_seed = master_seed;
    cfg.padded_n = mode == HashMode::Extended ? detail::next_pow2(spec.n) : 0;
    return cfg;
}

class Pipeline {
public:
    explicit Pipeline(const PipelineConfig& cfg) : cfg_(cfg) {
        cfg_.spec.validate();
        working_n_ = cfg.mode == HashMode::Extended ? detail::next_pow2(cfg.spec.n) : cfg.spec.n;
        if (cfg.mode == HashMode::Extended && cfg.padded_n != 0 && cfg.padded_n != working_n_)
            throw std::invalid_argument("PipelineConfig: padded_n must be the next power of two >= n");
        cfg_.padded_n = cfg.mode == HashMode::Extended ? working_n_ : 0;

        proj_spec_ = cfg_.spec;
        proj_spec_.n = working_n_;
        proj_spec_.seed = rng::derive_stream(cfg_.master_seed, rng::kStreamPerm);
        if (proj_spec_.kind == MatrixKind::HalfShift && working_n_ % 2 != 0)
            throw std::invalid_argument("Pipeline: HalfShift requires even working dimension");

        pool_ = gen_pool(rng::derive_stream(cfg_.master_seed, rng::kStreamPool),
                         pool_size_required(proj_spec_));
        diag_d_ = SignDiagonal::generate(working_n_,
                                         rng::derive_stream(cfg_.master_seed, rng::kStreamDiagD));
        if (cfg_.mode == HashMode::Extended)
            diag_r_ = SignDiagonal::generate(working_n_,
                                             rng::derive_stream(cfg_.master_seed, rng::kStreamDiagR));

        // Circulant and Toeplitz projections go through the FFT fast path;
        // the other kinds use the dense reference product.
        if (proj_spec_.kind != MatrixKind::Circulant && proj_spec_.kind != MatrixKind::Toeplitz)
            dense_ = materialize(build_index_sets(proj_spec_), pool_);
    }

    Pipeline(MatrixSpec spec, HashMode mode, std::uint64_t master_seed)
        : Pipeline(make_pipeline_config(spec, mode, master_seed)) {}

    const PipelineConfig& config() const { return cfg_; }
    std::size_t input_dim() const { return cfg_.spec.n; }
    std::size_t hash_bits() const { return cfg_.spec.k; }
    std::size_t working_dim() const { return working_n_; }
    const GaussianPool& pool() const { return pool_; }

    BinaryHash hash(std::span<const double> x) const {
        if (x.size() != cfg_.spec.n)
            throw std::invalid_argument("hash: input dimension mismatch");
        bool nonzero = false;
        for (double v : x)
            if (v != 0.0) { nonzero = true; break; }
        if (!nonzero) throw std::domain_error("hash: zero vector");

        std::vector<double> v(working_n_, 0.0);
        std::copy(x.begin(), x.end(), v.begin());
        if (cfg_.mode == HashMode::Extended) {
            apply_diagonal_inplace(diag_r_, v);
            fwht_normalized_inplace(v);
        }
        apply_diagonal_inplace(diag_d_, v);
        return pack_signs(project(v));
    }

    std::vector<BinaryHash> hash_batch(const std::vector<std::vector<double>>& rows,
                                       unsigned threads = 0) const {
        std::vector<BinaryHash> out(rows.size());
        parallel_for(rows.size(), threads, [&](std::size_t i) { out[i] = hash(rows[i]); });
        return out;
    }

private:
    std::vector<double> project(std::span<const double> v) const {
        const std::size_t k = proj_spec_.k;
        switch (proj_spec_.kind) {
            case MatrixKind::Circulant:
                return detail::circulant_apply(std::span<const double>(pool_.values), v, k,
                                               proj_spec_.shift_dir == ShiftDir::Right);
            case MatrixKind::Toeplitz:
                return detail::toeplitz_apply(std::span<const double>(pool_.values), v, k);
            default:
                return naive_matvec(dense_, v);
        }
    }

    PipelineConfig cfg_;
    MatrixSpec proj_spec_;
    std::size_t working_n_ = 0;
    GaussianPool pool_;
    SignDiagonal diag_r_;
    SignDiagonal diag_d_;
    DenseMatrix dense_;
};

}  // namespace structhash
