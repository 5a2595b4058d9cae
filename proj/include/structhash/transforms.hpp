#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "structhash/matrix.hpp"
#include "structhash/rng.hpp"

namespace structhash {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 complex FFT, in place. len must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

// Circular cross-correlation corr[tau] = sum_u a[u] * b[(u - tau) mod L],
// L = padded power-of-two length >= max(|a|, |b|) as chosen by the caller.
inline std::vector<double> circular_correlation(std::span<const double> a,
                                                std::span<const double> b, std::size_t L) {
    std::vector<std::complex<double>> fa(L), fb(L);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < L; ++i) fa[i] *= std::conj(fb[i]);
    fft_inplace(fa, true);
    std::vector<double> out(L);
    for (std::size_t i = 0; i < L; ++i) out[i] = fa[i].real();
    return out;
}

// Right-shift circulant product for any number of output rows (rows repeat
// with period n). Used by the hashing pipeline, which may have k > n.
inline std::vector<double> circulant_apply(std::span<const double> first_row,
                                           std::span<const double> x, std::size_t k,
                                           bool right_shift) {
    const std::size_t n = first_row.size();
    // y_i = sum_m c_m x[(i+m) mod n]: correlate the doubled input with c.
    std::vector<double> xe(2 * n);
    for (std::size_t i = 0; i < n; ++i) xe[i] = xe[i + n] = x[i];
    const std::size_t L = next_pow2(2 * n);
    // corr[tau] = sum_u xe[u] c[(u - tau) mod L]; with tau = i this picks up
    // exactly sum_m c_m x[(i+m) mod n].
    auto corr = circular_correlation(xe, first_row, L);
    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t r = i % n;
        y[i] = right_shift ? corr[r] : corr[(n - r) % n];
    }
    return y;
}

// Toeplitz product without the k <= n restriction on the public wrapper.
inline std::vector<double> toeplitz_apply(std::span<const double> diagonals,
                                          std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    if (diagonals.size() != n + k - 1)
        throw std::invalid_argument("toeplitz: diagonals must have length n + k - 1");
    const std::size_t L = next_pow2(n + k - 1);
    // T[i][j] = d[j - i + k - 1]; y_i = corr(d, x)[k - 1 - i].
    auto corr = circular_correlation(diagonals, x, L);
    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) y[i] = corr[k - 1 - i];
    return y;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Walsh-Hadamard
// ---------------------------------------------------------------------------

// In-place normalized fast Walsh-Hadamard transform (Sylvester ordering,
// scaled by 1/sqrt(n)): orthogonal, symmetric, hence an involution.
inline void fwht_normalized_inplace(std::span<double> x) {
    const std::size_t n = x.size();
    if (!detail::is_power_of_two(n))
        throw std::invalid_argument("fwht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = x[j];
                const double b = x[j + h];
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : x) v *= scale;
}

inline std::vector<double> fwht_normalized(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    fwht_normalized_inplace(out);
    return out;
}

// ---------------------------------------------------------------------------
// Sign diagonals
// ---------------------------------------------------------------------------

// Diagonal matrix with entries drawn uniformly from {-1, +1}.
struct SignDiagonal {
    std::size_t n = 0;
    std::vector<std::int8_t> signs;
    std::uint64_t seed = 0;

    static SignDiagonal generate(std::size_t n, std::uint64_t seed) {
        SignDiagonal d;
        d.n = n;
        d.seed = seed;
        d.signs.resize(n);
        rng::SplitMix64 g(seed);
        for (std::size_t i = 0; i < n; ++i) d.signs[i] = (g.next() >> 63) ? 1 : -1;
        return d;
    }
};

inline void apply_diagonal_inplace(const SignDiagonal& d, std::span<double> x) {
    if (x.size() != d.n) throw std::invalid_argument("apply_diagonal: length mismatch");
    for (std::size_t i = 0; i < d.n; ++i) x[i] *= d.signs[i];
}

inline std::vector<double> apply_diagonal(const SignDiagonal& d, std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    apply_diagonal_inplace(d, out);
    return out;
}

// ---------------------------------------------------------------------------
// Matrix-vector products
// ---------------------------------------------------------------------------

// First k entries of C*x where C is the circulant matrix generated by
// first_row with the right-shift convention: C[i][j] = first_row[(j-i) mod n].
inline std::vector<double> circulant_matvec_fft(std::span<const double> first_row,
                                                std::span<const double> x, std::size_t k) {
    const std::size_t n = first_row.size();
    if (x.size() != n) throw std::invalid_argument("circulant_matvec_fft: length mismatch");
    if (k > n) throw std::invalid_argument("circulant_matvec_fft: k must be <= n");
    if (k == 0) throw std::invalid_argument("circulant_matvec_fft: k must be >= 1");
    return detail::circulant_apply(first_row, x, k, /*right_shift=*/true);
}

// Product of the k x n Toeplitz matrix T[i][j] = diagonals[(j-i) + (k-1)]
// with x, via embedding into a power-of-two circulant.
inline std::vector<double> toeplitz_matvec_fft(std::span<const double> diagonals,
                                               std::span<const double> x, std::size_t k) {
    if (k == 0) throw std::invalid_argument("toeplitz_matvec_fft: k must be >= 1");
    if (k > x.size()) throw std::invalid_argument("toeplitz_matvec_fft: k must be <= n");
    return detail::toeplitz_apply(diagonals, x, k);
}

// Reference oracle: exact row-by-row dot products.
inline std::vector<double> naive_matvec(const DenseMatrix& m, std::span<const double> x) {
    if (x.size() != m.n) throw std::invalid_argument("naive_matvec: dimension mismatch");
    std::vector<double> y(m.k, 0.0);
    for (std::size_t i = 0; i < m.k; ++i) {
        double sum = 0.0;
        const double* row = m.entries.data() + i * m.n;
        for (std::size_t j = 0; j < m.n; ++j) sum += row[j] * x[j];
        y[i] = sum;
    }
    return y;
}

}  // namespace structhash
