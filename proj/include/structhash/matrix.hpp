#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "structhash/rng.hpp"

namespace structhash {

// ---------------------------------------------------------------------------
// Randomness pool
// ---------------------------------------------------------------------------

// The pool of t independent standard normal values every structured matrix
// draws its entries from. Regeneration from the same seed is bit-exact.
struct GaussianPool {
    std::uint64_t seed = 0;
    std::size_t t = 0;
    std::vector<double> values;
};

inline GaussianPool gen_pool(std::uint64_t seed, std::size_t t) {
    if (t == 0) throw std::invalid_argument("gen_pool: t must be >= 1");
    GaussianPool pool;
    pool.seed = seed;
    pool.t = t;
    pool.values.resize(t);
    rng::GaussianStream gs(seed);
    for (std::size_t i = 0; i < t; ++i) pool.values[i] = gs.next();
    return pool;
}

// ---------------------------------------------------------------------------
// Matrix families
// ---------------------------------------------------------------------------

enum class MatrixKind {
    Circulant,
    Toeplitz,
    BinCirc,
    HalfShift,
    VerHorShift,
    BinPerm,
    Random,
};

enum class ShiftDir { Left, Right };

inline const char* to_string(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::Circulant: return "circulant";
        case MatrixKind::Toeplitz: return "toeplitz";
        case MatrixKind::BinCirc: return "bincirc";
        case MatrixKind::HalfShift: return "halfshift";
        case MatrixKind::VerHorShift: return "verhorshift";
        case MatrixKind::BinPerm: return "binperm";
        case MatrixKind::Random: return "random";
    }
    return "?";
}

inline MatrixKind matrix_kind_from_string(const std::string& s) {
    if (s == "circulant") return MatrixKind::Circulant;
    if (s == "toeplitz") return MatrixKind::Toeplitz;
    if (s == "bincirc") return MatrixKind::BinCirc;
    if (s == "halfshift") return MatrixKind::HalfShift;
    if (s == "verhorshift") return MatrixKind::VerHorShift;
    if (s == "binperm") return MatrixKind::BinPerm;
    if (s == "random") return MatrixKind::Random;
    throw std::invalid_argument("unknown matrix kind: " + s);
}

inline constexpr MatrixKind kAllMatrixKinds[] = {
    MatrixKind::Circulant,   MatrixKind::Toeplitz, MatrixKind::BinCirc,
    MatrixKind::HalfShift,   MatrixKind::VerHorShift,
    MatrixKind::BinPerm,     MatrixKind::Random,
};

// Parameters of one structured projection matrix: k rows (hash bits) by n
// columns (input dimension). block_len applies to BinCirc/BinPerm, the two
// shifts to VerHorShift, shift_dir to Circulant, seed to BinPerm row
// permutations. k > n is permitted: the constructions are well defined for
// any k, although the theory is stated for k <= n.
struct MatrixSpec {
    MatrixKind kind = MatrixKind::Toeplitz;
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t block_len = 0;   // BinCirc/BinPerm
    std::size_t h_shift = 0;     // VerHorShift
    std::size_t v_shift = 0;     // VerHorShift
    ShiftDir shift_dir = ShiftDir::Right;  // Circulant
    std::uint64_t seed = 0;      // BinPerm permutations

    void validate() const {
        if (k == 0 || n == 0) throw std::invalid_argument("MatrixSpec: k and n must be >= 1");
        if (kind == MatrixKind::BinCirc || kind == MatrixKind::BinPerm) {
            if (block_len == 0 || n % block_len != 0)
                throw std::invalid_argument("MatrixSpec: block_len must divide n");
        }
        if (kind == MatrixKind::HalfShift && n % 2 != 0)
            throw std::invalid_argument("MatrixSpec: HalfShift requires even n");
        if (kind == MatrixKind::VerHorShift) {
            if (h_shift == 0 || v_shift == 0)
                throw std::invalid_argument("MatrixSpec: VerHorShift shifts must be >= 1");
        }
    }
};

// Fills in the documented defaults for the parameters a kind needs:
// block_len = 4, h_shift = ceil(sqrt(n)), v_shift = 1.
inline MatrixSpec make_spec(MatrixKind kind, std::size_t k, std::size_t n,
                            std::uint64_t seed = 0) {
    MatrixSpec spec;
    spec.kind = kind;
    spec.k = k;
    spec.n = n;
    spec.seed = seed;
    if (kind == MatrixKind::BinCirc || kind == MatrixKind::BinPerm) {
        spec.block_len = (n % 4 == 0) ? 4 : 1;
    }
    if (kind == MatrixKind::VerHorShift) {
        spec.h_shift = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
        spec.v_shift = 1;
    }
    spec.validate();
    return spec;
}

// Plain-text key=value serialization (one pair per line).
inline std::string to_config_string(const MatrixSpec& spec) {
    std::ostringstream out;
    out << "kind=" << to_string(spec.kind) << "\n";
    out << "k=" << spec.k << "\n";
    out << "n=" << spec.n << "\n";
    if (spec.block_len != 0) out << "block_len=" << spec.block_len << "\n";
    if (spec.h_shift != 0) out << "h_shift=" << spec.h_shift << "\n";
    if (spec.v_shift != 0) out << "v_shift=" << spec.v_shift << "\n";
    if (spec.kind == MatrixKind::Circulant)
        out << "shift_dir=" << (spec.shift_dir == ShiftDir::Right ? "right" : "left") << "\n";
    out << "seed=" << spec.seed << "\n";
    return out.str();
}

inline MatrixSpec spec_from_config_string(const std::string& text) {
    MatrixSpec spec;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("spec config line " + std::to_string(line_no) +
                                        ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "kind") spec.kind = matrix_kind_from_string(value);
            else if (key == "k") spec.k = std::stoull(value);
            else if (key == "n") spec.n = std::stoull(value);
            else if (key == "block_len") spec.block_len = std::stoull(value);
            else if (key == "h_shift") spec.h_shift = std::stoull(value);
            else if (key == "v_shift") spec.v_shift = std::stoull(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "shift_dir") {
                if (value == "right") spec.shift_dir = ShiftDir::Right;
                else if (value == "left") spec.shift_dir = ShiftDir::Left;
                else throw std::invalid_argument("shift_dir must be left or right");
            } else {
                throw std::invalid_argument("unknown key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("spec config line " + std::to_string(line_no) +
                                        ": bad value for " + key);
        }
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Index-set representation
// ---------------------------------------------------------------------------

// Explicit representation of a structured matrix: cell (i,j) holds the set
// S(i,j) of pool indices whose values sum to that entry. Invariants: within a
// row all sets have equal size (the row weight), are pairwise disjoint, and
// every index is < t. Indices are 0-based.
class IndexSetMatrix {
public:
    IndexSetMatrix(std::size_t k, std::size_t n, std::size_t t,
                   const std::vector<std::vector<std::vector<std::uint32_t>>>& sets)
        : k_(k), n_(n), t_(t) {
        if (sets.size() != k) throw std::invalid_argument("IndexSetMatrix: row count mismatch");
        offsets_.reserve(k * n + 1);
        offsets_.push_back(0);
        row_weight_.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            if (sets[i].size() != n)
                throw std::invalid_argument("IndexSetMatrix: column count mismatch");
            row_weight_[i] = sets[i][0].size();
            for (std::size_t j = 0; j < n; ++j) {
                if (sets[i][j].size() != row_weight_[i])
                    throw std::invalid_argument("IndexSetMatrix: unequal set sizes within a row");
                for (auto idx : sets[i][j]) {
                    if (idx >= t_) throw std::invalid_argument("IndexSetMatrix: index out of pool range");
                    flat_.push_back(idx);
                }
                offsets_.push_back(static_cast<std::uint64_t>(flat_.size()));
            }
            check_row_disjoint(i);
        }
    }

    // Construction helper for the all-singleton families: cell (i,j) holds
    // exactly {index(i,j)}.
    template <typename IndexFn>
    static IndexSetMatrix singletons(std::size_t k, std::size_t n, std::size_t t, IndexFn index) {
        IndexSetMatrix m(k, n, t);
        m.flat_.resize(k * n);
        m.offsets_.resize(k * n + 1);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint32_t idx = index(i, j);
                if (idx >= t) throw std::invalid_argument("IndexSetMatrix: index out of pool range");
                m.flat_[i * n + j] = idx;
            }
        }
        for (std::size_t c = 0; c <= k * n; ++c) m.offsets_[c] = c;
        m.row_weight_.assign(k, 1);
        for (std::size_t i = 0; i < k; ++i) m.check_row_disjoint(i);
        return m;
    }

    std::size_t k() const { return k_; }
    std::size_t n() const { return n_; }
    std::size_t t() const { return t_; }
    std::size_t row_weight(std::size_t i) const { return row_weight_.at(i); }

    std::span<const std::uint32_t> set(std::size_t i, std::size_t j) const {
        const std::size_t cell = i * n_ + j;
        return {flat_.data() + offsets_[cell],
                static_cast<std::size_t>(offsets_[cell + 1] - offsets_[cell])};
    }

private:
    IndexSetMatrix(std::size_t k, std::size_t n, std::size_t t) : k_(k), n_(n), t_(t) {}

    void check_row_disjoint(std::size_t i) const {
        std::vector<std::uint32_t> all;
        all.reserve(n_ * row_weight_[i]);
        for (std::size_t j = 0; j < n_; ++j) {
            auto s = set(i, j);
            all.insert(all.end(), s.begin(), s.end());
        }
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end())
            throw std::invalid_argument("IndexSetMatrix: sets within a row must be disjoint");
    }

    std::size_t k_, n_, t_;
    std::vector<std::uint32_t> flat_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::size_t> row_weight_;
};

// Pool size needed by a family.
inline std::size_t pool_size_required(const MatrixSpec& spec) {
    switch (spec.kind) {
        case MatrixKind::Toeplitz: return spec.n + spec.k - 1;
        case MatrixKind::Random: return spec.k * spec.n;
        default: return spec.n;
    }
}

// Builds the index-set form of the family. All seven kinds emit singleton
// sets; the general constructor above accepts arbitrary weights for
// user-supplied families.
inline IndexSetMatrix build_index_sets(const MatrixSpec& spec) {
    spec.validate();
    const std::size_t k = spec.k, n = spec.n;
    const std::size_t t = pool_size_required(spec);
    auto u32 = [](std::size_t v) { return static_cast<std::uint32_t>(v); };

    switch (spec.kind) {
        case MatrixKind::Circulant: {
            // Row 0 is the identity pattern; each next row shifts the
            // previous one by one position, wrapping around.
            const bool right = spec.shift_dir == ShiftDir::Right;
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                const std::size_t r = i % n;
                return u32(right ? (j + n - r) % n : (j + r) % n);
            });
        }
        case MatrixKind::Toeplitz: {
            // One pool value per descending diagonal; offset k-1 keeps the
            // index nonnegative.
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                return u32(j + k - 1 - i);
            });
        }
        case MatrixKind::BinCirc: {
            const std::size_t blocks = n / spec.block_len;
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                const std::size_t b = j / spec.block_len;
                const std::size_t o = j % spec.block_len;
                const std::size_t src = (b + blocks - i % blocks) % blocks;
                return u32(src * spec.block_len + o);
            });
        }
        case MatrixKind::HalfShift: {
            // Swapping halves then right-shifting by one advances the source
            // position by n/2 - 1 per row.
            const std::size_t step = n / 2 - 1 + n;  // keep the sum nonnegative
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                return u32((j + (i % n) * step) % n);
            });
        }
        case MatrixKind::VerHorShift: {
            // Phase 1: row i is the right rotation of row i-1 by h_shift.
            // Phase 2: column j is rotated upward by v_shift*j positions.
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                const std::size_t src_row = (i + spec.v_shift * j) % k;
                const std::size_t shift = (src_row * spec.h_shift) % n;
                return u32((j + n - shift) % n);
            });
        }
        case MatrixKind::BinPerm: {
            const std::size_t blocks = n / spec.block_len;
            // Row 0 keeps the identity arrangement; every later row draws an
            // independent uniform permutation of the blocks from its own
            // substream of spec.seed.
            std::vector<std::vector<std::uint32_t>> perms(k);
            for (std::size_t i = 0; i < k; ++i) {
                if (i == 0) {
                    perms[i].resize(blocks);
                    for (std::size_t b = 0; b < blocks; ++b) perms[i][b] = u32(b);
                } else {
                    rng::SplitMix64 g(rng::derive_stream(spec.seed, i));
                    perms[i] = rng::random_permutation(blocks, g);
                }
            }
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                const std::size_t b = j / spec.block_len;
                const std::size_t o = j % spec.block_len;
                return u32(perms[i][b] * spec.block_len + o);
            });
        }
        case MatrixKind::Random: {
            return IndexSetMatrix::singletons(k, n, t, [&](std::size_t i, std::size_t j) {
                return u32(i * n + j);
            });
        }
    }
    throw std::logic_error("build_index_sets: unreachable");
}

// ---------------------------------------------------------------------------
// Dense form
// ---------------------------------------------------------------------------

struct DenseMatrix {
    std::size_t k = 0;
    std::size_t n = 0;
    std::vector<double> entries;  // row-major

    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
    std::span<const double> row(std::size_t i) const { return {entries.data() + i * n, n}; }
};

inline DenseMatrix materialize(const IndexSetMatrix& m, const GaussianPool& pool) {
    if (pool.t < m.t())
        throw std::invalid_argument("materialize: pool smaller than the matrix's index range");
    DenseMatrix dense;
    dense.k = m.k();
    dense.n = m.n();
    dense.entries.assign(m.k() * m.n(), 0.0);
    for (std::size_t i = 0; i < m.k(); ++i) {
        for (std::size_t j = 0; j < m.n(); ++j) {
            double sum = 0.0;
            for (auto idx : m.set(i, j)) sum += pool.values[idx];
            dense.entries[i * m.n() + j] = sum;
        }
    }
    return dense;
}

// ---------------------------------------------------------------------------
// Structure measurements
// ---------------------------------------------------------------------------

// The tight regularity parameter: the maximum over row pairs of the number
// of pool variables appearing in the same column of both rows. Brute force.
inline std::size_t psi_of(const IndexSetMatrix& m) {
    std::size_t psi = 0;
    for (std::size_t r1 = 0; r1 + 1 < m.k(); ++r1) {
        for (std::size_t r2 = r1 + 1; r2 < m.k(); ++r2) {
            std::size_t shared = 0;
            for (std::size_t j = 0; j < m.n(); ++j) {
                auto a = m.set(r1, j);
                auto b = m.set(r2, j);
                for (auto x : a)
                    for (auto y : b)
                        if (x == y) ++shared;
            }
            psi = std::max(psi, shared);
        }
    }
    return psi;
}

struct StorageCost {
    std::size_t random_values = 0;  // pool size t
    std::size_t stored_values = 0;  // reals plus any permutation indices
};

inline StorageCost storage_cost(const MatrixSpec& spec) {
    spec.validate();
    StorageCost cost;
    cost.random_values = pool_size_required(spec);
    switch (spec.kind) {
        case MatrixKind::Toeplitz:
            cost.stored_values = spec.n + spec.k - 1;
            break;
        case MatrixKind::BinPerm:
            cost.stored_values = spec.n + spec.k * (spec.n / spec.block_len);
            break;
        case MatrixKind::Random:
            cost.stored_values = spec.k * spec.n;
            break;
        default:
            cost.stored_values = spec.n;
            break;
    }
    return cost;
}

}  // namespace structhash
