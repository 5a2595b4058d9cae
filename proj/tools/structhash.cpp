// Command-line front door for the structured-hashing library: dataset
// hashing, angle estimation from hash files, Monte Carlo verification,
// dependency-graph analysis, bound curves, 1-NN benchmarks and matvec
// timings. All machine-readable output is CSV on stdout; diagnostics go to
// stderr. Identical flags and seed produce byte-identical output.
//
// Matrix spec files (--spec) use a plain-text key=value format, one pair per
// line: kind, k, n, block_len, h_shift, v_shift, shift_dir, seed.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "structhash/structhash.hpp"

namespace sh = structhash;

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct GlobalOptions {
    std::uint64_t seed = 42;
    unsigned threads = 0;
};

struct SpecOptions {
    std::string kind = "toeplitz";
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t block_len = 0;
    std::size_t h_shift = 0;
    std::size_t v_shift = 0;
    std::string shift_dir = "right";
    std::string spec_file;

    sh::MatrixSpec build(std::uint64_t seed) const {
        if (!spec_file.empty()) {
            std::ifstream in(spec_file);
            if (!in) throw sh::ParseError("cannot open spec file: " + spec_file);
            std::stringstream buf;
            buf << in.rdbuf();
            return sh::spec_from_config_string(buf.str());
        }
        auto spec = sh::make_spec(sh::matrix_kind_from_string(kind), k, n, seed);
        if (block_len) spec.block_len = block_len;
        if (h_shift) spec.h_shift = h_shift;
        if (v_shift) spec.v_shift = v_shift;
        spec.shift_dir = shift_dir == "left" ? sh::ShiftDir::Left : sh::ShiftDir::Right;
        spec.validate();
        return spec;
    }
};

void add_spec_options(CLI::App* cmd, SpecOptions& opts, bool with_spec_file = true) {
    cmd->add_option("--kind", opts.kind, "matrix kind")
        ->check(CLI::IsMember({"circulant", "toeplitz", "bincirc", "halfshift", "verhorshift",
                               "binperm", "random"}));
    cmd->add_option("--k", opts.k, "hash size (rows)");
    cmd->add_option("--n", opts.n, "input dimension (columns)");
    cmd->add_option("--block-len", opts.block_len, "block length (bincirc/binperm)");
    cmd->add_option("--h-shift", opts.h_shift, "horizontal shift (verhorshift)");
    cmd->add_option("--v-shift", opts.v_shift, "vertical shift (verhorshift)");
    cmd->add_option("--shift-dir", opts.shift_dir, "circulant shift direction")
        ->check(CLI::IsMember({"left", "right"}));
    if (with_spec_file)
        cmd->add_option("--spec", opts.spec_file, "key=value matrix spec file (overrides flags)");
}

sh::Dataset load_dataset(const std::string& format, const std::string& path,
                         const std::string& labels_path, bool csv_labels) {
    if (format == "idx") {
        return sh::load_idx(path, labels_path.empty()
                                      ? std::nullopt
                                      : std::optional<std::string>(labels_path));
    }
    return sh::load_csv(path, csv_labels);
}

// Inclusive grid a:b:step (b included up to step/2 rounding).
std::vector<double> parse_grid(const std::string& text) {
    double a = 0, b = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0)
        throw std::invalid_argument("grid must be a:b:step with step > 0");
    std::vector<double> grid;
    for (double v = a; v <= b + step / 2; v += step) grid.push_back(v);
    return grid;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        std::size_t i = 0, j = 0;
        if (std::sscanf(item.c_str(), "%zu,%zu", &i, &j) != 2)
            throw std::invalid_argument("bad pair '" + item + "' (expected i,j)");
        pairs.emplace_back(i, j);
    }
    if (pairs.empty()) throw std::invalid_argument("no pairs given");
    return pairs;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

void print_mc_header() {
    std::cout << "kind,mode,n,k,theta,m,mean,var,stderr,bound,pass_unbiased,pass_variance\n";
}

void print_mc_row(const sh::McReport& r) {
    std::cout << sh::to_string(r.kind) << ',' << sh::to_string(r.mode) << ',' << r.n << ',' << r.k
              << ',' << fmt(r.theta_true) << ',' << r.m_trials << ',' << fmt(r.mean_est) << ','
              << fmt(r.var_est) << ',' << fmt(r.std_err) << ',' << fmt(r.bound_thm3) << ','
              << (r.pass_unbiased ? "true" : "false") << ','
              << (r.variance_applicable ? (r.pass_variance ? "true" : "false") : "n/a") << '\n';
}

// ---------------------------------------------------------------------------

int run_hash(const GlobalOptions& global, const SpecOptions& spec_opts, const std::string& mode,
             const std::string& in_path, const std::string& format,
             const std::string& labels_path, const std::string& out_path) {
    const auto ds = load_dataset(format, in_path, labels_path, false);
    auto spec = spec_opts.build(global.seed);
    if (spec.n != ds.dim)
        throw sh::ParseError("--n (" + std::to_string(spec.n) + ") does not match dataset dim (" +
                             std::to_string(ds.dim) + ")");
    const sh::Pipeline pipeline(spec, sh::hash_mode_from_string(mode), global.seed);
    std::vector<sh::BinaryHash> hashes(ds.count());
    sh::parallel_for(ds.count(), global.threads,
                     [&](std::size_t i) { hashes[i] = pipeline.hash(ds.row(i)); });
    sh::write_hashes(out_path, hashes, spec.k);
    std::cerr << "wrote " << hashes.size() << " hashes of " << spec.k << " bits to " << out_path
              << "\n";
    return 0;
}

int run_angle(const std::string& hashes_path, const std::string& pairs_text, bool all_pairs) {
    std::size_t k = 0;
    const auto hashes = sh::read_hashes(hashes_path, &k);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (all_pairs) {
        for (std::size_t i = 0; i < hashes.size(); ++i)
            for (std::size_t j = i + 1; j < hashes.size(); ++j) pairs.emplace_back(i, j);
    } else {
        pairs = parse_pairs(pairs_text);
    }
    std::cout << "i,j,hamming,theta_tilde,theta_rad_est\n";
    for (auto [i, j] : pairs) {
        if (i >= hashes.size() || j >= hashes.size())
            throw sh::ParseError("pair index out of range (file has " +
                                 std::to_string(hashes.size()) + " hashes)");
        const auto d = sh::hamming(hashes[i], hashes[j]);
        const double tilde = sh::approx_angle(hashes[i], hashes[j]);
        std::cout << i << ',' << j << ',' << d << ',' << fmt(tilde) << ','
                  << fmt(std::numbers::pi * tilde) << '\n';
    }
    return 0;
}

int run_mc(const GlobalOptions& global, const SpecOptions& spec_opts, const std::string& mode,
           double theta, std::size_t trials) {
    const auto spec = spec_opts.build(global.seed);
    const auto [p, r] = sh::make_angled_pair(spec.n, theta, global.seed);
    const auto report = sh::mc_estimate(p, r, spec, sh::hash_mode_from_string(mode), trials,
                                        global.seed, global.threads);
    print_mc_header();
    print_mc_row(report);
    const bool failed = !report.pass_unbiased ||
                        (report.variance_applicable && !report.pass_variance);
    return failed ? 3 : 0;
}

int run_graph(const GlobalOptions& global, const SpecOptions& spec_opts,
              std::size_t exact_limit) {
    const auto spec = spec_opts.build(global.seed);
    const auto m = sh::build_index_sets(spec);
    std::cout << "row_pair,vertices,edges,chi_lower,chi_upper,chi_exact\n";
    std::size_t max_chi = 0;
    bool all_exact = true;
    for (std::size_t k1 = 0; k1 + 1 < m.k(); ++k1) {
        for (std::size_t k2 = k1 + 1; k2 < m.k(); ++k2) {
            const auto g = sh::build_graph(m, k1, k2);
            const auto chi = sh::chromatic_number(g, exact_limit);
            std::cout << k1 << '-' << k2 << ',' << g.vertex_count() << ',' << g.edge_count()
                      << ',' << chi.lower << ',' << chi.upper << ','
                      << (chi.exact ? std::to_string(*chi.exact) : "") << '\n';
            max_chi = std::max(max_chi, chi.exact ? *chi.exact : chi.upper);
            all_exact = all_exact && chi.exact.has_value();
        }
    }
    std::cout << "# psi=" << sh::psi_of(m) << " p_chromatic=" << max_chi
              << " exact=" << (all_exact ? "true" : "false") << '\n';
    return 0;
}

int run_bounds(const std::string& curve, double fixed, const std::string& grid_text) {
    const auto grid = parse_grid(grid_text);
    const auto mode = curve == "vs_k" ? sh::CurveMode::VsK : sh::CurveMode::VsTheta;
    const auto points = sh::bound_curves(mode, fixed, grid);
    std::cout << "theta,k,bound\n";
    for (const auto& pt : points)
        std::cout << fmt(pt.theta) << ',' << pt.k << ',' << fmt(pt.bound) << '\n';
    return 0;
}

int run_bounds_thm2(const sh::BoundParams& params) {
    const auto report = sh::extended_concentration_bound(params);
    std::cout << "mu,lambda,prob_lower,valid\n";
    std::cout << fmt(report.mu) << ',' << fmt(report.lambda) << ',' << fmt(report.prob_lower)
              << ',' << (report.valid ? "true" : "false") << '\n';
    return 0;
}

int run_knn(const GlobalOptions& global, const SpecOptions& spec_opts, const std::string& mode,
            const std::string& format, const std::string& train_path,
            const std::string& train_labels, const std::string& test_path,
            const std::string& test_labels, const std::string& sweep_text, bool with_oracle) {
    const auto train = load_dataset(format, train_path, train_labels, true);
    const auto test = load_dataset(format, test_path, test_labels, true);
    std::vector<std::size_t> ks;
    if (!sweep_text.empty()) ks = parse_size_list(sweep_text);
    else ks.push_back(spec_opts.k);

    std::cout << "kind,mode,n,k,error_rate\n";
    for (std::size_t k : ks) {
        SpecOptions cell = spec_opts;
        cell.k = k;
        cell.n = train.dim;
        auto spec = cell.build(global.seed);
        const sh::Pipeline pipeline(spec, sh::hash_mode_from_string(mode), global.seed);
        const auto report = sh::knn_eval(train, test, pipeline, global.threads);
        std::cout << sh::to_string(report.kind) << ',' << sh::to_string(report.mode) << ','
                  << report.n << ',' << report.k << ',' << fmt(report.error_rate) << '\n';
    }
    if (with_oracle) {
        std::cout << "oracle,angular," << train.dim << ",0,"
                  << fmt(sh::angular_1nn_error(train, test, global.threads)) << '\n';
    }
    return 0;
}

int run_bench(const GlobalOptions& global, const std::string& kind, std::size_t n, std::size_t k,
              std::size_t reps) {
    using clock = std::chrono::steady_clock;
    const auto spec = sh::make_spec(sh::matrix_kind_from_string(kind), k, n, global.seed);
    if (spec.kind != sh::MatrixKind::Circulant && spec.kind != sh::MatrixKind::Toeplitz)
        throw std::invalid_argument("bench supports circulant and toeplitz only");
    const auto pool = sh::gen_pool(global.seed, sh::pool_size_required(spec));
    const auto dense = sh::materialize(sh::build_index_sets(spec), pool);
    std::vector<double> x(n);
    sh::rng::GaussianStream gs(global.seed + 1);
    for (auto& v : x) v = gs.next();

    double sink = 0.0;
    const auto t0 = clock::now();
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto y = sh::naive_matvec(dense, x);
        sink += y[rep % k];
    }
    const auto t1 = clock::now();
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto y = spec.kind == sh::MatrixKind::Circulant
                           ? sh::circulant_matvec_fft(pool.values, x, k)
                           : sh::toeplitz_matvec_fft(pool.values, x, k);
        sink += y[rep % k];
    }
    const auto t2 = clock::now();
    const double naive_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double fft_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    std::cout << "kind,n,k,reps,naive_ms,fft_ms,speedup\n";
    std::cout << kind << ',' << n << ',' << k << ',' << reps << ',' << fmt(naive_ms) << ','
              << fmt(fft_ms) << ',' << fmt(naive_ms / fft_ms) << '\n';
    std::cerr << "checksum " << fmt(sink) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured pseudo-random binary embeddings"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "master seed (env STRUCTHASH_SEED overrides default)")
        ->envname("STRUCTHASH_SEED");
    app.add_option("--threads", global.threads, "worker threads (0 = all)");

    // hash
    auto* hash_cmd = app.add_subcommand("hash", "hash a dataset into a .shsh file");
    SpecOptions hash_spec;
    add_spec_options(hash_cmd, hash_spec);
    std::string hash_mode = "short", hash_in, hash_format = "csv", hash_labels, hash_out;
    hash_cmd->add_option("--mode", hash_mode)->check(CLI::IsMember({"short", "extended"}));
    hash_cmd->add_option("--in", hash_in)->required();
    hash_cmd->add_option("--format", hash_format)->check(CLI::IsMember({"idx", "csv"}));
    hash_cmd->add_option("--labels", hash_labels, "labels file (idx format)");
    hash_cmd->add_option("--out", hash_out)->required();

    // angle
    auto* angle_cmd = app.add_subcommand("angle", "estimate angles from a hash file");
    std::string angle_hashes, angle_pairs;
    bool angle_all = false;
    angle_cmd->add_option("--hashes", angle_hashes)->required();
    angle_cmd->add_option("--pairs", angle_pairs, "semicolon-separated i,j pairs");
    angle_cmd->add_flag("--all", angle_all, "all unordered pairs");

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimator verification");
    SpecOptions mc_spec;
    add_spec_options(mc_cmd, mc_spec);
    std::string mc_mode = "short";
    double mc_theta = std::numbers::pi / 2;
    std::size_t mc_trials = 2000;
    mc_cmd->add_option("--mode", mc_mode)->check(CLI::IsMember({"short", "extended"}));
    mc_cmd->add_option("--theta", mc_theta, "angle in radians");
    mc_cmd->add_option("--trials", mc_trials);

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "dependency graph / chromatic analysis");
    SpecOptions graph_spec;
    add_spec_options(graph_cmd, graph_spec);
    std::size_t graph_exact_limit = 30;
    graph_cmd->add_option("--exact-limit", graph_exact_limit,
                          "max vertices for exact coloring");

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "variance bound curves / concentration report");
    std::string bounds_curve = "vs_k", bounds_grid;
    double bounds_fixed = 0.0;
    bool bounds_thm2 = false;
    sh::BoundParams thm2;
    bounds_cmd->add_option("--curve", bounds_curve)->check(CLI::IsMember({"vs_k", "vs_theta"}));
    bounds_cmd->add_option("--fixed", bounds_fixed, "fixed theta (vs_k) or k (vs_theta)");
    bounds_cmd->add_option("--grid", bounds_grid, "a:b:step");
    bounds_cmd->add_flag("--thm2", bounds_thm2, "emit a concentration report instead of a curve");
    bounds_cmd->add_option("--n", thm2.n);
    bounds_cmd->add_option("--k", thm2.k);
    bounds_cmd->add_option("--t", thm2.t);
    bounds_cmd->add_option("--N", thm2.N, "dataset size");
    bounds_cmd->add_option("--eps", thm2.eps);
    bounds_cmd->add_option("--a", thm2.a);
    bounds_cmd->add_option("--f-n", thm2.f_n, "f evaluated at n");
    bounds_cmd->add_option("--f-t", thm2.f_t, "f evaluated at t (defaults to f-n)");
    bounds_cmd->add_option("--psi", thm2.psi);
    bounds_cmd->add_option("--chi", thm2.chi);
    bounds_cmd->add_option("--theta", thm2.theta);

    // knn
    auto* knn_cmd = app.add_subcommand("knn", "hashed 1-NN benchmark");
    SpecOptions knn_spec;
    add_spec_options(knn_cmd, knn_spec, /*with_spec_file=*/false);
    std::string knn_mode = "extended", knn_format = "idx";
    std::string knn_train, knn_train_labels, knn_test, knn_test_labels, knn_sweep;
    bool knn_oracle = false;
    knn_cmd->add_option("--mode", knn_mode)->check(CLI::IsMember({"short", "extended"}));
    knn_cmd->add_option("--format", knn_format)->check(CLI::IsMember({"idx", "csv"}));
    knn_cmd->add_option("--train", knn_train)->required();
    knn_cmd->add_option("--train-labels", knn_train_labels, "labels file (idx format)");
    knn_cmd->add_option("--test", knn_test)->required();
    knn_cmd->add_option("--test-labels", knn_test_labels, "labels file (idx format)");
    knn_cmd->add_option("--sweep", knn_sweep, "comma-separated hash sizes");
    knn_cmd->add_flag("--oracle", knn_oracle, "also run the exact angular 1-NN");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "naive vs FFT matvec timing");
    std::string bench_kind = "toeplitz";
    std::size_t bench_n = 4096, bench_k = 4096, bench_reps = 20;
    bench_cmd->add_option("--kind", bench_kind)->check(CLI::IsMember({"circulant", "toeplitz"}));
    bench_cmd->add_option("--n", bench_n);
    bench_cmd->add_option("--k", bench_k);
    bench_cmd->add_option("--reps", bench_reps);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the error message
        return code == 0 ? 0 : 1;
    }

    std::cerr << "# seed=" << global.seed << "\n";

    try {
        if (*hash_cmd)
            return run_hash(global, hash_spec, hash_mode, hash_in, hash_format, hash_labels,
                            hash_out);
        if (*angle_cmd) {
            if (!angle_all && angle_pairs.empty())
                throw std::invalid_argument("angle: need --pairs or --all");
            return run_angle(angle_hashes, angle_pairs, angle_all);
        }
        if (*mc_cmd) return run_mc(global, mc_spec, mc_mode, mc_theta, mc_trials);
        if (*graph_cmd) return run_graph(global, graph_spec, graph_exact_limit);
        if (*bounds_cmd) {
            if (bounds_thm2) return run_bounds_thm2(thm2);
            if (bounds_grid.empty())
                throw std::invalid_argument("bounds: need --grid (or --thm2 with its parameters)");
            return run_bounds(bounds_curve, bounds_fixed, bounds_grid);
        }
        if (*knn_cmd)
            return run_knn(global, knn_spec, knn_mode, knn_format, knn_train, knn_train_labels,
                           knn_test, knn_test_labels, knn_sweep, knn_oracle);
        if (*bench_cmd) return run_bench(global, bench_kind, bench_n, bench_k, bench_reps);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sh::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
