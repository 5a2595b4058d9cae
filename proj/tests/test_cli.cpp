#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

const std::string kCli = STRUCTHASH_CLI_PATH;
const std::string kDataDir = STRUCTHASH_TEST_DATA_DIR;

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    CommandResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST(Cli, GraphToeplitzReportsZeroPsiAndSmallChi) {
    const auto r = run("graph --kind toeplitz --k 8 --n 16");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("row_pair,vertices,edges"), std::string::npos);
    EXPECT_NE(r.output.find("# psi=0 p_chromatic="), std::string::npos);
    // chi at most 3 for Toeplitz.
    const auto pos = r.output.find("p_chromatic=");
    ASSERT_NE(pos, std::string::npos);
    const int chi = std::stoi(r.output.substr(pos + 12, 2));
    EXPECT_LE(chi, 3);
}

TEST(Cli, McToeplitzPasses) {
    const auto r = run(
        "mc --kind toeplitz --mode short --n 64 --k 128 --theta 1.5708 --trials 500");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("true"), std::string::npos);
}

TEST(Cli, HashAngleRoundTrip) {
    const auto csv = temp_file("structhash_cli_data.csv");
    {
        std::ofstream out(csv);
        out << "1,0,0,0\n0,1,0,0\n1,0,0,0\n";
    }
    const auto shsh = temp_file("structhash_cli_hashes.shsh");
    const auto r1 = run("hash --kind random --k 64 --n 4 --mode short --in " + csv.string() +
                        " --format csv --out " + shsh.string());
    EXPECT_EQ(r1.exit_code, 0);

    const auto r2 = run("angle --hashes " + shsh.string() + " --pairs \"0,0;0,2;0,1\"");
    EXPECT_EQ(r2.exit_code, 0);
    EXPECT_NE(r2.output.find("i,j,hamming,theta_tilde"), std::string::npos);
    // Identical inputs hash identically: pairs (0,0) and (0,2) both at 0.
    EXPECT_NE(r2.output.find("0,0,0,0,0"), std::string::npos);
    EXPECT_NE(r2.output.find("0,2,0,0,0"), std::string::npos);

    // Determinism: byte-identical rerun.
    const auto shsh2 = temp_file("structhash_cli_hashes2.shsh");
    const auto r3 = run("hash --kind random --k 64 --n 4 --mode short --in " + csv.string() +
                        " --format csv --out " + shsh2.string());
    EXPECT_EQ(r3.exit_code, 0);
    std::ifstream a(shsh, std::ios::binary), b(shsh2, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    EXPECT_EQ(bytes_a, bytes_b);
    std::filesystem::remove(csv);
    std::filesystem::remove(shsh);
    std::filesystem::remove(shsh2);
}

TEST(Cli, BoundsCurve) {
    const auto r = run("bounds --curve vs_k --fixed 1.5708 --grid 16:128:16");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("theta,k,bound"), std::string::npos);
    // 16, 32, ..., 128 inclusive: 8 rows + header.
    int lines = 0;
    for (char c : r.output)
        if (c == '\n') ++lines;
    EXPECT_EQ(lines, 9);
}

TEST(Cli, BoundsConcentrationReport) {
    // Non-vacuous regime (the bound is asymptotic: tiny a, astronomically
    // large n and t).
    const auto r = run(
        "bounds --thm2 --n 281474976710656 --k 256 --t 281474976710656 --N 100 "
        "--eps 0.25 --a 1.07e-5 --f-n 6 --psi 0 --chi 3 --theta 1.5708");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("mu,lambda,prob_lower,valid"), std::string::npos);
    EXPECT_NE(r.output.find(",true"), std::string::npos);
    // mu >= 1/2 regimes come back flagged invalid.
    const auto bad = run(
        "bounds --thm2 --n 1000 --k 100 --t 1000 --N 10 --eps 0.1 --a 0.01 "
        "--f-n 3 --psi 0 --chi 3 --theta 1.5708");
    EXPECT_EQ(bad.exit_code, 0);
    EXPECT_NE(bad.output.find("false"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("nonsense").exit_code, 1);  // usage failure
    EXPECT_EQ(run("angle --hashes /does/not/exist.shsh --all").exit_code, 2);
    EXPECT_EQ(run("bounds --curve vs_k --fixed 1.0 --grid bad").exit_code, 1);
}

TEST(Cli, SeedResolutionOrder) {
    // Every run reports the resolved seed; the env var overrides the default
    // but an explicit --seed wins.
    auto run_with_stderr = [](const std::string& cmd) {
        std::array<char, 4096> buf{};
        std::string out;
        FILE* pipe = popen((cmd + " 2>&1 >/dev/null").c_str(), "r");
        if (!pipe) return out;
        std::size_t n = 0;
        while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
        pclose(pipe);
        return out;
    };
    const std::string base = " graph --kind toeplitz --k 2 --n 4";
    EXPECT_NE(run_with_stderr(kCli + base).find("# seed=42"), std::string::npos);
    EXPECT_NE(run_with_stderr("STRUCTHASH_SEED=123 " + kCli + base).find("# seed=123"),
              std::string::npos);
    EXPECT_NE(
        run_with_stderr("STRUCTHASH_SEED=123 " + kCli + " --seed 9" + base).find("# seed=9"),
        std::string::npos);
}

TEST(Cli, SpecFileRoundTrip) {
    const auto spec_path = temp_file("structhash_cli_spec.txt");
    write_file(spec_path, "kind=circulant\nk=4\nn=8\nshift_dir=left\nseed=5\n");
    const auto r = run("graph --spec " + spec_path.string());
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("# psi=0"), std::string::npos);
    std::filesystem::remove(spec_path);
}

TEST(Cli, KnnSweepOnDigits) {
    const auto r = run("knn --kind toeplitz --format idx --train " + kDataDir +
                       "/digits/train-images-idx3-ubyte --train-labels " + kDataDir +
                       "/digits/train-labels-idx1-ubyte --test " + kDataDir +
                       "/digits/test-images-idx3-ubyte --test-labels " + kDataDir +
                       "/digits/test-labels-idx1-ubyte --sweep 64 --oracle");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("kind,mode,n,k,error_rate"), std::string::npos);
    EXPECT_NE(r.output.find("toeplitz,extended,784,64,"), std::string::npos);
    EXPECT_NE(r.output.find("oracle,angular,784,0,"), std::string::npos);
}
