#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = MEBB_TEST_TMP_DIR;
const std::string kIris = std::string(MEBB_TEST_DATA_DIR) + "/iris.csv";

int run(const std::string& args) {
    fs::create_directories(kTmp);
    const std::string cmd = std::string("\"") + MEBB_CLI_PATH + "\" " + args + " > \"" + (kTmp / "stdout.txt").string() +
                            "\" 2> \"" + (kTmp / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string out_dir(const std::string& name) {
    const fs::path p = kTmp / name;
    fs::remove_all(p);
    return "\"" + p.string() + "\"";
}

}  // namespace

TEST_CASE("bench, verify and compare succeed") {
    const std::string dir = out_dir("bench");
    CHECK(run("bench --function sphere --dim 3 --runs 2 --iters 10 --stars 10 --memory 5 --alpha0 0.2 "
              "--alpha-growth 0.02 --seed 5 --jobs 2 --json --out " + dir) == 0);
    CHECK(slurp(kTmp / "stdout.txt").find("mebbbc,sphere,") != std::string::npos);
    CHECK(fs::exists(kTmp / "bench" / "summary.json"));
    CHECK(slurp(kTmp / "bench" / "plan.json").find("\"memory_capacity\": 5") != std::string::npos);
    CHECK(run("verify " + dir) == 0);

    const std::string results = (kTmp / "bench" / "results.csv").string();
    CHECK(run("compare \"" + results + "\" \"" + results + "\" --alg-a bbbc --alg-b mebbbc --out " + dir) == 0);
    CHECK(fs::exists(kTmp / "bench" / "significance.csv"));
    // Several algorithms in one file without a selector.
    CHECK(run("compare \"" + results + "\" \"" + results + "\" --out " + dir) == 2);
}

TEST_CASE("cluster on iris") {
    const std::string dir = out_dir("cluster");
    CHECK(run("cluster --dataset \"" + kIris + "\" --header --label-column species --k 3 --metric sq "
              "--algorithms kmebb,kmeans --refine-steps 2 --runs 2 --iters 5 --stars 10 --out " + dir) == 0);
    CHECK(fs::exists(kTmp / "cluster" / "best_model.csv"));
    CHECK(slurp(kTmp / "cluster" / "plan.json").find("\"metric\": \"sq\"") != std::string::npos);
    CHECK(run("verify " + dir) == 0);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("") == 2);
    CHECK(run("bench --function nope --out " + out_dir("u1")) == 2);
    CHECK(run("bench --algorithms kmeans --out " + out_dir("u2")) == 2);
    CHECK(run("bench --runs 0 --out " + out_dir("u3")) == 2);
    CHECK(run("bench --bogus-flag") == 2);
    CHECK(run("cluster --dataset \"" + kIris + "\" --header --label-column species --k 3 --metric manhattan") == 2);
    CHECK(run("cluster --k 3") == 2);
    CHECK(run("bench --crunch middle") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("data errors exit with 3") {
    fs::create_directories(kTmp);
    std::ofstream(kTmp / "bad.csv") << "1,2\n3,x\n";
    CHECK(run("cluster --dataset \"" + (kTmp / "bad.csv").string() + "\" --k 1 --out " + out_dir("d1")) == 3);
    CHECK(slurp(kTmp / "stderr.txt").find("row 2") != std::string::npos);
    std::ofstream(kTmp / "ragged.csv") << "1,2\n3\n";
    CHECK(run("cluster --dataset \"" + (kTmp / "ragged.csv").string() + "\" --k 1 --out " + out_dir("d2")) == 3);

    const std::string dir = out_dir("tampered");
    REQUIRE(run("bench --dim 2 --runs 2 --iters 5 --stars 5 --out " + dir) == 0);
    std::ofstream(kTmp / "tampered" / "summary.csv") << "algorithm,target,best,average,std,n_runs\n";
    CHECK(run("verify " + dir) == 3);
}

TEST_CASE("i/o errors exit with 4") {
    CHECK(run("cluster --dataset \"" + (kTmp / "missing.csv").string() + "\" --k 2") == 4);
    fs::create_directories(kTmp);
    std::ofstream(kTmp / "blocker") << "file";
    CHECK(run("bench --dim 2 --runs 1 --iters 2 --stars 3 --out \"" + (kTmp / "blocker" / "sub").string() + "\"") == 4);
    CHECK(run("verify \"" + (kTmp / "no_such_dir").string() + "\"") == 4);
}
