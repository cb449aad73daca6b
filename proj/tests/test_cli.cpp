#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "magyc/eval.hpp"
#include "magyc/io.hpp"
#include "magyc/so3.hpp"

// End-to-end checks through the installed command-line tool.
using namespace magyc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("magyc_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MAGYC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("simulate writes two CSVs and one truth sidecar per run") {
    TempDir tmp;
    REQUIRE(run_cli("simulate --kind WAM --runs 1 --seed 5 --out " + tmp.path.string()) == 0);
    CHECK(fs::exists(tmp.path / "WAM_run000.csv"));
    CHECK(fs::exists(tmp.path / "eval_run000.csv"));
    CHECK(fs::exists(tmp.path / "truth_run000.json"));

    int files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++files;
    CHECK(files == 3);

    const Dataset ds = read_dataset_csv(tmp.path / "WAM_run000.csv");
    CHECK(ds.samples.size() == 10000);
    CHECK(ds.has_attitude());
}

TEST_CASE("calibrate and evaluate round trip with converged exit status") {
    TempDir tmp;
    REQUIRE(run_cli("simulate --kind WAM --runs 1 --seed 8 --out " + tmp.path.string()) == 0);
    const std::string result = (tmp.path / "result.json").string();
    CHECK(run_cli("calibrate --method magyc-bfg --input " +
                  (tmp.path / "WAM_run000.csv").string() + " --output " + result) == 0);

    const ResultDocument doc = read_result_json(result);
    CHECK(doc.method == "magyc-bfg");
    CHECK(doc.result.converged);
    CHECK(is_positive_definite(doc.result.soft_iron));

    const std::string report = (tmp.path / "report.json").string();
    const std::string plot = (tmp.path / "plot.csv").string();
    CHECK(run_cli("evaluate --result " + result + " --data " +
                  (tmp.path / "eval_run000.csv").string() + " --truth " +
                  (tmp.path / "truth_run000.json").string() + " --output " + report +
                  " --plot-data " + plot) == 0);
    const EvaluationReport rep = read_report_json(report);
    CHECK(rep.params.has_value());
    CHECK(rep.heading_rmse_deg < 5.0);
    CHECK(fs::exists(plot));
}

TEST_CASE("evaluate omits parameter errors without a truth sidecar") {
    TempDir tmp;
    REQUIRE(run_cli("simulate --kind WAM --runs 1 --seed 9 --out " + tmp.path.string()) == 0);
    const std::string result = (tmp.path / "result.json").string();
    REQUIRE(run_cli("calibrate --method magyc-ifg --input " +
                    (tmp.path / "WAM_run000.csv").string() + " --output " + result) == 0);
    const ResultDocument doc = read_result_json(result);
    CHECK_FALSE(doc.result.state_history.empty());

    // without a truth sidecar the declination must be supplied explicitly
    const std::string report = (tmp.path / "report.json").string();
    CHECK(run_cli("evaluate --result " + result + " --data " +
                  (tmp.path / "eval_run000.csv").string() + " --output " + report) == 2);
    const double declination_deg = rad_to_deg(declination_of(Vec3(227.0, 52.0, 412.0)));
    CHECK(run_cli("evaluate --result " + result + " --data " +
                  (tmp.path / "eval_run000.csv").string() + " --output " + report +
                  " --declination " + std::to_string(declination_deg)) == 0);
    CHECK_FALSE(read_report_json(report).params.has_value());
}

TEST_CASE("input errors exit with status 2") {
    TempDir tmp;
    const fs::path bad = tmp.path / "bad.csv";
    std::ofstream(bad) << "t,mx,my\n0,1,2\n";
    CHECK(run_cli("calibrate --method magyc-bfg --input " + bad.string() + " --output " +
                  (tmp.path / "r.json").string()) == 2);
    CHECK(run_cli("calibrate --method nope --input " + bad.string() + " --output x.json") == 2);
    CHECK(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("degenerate data exits with status 3") {
    TempDir tmp;
    // stationary stream: unobservable calibration
    const fs::path still = tmp.path / "still.csv";
    {
        std::ofstream out(still);
        out << "t,mx,my,mz,wx,wy,wz\n";
        for (int i = 0; i < 400; ++i) {
            out << 0.04 * i << ",100,-200,400,0,0,0\n";
        }
    }
    CHECK(run_cli("calibrate --method magyc-bfg --window 10 --input " + still.string() +
                  " --output " + (tmp.path / "r.json").string()) == 3);

    // near-planar magnetometer cloud: heading-only arc, no ellipsoid
    const fs::path planar = tmp.path / "planar.csv";
    {
        std::ofstream out(planar);
        out << "t,mx,my,mz,wx,wy,wz\n";
        for (int i = 0; i < 400; ++i) {
            const double th = -M_PI / 2 + M_PI * i / 399.0;
            out << 0.04 * i << ',' << 420.0 * std::cos(th) + 0.3 * std::sin(31.0 * i) << ','
                << 420.0 * std::sin(th) + 0.3 * std::cos(17.0 * i) << ','
                << 30.0 + 0.3 * std::sin(7.0 * i) << ",0,0,0.01\n";
        }
    }
    CHECK(run_cli("calibrate --method ellipsoid --input " + planar.string() + " --output " +
                  (tmp.path / "r2.json").string()) == 3);
}

TEST_CASE("montecarlo smoke sweep is fast and deterministic") {
    TempDir tmp1, tmp2;
    const auto t0 = std::chrono::steady_clock::now();
    REQUIRE(run_cli("montecarlo --kinds WAM,MAM,LAM --methods magyc-bfg,ellipsoid --runs 1 "
                    "--seed 4 --out " +
                    tmp1.path.string()) == 0);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(seconds < 60.0);

    REQUIRE(run_cli("montecarlo --kinds WAM,MAM,LAM --methods magyc-bfg,ellipsoid --runs 1 "
                    "--seed 4 --out " +
                    tmp2.path.string()) == 0);

    std::ifstream a(tmp1.path / "summary.json"), b(tmp2.path / "summary.json");
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(sa.find("\"schema\": \"magyc.summary/1\"") != std::string::npos);
    CHECK(sa.find("magyc-bfg") != std::string::npos);
}

TEST_CASE("montecarlo summary does not depend on the worker count") {
    TempDir tmp1, tmp2;
    REQUIRE(run_cli("montecarlo --kinds WAM,MAM --methods magyc-bfg --runs 2 --seed 13 "
                    "--workers 1 --out " +
                    tmp1.path.string()) == 0);
    REQUIRE(run_cli("montecarlo --kinds WAM,MAM --methods magyc-bfg --runs 2 --seed 13 "
                    "--workers 4 --out " +
                    tmp2.path.string()) == 0);
    std::ifstream a(tmp1.path / "summary.json"), b(tmp2.path / "summary.json");
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}
