// CLI behavior: config validation and echo, exit codes, output artifacts,
// expect-steepening semantics, and byte-level determinism of reruns.

#include <catch2/catch_amalgamated.hpp>

#include "fraclab/cli.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_args(std::vector<std::string> args) { return cli::run_cli(std::move(args)); }

// tree comparison, run.log excluded (the only file carrying timestamps)
bool trees_identical(const fs::path& a, const fs::path& b) {
    std::vector<std::string> names_a, names_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) names_a.push_back(fs::relative(e.path(), a).string());
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) names_b.push_back(fs::relative(e.path(), b).string());
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    if (names_a != names_b) return false;
    for (const auto& name : names_a) {
        if (name == "run.log") continue;
        if (read_file((a / name).string()) != read_file((b / name).string())) return false;
    }
    return true;
}

} // namespace

TEST_CASE("missing and malformed configs exit 1") {
    TempDir tmp("fraclab_cli_bad");
    REQUIRE(run_args({"simulate", "--config", tmp.file("absent.json")}) == 1);

    write_file(tmp.file("broken.json"), "{ not json ");
    REQUIRE(run_args({"simulate", "--config", tmp.file("broken.json"),
                      "--output", tmp.file("o1")}) == 1);

    // unknown key is rejected with exit 1
    write_file(tmp.file("extra.json"), R"({"delta0":0.5,"linf-theta0":1.0,"l":0.1,
        "y-max":5.0,"mystery":3})");
    REQUIRE(run_args({"localizer", "--config", tmp.file("extra.json"),
                      "--output", tmp.file("o2")}) == 1);

    REQUIRE(run_args({"frobnicate", "--config", tmp.file("extra.json")}) == 1);
    REQUIRE(run_args({}) == 1);
}

TEST_CASE("localizer command writes its artifacts and echoes the config") {
    TempDir tmp("fraclab_cli_loc");
    const std::string cfg = R"({"q": 0.7, "l": 0.1, "y-max": 5.0, "samples": 128})";
    write_file(tmp.file("loc.json"), cfg);
    REQUIRE(run_args({"localizer", "--config", tmp.file("loc.json"),
                      "--output", tmp.file("out")}) == 0);
    REQUIRE(read_file(tmp.file("out/config.echo.json")) == cfg); // byte-identical echo
    auto csv = read_file(tmp.file("out/localizer.csv"));
    REQUIRE(csv.rfind("y,psi_prime,psi,phi\n", 0) == 0);
    REQUIRE(fs::exists(tmp.file("out/run.log")));
}

TEST_CASE("simulate: artifacts, blow-up exit codes, expect-steepening") {
    TempDir tmp("fraclab_cli_sim");
    const std::string steep = R"({
        "system": "burgers1d", "grid": {"d": 1, "n": 256},
        "alpha": 0.0, "dt": 0.005, "t-end": 2.0, "snapshot-stride": 10,
        "blowup-factor": 10.0,
        "initial": {"theta": {"recipe": "steep-front", "amplitude": 1.0, "width": 0.25}},
        "expect-steepening": %FLAG%})";
    auto with_flag = [&](const std::string& flag) {
        std::string s = steep;
        s.replace(s.find("%FLAG%"), 6, flag);
        return s;
    };
    write_file(tmp.file("expected.json"), with_flag("true"));
    write_file(tmp.file("unexpected.json"), with_flag("false"));

    REQUIRE(run_args({"simulate", "--config", tmp.file("expected.json"),
                      "--output", tmp.file("a")}) == 0);
    REQUIRE(fs::exists(tmp.file("a/blowup.csv"))); // recorded in the manifest dir
    REQUIRE(fs::exists(tmp.file("a/manifest.csv")));
    REQUIRE(fs::exists(tmp.file("a/final.dat")));

    REQUIRE(run_args({"simulate", "--config", tmp.file("unexpected.json"),
                      "--output", tmp.file("b")}) == 3);
}

TEST_CASE("simulate: smooth run emits manifest and diagnostics streams") {
    TempDir tmp("fraclab_cli_smooth");
    write_file(tmp.file("sqg.json"), R"({
        "system": "sqg2d", "grid": {"d": 2, "n": 64},
        "alpha": 1.0, "dt": 0.02, "t-end": 0.4, "snapshot-stride": 5,
        "initial": {"theta": {"recipe": "two-mode", "amplitude": 0.1}},
        "diagnostics": {"oss-scales": [0.2, 0.5]},
        "save-fields": true})");
    REQUIRE(run_args({"simulate", "--config", tmp.file("sqg.json"),
                      "--output", tmp.file("out")}) == 0);
    auto manifest = read_file(tmp.file("out/manifest.csv"));
    REQUIRE(manifest.rfind("step,time,linf_theta,linf_grad,energy,enstrophy,bkm_integral\n", 0) ==
            0);
    auto diag = read_file(tmp.file("out/diagnostics.csv"));
    REQUIRE(diag.find("oss@0.2") != std::string::npos);
    REQUIRE(fs::exists(tmp.file("out/snap_000000.dat")));
    auto snap = load_field(tmp.file("out/snap_000000.dat"));
    REQUIRE(snap.spec.n == 64);
}

TEST_CASE("identical config and seed give a byte-identical output tree") {
    TempDir tmp("fraclab_cli_det");
    write_file(tmp.file("sim.json"), R"({
        "system": "modeuler2d", "grid": {"d": 2, "n": 64},
        "alpha": 0.8, "forcing-amplitude": 1.0, "dt": 0.02, "t-end": 0.3,
        "snapshot-stride": 3,
        "initial": {"omega": {"recipe": "random-band", "amplitude": 0.5,
                               "max-mode": 6, "seed": 5}},
        "save-fields": true})");
    REQUIRE(run_args({"simulate", "--config", tmp.file("sim.json"),
                      "--output", tmp.file("r1")}) == 0);
    REQUIRE(run_args({"simulate", "--config", tmp.file("sim.json"),
                      "--output", tmp.file("r2")}) == 0);
    REQUIRE(trees_identical(tmp.file("r1"), tmp.file("r2")));
}

TEST_CASE("verify-bounds: calibrate then check against the fresh constants") {
    TempDir tmp("fraclab_cli_vb");
    write_file(tmp.file("cal.json"), R"({
        "mode": "calibrate",
        "family": {"kind": "gaussian-mixture", "grid": {"d": 1, "n": 256, "box": "enlarged"}},
        "checks": [{"theorem": "holder", "alpha": 1.0, "delta": 0.5}],
        "trials": 40, "seed": 99})");
    REQUIRE(run_args({"verify-bounds", "--config", tmp.file("cal.json"),
                      "--output", tmp.file("cal"), "--threads", "2"}) == 0);
    REQUIRE(fs::exists(tmp.file("cal/constants.v1")));

    write_file(tmp.file("chk.json"), R"({
        "mode": "check",
        "family": {"kind": "gaussian-mixture", "grid": {"d": 1, "n": 256, "box": "enlarged"}},
        "checks": [{"theorem": "holder", "alpha": 1.0, "delta": 0.5}],
        "trials": 25, "seed": 123})");
    REQUIRE(run_args({"verify-bounds", "--config", tmp.file("chk.json"),
                      "--output", tmp.file("chk"), "--constants", tmp.file("cal/constants.v1"),
                      "--threads", "2"}) == 0);
    auto csv = read_file(tmp.file("chk/reports.csv"));
    REQUIRE(csv.rfind("trial,theorem,alpha,delta,p,lhs,rhs,constant,margin,pass\n", 0) == 0);
    REQUIRE(csv.find(",0\n") == std::string::npos); // no failing rows

    // a missing calibrated constant is a config-level failure
    write_file(tmp.file("chk2.json"), R"({
        "mode": "check",
        "family": {"kind": "gaussian-mixture", "grid": {"d": 1, "n": 256, "box": "enlarged"}},
        "checks": [{"theorem": "holder", "alpha": 1.0, "delta": 0.33}],
        "trials": 5, "seed": 123})");
    REQUIRE(run_args({"verify-bounds", "--config", tmp.file("chk2.json"),
                      "--output", tmp.file("chk2"), "--constants",
                      tmp.file("cal/constants.v1")}) == 1);
}

TEST_CASE("oss-scan and balance commands") {
    TempDir tmp("fraclab_cli_oss");
    write_file(tmp.file("oss.json"), R"({
        "grid": {"d": 1, "n": 256},
        "initial": {"recipe": "single-mode", "amplitude": 1.0},
        "scales": [0.1, 0.5, 1.0], "delta": 0.5})");
    REQUIRE(run_args({"oss-scan", "--config", tmp.file("oss.json"),
                      "--output", tmp.file("out")}) == 0);
    auto csv = read_file(tmp.file("out/oss.csv"));
    REQUIRE(csv.rfind("scale,modulus\n", 0) == 0);
    REQUIRE(fs::exists(tmp.file("out/oss_scale.csv")));

    write_file(tmp.file("bal.json"), R"({
        "grid": {"d": 2, "n": 64},
        "initial": {"recipe": "two-mode", "amplitude": 0.5},
        "alpha": 1.0, "c1": 0.01,
        "increment-scan": {"displacement": [0.4, 0.2], "samples": 16}})");
    REQUIRE(run_args({"balance", "--config", tmp.file("bal.json"),
                      "--output", tmp.file("balout")}) == 0);
    REQUIRE(fs::exists(tmp.file("balout/balance.csv")));
    REQUIRE(fs::exists(tmp.file("balout/increment_scan.csv")));
    REQUIRE(fs::exists(tmp.file("balout/increment_fit.csv")));
}
