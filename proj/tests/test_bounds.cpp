// Nonlinear lower-bound checks: explicit-constant L^inf bound, calibrated
// Holder/Lp/periodic/pointwise bounds, the pointwise identity residual, and
// sweep/calibration plumbing.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "fraclab/bounds.hpp"

using namespace fraclab;

namespace {

const GridSpec kBox1d = enlarged_box(1, 512);

ScalarField gaussian_field(const GridSpec& spec, double scale = 1.0, double rate = 1.0) {
    return sample(spec, [&](double x) { return scale * std::exp(-rate * x * x); });
}

ConstantsFile quick_calibration() {
    // small pre-registered calibration shared by the tests below
    static ConstantsFile consts = [] {
        FamilySpec fam;
        fam.kind = FamilySpec::Kind::GaussianMixture;
        fam.grid = kBox1d;
        std::vector<CheckSpec> cases = {
            {TheoremId::Holder, 0.5, 0.5, 0.0},  {TheoremId::Holder, 1.0, 0.5, 0.0},
            {TheoremId::Lp, 1.0, 0.0, 2.0},      {TheoremId::Lp, 0.5, 0.0, 1.0},
            {TheoremId::Pointwise, 0.5, 0, 0},   {TheoremId::Pointwise, 1.0, 0, 0},
            {TheoremId::Pointwise, 1.5, 0, 0},
        };
        auto outcome = calibrate_constants(fam, cases, 60, 20260801u, 1, 20, 2);
        ConstantsFile c = outcome.constants;

        FamilySpec per;
        per.kind = FamilySpec::Kind::BandLimited;
        per.grid = GridSpec(1, 256);
        per.max_mode = 8;
        auto pout = calibrate_constants(per, {{TheoremId::Periodic, 1.0, 0, 0}}, 60, 31u);
        c.set(constant_key("periodic", 1, 1.0), pout.constants.get(constant_key("periodic", 1, 1.0)));
        return c;
    }();
    return consts;
}

} // namespace

TEST_CASE("explicit L^inf constant formula") {
    const double c = linf_explicit_constant(1, 1.0);
    // alpha 2^((1+a)^2) (4+d)^a / (|S^0| c_{1,1}) = 16*5/(2/pi) = 40 pi
    REQUIRE(c == Catch::Approx(40.0 * std::numbers::pi).epsilon(1e-12));
    REQUIRE(linf_explicit_constant(2, 0.5) > 0.0);
}

TEST_CASE("L^inf bound holds on the truncated Gaussian") {
    auto f = gaussian_field(kBox1d);
    auto r = check_linf_bound(f, 1, 1.0);
    REQUIRE(r.pass);
    REQUIRE(r.margin >= 0.0);
    // derivative max sqrt(2) e^{-1/2} at x = -1/sqrt(2)
    REQUIRE(r.extremum_value == Catch::Approx(std::sqrt(2.0) * std::exp(-0.5)).epsilon(1e-6));
    const auto loc = f.location(r.extremum_index);
    REQUIRE(std::abs(loc[0] + 1.0 / std::sqrt(2.0)) < f.spec.spacing());
    REQUIRE(r.lhs > 0.0);
}

TEST_CASE("L^inf bound: scaling covariance in f") {
    auto f = gaussian_field(kBox1d);
    auto g = gaussian_field(kBox1d, 3.0);
    auto rf = check_linf_bound(f, 1, 1.0);
    auto rg = check_linf_bound(g, 1, 1.0);
    REQUIRE(rg.lhs == Catch::Approx(3.0 * rf.lhs).epsilon(1e-8));
    REQUIRE(rg.rhs == Catch::Approx(3.0 * rf.rhs).epsilon(1e-8));
    REQUIRE(rg.margin == Catch::Approx(3.0 * rf.margin).epsilon(1e-8));
    REQUIRE(rg.pass == rf.pass);
    REQUIRE(rg.extremum_index == rf.extremum_index); // argmax scale invariance
}

TEST_CASE("L^inf bound: dilation covariance") {
    for (double alpha : {0.5, 1.0}) {
        auto f = gaussian_field(kBox1d);
        auto f2 = gaussian_field(kBox1d, 1.0, 4.0); // f(2x)
        auto r = check_linf_bound(f, 1, alpha);
        auto r2 = check_linf_bound(f2, 1, alpha);
        REQUIRE(r2.lhs / r2.rhs == Catch::Approx(r.lhs / r.rhs).epsilon(5e-2));
    }
}

TEST_CASE("constant fields have no positive derivative maximum") {
    ScalarField f(kBox1d, 2.0);
    REQUIRE_THROWS_AS(check_linf_bound(f, 1, 1.0), NoPositiveMaximum);
}

TEST_CASE("Holder bound with calibrated constant") {
    auto consts = quick_calibration();
    const double c = consts.get(holder_key(1, 0.5, 0.5));
    auto f = gaussian_field(kBox1d);
    auto r = check_holder_bound(f, 1, 0.5, 0.5, c);
    REQUIRE(r.pass);

    // homogeneity: margin scales linearly in f
    ScalarField f3 = f;
    for (auto& v : f3.values) v *= 4.0;
    auto r3 = check_holder_bound(f3, 1, 0.5, 0.5, c);
    REQUIRE(r3.margin == Catch::Approx(4.0 * r.margin).epsilon(1e-8));

    REQUIRE_THROWS_AS(check_holder_bound(f, 1, 0.5, 1.5, c), InvalidDelta);
}

TEST_CASE("Holder rhs tends to the L^inf rhs as delta -> 0") {
    auto f = gaussian_field(kBox1d);
    ScalarField g = derivative(f, 0);
    const double gmax = polish_positive_max(g).value;
    const double fn = linf_norm(f);
    const double c = 7.0; // any common constant
    const double delta = 0.01;
    const double e = 1.0 / (1.0 - delta); // alpha = 1
    const double rhs_holder = std::pow(gmax, 1.0 + e) / (c * std::pow(fn, e));
    const double rhs_linf = std::pow(gmax, 2.0) / (c * fn);
    REQUIRE(rhs_holder == Catch::Approx(rhs_linf).epsilon(5e-2));
}

TEST_CASE("Lp bound with calibrated constant and p -> inf consistency") {
    auto consts = quick_calibration();
    auto f = gaussian_field(kBox1d);
    auto r = check_lp_bound(f, 1, 1.0, 2.0, consts.get(lp_key(1, 1.0, 2.0)));
    REQUIRE(r.pass);
    auto r1 = check_lp_bound(f, 1, 0.5, 1.0, consts.get(lp_key(1, 0.5, 1.0)));
    REQUIRE(r1.pass);

    ScalarField g = derivative(f, 0);
    const double gmax = polish_positive_max(g).value;
    const double c = 3.0;
    const double p = 1000.0;
    const double e = 1.0 * p / (1 + p);
    const double rhs_lp = std::pow(gmax, 1.0 + e) / (c * std::pow(lp_norm(f, p), e));
    const double rhs_linf = std::pow(gmax, 2.0) / (c * linf_norm(f));
    REQUIRE(rhs_lp == Catch::Approx(rhs_linf).epsilon(5e-2));

    // homogeneity
    ScalarField f2 = f;
    for (auto& v : f2.values) v *= 2.5;
    auto r2 = check_lp_bound(f2, 1, 1.0, 2.0, consts.get(lp_key(1, 1.0, 2.0)));
    REQUIRE(r2.margin == Catch::Approx(2.5 * r.margin).epsilon(1e-8));

    REQUIRE_THROWS_AS(check_lp_bound(f, 1, 1.0, 0.5, 1.0), InvalidExponent);
}

TEST_CASE("periodic dichotomy: equality case lands on the norm branch") {
    GridSpec spec(1, 256);
    auto f = sample(spec, [](double x) { return std::sin(x); });
    auto r = check_periodic_bound(f, 1, 1.0, 1.0); // c = 1: g(xbar) = ||f|| exactly
    REQUIRE(r.branch == DichotomyBranch::BoundedByNorm);
    REQUIRE(r.pass);
}

TEST_CASE("periodic dichotomy with calibrated constant") {
    auto consts = quick_calibration();
    const double c = consts.get(constant_key("periodic", 1, 1.0));
    GridSpec spec(1, 256);
    auto f = sample(spec, [](double x) { return std::sin(x) + 0.2 * std::sin(8 * x); });
    auto r = check_periodic_bound(f, 1, 1.0, c);
    REQUIRE(r.pass);

    // homogeneity: branch selection is scale invariant
    ScalarField f5 = f;
    for (auto& v : f5.values) v *= 5.0;
    auto r5 = check_periodic_bound(f5, 1, 1.0, c);
    REQUIRE(r5.branch == r.branch);
    REQUIRE(r5.pass);
}

TEST_CASE("pointwise bound: degenerate, single-mode, randomized") {
    auto consts = quick_calibration();
    const double c1 = consts.get(constant_key("pointwise", 1, 1.0));
    REQUIRE(c1 >= 1.0); // cos(x) alone forces c >= 1, calibration doubles it

    GridSpec spec(1, 256);
    ScalarField constant(spec, 3.0);
    auto rv = check_pointwise_bound(constant, 1.0, c1);
    REQUIRE(rv.pass);
    REQUIRE(rv.margin == 0.0);

    auto f = sample(spec, [](double x) { return std::cos(x); });
    auto r = check_pointwise_bound(f, 1.0, c1);
    REQUIRE(r.pass);
    REQUIRE(r.lhs == Catch::Approx(1.0).margin(2e-2)); // sin^2 at the max
    // corollary side: lhs >= |grad f|^(2+a) / (c ||f||^a) = 1/c
    REQUIRE(r.lhs >= 1.0 / c1);

    for (double alpha : {0.5, 1.0, 1.5}) {
        const double c = consts.get(constant_key("pointwise", 1, alpha));
        FamilySpec fam;
        fam.kind = FamilySpec::Kind::BandLimited;
        fam.grid = kBox1d;
        fam.max_mode = 8;
        for (int t = 0; t < 25; ++t) {
            Rng rng = Rng(777).fork(t);
            auto fld = draw_family(fam, rng);
            REQUIRE(check_pointwise_bound(fld, alpha, c).pass);
        }
    }
}

TEST_CASE("pointwise identity residual") {
    GridSpec spec(1, 256);
    ScalarField constant(spec, 1.0);
    REQUIRE(verify_pointwise_identity(constant, 1.0) == 0.0);

    auto f = sample(spec, [](double x) { return std::cos(x); });
    REQUIRE(verify_pointwise_identity(f, 1.0) <= 2e-2);

    FamilySpec fam;
    fam.kind = FamilySpec::Kind::BandLimited;
    fam.grid = spec;
    fam.max_mode = 8;
    Rng rng(2024);
    auto fld = draw_family(fam, rng);
    REQUIRE(verify_pointwise_identity(fld, 1.5) <= 2e-2);
}

TEST_CASE("identity residual does not grow under refinement") {
    FamilySpec coarse, fine;
    coarse.kind = fine.kind = FamilySpec::Kind::BandLimited;
    coarse.grid = GridSpec(1, 256);
    fine.grid = GridSpec(1, 512);
    coarse.max_mode = fine.max_mode = 8;
    for (int t = 0; t < 5; ++t) {
        Rng ra = Rng(91).fork(t), rb = Rng(91).fork(t);
        auto fa = draw_family(coarse, ra); // same coefficients, two grids
        auto fb = draw_family(fine, rb);
        const double res_coarse = verify_pointwise_identity(fa, 1.0);
        const double res_fine = verify_pointwise_identity(fb, 1.0);
        REQUIRE(res_fine <= res_coarse + 1e-3);
    }
}

TEST_CASE("sweep: empty, deterministic, theorem-backed pass rate") {
    auto consts = quick_calibration();
    FamilySpec fam;
    fam.kind = FamilySpec::Kind::GaussianMixture;
    fam.grid = kBox1d;

    auto empty = sweep(fam, {{TheoremId::Linf, 1.0, 0, 0}}, 0, 1, consts);
    REQUIRE(empty.rows.empty());

    std::vector<CheckSpec> checks = {{TheoremId::Linf, 0.5, 0, 0},
                                     {TheoremId::Linf, 1.0, 0, 0},
                                     {TheoremId::Linf, 1.5, 0, 0}};
    auto res = sweep(fam, checks, 40, 20260801u, consts, 1, 20, 2);
    REQUIRE(res.pass_rate == 1.0);
    REQUIRE(res.min_margin >= 0.0);

    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "fraclab_test_bounds";
    fs::create_directories(dir);
    const auto p1 = (dir / "a.csv").string(), p2 = (dir / "b.csv").string();
    write_sweep_csv(res, p1);
    auto res2 = sweep(fam, checks, 40, 20260801u, consts, 1, 20, 4);
    write_sweep_csv(res2, p2);
    REQUIRE(read_file(p1) == read_file(p2)); // seed + config -> identical bytes
    fs::remove_all(dir);
}

TEST_CASE("empirical L^inf constant stays below the explicit one") {
    FamilySpec fam;
    fam.kind = FamilySpec::Kind::GaussianMixture;
    fam.grid = kBox1d;
    for (double alpha : {0.5, 1.0, 1.5}) {
        double worst = 0.0;
        for (int t = 0; t < 30; ++t) {
            Rng rng = Rng(5150).fork(t);
            auto f = draw_family(fam, rng);
            worst = std::max(worst, minimal_constant(f, {TheoremId::Linf, alpha, 0, 0}, 1, 20));
        }
        REQUIRE(worst <= linf_explicit_constant(1, alpha));
    }
}

TEST_CASE("constants file round trip") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "fraclab_test_constants";
    fs::create_directories(dir);
    const auto path = (dir / "constants.v1").string();

    ConstantsFile c;
    c.set("holder.d1.a0.50.dl0.50", 3.25);
    c.set("localizer.c7", 1.0);
    c.save(path, {"written by a unit test"});
    auto c2 = ConstantsFile::load(path);
    REQUIRE(c2.get("holder.d1.a0.50.dl0.50") == 3.25);
    REQUIRE(c2.get("localizer.c7") == 1.0);
    REQUIRE(c2.get_or("missing.key", -1.0) == -1.0);
    REQUIRE_THROWS_AS(c2.get("missing.key"), InvalidConfig);

    write_file(path, "garbage line without equals\n");
    REQUIRE_THROWS_AS(ConstantsFile::load(path), InvalidConfig);
    fs::remove_all(dir);
}
