#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sqg/verify.hpp"

using namespace sqg;

TEST_CASE("report row semantics") {
    DiagnosticsReport rep;
    CHECK(rep.add("abs_ok", 1.05, 1.0, 0.1, TolMode::Abs).pass);
    CHECK_FALSE(rep.add("abs_bad", 1.2, 1.0, 0.1, TolMode::Abs).pass);
    CHECK(rep.add("rel_ok", 110.0, 100.0, 0.2, TolMode::Rel).pass);
    CHECK_FALSE(rep.add("rel_bad", 130.0, 100.0, 0.2, TolMode::Rel).pass);
    CHECK(rep.add("upper_ok", 0.9, 1.0, 0.0, TolMode::UpperBound).pass);
    CHECK_FALSE(rep.add("upper_bad", 1.1, 1.0, 0.0, TolMode::UpperBound).pass);
    CHECK(rep.add("lower_ok", 3.5, 3.0, 0.0, TolMode::LowerBound).pass);
    CHECK_FALSE(rep.add("lower_bad", 2.5, 3.0, 0.0, TolMode::LowerBound).pass);
    CHECK_FALSE(rep.all_pass());

    DiagnosticsReport info_only;
    info_only.add("note", 123.0, 0.0, 0.0, TolMode::Info);
    CHECK(info_only.all_pass());
}

TEST_CASE("report CSV carries the manifest hash and rows") {
    DiagnosticsReport rep;
    auto& row = rep.add("a_metric", 2.0, 2.0, 0.1, TolMode::Abs);
    row.metadata["alpha"] = "0.75";
    const auto path = std::filesystem::temp_directory_path() / "sqg_report_test.csv";
    rep.write_csv(path, "deadbeef");
    std::ifstream is(path);
    std::string line1, line2, line3;
    std::getline(is, line1);
    std::getline(is, line2);
    std::getline(is, line3);
    CHECK(line1 == "# manifest=deadbeef");
    CHECK(line2 == "check_name,measured_value,target,tolerance,mode,pass,metadata");
    CHECK(line3.find("a_metric,2,2,0.1,abs,1,alpha=0.75") == 0);
}

TEST_CASE("negative control: residual check fails without dealiasing") {
    // data rich enough that the quadratic term aliases on a small grid
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.nu = 1.0;
    cfg.spec = GridSpec{32, 32, 4.0 * M_PI, 4.0 * M_PI};
    cfg.kernel_constant_C = measure_kernel_constant(0.75, 1.0, 128, 40.0);
    ScalarField theta0 = random_band_limited(cfg.spec, 5, 3, 10);
    const VectorField u0 = riesz_velocity(theta0);

    SolverConfig broken = cfg;
    broken.dealias = false;
    const DiagnosticsReport bad = check_residual_convergence(theta0, u0, broken, 0.02);
    const DiagnosticsReport good = check_residual_convergence(theta0, u0, cfg, 0.02);
    CHECK(good.rows[0].measured > bad.rows[0].measured);
    CHECK_FALSE(bad.rows[0].pass);
}

TEST_CASE("negative control: doctored trajectory trips the maximum principle") {
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.nu = 1.0;
    cfg.spec = GridSpec{32, 32, 4.0 * M_PI, 4.0 * M_PI};
    cfg.kernel_constant_C = measure_kernel_constant(0.75, 1.0, 128, 40.0);
    auto [theta0, u0] = generate_data(DataKind::Random, cfg.spec, 2);
    const double tau1 =
        continuation_first_tau(field_norms(theta0).linf, linf_norm(u0), cfg);
    GlobalSolution run = solve_global(theta0, u0, 3.0 * tau1, cfg);
    CHECK(check_solution_suite(run, cfg).all_pass());

    for (double& v : run.segments.back().theta_nodes.back().samples) v *= 1.01;
    const DiagnosticsReport doctored = check_solution_suite(run, cfg);
    bool max_row_failed = false;
    for (const auto& row : doctored.rows)
        if (row.name == "max_principle") max_row_failed = !row.pass;
    CHECK(max_row_failed);
}

TEST_CASE("uniform-over-annuli rows") {
    GridSpec s{64, 64, 20.0, 20.0};
    SUBCASE("single bump gates sup and tail decay") {
        const DiagnosticsReport rep = check_uniform_annuli(centered_bump(s, 2.0), "bump", true);
        for (const auto& row : rep.rows) {
            CAPTURE(row.name);
            CHECK(row.pass);
        }
    }
    SUBCASE("sparse lattice and checkerboard stay bounded") {
        for (bool alt : {false, true}) {
            const ScalarField f = sparse_bump_lattice(s, 0.0, alt);
            const DiagnosticsReport rep =
                check_uniform_annuli(f, alt ? "checker" : "lattice", false);
            CHECK(rep.all_pass());
        }
    }
}

TEST_CASE("Holder diffusion exponent for rough data") {
    const DiagnosticsReport rep =
        check_holder_diffusion_exponent(0.75, 1.0, GridSpec{64, 64, 4.0 * M_PI, 4.0 * M_PI}, 9);
    CHECK(rep.rows[0].pass);
}

TEST_CASE("Holder envelope is stable under grid refinement") {
    SolverConfig coarse;
    coarse.alpha = 0.75;
    coarse.nu = 1.0;
    coarse.spec = GridSpec{32, 32, 4.0 * M_PI, 4.0 * M_PI};
    coarse.kernel_constant_C = measure_kernel_constant(0.75, 1.0, 128, 40.0);
    SolverConfig fine = coarse;
    fine.spec = GridSpec{64, 64, 4.0 * M_PI, 4.0 * M_PI};

    auto [tc, uc] = generate_data(DataKind::Random, coarse.spec, 21);
    auto [tf, uf] = generate_data(DataKind::Random, fine.spec, 21);
    const double tau1 = continuation_first_tau(field_norms(tc).linf, linf_norm(uc), coarse);
    const GlobalSolution rc = solve_global(tc, uc, 5.0 * tau1, coarse);
    const GlobalSolution rf = solve_global(tf, uf, 5.0 * tau1, fine);
    const DiagnosticsReport rep = check_holder_gain(rc, rf, coarse);
    CHECK(rep.all_pass());
}

TEST_CASE("commutation and PV identity shrink with the domain") {
    const DiagnosticsReport rep = check_domain_convergence({20.0, 40.0}, 20.0 / 64, 0.75, 1.0);
    for (const auto& row : rep.rows) {
        CAPTURE(row.name);
        CAPTURE(row.measured);
        CHECK(row.pass);
    }
}

TEST_CASE("contraction check emits gating and informational rows") {
    SolverConfig cfg;
    cfg.alpha = 1.0;
    cfg.nu = 1.0;
    cfg.spec = GridSpec{48, 48, 2.0 * M_PI, 2.0 * M_PI};
    cfg.kernel_constant_C = measure_kernel_constant(1.0, 1.0, 128, 40.0);
    auto theta0 =
        ScalarField::from_function(cfg.spec, [](double x, double) { return std::cos(x); });
    const DiagnosticsReport rep = check_contraction(theta0, riesz_velocity(theta0), cfg);
    bool saw_info = false;
    for (const auto& row : rep.rows) {
        if (row.mode == TolMode::Info) saw_info = true;
        else CHECK(row.pass);
    }
    CHECK(saw_info);
    CHECK(rep.all_pass());
}

TEST_CASE("determinism of seeded data") {
    GridSpec s{32, 32, 4.0, 4.0};
    const ScalarField a = random_band_limited(s, 12345);
    const ScalarField b = random_band_limited(s, 12345);
    const ScalarField c = random_band_limited(s, 54321);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
}
