// Command-line front end: kernel-table, solve, verify-suite, data-gen.
// Exit codes: 0 ok, 1 failed verification, 2 bad config, 3 non-convergence,
// 4 I/O failure.
#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sqg/data_gen.hpp"
#include "sqg/kernels.hpp"
#include "sqg/svg.hpp"
#include "sqg/verify.hpp"

namespace {

using namespace sqg;

std::string manifest_text(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ostringstream ss;
    for (const auto& [k, v] : kv) ss << k << "=" << v << "\n";
    return ss.str();
}

std::string write_manifest(const std::filesystem::path& dir,
                           std::vector<std::pair<std::string, std::string>> kv) {
    const std::string body = manifest_text(kv);
    std::ostringstream hash;
    hash << std::hex << fnv1a(body);
    std::ofstream os(dir / "manifest.txt");
    if (!os) throw io_error("cannot write manifest in " + dir.string());
    os << "[run]\n" << body << "hash=" << hash.str() << "\n";
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    os << "written_unix=" << std::chrono::duration_cast<std::chrono::seconds>(now).count()
       << "\n";
    return hash.str();
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

int cmd_kernel_table(double alpha, double nu, double r_max, int samples,
                     const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    if (r_max <= 0.0) r_max = default_profile_radius(alpha, nu);
    const KernelProfile prof = heat_kernel_profile(alpha, nu, r_max, samples);
    const std::filesystem::path path = std::filesystem::path(out_dir) / "kernel_table.csv";
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path.string());
    os.precision(15);
    os << "# {alpha=" << alpha << ", nu=" << nu << ", r_max=" << prof.r_max()
       << ", mass=" << prof.mass << ", quad_residual=" << prof.quad_residual
       << ", tail_slope=" << prof.tail_slope << "}\n";
    os << "r,g,dg\n";
    for (std::size_t i = 0; i < prof.radii.size(); ++i)
        os << prof.radii[i] << ',' << prof.values[i] << ',' << prof.dvalues[i] << '\n';
    std::cout << "kernel table -> " << path.string() << " (mass " << prof.mass << ")\n";
    return 0;
}

int cmd_data_gen(const std::string& kind_name, int n, double domain, std::uint64_t seed,
                 const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    GridSpec spec{n, n, domain, domain};
    const DataKind kind = parse_data_kind(kind_name);
    const auto [theta, u] = generate_data(kind, spec, seed);
    write_field(theta, std::filesystem::path(out_dir) / "theta0.sqgf");
    write_field(u.x, std::filesystem::path(out_dir) / "u0x.sqgf");
    write_field(u.y, std::filesystem::path(out_dir) / "u0y.sqgf");
    write_manifest(out_dir, {{"subcommand", "data-gen"},
                             {"kind", kind_name},
                             {"grid", std::to_string(n)},
                             {"domain", fmt(domain)},
                             {"seed", std::to_string(seed)}});
    std::cout << "data written to " << out_dir << "\n";
    return 0;
}

std::pair<ScalarField, VectorField> load_or_generate(const std::string& data, const GridSpec& spec,
                                                     std::uint64_t seed) {
    if (data.rfind("file:", 0) == 0) {
        const std::filesystem::path dir = data.substr(5);
        ScalarField theta = read_field(dir / "theta0.sqgf");
        VectorField u;
        u.x = read_field(dir / "u0x.sqgf");
        u.y = read_field(dir / "u0y.sqgf");
        ensure(theta.spec == spec,
               "field files do not match --grid/--domain (got " +
                   std::to_string(theta.spec.nx) + ")");
        return {std::move(theta), std::move(u)};
    }
    return generate_data(parse_data_kind(data), spec, seed);
}

int cmd_solve(double alpha, double nu, int n, double domain, const std::string& t_spec, int nodes,
              const std::string& data, std::uint64_t seed, const std::string& out_dir,
              bool dump_all_nodes) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    GridSpec spec{n, n, domain, domain};
    auto [theta0, u0] = load_or_generate(data, spec, seed);

    SolverConfig cfg;
    cfg.alpha = alpha;
    cfg.nu = nu;
    cfg.spec = spec;
    cfg.n_time_nodes = nodes;
    cfg.kernel_constant_C = measure_kernel_constant(alpha, nu);

    const double th0 = field_norms(theta0).linf;
    const double u0n = linf_norm(u0);
    double t_final;
    if (t_spec == "auto") {
        t_final = th0 + u0n > 0.0
                      ? 10.0 * picard_interval_length(th0, u0n, cfg)
                      : 1.0;
    } else {
        t_final = std::stod(t_spec);
    }

    const std::string hash =
        write_manifest(out_dir, {{"subcommand", "solve"},
                                 {"alpha", fmt(alpha)},
                                 {"nu", fmt(nu)},
                                 {"grid", std::to_string(n)},
                                 {"domain", fmt(domain)},
                                 {"T", fmt(t_final)},
                                 {"nodes", std::to_string(nodes)},
                                 {"data", data},
                                 {"seed", std::to_string(seed)},
                                 {"kernel_constant_C", fmt(cfg.kernel_constant_C)}});

    const GlobalSolution run = solve_global(theta0, u0, t_final, cfg);

    // schedule CSV with drift metrics per interval end
    {
        std::ofstream os(dir / "schedule.csv");
        if (!os) throw io_error("cannot write schedule.csv");
        os << "# manifest=" << hash << "\n";
        os << "n,tau_n,S_n,theta_linf,u_linf,mean_drift,constitutive_drift,div_linf\n";
        os.precision(15);
        const double mean0 = mean_value(theta0);
        for (std::size_t i = 0; i < run.schedule.taus.size(); ++i) {
            const ScalarField& th = run.segments[i].theta_nodes.back();
            const VectorField& u = run.segments[i].u_nodes.back();
            const VectorField ur = riesz_velocity(th);
            double cd = 0.0;
            for (std::size_t j = 0; j < u.x.samples.size(); ++j)
                cd = std::max(cd, std::hypot(u.x.samples[j] - ur.x.samples[j],
                                             u.y.samples[j] - ur.y.samples[j]));
            os << i + 1 << ',' << run.schedule.taus[i] << ',' << run.schedule.cum_times[i] << ','
               << run.schedule.theta_linf[i] << ',' << run.schedule.u_linf[i] << ','
               << std::abs(mean_value(th) - mean0) << ',' << cd << ','
               << field_norms(divergence(u)).linf << '\n';
        }
    }

    // field files: every interval end; all nodes of the last interval (or of
    // every interval with --dump-all-nodes)
    auto dump = [&](const std::string& stem, const ScalarField& f) {
        write_field(f, dir / (stem + ".sqgf"));
    };
    for (std::size_t i = 0; i < run.segments.size(); ++i) {
        const bool all = dump_all_nodes || i + 1 == run.segments.size();
        const auto& seg = run.segments[i];
        for (std::size_t k = all ? 1 : seg.t_nodes.size() - 1; k < seg.t_nodes.size(); ++k) {
            std::ostringstream stem;
            stem << "i" << std::setw(3) << std::setfill('0') << i + 1 << "_n" << std::setw(3)
                 << std::setfill('0') << k;
            dump("theta_" + stem.str(), seg.theta_nodes[k]);
            dump("ux_" + stem.str(), seg.u_nodes[k].x);
            dump("uy_" + stem.str(), seg.u_nodes[k].y);
        }
    }
    dump("theta_i000_n000", theta0);
    dump("ux_i000_n000", u0.x);
    dump("uy_i000_n000", u0.y);

    // plots
    {
        LinePlot norms;
        norms.title = "sup norms along the continuation";
        norms.xlabel = "t";
        norms.ylabel = "sup norm";
        PlotSeries st{"theta", {0.0}, {th0}};
        PlotSeries su{"u", {0.0}, {u0n}};
        for (std::size_t i = 0; i < run.schedule.cum_times.size(); ++i) {
            st.x.push_back(run.schedule.cum_times[i]);
            st.y.push_back(run.schedule.theta_linf[i]);
            su.x.push_back(run.schedule.cum_times[i]);
            su.y.push_back(run.schedule.u_linf[i]);
        }
        norms.series = {st, su};
        norms.annotation = "manifest " + hash;
        norms.write(dir / "norms.svg");

        LinePlot sched;
        sched.title = "interval lengths";
        sched.xlabel = "S_n";
        sched.ylabel = "tau_n";
        sched.log_y = true;
        PlotSeries ts{"tau_n", run.schedule.cum_times, run.schedule.taus};
        sched.series = {ts};
        sched.annotation = "manifest " + hash;
        sched.write(dir / "schedule.svg");
    }
    std::cout << "solve: " << run.schedule.taus.size() << " intervals to T=" << t_final
              << ", artifacts in " << out_dir << "\n";
    return 0;
}

int cmd_verify_suite(const std::string& alphas_csv, int n, double domain,
                     const std::string& out_path) {
    std::vector<double> alphas;
    {
        std::stringstream ss(alphas_csv);
        std::string item;
        while (std::getline(ss, item, ',')) alphas.push_back(std::stod(item));
    }
    ensure(!alphas.empty(), "verify-suite: need at least one alpha");

    const std::string hash = [&] {
        std::ostringstream ss;
        ss << std::hex
           << fnv1a("verify-suite alphas=" + alphas_csv + " grid=" + std::to_string(n) +
                    " domain=" + fmt(domain));
        return ss.str();
    }();

    DiagnosticsReport rep;
    rep.merge(check_closed_forms());
    for (double a : alphas) {
        std::cout << "verify: alpha=" << a << "\n";
        rep.merge(check_dilation(a));
        rep.merge(check_decay_rates(a, 1.0, n, 40.0));
        if (a < 1.0) rep.merge(check_lambda_equivalence(a));

        SolverConfig cfg;
        cfg.alpha = a;
        cfg.nu = 1.0;
        cfg.spec = GridSpec{n / 2, n / 2, domain, domain};
        cfg.kernel_constant_C = measure_kernel_constant(a, 1.0);
        auto [theta0, u0] = generate_data(DataKind::Random, cfg.spec, 7);
        const double tau1 =
            picard_interval_length(field_norms(theta0).linf, linf_norm(u0), cfg);
        const GlobalSolution run = solve_global(theta0, u0, 10.5 * tau1, cfg);
        rep.merge(check_solution_suite(run, cfg));
        rep.merge(check_schedule(run, cfg, 10.5 * tau1, 60));
        rep.merge(check_contraction(theta0, u0, cfg));
        rep.merge(check_holder_diffusion_exponent(a, 1.0, cfg.spec, 11));
    }
    {
        GridSpec s{64, 64, 20.0, 20.0};
        rep.merge(check_uniform_annuli(centered_bump(s, 2.0), "bump", true));
        rep.merge(check_uniform_annuli(sparse_bump_lattice(s), "lattice", false));
        rep.merge(check_uniform_annuli(sparse_bump_lattice(s, 0.0, true), "checkerboard", false));
        rep.merge(check_domain_convergence({20.0, 40.0}, 20.0 / 64, alphas.front(), 1.0));
    }

    rep.write_csv(out_path, hash);
    int gating = 0, failed = 0;
    for (const auto& r : rep.rows) {
        if (r.mode == TolMode::Info) continue;
        ++gating;
        if (!r.pass) {
            ++failed;
            std::cout << "FAIL " << r.name << " measured=" << r.measured
                      << " target=" << r.target << "\n";
        }
    }
    std::cout << "verify-suite: " << gating - failed << "/" << gating << " gating rows pass -> "
              << out_path << "\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale dissipative SQG toolkit"};
    app.require_subcommand(1);

    auto* kt = app.add_subcommand("kernel-table", "emit the radial heat-kernel table");
    double kt_alpha = 0.75, kt_nu = 1.0, kt_rmax = 0.0;
    int kt_samples = 1280;
    std::string kt_out = "out";
    kt->add_option("--alpha", kt_alpha, "dissipation exponent in [1/2, 1]");
    kt->add_option("--nu", kt_nu, "diffusion coefficient");
    kt->add_option("--rmax", kt_rmax, "table extent (0 = auto)");
    kt->add_option("--samples", kt_samples, "table size");
    kt->add_option("--out", kt_out, "output directory");

    auto* sv = app.add_subcommand("solve", "run the Picard continuation");
    double sv_alpha = 0.75, sv_nu = 1.0, sv_domain = 4.0 * M_PI;
    int sv_grid = 128, sv_nodes = 12;
    std::string sv_t = "auto", sv_data = "random", sv_out = "out";
    std::uint64_t sv_seed = 1;
    bool sv_dump_all = false;
    sv->add_option("--alpha", sv_alpha, "dissipation exponent in (1/2, 1]");
    sv->add_option("--nu", sv_nu, "diffusion coefficient");
    sv->add_option("--grid", sv_grid, "samples per axis");
    sv->add_option("--domain", sv_domain, "torus side length");
    sv->add_option("--T", sv_t, "final time, or 'auto' for 10 tau_1");
    sv->add_option("--nodes", sv_nodes, "time nodes per interval");
    sv->add_option("--data", sv_data, "mode|bumps|psi|random|file:DIR");
    sv->add_option("--seed", sv_seed, "data seed");
    sv->add_option("--out", sv_out, "output directory");
    sv->add_flag("--dump-all-nodes", sv_dump_all, "write fields at every node of every interval");

    auto* vf = app.add_subcommand("verify-suite", "run the lemma checks");
    std::string vf_alphas = "0.75,1.0", vf_out = "report.csv";
    int vf_grid = 256;
    double vf_domain = 4.0 * M_PI;
    vf->add_option("--alpha", vf_alphas, "comma-separated alphas");
    vf->add_option("--grid", vf_grid, "kernel-measurement grid");
    vf->add_option("--domain", vf_domain, "solver domain");
    vf->add_option("--out", vf_out, "report CSV path");

    auto* dg = app.add_subcommand("data-gen", "write initial-data field files");
    std::string dg_kind = "random", dg_out = "out";
    int dg_grid = 128;
    double dg_domain = 4.0 * M_PI;
    std::uint64_t dg_seed = 1;
    dg->add_option("--kind", dg_kind, "mode|bumps|psi|random");
    dg->add_option("--grid", dg_grid, "samples per axis");
    dg->add_option("--domain", dg_domain, "torus side length");
    dg->add_option("--seed", dg_seed, "seed");
    dg->add_option("--out", dg_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (kt->parsed()) return cmd_kernel_table(kt_alpha, kt_nu, kt_rmax, kt_samples, kt_out);
        if (sv->parsed())
            return cmd_solve(sv_alpha, sv_nu, sv_grid, sv_domain, sv_t, sv_nodes, sv_data,
                             sv_seed, sv_out, sv_dump_all);
        if (vf->parsed()) return cmd_verify_suite(vf_alphas, vf_grid, vf_domain, vf_out);
        if (dg->parsed()) return cmd_data_gen(dg_kind, dg_grid, dg_domain, dg_seed, dg_out);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
