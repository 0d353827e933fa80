#include "wavekin/studies.hpp"

#include "wavekin/field.hpp"
#include "wavekin/io.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace wavekin {

using nlohmann::json;
namespace fs = std::filesystem;

ParticleEnsemble make_initial_ensemble(const RunConfig& c) {
    if (c.ensemble_kind == "two-body") {
        const double d = c.pair_separation, p = c.pair_momentum;
        return ParticleEnsemble::uniform({{d / 2, 0, 0}, {-d / 2, 0, 0}},
                                         {{0, p, 0}, {0, -p, 0}});
    }
    if (c.ensemble_kind == "ground-state") {
        std::vector<Vec3> q(c.n_particles, Vec3{});
        std::vector<Vec3> p(c.n_particles, Vec3{});
        return ParticleEnsemble::uniform(std::move(q), std::move(p));
    }
    if (c.ensemble_kind == "eight-body") {
        // cube-vertex cluster with a mild rigid rotation about z
        const double a = 1.1 / std::sqrt(3.0);
        std::vector<Vec3> q, p;
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                for (int sz : {-1, 1}) {
                    const Vec3 x{a * sx, a * sy, a * sz};
                    q.push_back(x);
                    const Vec3 omega{0, 0, 0.08};
                    p.push_back(cross(omega, x));
                }
        return ParticleEnsemble::uniform(std::move(q), std::move(p));
    }
    if (c.ensemble_kind == "sampler") {
        Philox rng(c.seed, 0);
        return sample_iid(c.sampler, c.n_particles, rng);
    }
    if (c.ensemble_kind == "file") {
        return read_ensemble_csv(c.ensemble_file);
    }
    throw ConfigError("unknown ensemble kind '" + c.ensemble_kind + "'");
}

namespace {

void write_manifest(const fs::path& dir, const RunConfig& c, const char* study) {
    json j;
    j["version"] = kVersion;
    j["study"] = study;
    j["seed"] = c.seed;
    j["config"] = json::parse(dump_config(c));
    std::ofstream os(dir / "manifest.json");
    os << j.dump(2) << '\n';
}

json bound_report_json(const BoundReport& rep, double time) {
    json jr;
    jr["time"] = time;
    jr["ok"] = rep.all_ok;
    json checks = json::array();
    for (const auto& chk : rep.checks)
        checks.push_back({{"name", chk.name}, {"lhs", chk.lhs}, {"rhs", chk.rhs},
                          {"ok", chk.ok}});
    jr["checks"] = checks;
    return jr;
}

} // namespace

std::string prepare_output_dir(const std::string& requested, const std::string& stem) {
    fs::path dir = requested.empty() ? fs::path(default_output_root()) / stem
                                     : fs::path(requested);
    fs::create_directories(dir);
    return dir.string();
}

SimArtifacts run_simulation(const RunConfig& c, const std::string& outdir) {
    c.validate();
    if (c.threads > 0) set_max_threads(c.threads);
    RegularizationKernel kernel(c.epsilon, c.quad_order, c.radial_table_n);

    SimArtifacts art;
    ParticleEnsemble ens = make_initial_ensemble(c);
    SystemState state{ens, init_ground_field(kernel, ens, c.grid_n, c.box_halfwidth,
                                             c.support_radius)};
    art.Eperp = ground_state_energy(kernel);
    DiagnosticsRecord d0 = functionals(kernel, state);
    art.E0 = d0.energy;
    art.P0 = d0.momentum;
    art.J0 = d0.angular_momentum;

    RunOptions opt;
    opt.dt = c.dt;
    opt.T = c.T;
    opt.record_fields = false;
    opt.record_particles = false;
    opt.coupling_scale = c.coupling_scale;
    opt.diagnostics_stride = c.diagnostics_stride > 0 ? c.diagnostics_stride : 0;
    opt.assert_speed_bound_E0 = art.E0;
    opt.ground_energy = art.Eperp;

    auto result = run_coupled(kernel, state, opt);
    art.diagnostics = std::move(result.diagnostics);
    if (art.diagnostics.empty()) art.diagnostics.push_back(functionals(kernel, state));

    for (const auto& rec : art.diagnostics) {
        BoundReport rep = apriori_bounds(rec, state.particles.size(), art.E0, art.Eperp,
                                         art.P0, art.J0, c.support_radius);
        art.any_violation = art.any_violation || !rep.all_ok;
        art.bound_reports.push_back(std::move(rep));
    }
    art.any_violation = art.any_violation || result.speed_bound_violated;
    art.final_state = std::move(state);

    if (!outdir.empty()) {
        const fs::path dir(outdir);
        fs::create_directories(dir);
        write_manifest(dir, c, "simulate");
        write_diagnostics_csv(dir / "diagnostics.csv", art.diagnostics);
        write_ensemble_csv(dir / "ensemble_final.csv", art.final_state.particles);
        write_ensemble_binary((dir / "ensemble_final").string(), art.final_state.particles);
        write_field_binary((dir / "field_final").string(), art.final_state.field);
        json jb = json::array();
        for (std::size_t i = 0; i < art.bound_reports.size(); ++i)
            jb.push_back(bound_report_json(art.bound_reports[i], art.diagnostics[i].time));
        std::ofstream os(dir / "bounds.json");
        os << json({{"any_violation", art.any_violation}, {"reports", jb}}).dump(2) << '\n';
    }
    return art;
}

LlnResult lln_study(const RunConfig& c, const std::string& outdir) {
    c.validate();
    if (c.threads > 0) set_max_threads(c.threads);
    if (c.ensemble_kind != "sampler")
        throw ConfigError("lln study requires ensemble.kind = sampler");
    for (std::size_t n : c.lln_sweep)
        if (c.reference_n < 8 * n)
            throw ConfigError("study.reference_n must be at least 8x the largest sweep N");

    RegularizationKernel kernel(c.epsilon, c.quad_order, c.radial_table_n);
    const int steps = static_cast<int>(std::llround(c.T / c.dt));
    std::vector<int> time_steps;
    for (double t : c.study_times) {
        const int s = static_cast<int>(std::llround(t / c.dt));
        if (std::abs(s * c.dt - t) > 1e-9 || s < 0 || s > steps)
            throw ConfigError("study times must lie on the step grid within [0, T]");
        time_steps.push_back(s);
    }

    auto run_measures = [&](const ParticleEnsemble& start)
        -> std::vector<WeightedPointMeasure> {
        ParticleEnsemble ens = start;
        SystemState state{ens, init_ground_field(kernel, ens, c.grid_n, c.box_halfwidth,
                                                 c.support_radius)};
        RunOptions opt;
        opt.dt = c.dt;
        opt.T = c.T;
        opt.record_fields = false;
        opt.record_particles = true;
        auto res = run_coupled(kernel, state, opt);
        std::vector<WeightedPointMeasure> out;
        for (int s : time_steps) {
            WeightedPointMeasure m;
            m.weights = res.record.weights;
            for (std::size_t i = 0; i < res.record.weights.size(); ++i)
                m.points.push_back({res.record.positions[s][i], res.record.momenta[s][i]});
            out.push_back(std::move(m));
        }
        return out;
    };

    const auto ref_measures = run_measures(sample_quadrature(c.sampler, c.reference_n));

    LlnResult out;
    out.times = c.study_times;
    for (std::size_t ni = 0; ni < c.lln_sweep.size(); ++ni) {
        const std::size_t n = c.lln_sweep[ni];
        for (int rep = 0; rep < c.lln_replicas; ++rep) {
            Philox rng(c.seed, (ni + 1) * 1000000ull + rep);
            const auto ms = run_measures(sample_iid(c.sampler, n, rng));
            for (std::size_t ti = 0; ti < time_steps.size(); ++ti) {
                const auto d = kr_distance_full(ms[ti], ref_measures[ti]);
                out.rows.push_back({n, c.study_times[ti], rep, d.value, d.exact,
                                    d.duality_gap});
            }
        }
    }

    // slope of log mean-distance against log N, per study time
    for (std::size_t ti = 0; ti < c.study_times.size(); ++ti) {
        std::vector<double> lx, ly;
        bool monotone = true;
        double prev = 1e300;
        for (std::size_t n : c.lln_sweep) {
            double mean = 0.0;
            int cnt = 0;
            for (const auto& row : out.rows)
                if (row.n == n && row.time == c.study_times[ti]) {
                    mean += row.distance;
                    ++cnt;
                }
            mean /= cnt;
            monotone = monotone && (mean < prev);
            prev = mean;
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(mean));
        }
        out.slopes.push_back(fit_slope(lx, ly));
        out.monotone.push_back(monotone);
    }

    if (!outdir.empty()) {
        const fs::path dir(outdir);
        fs::create_directories(dir);
        write_manifest(dir, c, "lln-study");
        std::ofstream os(dir / "distances.csv");
        os << "N,t,replica,distance,solver_mode,gap\n";
        for (const auto& r : out.rows)
            os << r.n << ',' << format_double(r.time) << ',' << r.replica << ','
               << format_double(r.distance) << ',' << (r.exact ? "exact" : "entropic") << ','
               << format_double(r.gap) << '\n';
        json js;
        js["times"] = out.times;
        js["slopes"] = out.slopes;
        js["monotone"] = out.monotone;
        std::ofstream osj(dir / "slopes.json");
        osj << js.dump(2) << '\n';
        std::ofstream osg(dir / "plot_lln.gp");
        osg << "set logscale xy\nset xlabel 'N'\nset ylabel 'KR distance'\n"
               "set datafile separator ','\n"
               "plot 'distances.csv' every ::1 using 1:4 with points title 'replicas'\n";
    }
    return out;
}

CltResult clt_study(const RunConfig& c, const std::string& outdir) {
    c.validate();
    if (c.threads > 0) set_max_threads(c.threads);
    if (c.ensemble_kind != "sampler")
        throw ConfigError("clt study requires ensemble.kind = sampler");
    if (c.clt_replicas < 2) throw ConfigError("study.clt_replicas must be >= 2");
    if (c.probe_times.empty()) throw ConfigError("study.probe_times must be nonempty");

    RegularizationKernel kernel(c.epsilon, c.quad_order, c.radial_table_n);
    const int steps = static_cast<int>(std::llround(c.T / c.dt));
    std::vector<int> probe_steps;
    for (double t : c.probe_times) {
        const int s = static_cast<int>(std::llround(t / c.dt));
        if (std::abs(s * c.dt - t) > 1e-9 || s <= 0 || s > steps)
            throw ConfigError("probe times must lie on the step grid within (0, T]");
        probe_steps.push_back(s);
    }
    int field_stride = probe_steps.front();
    for (int s : probe_steps) field_stride = std::gcd(field_stride, s);

    const auto probes = default_probes(c.support_radius);
    ObservableLayout layout;
    layout.probe_steps = probe_steps;
    layout.n_probes = static_cast<int>(probes.size());
    const int dim = layout.dim();

    // fixed initial field: the static ground field of the reference measure
    const ParticleEnsemble ref_ens = sample_quadrature(c.sampler, c.reference_n);
    const WaveField zeta0 =
        init_ground_field(kernel, ref_ens, c.grid_n, c.box_halfwidth, c.support_radius);

    auto run_with_tracer = [&](const ParticleEnsemble& start, bool record_all)
        -> RunResult {
        ParticleEnsemble ens = start;
        SystemState state{ens, zeta0};
        RunOptions opt;
        opt.dt = c.dt;
        opt.T = c.T;
        opt.record_fields = true;
        opt.field_snapshot_stride = record_all ? 1 : field_stride;
        opt.record_particles = record_all;
        opt.coupling_scale = c.coupling_scale;
        opt.tracers = {c.test_particle};
        return run_coupled(kernel, state, opt);
    };

    // reference (continuum proxy) run
    const RunResult ref = run_with_tracer(ref_ens, false);
    std::vector<double> ref_probe_vals; // per probe step x probe
    std::vector<Phase> ref_tracer;
    for (int s : probe_steps) {
        ref_tracer.push_back(ref.tracer_at(0, s));
        const int snap = s / field_stride;
        for (const auto& pr : probes)
            ref_probe_vals.push_back(
                pr.pair(ref.record.psi_snaps[snap], ref.record.pi_snaps[snap]));
    }

    // sensitivity covariance from the quadrature base
    const RunResult base_run = run_with_tracer(sample_quadrature(c.sampler, c.sensitivity_atoms),
                                               true);
    SensitivityBase base;
    base.kernel = &kernel;
    base.rec = &base_run.record;
    base.coupling_scale = c.coupling_scale;
    for (std::size_t s = 0; s < base_run.tracer_steps; ++s)
        base.tracer.push_back(base_run.tracer_at(0, s));
    SensitivityOptions sopt;
    sopt.probes = probes;
    sopt.probe_steps = probe_steps;
    const ParticleEnsemble zb = sample_quadrature(c.sampler, c.covariance_nodes);
    std::vector<Phase> zb_nodes;
    for (std::size_t i = 0; i < zb.size(); ++i) zb_nodes.push_back({zb.q[i], zb.p[i]});
    const CovarianceResult qres = covariance_Q(base, zb_nodes, zb.w, layout, sopt);

    CltResult out;
    out.dim = dim;
    out.Q = qres.Q;
    out.sweep = c.clt_sweep;
    for (const auto& pr : probes) out.probe_descriptions.push_back(pr.describe());

    // characteristic-function probe vectors, fixed across the sweep
    std::vector<std::vector<double>> zvecs;
    {
        Philox zrng(c.seed ^ 0x5a5a5a5aull, 777);
        for (int v = 0; v < 12; ++v) {
            std::vector<double> u(dim);
            double nrm = 0.0;
            for (int a = 0; a < dim; ++a) {
                u[a] = zrng.normal();
                nrm += u[a] * u[a];
            }
            for (double& x : u) x /= std::sqrt(nrm);
            double quad = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) quad += u[a] * out.Q[a * dim + b] * u[b];
            if (quad <= 1e-300) continue;
            const double target = (v % 2 == 0) ? 0.7 : 1.3; // <Z,QZ> = target^2
            for (double& x : u) x *= target / std::sqrt(quad);
            zvecs.push_back(std::move(u));
        }
    }

    json replica_rows = json::array();
    std::vector<std::vector<double>> rows_largest;
    std::vector<std::vector<double>> rows_pooled;
    for (std::size_t ni = 0; ni < c.clt_sweep.size(); ++ni) {
        const std::size_t n = c.clt_sweep[ni];
        std::vector<std::vector<double>> rows;
        for (int m = 0; m < c.clt_replicas; ++m) {
            // one stream per replica index across the whole sweep: nested
            // samples couple the sweep entries (common random numbers), so
            // the N-trend of the CF discrepancy is not drowned by fresh
            // sampling noise at every N
            Philox rng(c.seed, 7000000ull + m);
            const auto run = run_with_tracer(sample_iid(c.sampler, n, rng), false);
            std::vector<double> row;
            row.reserve(dim);
            const double sn = std::sqrt(static_cast<double>(n));
            std::size_t probe_at = 0;
            for (std::size_t si = 0; si < probe_steps.size(); ++si) {
                const int s = probe_steps[si];
                const Phase tr = run.tracer_at(0, s);
                const Phase dr = tr - ref_tracer[si];
                row.insert(row.end(), {sn * dr.q.x, sn * dr.q.y, sn * dr.q.z, sn * dr.p.x,
                                       sn * dr.p.y, sn * dr.p.z});
                const int snap = s / field_stride;
                for (const auto& pr : probes) {
                    const double v =
                        pr.pair(run.record.psi_snaps[snap], run.record.pi_snaps[snap]);
                    row.push_back(sn * (v - ref_probe_vals[probe_at++]));
                }
            }
            rows.push_back(std::move(row));
        }
        // characteristic-function discrepancy for this N
        double disc = 0.0;
        for (const auto& z : zvecs) {
            std::complex<double> cf = 0.0;
            for (const auto& r : rows) {
                double dotzr = 0.0;
                for (int a = 0; a < dim; ++a) dotzr += z[a] * r[a];
                cf += std::complex<double>(std::cos(dotzr), std::sin(dotzr));
            }
            cf /= static_cast<double>(rows.size());
            double quad = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) quad += z[a] * out.Q[a * dim + b] * z[b];
            disc = std::max(disc, std::abs(cf - std::exp(-0.5 * quad)));
        }
        out.cf_discrepancy.push_back(disc);
        rows_pooled.insert(rows_pooled.end(), rows.begin(), rows.end());
        if (ni + 1 == c.clt_sweep.size()) rows_largest = rows;
        if (!outdir.empty()) {
            for (int m = 0; m < c.clt_replicas; ++m) {
                json jr;
                jr["N"] = n;
                jr["replica"] = m;
                jr["delta"] = rows[static_cast<std::size_t>(m)];
                replica_rows.push_back(jr);
            }
        }
    }

    // mean / normality at the largest N; the covariance comparison pools the
    // whole sweep (every replica draws from the same limit law, so pooling is
    // the study-level estimator of Q and cuts the Wishart noise by sqrt(3))
    const MomentEstimate mom = sample_moments(rows_largest);
    const MomentEstimate mom_pooled = sample_moments(rows_pooled);
    out.mean = mom.mean;
    out.cov_emp = mom_pooled.cov;
    out.cov_emp_largest = mom.cov;
    out.se.resize(dim);
    for (int a = 0; a < dim; ++a)
        out.se[a] = std::sqrt(mom.cov[a * dim + a] / mom.count);
    for (int a = 0; a < dim; ++a)
        if (std::abs(out.mean[a]) > 3.0 * out.se[a]) out.mean_within_3se = false;
    out.frob_rel_err = relative_frobenius(out.cov_emp, out.Q);

    double max_sd = 0.0;
    for (int a = 0; a < dim; ++a)
        max_sd = std::max(max_sd, std::sqrt(mom.cov[a * dim + a]));
    for (int a = 0; a < dim; ++a) {
        // components killed by an exact symmetry of the law (the planar ring
        // zeroes everything in z) carry only roundoff; mark instead of test
        if (std::sqrt(mom.cov[a * dim + a]) < 1e-9 * max_sd) {
            out.ad_stats.push_back(-1.0);
            continue;
        }
        std::vector<double> col;
        for (const auto& r : rows_largest) col.push_back(r[a]);
        out.ad_stats.push_back(anderson_darling_normal(std::move(col)));
    }
    Philox erng(c.seed ^ 0xE4E4ull, 31);
    out.energy_pvalue = energy_test_pvalue(rows_largest, mom.mean, mom.cov, erng);

    if (!outdir.empty()) {
        const fs::path dir(outdir);
        fs::create_directories(dir);
        write_manifest(dir, c, "clt-study");
        std::ofstream os(dir / "fluctuations.csv");
        os << "N,replica";
        for (int a = 0; a < dim; ++a) os << ",y" << a;
        os << '\n';
        for (const auto& jr : replica_rows) {
            os << jr["N"] << ',' << jr["replica"];
            for (const auto& v : jr["delta"]) os << ',' << format_double(v.get<double>());
            os << '\n';
        }
        json js;
        js["dim"] = dim;
        js["Q"] = out.Q;
        js["cov_emp"] = out.cov_emp;
        js["cov_emp_largest_n"] = out.cov_emp_largest;
        js["mean"] = out.mean;
        js["se"] = out.se;
        js["mean_within_3se"] = out.mean_within_3se;
        js["frobenius_rel_err"] = out.frob_rel_err;
        js["anderson_darling"] = out.ad_stats;
        js["energy_pvalue"] = out.energy_pvalue;
        js["sweep"] = out.sweep;
        js["cf_discrepancy"] = out.cf_discrepancy;
        js["probes"] = out.probe_descriptions;
        js["probe_times"] = c.probe_times;
        std::ofstream osj(dir / "summary.json");
        osj << js.dump(2) << '\n';
        std::ofstream osg(dir / "plot_clt.gp");
        osg << "set datafile separator ','\nset xlabel 'component y0'\n"
               "plot 'fluctuations.csv' every ::1 using 3:4 with points title 'delta'\n";
    }
    return out;
}

ValidationReport validate_run(const std::string& rundir) {
    ValidationReport rep;
    const fs::path dir(rundir);
    RunConfig c;
    std::vector<DiagnosticsRecord> diags;
    ParticleEnsemble final_ens;
    try {
        std::ifstream ms(dir / "manifest.json");
        if (!ms) throw std::runtime_error("missing manifest.json");
        json manifest = json::parse(ms);
        c = parse_config_json(manifest.at("config").dump());
        diags = read_diagnostics_csv(dir / "diagnostics.csv");
        final_ens = read_ensemble_csv(dir / "ensemble_final.csv");
    } catch (const std::exception& e) {
        rep.io_error = true;
        rep.failures.push_back(std::string("io: ") + e.what());
        return rep;
    }

    try {
        c.validate();
    } catch (const std::exception& e) {
        rep.failures.push_back(std::string("config: ") + e.what());
    }
    if (diags.empty()) {
        rep.failures.push_back("diagnostics: empty");
        return rep;
    }

    RegularizationKernel kernel(c.epsilon, c.quad_order, c.radial_table_n);
    const double Eperp = ground_state_energy(kernel);
    const double rho_l2 = kernel.constants().l2;
    const auto& d0 = diags.front();
    const double Ew0 = d0.field;

    const double tol_E = 5e-3, tol_PJ = 5e-3, tol_mass = 1e-4;
    for (const auto& d : diags) {
        if (std::abs(d.mass - 1.0) > tol_mass)
            rep.failures.push_back("mass drift at t=" + std::to_string(d.time));
        if (std::abs(d.energy - d0.energy) > tol_E * std::abs(d0.energy))
            rep.failures.push_back("energy drift at t=" + std::to_string(d.time));
        if (norm(d.momentum - d0.momentum) > tol_PJ)
            rep.failures.push_back("momentum drift at t=" + std::to_string(d.time));
        if (norm(d.angular_momentum - d0.angular_momentum) > tol_PJ)
            rep.failures.push_back("angular momentum drift at t=" + std::to_string(d.time));
        BoundReport br = apriori_bounds(d, final_ens.size(), d0.energy, Eperp, d0.momentum,
                                        d0.angular_momentum, c.support_radius);
        if (!br.all_ok) {
            for (const auto& chk : br.checks)
                if (!chk.ok)
                    rep.failures.push_back("bound '" + chk.name +
                                           "' violated at t=" + std::to_string(d.time));
        }
        // field-norm growth bound
        const double cap = std::sqrt(2.0 * Ew0) + rho_l2 * std::abs(d.time);
        if (std::max(d.psi_h1, d.pi_l2) > cap * (1.0 + 1e-6) + 1e-9)
            rep.failures.push_back("field-norm growth bound violated at t=" +
                                   std::to_string(d.time));
        if (d.max_speed >= 1.0)
            rep.failures.push_back("superluminal speed at t=" + std::to_string(d.time));
    }
    for (std::size_t i = 0; i < final_ens.size(); ++i) {
        if (final_ens.w[i] < 0) rep.failures.push_back("negative weight in final ensemble");
        if (norm(velocity(final_ens.p[i])) >= 1.0)
            rep.failures.push_back("superluminal particle in final ensemble");
    }
    const double wsum = final_ens.total_weight();
    if (std::abs(wsum - 1.0) > 1e-9)
        rep.failures.push_back("final ensemble weights do not sum to 1");
    return rep;
}

} // namespace wavekin
