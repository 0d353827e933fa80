// Command line front end: simulate | lln-study | clt-study | metrics |
// validate | constants. Exit codes: 0 ok, 2 validation failure, 3 invariant
// violation.
#include <CLI11.hpp>

#include "wavekin/config.hpp"
#include "wavekin/conservation.hpp"
#include "wavekin/io.hpp"
#include "wavekin/measures.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/studies.hpp"

#include <cstdio>
#include <iostream>

using namespace wavekin;

namespace {

struct CommonArgs {
    std::string config_file;
    std::string preset_name;
    std::string out_dir;
    std::vector<std::string> overrides;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "JSON config file");
    cmd->add_option("--preset", args.preset_name, "named preset (see 'constants --list')");
    cmd->add_option("--out", args.out_dir, "output directory (default $WAVEKIN_OUT/<stem>)");
    cmd->add_option("--set", args.overrides, "override config keys, e.g. --set grid.n=64");
    cmd->add_option("--threads", args.threads, "cap the worker pool");
    cmd->add_option("--seed", args.seed, "RNG seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
}

RunConfig build_config(const CommonArgs& args, const std::string& fallback_preset) {
    RunConfig c;
    if (!args.config_file.empty())
        c = load_config(args.config_file);
    else if (!args.preset_name.empty())
        c = preset(args.preset_name);
    else
        c = preset(fallback_preset);
    for (const auto& kv : args.overrides) apply_override(c, kv);
    if (args.threads > 0) c.threads = args.threads;
    if (args.seed_set) c.seed = args.seed;
    c.validate();
    return c;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavekin: particle-wave dynamics, mean-field flows and fluctuation studies"};
    app.require_subcommand(1);

    CommonArgs sim_args, lln_args, clt_args;
    auto* sim = app.add_subcommand("simulate", "run the coupled particle-field system");
    add_common(sim, sim_args);
    auto* lln = app.add_subcommand("lln-study", "empirical-measure convergence study");
    add_common(lln, lln_args);
    auto* clt = app.add_subcommand("clt-study", "fluctuation (CLT) study");
    add_common(clt, clt_args);

    std::string metrics_a, metrics_b, metrics_kind = "kr";
    std::int64_t metrics_limit = 128ll * 1000 * 1000;
    auto* metrics = app.add_subcommand("metrics", "distance between two stored ensembles");
    metrics->add_option("--a", metrics_a, "ensemble CSV")->required();
    metrics->add_option("--b", metrics_b, "ensemble CSV")->required();
    metrics->add_option("--metric", metrics_kind, "kr | bl");
    metrics->add_option("--exact-max-entries", metrics_limit,
                        "cost-matrix budget for the exact solver");

    std::string validate_dir;
    auto* val = app.add_subcommand("validate", "replay property checks on a run directory");
    val->add_option("dir", validate_dir, "run directory")->required();

    CommonArgs const_args;
    bool const_list = false;
    auto* cons = app.add_subcommand("constants", "print kernel constants and derived values");
    add_common(cons, const_args);
    cons->add_flag("--list", const_list, "list preset names");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return guarded([&] {
            RunConfig c = build_config(sim_args, "two-body");
            const std::string dir = prepare_output_dir(
                sim_args.out_dir.empty() ? c.output_dir : sim_args.out_dir, "simulate");
            auto art = run_simulation(c, dir);
            std::printf("run written to %s\n", dir.c_str());
            const auto& d0 = art.diagnostics.front();
            const auto& d1 = art.diagnostics.back();
            std::printf("E0=%.9g  drift(E)=%.3e  |dP|=%.3e  |dJ|=%.3e  bounds %s\n",
                        art.E0, std::abs((d1.energy - d0.energy) / d0.energy),
                        norm(d1.momentum - d0.momentum),
                        norm(d1.angular_momentum - d0.angular_momentum),
                        art.any_violation ? "VIOLATED" : "ok");
            return art.any_violation ? 3 : 0;
        });

    if (lln->parsed())
        return guarded([&] {
            RunConfig c = build_config(lln_args, "lln-default");
            const std::string dir = prepare_output_dir(
                lln_args.out_dir.empty() ? c.output_dir : lln_args.out_dir, "lln");
            auto res = lln_study(c, dir);
            std::printf("study written to %s\n", dir.c_str());
            for (std::size_t i = 0; i < res.times.size(); ++i)
                std::printf("t=%.2f  slope=%.3f  monotone=%s\n", res.times[i], res.slopes[i],
                            res.monotone[i] ? "yes" : "no");
            return 0;
        });

    if (clt->parsed())
        return guarded([&] {
            RunConfig c = build_config(clt_args, "clt-default");
            const std::string dir = prepare_output_dir(
                clt_args.out_dir.empty() ? c.output_dir : clt_args.out_dir, "clt");
            auto res = clt_study(c, dir);
            std::printf("study written to %s\n", dir.c_str());
            std::printf("dim=%d  frobenius(cov vs Q)=%.3f  mean within 3se: %s  "
                        "energy p=%.3f\n",
                        res.dim, res.frob_rel_err, res.mean_within_3se ? "yes" : "no",
                        res.energy_pvalue);
            for (std::size_t i = 0; i < res.sweep.size(); ++i)
                std::printf("N=%zu  CF discrepancy=%.4f\n", res.sweep[i],
                            res.cf_discrepancy[i]);
            return 0;
        });

    if (metrics->parsed())
        return guarded([&] {
            const auto a = empirical(read_ensemble_csv(metrics_a));
            const auto b = empirical(read_ensemble_csv(metrics_b));
            DistanceOptions opt;
            opt.exact_max_entries = metrics_limit;
            const auto r = (metrics_kind == "bl") ? bl_distance_full(a, b, opt)
                                                  : kr_distance_full(a, b, opt);
            std::printf("%s distance = %.12g  mode=%s  gap=%.3g\n", metrics_kind.c_str(),
                        r.value, r.exact ? "exact" : "entropic", r.duality_gap);
            return 0;
        });

    if (val->parsed())
        return guarded([&] {
            const auto rep = validate_run(validate_dir);
            if (rep.io_error) {
                for (const auto& f : rep.failures) std::cerr << f << "\n";
                return 2;
            }
            if (!rep.ok()) {
                for (const auto& f : rep.failures) std::printf("VIOLATION: %s\n", f.c_str());
                return 3;
            }
            std::printf("all checks passed\n");
            return 0;
        });

    if (cons->parsed())
        return guarded([&] {
            if (const_list) {
                for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
                return 0;
            }
            RunConfig c = build_config(const_args, "two-body");
            RegularizationKernel k(c.epsilon, c.quad_order, c.radial_table_n);
            const auto& C = k.constants();
            std::printf("epsilon          %.17g\n", c.epsilon);
            std::printf("rho_l2           %.17g\n", C.l2);
            std::printf("grad_rho_l2      %.17g\n", C.grad_l2);
            std::printf("hess_rho_l2      %.17g\n", C.hess_l2);
            std::printf("lipschitz        %.17g\n", C.lip);
            std::printf("c_rho            %.17g\n", C.c_rho);
            std::printf("support_volume   %.17g\n", C.support_volume);
            std::printf("ground_energy    %.17g\n", ground_state_energy(k));
            std::printf("ground_energy_h1 %.17g\n", ground_state_energy_h1_route(k));
            std::printf("psi_rho(0)       %.17g\n", k.ground_potential(0.0));
            return 0;
        });

    return 0;
}
