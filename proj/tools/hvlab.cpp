#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "hvlab/harness.hpp"
#include "hvlab/pohozaev.hpp"

using namespace hvlab;

namespace {

struct CommonOpts {
    std::string config_path;
    long long seed = -1;
    std::string out;
    int workers = 1;
    std::string preset;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value with [sections])");
    cmd->add_option("--seed", o.seed, "override run seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "sweep worker threads");
    cmd->add_option("--preset", o.preset, "scenario preset name");
}

ExperimentConfig load(const CommonOpts& o, const std::string& default_scenario) {
    Config cfg = o.config_path.empty() ? Config::from_string("") : Config::from_file(o.config_path);
    cfg.apply_environment();
    ExperimentConfig e = ExperimentConfig::from_config(cfg);
    if (e.scenario.empty()) e.scenario = default_scenario;
    if (!o.preset.empty()) {
        apply_preset(e, o.preset);
    } else if (o.config_path.empty()) {
        // bare invocation: pick up the scenario's own preset defaults
        apply_preset(e, e.scenario);
    }
    if (o.seed >= 0) {
        e.seed = std::uint64_t(o.seed);
        e.minimize.seed = e.seed;
        e.solver.seed = e.seed;
    }
    if (!o.out.empty()) e.output_dir = o.out;
    return e;
}

int finish(const Report& rep) {
    if (rep.ok) {
        std::printf("%s: ok\n%s\n", rep.scenario.c_str(), rep.payload_json.c_str());
        return 0;
    }
    std::fprintf(stderr, "%s: error: %s\n", rep.scenario.c_str(), rep.error.c_str());
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hvlab: numerical laboratory for a weighted elliptic problem on the half-space"};
    app.require_subcommand(1);

    CommonOpts ineq_o, rearr_o, best_o, mp_o, po_o, inst_o, robin_o, sweep_o;
    std::string ineq_check = "hardy";
    std::string po_snapshot;

    auto* c_ineq = app.add_subcommand("verify-inequality", "run an inequality property suite");
    add_common(c_ineq, ineq_o);
    c_ineq->add_option("--check", ineq_check, "hardy | trace | chain | ladder");

    auto* c_rearr = app.add_subcommand("rearrange-check", "Schwarz rearrangement property suite");
    add_common(c_rearr, rearr_o);

    auto* c_best = app.add_subcommand("best-constant", "Rayleigh quotient minimization");
    add_common(c_best, best_o);

    auto* c_mp = app.add_subcommand("mountain-pass", "mountain-pass existence solve");
    add_common(c_mp, mp_o);

    auto* c_po = app.add_subcommand("pohozaev-check", "Pohozaev identity evaluation");
    add_common(c_po, po_o);
    c_po->add_option("--snapshot", po_snapshot, "evaluate a stored field snapshot");

    auto* c_inst = app.add_subcommand("instanton-residual", "bubble PDE residual study");
    add_common(c_inst, inst_o);

    auto* c_robin = app.add_subcommand("robin-check", "Robin change-of-variables check");
    add_common(c_robin, robin_o);

    auto* c_sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    add_common(c_sweep, sweep_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_ineq->parsed()) {
            std::string scenario = "ineq-hardy";
            if (ineq_check == "trace") scenario = "ineq-trace";
            else if (ineq_check == "chain") scenario = "ineq-chain";
            else if (ineq_check == "ladder") scenario = "moser-ladder";
            else if (ineq_check != "hardy") throw ConfigError("unknown --check " + ineq_check);
            ExperimentConfig e = load(ineq_o, scenario);
            e.scenario = scenario;
            return finish(run(e));
        }
        if (c_rearr->parsed()) {
            ExperimentConfig e = load(rearr_o, "rearrange");
            e.scenario = "rearrange";
            return finish(run(e));
        }
        if (c_best->parsed()) {
            ExperimentConfig e = load(best_o, "best-constant");
            if (e.scenario != "bestconst-trace-critical") e.scenario = "best-constant";
            return finish(run(e));
        }
        if (c_mp->parsed()) {
            ExperimentConfig e = load(mp_o, "thm16");
            const bool solve_name = e.scenario.rfind("thm", 0) == 0 || e.scenario == "mountain-pass";
            if (!solve_name) e.scenario = "thm16";
            return finish(run(e));
        }
        if (c_po->parsed()) {
            ExperimentConfig e = load(po_o, "pohozaev-instanton");
            e.scenario = "pohozaev-instanton";
            if (!po_snapshot.empty()) {
                Field u = read_snapshot(po_snapshot);
                auto rep = pohozaev_eval(u, e.params, e.weight);
                std::printf("{\"lhs_main\":%s,\"lhs_weight\":%s,\"rhs_volume\":%s,"
                            "\"rhs_boundary\":%s,\"residual\":%s,\"relative_residual\":%s,"
                            "\"tail_warning\":%s}\n",
                            format_g17(rep.lhs_main).c_str(), format_g17(rep.lhs_weight).c_str(),
                            format_g17(rep.rhs_volume).c_str(),
                            format_g17(rep.rhs_boundary).c_str(), format_g17(rep.residual).c_str(),
                            format_g17(rep.relative_residual).c_str(),
                            rep.tail_warning ? "true" : "false");
                return 0;
            }
            return finish(run(e));
        }
        if (c_inst->parsed()) {
            ExperimentConfig e = load(inst_o, "instanton-residual");
            e.scenario = "instanton-residual";
            return finish(run(e));
        }
        if (c_robin->parsed()) {
            ExperimentConfig e = load(robin_o, "robin-check");
            e.scenario = "robin-check";
            return finish(run(e));
        }
        if (c_sweep->parsed()) {
            Config cfg = sweep_o.config_path.empty() ? Config::from_string("")
                                                     : Config::from_file(sweep_o.config_path);
            cfg.apply_environment();
            ExperimentConfig base = ExperimentConfig::from_config(cfg);
            if (!sweep_o.preset.empty()) apply_preset(base, sweep_o.preset);
            if (base.scenario.empty()) throw ConfigError("sweep: run.scenario required");
            if (sweep_o.seed >= 0) base.seed = std::uint64_t(sweep_o.seed);
            if (!sweep_o.out.empty()) base.output_dir = sweep_o.out;

            std::vector<SweepAxis> axes;
            for (const auto& [key, val] : cfg.entries()) {
                if (key.rfind("sweep.", 0) != 0) continue;
                SweepAxis ax;
                ax.key = key.substr(6);
                ax.values = cfg.get_list(key);
                axes.push_back(std::move(ax));
            }
            auto reports = sweep(base, axes, sweep_o.workers);
            int failures = 0;
            for (std::size_t c = 0; c < reports.size(); ++c) {
                std::printf("cell %zu: %s %s\n", c, reports[c].ok ? "ok" : "FAIL",
                            reports[c].ok ? "" : reports[c].error.c_str());
                if (!reports[c].ok) ++failures;
            }
            std::printf("sweep: %zu cells, %d failed; summary at %s/summary.csv\n", reports.size(),
                        failures, base.output_dir.c_str());
            return failures > 0 ? 1 : 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
