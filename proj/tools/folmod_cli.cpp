// Batch front-end: configure a manifold and foliation from a JSON file, run a
// computation and emit a machine-readable report.
//
// Exit codes: 0 success, 2 config/schema error, 3 numeric/domain error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "folmod/errors.hpp"
#include "folmod/io.hpp"
#include "folmod/kernels.hpp"

namespace {

using namespace folmod;

void emit(const std::string& text, const std::string& out_path) {
    std::string payload = text;
    if (payload.empty() || payload.back() != '\n') payload += '\n';
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + out_path);
    out << payload;
}

std::vector<NormalField> field_family(const RunConfig& cfg) {
    std::vector<NormalField> family;
    for (int n = 0; n < cfg.field_count; ++n)
        family.push_back(
            random_normal_field(cfg.profile, cfg.seed + static_cast<std::uint32_t>(n),
                                cfg.field_modes));
    return family;
}

int run(const std::string& cmd, const RunConfig& cfg, const std::string& out_path,
        const std::string& format) {
    GridChart chart = make_chart(cfg);
    ModulusParams params = ModulusParams::from_p(cfg.p);

    if (cmd == "modulus") {
        GraphFoliation fol = make_foliation(cfg, chart);
        if (format == "csv") {
            ExtremalFunction ext = extremal_function(fol, params);
            emit(f0_csv(fol, ext.f0), out_path);
        } else {
            emit(to_json(p_modulus(fol, params)), out_path);
        }
        return 0;
    }
    if (cmd == "capacity") {
        CapacityReport rep = capacity_report(chart, params);
        if (format == "csv") {
            QHarmonicRadial qh = q_harmonic_radial(chart, params);
            CsvWriter csv({"t", "nu"});
            double h = 1.0 / (chart.nr - 1);
            for (int j = 0; j < chart.nr; ++j)
                csv.row({j * h, nu_q(chart, qh.u, params.q, j * h)});
            emit(csv.str(), out_path);
        } else {
            emit(to_json(rep), out_path);
        }
        return 0;
    }
    if (cmd == "variation") {
        GraphFoliation fol = make_foliation(cfg, chart);
        double fv_max = 0.0;
        for (const NormalField& f : field_family(cfg))
            fv_max = std::max(fv_max, std::abs(first_variation(fol, params, f)));
        JsonWriter w;
        w.field("first_variation", fv_max);
        w.field("critical_residual_max", critical_residual(fol, params).max_abs());
        emit(w.str(), out_path);
        return 0;
    }
    if (cmd == "stability") {
        GraphFoliation fol = make_foliation(cfg, chart);
        StabilityReport rep = stability_scan(fol, params, field_family(cfg));
        emit(format == "csv" ? scan_csv(rep) : to_json(rep), out_path);
        return 0;
    }
    if (cmd == "flow-check") {
        GeneralField x = random_general_field(cfg.profile, cfg.seed, cfg.field_modes);
        FlowCheckResult res =
            jacobian_flow_check(chart, x, cfg.flow_t_max, cfg.flow_steps);
        if (format == "json") {
            JsonWriter w;
            w.field("field_id", x.id);
            w.field("max_rel_leaf", res.max_rel_leaf);
            w.field("max_rel_full", res.max_rel_full);
            emit(w.str(), out_path);
        } else {
            emit(flow_check_csv(res), out_path);
        }
        return 0;
    }
    if (cmd == "hardy") {
        GraphFoliation fol = make_foliation(cfg, chart);
        CsvWriter csv({"field_id", "lhs", "rhs", "residual"});
        for (const NormalField& f : field_family(cfg)) {
            HardyReport rep = hardy_report(fol, params, f);
            csv.row(f.id, {rep.lhs, rep.rhs, rep.residual});
        }
        emit(csv.str(), out_path);
        return 0;
    }
    throw ConfigError("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-modulus of codimension-one foliations on warped products"};
    app.require_subcommand(1);
    std::string config_path, out_path, format = "json";
    int threads = 0;
    for (const char* name :
         {"modulus", "capacity", "variation", "stability", "flow-check", "hardy"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--format", format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (threads == 1)
            folmod::set_parallel(false);
        else if (threads > 1)
            folmod::set_thread_count(threads);
        return run(app.get_subcommands().front()->get_name(),
                   folmod::load_config(config_path), out_path, format);
    } catch (const folmod::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
