#include "folmod/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "folmod/errors.hpp"

namespace folmod {

namespace {

constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

const json& expect_object(const json& j, const std::string& name) {
    if (!j.is_object()) throw ConfigError("config: \"" + name + "\" must be an object");
    return j;
}

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& block) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const std::string& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + block);
    }
}

double get_number(const json& j, const std::string& key, const std::string& block) {
    if (!j.contains(key))
        throw ConfigError("config: missing \"" + key + "\" in " + block);
    if (!j[key].is_number())
        throw ConfigError("config: \"" + key + "\" in " + block + " must be a number");
    return j[key].get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& block,
                  double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError("config: \"" + key + "\" in " + block + " must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& block,
            int fallback, bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError("config: missing \"" + key + "\" in " + block);
        return fallback;
    }
    if (!j[key].is_number_integer())
        throw ConfigError("config: \"" + key + "\" in " + block + " must be an integer");
    return j[key].get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& block,
                       const std::string& fallback, bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError("config: missing \"" + key + "\" in " + block);
        return fallback;
    }
    if (!j[key].is_string())
        throw ConfigError("config: \"" + key + "\" in " + block + " must be a string");
    return j[key].get<std::string>();
}

std::vector<double> get_array(const json& j, const std::string& key,
                              const std::string& block) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array())
        throw ConfigError("config: \"" + key + "\" in " + block + " must be an array");
    for (const auto& x : j[key]) {
        if (!x.is_number())
            throw ConfigError("config: \"" + key + "\" entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

WarpProfile parse_manifold(const json& m) {
    check_keys(m, {"family", "a", "b", "c", "circumference", "coeffs", "periodic",
                   "fiber_dim", "fiber_volume"},
               "manifold");
    std::string family = get_string(m, "family", "manifold", "", true);
    int k = get_int(m, "fiber_dim", "manifold", 1);
    double vol = get_number(m, "fiber_volume", "manifold", 0.0);
    try {
        if (family == "cylinder")
            return WarpProfile::cylinder(get_number(m, "a", "manifold"),
                                         get_number(m, "b", "manifold"),
                                         get_number(m, "c", "manifold", 1.0), k, vol);
        if (family == "torus")
            return WarpProfile::torus(get_number(m, "circumference", "manifold"),
                                      get_number(m, "c", "manifold", 1.0), vol);
        if (family == "euclidean")
            return WarpProfile::euclidean(get_number(m, "a", "manifold"),
                                          get_number(m, "b", "manifold"), k, vol);
        if (family == "hyperbolic")
            return WarpProfile::hyperbolic(get_number(m, "a", "manifold"),
                                           get_number(m, "b", "manifold"), k, vol);
        if (family == "spherical")
            return WarpProfile::spherical(get_number(m, "a", "manifold"),
                                          get_number(m, "b", "manifold"), k, vol);
        if (family == "custom") {
            bool periodic = m.contains("periodic") && m["periodic"].is_boolean() &&
                            m["periodic"].get<bool>();
            std::vector<double> coeffs = get_array(m, "coeffs", "manifold");
            if (coeffs.empty())
                throw ConfigError("config: custom manifold requires \"coeffs\"");
            WarpProfile prof = WarpProfile::custom_poly(
                get_number(m, "a", "manifold"), get_number(m, "b", "manifold"),
                std::move(coeffs), k, vol, periodic);
            prof.validate();
            return prof;
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("config: invalid manifold: ") + e.what());
    }
    throw ConfigError("config: unknown manifold family \"" + family + "\"");
}

}  // namespace

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void JsonWriter::field(const std::string& key, double value) {
    parts_.push_back("\"" + escape(key) + "\": " + format_g17(value));
}
void JsonWriter::field(const std::string& key, int value) {
    parts_.push_back("\"" + escape(key) + "\": " + std::to_string(value));
}
void JsonWriter::field(const std::string& key, bool value) {
    parts_.push_back("\"" + escape(key) + "\": " + (value ? "true" : "false"));
}
void JsonWriter::field(const std::string& key, const std::string& value) {
    parts_.push_back("\"" + escape(key) + "\": \"" + escape(value) + "\"");
}
void JsonWriter::raw(const std::string& key, const std::string& json_text) {
    parts_.push_back("\"" + escape(key) + "\": " + json_text);
}
std::string JsonWriter::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) out += ", ";
        out += parts_[i];
    }
    out += "}";
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}
void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += format_g17(values[i]);
    }
    text_ += '\n';
}
void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
    text_ += label;
    for (double v : values) {
        text_ += ',';
        text_ += format_g17(v);
    }
    text_ += '\n';
}

std::string to_json(const ModulusReport& rep) {
    JsonWriter w;
    w.field("p", rep.p);
    w.field("q", rep.q);
    w.field("value", rep.value);
    w.field("normalization_residual", rep.normalization_residual);
    w.field("admissibility_margin", rep.admissibility_margin);
    w.field("cross_check", rep.cross_check);
    JsonWriter grid;
    grid.field("n_r", rep.n_r);
    grid.field("n_theta", rep.n_theta);
    w.raw("grid", grid.str());
    return w.str();
}

std::string to_json(const CapacityReport& rep) {
    JsonWriter w;
    w.field("p", rep.p);
    w.field("q", rep.q);
    w.field("capacity", rep.capacity);
    w.field("capacity_closed", rep.capacity_closed);
    w.field("modulus", rep.modulus);
    w.field("relation_residual", rep.relation_residual);
    w.field("harmonic_residual", rep.harmonic_residual);
    w.field("nu_constancy", rep.nu_constancy);
    return w.str();
}

std::string to_json(const SecondVariationReport& rep) {
    JsonWriter w;
    w.field("field_id", rep.field_id);
    w.field("a_part", rep.a_part);
    w.field("b_part", rep.b_part);
    w.field("total", rep.total);
    w.field("scale", rep.scale);
    w.field("critical", rep.critical);
    w.field("critical_residual_max", rep.critical_residual_max);
    w.field("fd_checked", rep.fd_checked);
    w.field("fd_value", rep.fd_value);
    w.field("fd_discrepancy", rep.fd_discrepancy);
    return w.str();
}

std::string to_json(const StabilityReport& rep) {
    JsonWriter w;
    w.field("stable", rep.stable);
    w.field("max_total", rep.max_total);
    w.field("worst_index", rep.worst_index);
    std::string records = "[";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        if (i) records += ", ";
        records += to_json(rep.records[i]);
    }
    records += "]";
    w.raw("records", records);
    return w.str();
}

std::string f0_csv(const GraphFoliation& fol, const ScalarField& f0) {
    CsvWriter csv({"t_index", "theta_index", "t", "theta", "f0"});
    for (int j = 0; j < f0.nr; ++j)
        for (int i = 0; i < f0.nth; ++i) {
            double th = fol.chart->mode == ChartMode::surface ? fol.chart->th[i] : 0.0;
            csv.row({static_cast<double>(j), static_cast<double>(i), fol.t[j], th,
                     f0(j, i)});
        }
    return csv.str();
}

std::string scan_csv(const StabilityReport& rep) {
    CsvWriter csv({"field_id", "a_part", "b_part", "total", "scale", "fd_value",
                   "fd_discrepancy"});
    for (const SecondVariationReport& r : rep.records)
        csv.row(r.field_id, {r.a_part, r.b_part, r.total, r.scale, r.fd_value,
                             r.fd_discrepancy});
    return csv.str();
}

std::string flow_check_csv(const FlowCheckResult& res) {
    CsvWriter csv({"r", "theta", "analytic_d2j_leaf", "fd_d2j_leaf",
                   "analytic_d2j_full", "fd_d2j_full"});
    for (std::size_t j = 0; j < res.r_nodes.size(); ++j)
        for (std::size_t i = 0; i < res.th_nodes.size(); ++i) {
            int jj = static_cast<int>(j), ii = static_cast<int>(i);
            csv.row({res.r_nodes[j], res.th_nodes[i], res.analytic_leaf(jj, ii),
                     res.fd_leaf(jj, ii), res.analytic_full(jj, ii),
                     res.fd_full(jj, ii)});
        }
    return csv.str();
}

RunConfig parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(j, {"manifold", "grid", "p", "foliation", "fields", "flow"}, "config");
    if (!j.contains("manifold")) throw ConfigError("config: missing \"manifold\"");
    if (!j.contains("grid")) throw ConfigError("config: missing \"grid\"");

    RunConfig cfg;
    cfg.profile = parse_manifold(expect_object(j["manifold"], "manifold"));

    const json& g = expect_object(j["grid"], "grid");
    check_keys(g, {"n_r", "n_theta", "mode"}, "grid");
    cfg.n_r = get_int(g, "n_r", "grid", 0, true);
    cfg.n_theta = get_int(g, "n_theta", "grid", 1);
    std::string mode = get_string(g, "mode", "grid", "", true);
    if (mode == "radial")
        cfg.mode = ChartMode::radial;
    else if (mode == "surface")
        cfg.mode = ChartMode::surface;
    else
        throw ConfigError("config: grid mode must be \"radial\" or \"surface\"");
    if (cfg.n_r < 8) throw ConfigError("config: n_r must be >= 8");
    if (cfg.mode == ChartMode::surface) {
        if (cfg.n_theta < 8)
            throw ConfigError("config: surface mode requires n_theta >= 8");
        if (cfg.profile.fiber_dim != 1)
            throw ConfigError("config: surface mode requires fiber_dim = 1");
    }

    cfg.p = get_number(j, "p", "config", 2.0);
    if (!(cfg.p > 1.0)) throw ConfigError("config: p must be > 1");

    if (j.contains("foliation")) {
        const json& f = expect_object(j["foliation"], "foliation");
        check_keys(f, {"type", "eps", "fourier_cos", "fourier_sin"}, "foliation");
        cfg.foliation_type = get_string(f, "type", "foliation", "radial");
        if (cfg.foliation_type != "radial" && cfg.foliation_type != "shear")
            throw ConfigError("config: foliation type must be \"radial\" or \"shear\"");
        cfg.shear_eps = get_number(f, "eps", "foliation", 0.0);
        cfg.shear_cos = get_array(f, "fourier_cos", "foliation");
        cfg.shear_sin = get_array(f, "fourier_sin", "foliation");
        if (cfg.foliation_type == "shear") {
            if (!cfg.profile.periodic_base)
                throw ConfigError("config: shear foliation requires a circle base");
            if (cfg.shear_cos.empty() && cfg.shear_sin.empty())
                cfg.shear_cos = {1.0};
        }
    }

    if (j.contains("fields")) {
        const json& f = expect_object(j["fields"], "fields");
        check_keys(f, {"count", "seed", "modes"}, "fields");
        cfg.field_count = get_int(f, "count", "fields", cfg.field_count);
        int seed = get_int(f, "seed", "fields", static_cast<int>(cfg.seed));
        if (seed < 0) throw ConfigError("config: seed must be nonnegative");
        cfg.seed = static_cast<std::uint32_t>(seed);
        cfg.field_modes = get_int(f, "modes", "fields", cfg.field_modes);
        if (cfg.field_count < 1 || cfg.field_modes < 1)
            throw ConfigError("config: fields count and modes must be >= 1");
    }

    if (j.contains("flow")) {
        const json& f = expect_object(j["flow"], "flow");
        check_keys(f, {"t_max", "steps"}, "flow");
        cfg.flow_t_max = get_number(f, "t_max", "flow", cfg.flow_t_max);
        cfg.flow_steps = get_int(f, "steps", "flow", cfg.flow_steps);
        if (!(cfg.flow_t_max > 0.0) || cfg.flow_steps < 1)
            throw ConfigError("config: flow t_max must be > 0 and steps >= 1");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

GridChart make_chart(const RunConfig& cfg) {
    return GridChart(cfg.profile, cfg.mode, cfg.n_r, cfg.n_theta);
}

GraphFoliation make_foliation(const RunConfig& cfg, const GridChart& chart) {
    if (cfg.foliation_type == "radial") return GraphFoliation::radial(chart);
    double omega = 2.0 * kPi / cfg.profile.fiber_volume;
    std::vector<double> cs = cfg.shear_cos, sn = cfg.shear_sin;
    auto s = [cs, sn, omega](double th) {
        double v = 0.0;
        for (std::size_t n = 0; n < cs.size(); ++n)
            v += cs[n] * std::cos((n + 1) * omega * th);
        for (std::size_t n = 0; n < sn.size(); ++n)
            v += sn[n] * std::sin((n + 1) * omega * th);
        return v;
    };
    return GraphFoliation::shear(chart, s, cfg.shear_eps);
}

}  // namespace folmod
