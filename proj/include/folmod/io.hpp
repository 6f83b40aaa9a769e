#pragma once

// Run configuration (strict JSON schema, unknown keys rejected) and
// machine-readable report output. All floating-point values are emitted with
// 17 significant digits so that round-trips are lossless; CSV uses a comma
// delimiter, a header row and LF line endings.

#include <cstdint>
#include <string>
#include <vector>

#include "folmod/capacity.hpp"
#include "folmod/fields.hpp"
#include "folmod/variation.hpp"

namespace folmod {

std::string format_g17(double x);

// Flat JSON object writer with insertion-ordered keys.
class JsonWriter {
  public:
    void field(const std::string& key, double value);
    void field(const std::string& key, int value);
    void field(const std::string& key, bool value);
    void field(const std::string& key, const std::string& value);
    // value is already-rendered JSON (nested object/array)
    void raw(const std::string& key, const std::string& json_text);
    std::string str() const;

  private:
    std::vector<std::string> parts_;
};

// CSV table accumulator.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    void row(const std::string& label, const std::vector<double>& values);
    std::string str() const { return text_; }

  private:
    std::string text_;
};

std::string to_json(const ModulusReport& rep);
std::string to_json(const CapacityReport& rep);
std::string to_json(const SecondVariationReport& rep);
std::string to_json(const StabilityReport& rep);

// CSV projections: extremal function / scan table / flow-check table.
std::string f0_csv(const GraphFoliation& fol, const ScalarField& f0);
std::string scan_csv(const StabilityReport& rep);
std::string flow_check_csv(const FlowCheckResult& res);

struct RunConfig {
    WarpProfile profile;
    ChartMode mode = ChartMode::radial;
    int n_r = 256, n_theta = 1;
    double p = 2.0;

    std::string foliation_type = "radial";  // radial | shear
    double shear_eps = 0.0;
    std::vector<double> shear_cos, shear_sin;  // Fourier coefficients of s(theta)

    int field_count = 10;
    std::uint32_t seed = 1;
    int field_modes = 3;

    double flow_t_max = 1e-3;
    int flow_steps = 16;
};

// Parses and validates a config file; throws ConfigError on schema violations.
RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);

GridChart make_chart(const RunConfig& cfg);
GraphFoliation make_foliation(const RunConfig& cfg, const GridChart& chart);

}  // namespace folmod
