// Compares the serial reference path against the OpenMP path on a large
// surface chart and verifies that both produce bit-identical results (the
// parallel reductions keep a fixed summation order).

#include <chrono>
#include <cstdio>

#include "folmod/fields.hpp"
#include "folmod/io.hpp"
#include "folmod/kernels.hpp"
#include "folmod/variation.hpp"

using namespace folmod;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Timings {
    double modulus_time = 0.0, variation_time = 0.0;
    double modulus_value = 0.0, variation_total = 0.0;
};

Timings run_once(const GridChart& chart, const NormalField& f) {
    Timings t;
    GraphFoliation fol = GraphFoliation::radial(chart);
    ModulusParams params = ModulusParams::from_p(2.0);
    auto t0 = clock_type::now();
    t.modulus_value = p_modulus(fol, params).value;
    t.modulus_time = seconds_since(t0);
    t0 = clock_type::now();
    t.variation_total = second_variation(fol, params, f).total;
    t.variation_time = seconds_since(t0);
    return t;
}

}  // namespace

int main() {
    WarpProfile prof = WarpProfile::torus(2.0 * 3.14159265358979323846);
    GridChart chart(prof, ChartMode::surface, 1024, 1024);
    NormalField f = random_normal_field(prof, 42, 4);

    set_parallel(false);
    Timings serial = run_once(chart, f);
    set_parallel(true);
    run_once(chart, f);  // warm-up with the thread pool spun up
    Timings parallel = run_once(chart, f);

    std::printf("grid 1024x1024 torus, %d threads\n", max_threads());
    std::printf("%-18s %12s %12s %8s\n", "kernel", "serial [s]", "openmp [s]", "speedup");
    std::printf("%-18s %12.4f %12.4f %8.2f\n", "p_modulus", serial.modulus_time,
                parallel.modulus_time, serial.modulus_time / parallel.modulus_time);
    std::printf("%-18s %12.4f %12.4f %8.2f\n", "second_variation",
                serial.variation_time, parallel.variation_time,
                serial.variation_time / parallel.variation_time);
    bool identical = serial.modulus_value == parallel.modulus_value &&
                     serial.variation_total == parallel.variation_total;
    std::printf("bit-identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
