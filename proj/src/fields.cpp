#include "folmod/fields.hpp"

#include <cmath>
#include <vector>

namespace folmod {

namespace {

constexpr double kPi = 3.14159265358979323846;

// sum of amp * cos(kr * r + pr) * cos(kt * th + pt)
struct TrigSum {
    struct Term {
        double amp, kr, pr, kt, pt;
    };
    std::vector<Term> terms;

    double val(double r, double th) const {
        double s = 0.0;
        for (const Term& t : terms)
            s += t.amp * std::cos(t.kr * r + t.pr) * std::cos(t.kt * th + t.pt);
        return s;
    }
    double dr(double r, double th) const {
        double s = 0.0;
        for (const Term& t : terms)
            s += -t.amp * t.kr * std::sin(t.kr * r + t.pr) * std::cos(t.kt * th + t.pt);
        return s;
    }
    double dth(double r, double th) const {
        double s = 0.0;
        for (const Term& t : terms)
            s += -t.amp * t.kt * std::cos(t.kr * r + t.pr) * std::sin(t.kt * th + t.pt);
        return s;
    }
};

TrigSum draw_sum(PortableRng& rng, const WarpProfile& prof, int modes) {
    double len = prof.base_length();
    double omega = 2.0 * kPi / prof.fiber_volume;  // fiber circle frequency
    TrigSum s;
    int count = modes + 1;
    for (int n = 0; n < count; ++n) {
        TrigSum::Term t;
        t.amp = rng.uniform(-1.0, 1.0);
        int mr = rng.uniform_int(0, modes);
        // radial part must close up on a circle base; on an interval any
        // frequency is admissible
        t.kr = (prof.periodic_base ? 2.0 * kPi * mr : kPi * mr) / len;
        t.pr = rng.uniform(0.0, 2.0 * kPi);
        t.kt = omega * rng.uniform_int(0, modes);
        t.pt = rng.uniform(0.0, 2.0 * kPi);
        s.terms.push_back(t);
    }
    return s;
}

// window (4 xi (1 - xi))^3 on [a, b], xi = (r - a) / (b - a)
double window(const WarpProfile& prof, double r) {
    double xi = (r - prof.a) / prof.base_length();
    double s = 4.0 * xi * (1.0 - xi);
    return s * s * s;
}

double window_dr(const WarpProfile& prof, double r) {
    double len = prof.base_length();
    double xi = (r - prof.a) / len;
    double s = 4.0 * xi * (1.0 - xi);
    return 3.0 * s * s * 4.0 * (1.0 - 2.0 * xi) / len;
}

}  // namespace

NormalField sin_theta_field(const WarpProfile& prof) {
    double omega = 2.0 * kPi / prof.fiber_volume;
    NormalField f;
    f.f = [omega](double, double th) { return std::sin(omega * th); };
    f.fr = [](double, double) { return 0.0; };
    f.fth = [omega](double, double th) { return omega * std::cos(omega * th); };
    f.compact_support = false;
    f.id = "sin-theta";
    return f;
}

NormalField random_normal_field(const WarpProfile& prof, std::uint32_t seed, int modes) {
    PortableRng rng(seed);
    TrigSum s = draw_sum(rng, prof, modes);
    NormalField f;
    f.id = "random-" + std::to_string(seed);
    if (prof.periodic_base) {
        f.f = [s](double r, double th) { return s.val(r, th); };
        f.fr = [s](double r, double th) { return s.dr(r, th); };
        f.fth = [s](double r, double th) { return s.dth(r, th); };
        f.compact_support = false;
        return f;
    }
    WarpProfile p = prof;
    f.f = [s, p](double r, double th) { return window(p, r) * s.val(r, th); };
    f.fr = [s, p](double r, double th) {
        return window_dr(p, r) * s.val(r, th) + window(p, r) * s.dr(r, th);
    };
    f.fth = [s, p](double r, double th) { return window(p, r) * s.dth(r, th); };
    f.compact_support = true;
    return f;
}

GeneralField random_general_field(const WarpProfile& prof, std::uint32_t seed,
                                  int modes) {
    PortableRng rng(seed);
    TrigSum sr = draw_sum(rng, prof, modes);
    TrigSum st = draw_sum(rng, prof, modes);
    GeneralField x;
    x.xr = [sr](double r, double th) { return sr.val(r, th); };
    x.xth = [st](double r, double th) { return st.val(r, th); };
    x.id = "random-" + std::to_string(seed);
    return x;
}

GeneralField radial_scaling_field() {
    GeneralField x;
    x.xr = [](double r, double) { return r; };
    x.xth = [](double, double) { return 0.0; };
    x.id = "r-dr";
    return x;
}

GeneralField rotation_field() {
    GeneralField x;
    x.xr = [](double, double) { return 0.0; };
    x.xth = [](double, double) { return 1.0; };
    x.id = "dtheta";
    return x;
}

GeneralField sin_theta_radial_field(const WarpProfile& prof) {
    double omega = 2.0 * kPi / prof.fiber_volume;
    GeneralField x;
    x.xr = [omega](double, double th) { return std::sin(omega * th); };
    x.xth = [](double, double) { return 0.0; };
    x.id = "sin-theta-dr";
    return x;
}

}  // namespace folmod
