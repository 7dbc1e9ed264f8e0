// Transition-rate models for the seven-level system, relaxation times and
// piecewise-constant control settings.
//
// Rates are inverse lifetimes in 1/us (the tabulated MHz values used
// directly: 1 MHz = 1/us). Coherent quantities (Rabi amplitudes, detunings)
// are angular, rad/us.
#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace nvpol {

// The four published inter-system-crossing rate sets. gamma is the
// spontaneous decay rate, e the probability of a non-spin-conserving
// optical transition, k_{ms,S} the excited-to-singlet rates and k_{S,ms}
// the singlet-to-ground rates. The five-level sources behind models 2 and 4
// quote a combined rate into m_s = +-1, so those ship here divided by two.
struct RateModel {
    int label = 0;
    double gamma = 0.0;  // 1/us
    double e = 0.0;
    double k0s = 0.0, kps = 0.0, kms = 0.0;  // excited (0,+,-) -> singlet
    double ks0 = 0.0, ksp = 0.0, ksm = 0.0;  // singlet -> ground (0,+,-)

    static RateModel table(int label) {
        switch (label) {
            case 1: return {1, 77.0, 1.5 / 77.0, 0.0, 30.0, 30.0, 3.3, 0.0, 0.0};
            case 2: return {2, 62.7, 0.01, 12.97, 80.0, 80.0, 3.45, 2.16 / 2, 2.16 / 2};
            case 3: return {3, 63.2, 0.0, 10.8, 60.7, 60.7, 0.8, 0.4, 0.4};
            case 4: return {4, 67.4, 0.0, 9.9, 91.6, 91.6, 4.83, 2.11 / 2, 2.11 / 2};
        }
        throw std::out_of_range("RateModel: label must be 1..4");
    }

    void validate() const {
        const double rates[] = {gamma, k0s, kps, kms, ks0, ksp, ksm};
        for (double r : rates)
            if (r < 0.0) throw std::invalid_argument("RateModel: negative rate");
        if (e < 0.0 || e > 1.0)
            throw std::invalid_argument("RateModel: e must be in [0, 1]");
    }
};

// Relaxation times in us. Infinite time switches a channel off.
struct RelaxationParams {
    double t2_el_ground = 3.0;
    double t2_el_excited = 6e-3;
    double t1_el = 1e3;
    double t2_n = 1e3;
    double t1_n = 1e5;

    static RelaxationParams none() {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, inf, inf, inf};
    }

    void validate() const {
        const double times[] = {t2_el_ground, t2_el_excited, t1_el, t2_n, t1_n};
        for (double t : times)
            if (!(t > 0.0)) throw std::invalid_argument("RelaxationParams: times must be positive");
    }
};

// Selective microwave drive on a ground-state electron transition, treated
// in the frame rotating with the drive. The drive is resonant with the joint
// transition |ms_from, nuclear_level> <-> |ms_to, nuclear_level>.
struct MicrowaveDrive {
    double rabi = 0.0;      // rad/us; the pair coupling matrix element is rabi/2
    int ms_from = 0;
    int ms_to = 1;
    int nuclear_level = 0;  // index in the nuclear basis (descending projection)

    void validate(int nuclear_dim) const {
        if (rabi < 0.0) throw std::invalid_argument("MicrowaveDrive: rabi must be >= 0");
        if (ms_from < -1 || ms_from > 1 || ms_to < -1 || ms_to > 1 || ms_from == ms_to)
            throw std::invalid_argument("MicrowaveDrive: invalid m_s pair");
        if (nuclear_level < 0 || nuclear_level >= nuclear_dim)
            throw std::invalid_argument("MicrowaveDrive: nuclear level out of range");
    }
};

struct ControlSettings {
    double k = 0.0;  // optical excitation rate, 1/us; 0 = laser off
    std::optional<MicrowaveDrive> mw;

    void validate(int nuclear_dim) const {
        if (k < 0.0) throw std::invalid_argument("ControlSettings: k must be >= 0");
        if (mw) mw->validate(nuclear_dim);
    }

    static ControlSettings laser(double k) { return {k, std::nullopt}; }
    static ControlSettings idle() { return {0.0, std::nullopt}; }
};

}  // namespace nvpol
