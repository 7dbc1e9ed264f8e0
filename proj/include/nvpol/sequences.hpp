// Pulse sequences for the three nuclear polarization protocols, plus the
// plain pump/readout sequence used for electron-polarization scans.
//
//   pump   laser(tL) - wait(tW); full Hamiltonian
//   eslac  laser(tL) - wait(tW) at B || z near 510 G; full Hamiltonian
//   ms0    laser - wait - MW(|0,dn> -> |+1,dn>) - laser - wait at
//          B = (10, 0, 0.5) G; secular Hamiltonian with the second-order
//          correction on the ground manifold
//   ms1    same skeleton, MW on |0,up> -> |+1,up>, B_z = -A_zz / gamma_n;
//          plain secular Hamiltonian
//
// The MW amplitude and duration follow the three-level optimum: coupling
// matrix element equal to the nuclear coupling Delta and duration
// t_n = (2n+1) pi / sqrt(2) |Delta|.
#pragma once

#include "nvpol/hamiltonian.hpp"
#include "nvpol/hyperfine.hpp"
#include "nvpol/lindblad.hpp"
#include "nvpol/observables.hpp"
#include "nvpol/rates.hpp"

#include <atomic>
#include <map>
#include <thread>

namespace nvpol {

struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ProtocolKind { pump, eslac, ms0, ms1 };

inline std::string to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::pump: return "pump";
        case ProtocolKind::eslac: return "eslac";
        case ProtocolKind::ms0: return "ms0";
        case ProtocolKind::ms1: return "ms1";
    }
    return "?";
}

struct Segment {
    double duration = 0.0;  // us
    ControlSettings control;
    std::string label;
};

struct Protocol {
    ProtocolKind kind = ProtocolKind::pump;
    std::vector<Segment> segments;
    ReadoutBasis readout_basis = ReadoutBasis::z();
    int repeat = 1;
    double delta = 0.0;  // rad/us; nuclear coupling of the MW step (0 if none)
    double t_mw = 0.0;
    bool degenerate = false;  // Delta ~ 0, MW replaced by an idle segment

    void validate() const {
        for (const auto& s : segments)
            if (s.duration < 0.0 || !std::isfinite(s.duration))
                throw std::invalid_argument("Protocol: segment duration must be >= 0");
        if (repeat < 1) throw std::invalid_argument("Protocol: repeat must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Delta and the microwave schedule

// |off-diagonal| of the conditional nuclear Hamiltonian feeding the MW step:
// electron in m_s = 0 with the second-order correction for the ms0 protocol,
// m_s = +1 without it for ms1.
inline double compute_delta(ProtocolKind kind, const SystemParams& params,
                            const HyperfineTensor& hf_ground) {
    if (params.nuclear_dim != 2)
        throw std::invalid_argument("compute_delta: requires a spin-1/2 nucleus");
    ComplexMatrix h;
    if (kind == ProtocolKind::ms0)
        h = conditional_hamiltonian(params, hf_ground, 0, true);
    else if (kind == ProtocolKind::ms1)
        h = conditional_hamiltonian(params, hf_ground, 1, false);
    else
        throw std::invalid_argument("compute_delta: protocol has no precession channel");
    return std::abs(h(0, 1));
}

struct MwSchedule {
    double rabi = 0.0;  // drive amplitude; matrix element rabi/2 equals |Delta|
    double t_mw = 0.0;  // us
};

inline MwSchedule mw_schedule(double delta, int n = 0) {
    if (delta == 0.0) throw protocol_error("mw_schedule: Delta is zero");
    MwSchedule s;
    s.rabi = 2.0 * std::abs(delta);
    s.t_mw = (2 * n + 1) * two_pi / 2.0 / (std::sqrt(2.0) * std::abs(delta));
    return s;
}

// ---------------------------------------------------------------------------
// preset builders

struct ProtocolOptions {
    double k = 4.0;                  // 1/us
    std::optional<double> t_laser;   // us; 2 by default, 1000 for eslac (steady state)
    double t_wait = 2.0;
    double t_laser2 = 0.3;
    std::optional<double> t_mw;     // default (2n+1) pi / (sqrt2 |Delta|)
    std::optional<double> t_wait2;  // default pi / |Delta|  (half a precession)
    int mw_period_index = 0;
    std::optional<double> bz;       // eslac field override (G)
    double theta_b = 0.0;           // field misalignment angle (rad)
    int repeat = 1;
    bool lenient = false;  // Delta ~ 0 yields an idle MW segment, not an error
};

inline Protocol make_pump(const ProtocolOptions& opts = {}) {
    Protocol p;
    p.kind = ProtocolKind::pump;
    p.repeat = opts.repeat;
    p.segments = {{opts.t_laser.value_or(2.0), ControlSettings::laser(opts.k), "laser"},
                  {opts.t_wait, ControlSettings::idle(), "wait"}};
    return p;
}

// Sets B along z (tilted by theta_b toward x when requested).
inline Protocol make_eslac(SystemParams& params, const ProtocolOptions& opts = {}) {
    Protocol p;
    p.kind = ProtocolKind::eslac;
    p.repeat = opts.repeat;
    const double bz = opts.bz.value_or(510.0);
    params.b_field =
        bz * Eigen::Vector3d(std::sin(opts.theta_b), 0.0, std::cos(opts.theta_b));
    p.segments = {{opts.t_laser.value_or(1000.0), ControlSettings::laser(opts.k), "laser"},
                  {opts.t_wait, ControlSettings::idle(), "wait"}};
    return p;
}

namespace detail {

inline Protocol make_precession(ProtocolKind kind, SystemParams& params,
                                const HyperfineTensor& hf_ground,
                                const ProtocolOptions& opts) {
    Protocol p;
    p.kind = kind;
    p.repeat = opts.repeat;
    p.readout_basis = ReadoutBasis::conditional(kind == ProtocolKind::ms0 ? 1 : 0);

    const double delta = compute_delta(kind, params, hf_ground);
    constexpr double delta_floor = 1e-9;  // rad/us
    double t_mw, t_wait2;
    ControlSettings mw_control = ControlSettings::idle();
    if (std::abs(delta) < delta_floor) {
        if (!opts.lenient)
            throw protocol_error(to_string(kind) +
                                 ": zero nuclear coupling, the protocol cannot polarize "
                                 "this nuclear spin");
        p.degenerate = true;
        t_mw = opts.t_mw.value_or(20.0);
        t_wait2 = opts.t_wait2.value_or(20.0);
    } else {
        const auto sched = mw_schedule(delta, opts.mw_period_index);
        t_mw = opts.t_mw.value_or(sched.t_mw);
        t_wait2 = opts.t_wait2.value_or(two_pi / 2.0 / std::abs(delta));
        MicrowaveDrive drive;
        drive.rabi = sched.rabi;
        drive.ms_from = 0;
        drive.ms_to = 1;
        drive.nuclear_level = kind == ProtocolKind::ms0 ? 1 : 0;  // down : up
        mw_control.mw = drive;
    }
    p.delta = delta;
    p.t_mw = t_mw;
    p.segments = {{opts.t_laser.value_or(2.0), ControlSettings::laser(opts.k), "laser"},
                  {opts.t_wait, ControlSettings::idle(), "wait"},
                  {t_mw, mw_control, "mw"},
                  {opts.t_laser2, ControlSettings::laser(opts.k), "laser2"},
                  {t_wait2, ControlSettings::idle(), "wait2"}};
    return p;
}

}  // namespace detail

// B = (10, 0, 0.5) G unless the caller already set a field (b_field != 0).
inline Protocol make_ms0(SystemParams& params, const HyperfineTensor& hf_ground,
                         const ProtocolOptions& opts = {}) {
    if (params.b_field.isZero()) params.b_field = Eigen::Vector3d(10.0, 0.0, 0.5);
    return detail::make_precession(ProtocolKind::ms0, params, hf_ground, opts);
}

// B_z = -A_zz / gamma_n brings |+1,up> and |+1,dn> together (unless the
// caller already set a field).
inline Protocol make_ms1(SystemParams& params, const HyperfineTensor& hf_ground,
                         const ProtocolOptions& opts = {}) {
    if (params.b_field.isZero()) {
        const double azz = hf_ground.a(2, 2);
        params.b_field = Eigen::Vector3d(0.0, 0.0, -azz / params.gamma_n);
    }
    return detail::make_precession(ProtocolKind::ms1, params, hf_ground, opts);
}

// ---------------------------------------------------------------------------
// running a protocol

struct BoundaryReadout {
    int repeat = 0;
    int segment = -1;  // -1 marks the initial state
    std::string label;
    double t = 0.0;
    Readout readout;
};

struct RunResult {
    std::vector<BoundaryReadout> boundaries;
    std::vector<std::pair<double, Readout>> trajectory;  // filled when sampled
    double delta = 0.0;
    double t_mw = 0.0;
    bool degenerate = false;

    // readout after the last segment with this label (of the last repeat)
    const Readout& after(const std::string& label) const {
        for (auto it = boundaries.rbegin(); it != boundaries.rend(); ++it)
            if (it->label == label) return it->readout;
        throw std::out_of_range("RunResult: no segment labelled " + label);
    }

    const Readout& final() const { return boundaries.back().readout; }
};

struct RunOptions {
    RelaxationParams relax;
    std::optional<double> sample_dt;  // record a trajectory when set
};

inline RunResult run_protocol(const Protocol& proto, const RateModel& model,
                              SystemParams params, const HyperfineTensor& hf_ground,
                              const HyperfineTensor& hf_excited,
                              const RunOptions& opts = {}) {
    proto.validate();
    params.validate();

    ComplexMatrix h;
    ComplexMatrix basis;
    const ComplexMatrix* basis_ptr = nullptr;
    switch (proto.kind) {
        case ProtocolKind::pump:
        case ProtocolKind::eslac:
            h = build_hamiltonian(params, hf_ground, hf_excited, HamiltonianMode::full);
            break;
        case ProtocolKind::ms0:
            h = build_hamiltonian_soc_ground(params, hf_ground, hf_excited);
            break;
        case ProtocolKind::ms1:
            h = build_hamiltonian(params, hf_ground, hf_excited, HamiltonianMode::secular);
            break;
    }
    if (proto.readout_basis.kind == ReadoutBasis::Kind::conditional) {
        basis = conditional_nuclear_basis(params, hf_ground, proto.readout_basis.ms,
                                          proto.kind == ProtocolKind::ms0);
        basis_ptr = &basis;
    }

    // one Liouvillian per distinct control, one propagator per (control, duration)
    std::map<std::pair<double, bool>, ComplexMatrix> liouvillians;
    auto liouville_for = [&](const ControlSettings& c) -> const ComplexMatrix& {
        const auto key = std::make_pair(c.k, c.mw.has_value());
        auto it = liouvillians.find(key);
        if (it != liouvillians.end()) return it->second;
        const ComplexMatrix h_seg =
            c.mw ? microwave_term(*c.mw, h, params.nuclear_dim) : h;
        return liouvillians.emplace(key, liouvillian(h_seg, jump_operators(model, opts.relax,
                                                                           c, params.nuclear_dim)))
            .first->second;
    };

    SimState state = SimState::thermal(params.nuclear_dim);
    state.validate();

    RunResult result;
    result.delta = proto.delta;
    result.t_mw = proto.t_mw;
    result.degenerate = proto.degenerate;
    double t = 0.0;
    result.boundaries.push_back({0, -1, "init", 0.0, read_state(state, basis_ptr)});
    for (int rep = 0; rep < proto.repeat; ++rep) {
        for (size_t seg = 0; seg < proto.segments.size(); ++seg) {
            const auto& segment = proto.segments[seg];
            const auto& sup = liouville_for(segment.control);
            if (opts.sample_dt) {
                auto traj = evolve_sampled(state, sup, segment.duration, *opts.sample_dt);
                for (size_t i = 1; i < traj.size(); ++i)
                    result.trajectory.emplace_back(t + traj[i].t,
                                                   read_state(traj[i].state, basis_ptr));
                state = std::move(traj.back().state);
            } else {
                state = evolve(state, sup, segment.duration);
            }
            t += segment.duration;
            result.boundaries.push_back(
                {rep, static_cast<int>(seg), segment.label, t, read_state(state, basis_ptr)});
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// parameter sweeps

enum class SweepAxis { k, theta_h, b_z, family, t };

inline std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::k: return "k";
        case SweepAxis::theta_h: return "theta_H";
        case SweepAxis::b_z: return "B_z";
        case SweepAxis::family: return "family";
        case SweepAxis::t: return "t";
    }
    return "?";
}

struct SweepConfig {
    ProtocolKind protocol = ProtocolKind::eslac;
    SweepAxis axis = SweepAxis::k;
    std::vector<double> grid;            // numeric axes
    std::vector<std::string> families;   // family axis
    int model = 4;
    std::string family = "15N";
    double k = 4.0;
    ProtocolOptions proto_opts;
    RelaxationParams relax;
    int workers = 0;  // 0 = hardware concurrency
    double ms0_bx_cap = 50.0;  // |B_x| cap (G) for the ms0 family-sweep field rule
};

struct SweepRow {
    double value = 0.0;
    std::string family;
    double delta = 0.0;
    double t_mw = 0.0;
    bool ok = false;
    bool degenerate = false;
    std::string error;
    Readout after_wait, after_mw, end;
    bool has_mw = false;
};

namespace detail {

inline Nucleus nucleus_for_family(const std::string& name) {
    return name == "15N" ? Nucleus::n15 : Nucleus::c13;
}

// Per-manifold contact/dipole terms of the base family re-laid at theta.
inline std::pair<HyperfineTensor, HyperfineTensor> tensors_at_theta(
    const FamilyRecord& fam, double theta) {
    const auto cd_g = extract_contact_dipole(fam.ground);
    const auto cd_e = extract_contact_dipole(fam.excited);
    return {from_contact_dipole(cd_g.a_c, cd_g.a_d, theta),
            from_contact_dipole(cd_e.a_c, cd_e.a_d, theta)};
}

template <typename F>
inline void parallel_for(int n, int workers, F&& body) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (int i; (i = next.fetch_add(1)) < n;) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

// One protocol run per grid point, executed in parallel and gathered in grid
// order. Per-point failures are recorded in the row and do not stop the sweep.
inline std::vector<SweepRow> sweep(const SweepConfig& cfg, const FamilyRegistry& registry) {
    const bool family_axis = cfg.axis == SweepAxis::family;
    const int n = family_axis ? static_cast<int>(cfg.families.size())
                              : static_cast<int>(cfg.grid.size());
    if (n == 0) throw std::invalid_argument("sweep: empty grid");

    std::vector<SweepRow> rows(static_cast<size_t>(n));
    const auto base_family = registry.get(cfg.family);

    detail::parallel_for(n, cfg.workers, [&](int i) {
        SweepRow& row = rows[static_cast<size_t>(i)];
        try {
            std::string fam_name = cfg.family;
            double k = cfg.k;
            ProtocolOptions opts = cfg.proto_opts;
            opts.lenient = true;
            HyperfineTensor hf_g = base_family.ground;
            HyperfineTensor hf_e = base_family.excited;
            std::optional<Eigen::Vector3d> field_override;

            switch (cfg.axis) {
                case SweepAxis::k:
                    k = cfg.grid[static_cast<size_t>(i)];
                    row.value = k;
                    break;
                case SweepAxis::theta_h: {
                    const double theta = cfg.grid[static_cast<size_t>(i)];
                    row.value = theta;
                    std::tie(hf_g, hf_e) = detail::tensors_at_theta(base_family, theta);
                    break;
                }
                case SweepAxis::b_z:
                    row.value = cfg.grid[static_cast<size_t>(i)];
                    opts.bz = row.value;
                    if (cfg.protocol != ProtocolKind::eslac && cfg.protocol != ProtocolKind::pump)
                        field_override = Eigen::Vector3d(0.0, 0.0, row.value);
                    break;
                case SweepAxis::family: {
                    fam_name = cfg.families[static_cast<size_t>(i)];
                    row.family = fam_name;
                    const auto& rec = registry.get(fam_name);
                    hf_g = rec.ground;
                    hf_e = rec.excited;
                    break;
                }
                case SweepAxis::t:
                    row.value = cfg.grid[static_cast<size_t>(i)];
                    if (cfg.protocol == ProtocolKind::ms0 || cfg.protocol == ProtocolKind::ms1)
                        opts.t_mw = row.value;
                    else
                        opts.t_laser = row.value;
                    break;
            }
            opts.k = k;

            SystemParams params = SystemParams::for_nucleus(
                detail::nucleus_for_family(fam_name), Eigen::Vector3d::Zero());
            Protocol proto;
            switch (cfg.protocol) {
                case ProtocolKind::pump:
                    params.b_field = field_override.value_or(Eigen::Vector3d::Zero());
                    proto = make_pump(opts);
                    break;
                case ProtocolKind::eslac:
                    proto = make_eslac(params, opts);
                    break;
                case ProtocolKind::ms0:
                    if (field_override)
                        params.b_field = *field_override;
                    else if (cfg.axis == SweepAxis::family) {
                        // field rule B_x = -A_ani / gamma_n, capped
                        const auto lad = ladder_components(hf_g);
                        double bx = -lad.a_ani / params.gamma_n;
                        bx = std::clamp(bx, -cfg.ms0_bx_cap, cfg.ms0_bx_cap);
                        params.b_field = Eigen::Vector3d(bx, 0.0, 0.0);
                    } else {
                        params.b_field = Eigen::Vector3d(10.0, 0.0, 0.5);
                    }
                    proto = make_ms0(params, hf_g, opts);
                    break;
                case ProtocolKind::ms1:
                    if (field_override) params.b_field = *field_override;
                    proto = make_ms1(params, hf_g, opts);
                    break;
            }

            RunOptions ropts;
            ropts.relax = cfg.relax;
            const auto result =
                run_protocol(proto, RateModel::table(cfg.model), params, hf_g, hf_e, ropts);
            row.delta = result.delta;
            row.t_mw = result.t_mw;
            row.degenerate = result.degenerate;
            row.end = result.final();
            row.after_wait = result.after("wait");
            if (cfg.protocol == ProtocolKind::ms0 || cfg.protocol == ProtocolKind::ms1) {
                row.after_mw = result.after("mw");
                row.has_mw = true;
            } else {
                row.after_mw = row.end;
            }
            row.ok = true;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
    });
    return rows;
}

}  // namespace nvpol
