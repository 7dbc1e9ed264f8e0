// Hyperfine tensors: the 3x3 symmetric coupling matrix, its decomposition
// into the axial/transverse ladder components (A_zz, A_perp, A'_perp, A_ani,
// phi), the contact+dipole parametrization, and the registry of tabulated
// nuclear-spin families. Tensor entries are stored in angular units
// (rad/us = 2pi x MHz); file input and the MHz helpers convert once.
#pragma once

#include "nvpol/linalg.hpp"
#include "nvpol/spin.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace nvpol {

struct HyperfineTensor {
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();  // rad/us, symmetric

    static HyperfineTensor zero() { return {}; }

    static HyperfineTensor from_matrix(const Eigen::Matrix3d& m, double sym_tol = 1e-9) {
        const double scale = 1.0 + m.cwiseAbs().maxCoeff();
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
            throw std::invalid_argument("HyperfineTensor: matrix is not symmetric");
        HyperfineTensor t;
        t.a = (m + m.transpose()) / 2.0;
        return t;
    }

    // Components given in MHz; stored as 2pi x value.
    static HyperfineTensor from_mhz(double axx, double axy, double axz,
                                    double ayy, double ayz, double azz) {
        Eigen::Matrix3d m;
        m << axx, axy, axz, axy, ayy, ayz, axz, ayz, azz;
        return from_matrix(two_pi * m);
    }

    // Ladder components (rad/us, phi_H = 0 convention): A_xx = (A_perp + A'_perp)/2,
    // A_yy = (A_perp - A'_perp)/2, A_xz = A_ani, off-plane entries zero.
    static HyperfineTensor from_ladder(double a_zz, double a_perp, double a_perp_prime,
                                       double a_ani) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        m(0, 0) = (a_perp + a_perp_prime) / 2.0;
        m(1, 1) = (a_perp - a_perp_prime) / 2.0;
        m(2, 2) = a_zz;
        m(0, 2) = m(2, 0) = a_ani;
        return from_matrix(m);
    }

    bool is_zero() const { return a.cwiseAbs().maxCoeff() == 0.0; }
};

// ---------------------------------------------------------------------------
// ladder decomposition
//
// S.A.I = A_zz Sz Iz + (A_perp/4)(S+I- + S-I+)
//       + (A'_perp/4)(S+I+ e^{-2i phi} + S-I- e^{+2i phi})
//       + (A_ani/2)((S+Iz + SzI+) e^{-i phi} + h.c.)
// with A'_perp e^{-2i phi} = A_xx - A_yy - 2i A_xy and
//      A_ani  e^{-i phi}  = A_xz - i A_yz.
// phi is taken from the A'_perp channel when it is nonzero (so A'_perp >= 0
// and A_ani keeps its sign, matching the tabulated phi = 0 convention);
// otherwise from the A_ani channel, reduced to |phi| <= pi/2.

struct LadderComponents {
    double a_zz = 0.0;
    double a_perp = 0.0;
    double a_perp_prime = 0.0;
    double a_ani = 0.0;
    double phi = 0.0;
    bool phases_consistent = true;
    double phi_perp_channel = 0.0;  // reported when the two channels disagree
    double phi_ani_channel = 0.0;
};

inline LadderComponents ladder_components(const HyperfineTensor& t, double tol = 1e-12) {
    const auto& a = t.a;
    LadderComponents out;
    out.a_zz = a(2, 2);
    out.a_perp = a(0, 0) + a(1, 1);
    const Complex c_perp(a(0, 0) - a(1, 1), -2.0 * a(0, 1));   // A'_perp e^{-2i phi}
    const Complex c_ani(a(0, 2), -a(1, 2));                    // A_ani e^{-i phi}
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    if (std::abs(c_perp) > tol * scale) {
        double phi = -std::arg(c_perp) / 2.0;     // branch with A'_perp >= 0
        if (phi > two_pi / 4.0) phi -= two_pi / 2.0;
        if (phi <= -two_pi / 4.0) phi += two_pi / 2.0;
        out.phi = phi;
        out.a_perp_prime = std::abs(c_perp);
        const Complex rot = c_ani * std::exp(Complex(0, phi));
        out.a_ani = rot.real();
        out.phases_consistent = std::abs(rot.imag()) <= 1e-6 * scale;
        if (!out.phases_consistent) {
            out.phi_perp_channel = phi;
            out.phi_ani_channel = -std::arg(c_ani);
        }
    } else if (std::abs(c_ani) > tol * scale) {
        double phi = -std::arg(c_ani);
        double sign = 1.0;
        if (phi > two_pi / 4.0) { phi -= two_pi / 2.0; sign = -1.0; }
        if (phi <= -two_pi / 4.0) { phi += two_pi / 2.0; sign = -1.0; }
        out.phi = phi;
        out.a_ani = sign * std::abs(c_ani);
    }
    return out;
}

// ---------------------------------------------------------------------------
// contact + dipole parametrization (angles theta_H, phi_H)

inline HyperfineTensor from_contact_dipole(double a_c, double a_d, double theta,
                                           double phi = 0.0) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    Eigen::Matrix3d m;
    m(0, 0) = a_c - a_d * (1.0 - 3.0 * st * st * cp * cp);
    m(1, 1) = a_c - a_d * (1.0 - 3.0 * st * st * sp * sp);
    m(2, 2) = a_c - a_d * (1.0 - 3.0 * ct * ct);
    m(0, 1) = m(1, 0) = 3.0 * a_d * st * st * cp * sp;
    m(0, 2) = m(2, 0) = 3.0 * a_d * st * ct * cp;
    m(1, 2) = m(2, 1) = 3.0 * a_d * st * ct * sp;
    return HyperfineTensor::from_matrix(m);
}

struct ContactDipole {
    double a_c = 0.0;
    double a_d = 0.0;
};

// Valid for tensors expressed in the phi_H = 0 convention.
inline ContactDipole extract_contact_dipole(const HyperfineTensor& t) {
    ContactDipole cd;
    cd.a_c = t.a.trace() / 3.0;
    cd.a_d = t.a(0, 0) + t.a(2, 2) - 2.0 * cd.a_c;
    return cd;
}

// ---------------------------------------------------------------------------
// family registry

struct FamilyRecord {
    std::string name;
    HyperfineTensor ground;
    HyperfineTensor excited;
    std::string note;
};

// Built-in records carry the tabulated ladder components (MHz) for the 15N
// nuclear spin and the C and H carbon families, ground and excited state.
inline std::vector<FamilyRecord> builtin_families() {
    auto ladder_mhz = [](double azz, double aperp, double aprime, double aani) {
        return HyperfineTensor::from_ladder(two_pi * azz, two_pi * aperp,
                                            two_pi * aprime, two_pi * aani);
    };
    std::vector<FamilyRecord> fams;
    fams.push_back({"15N",
                    ladder_mhz(3.4, 7.8, 0.0, 0.0),
                    ladder_mhz(-58.1, -77.0, 0.0, 0.0),
                    "15N nuclear spin of the NV center"});
    fams.push_back({"C",
                    ladder_mhz(-8.822, -20.378, 0.621, -0.789),
                    ladder_mhz(-3.78, -14.12, 0.680, 0.749),
                    "13C family C"});
    fams.push_back({"H",
                    ladder_mhz(1.933, 2.067, 0.670, -0.250),
                    ladder_mhz(3.413, 4.086, 0.866, -0.349),
                    "13C family H"});
    return fams;
}

// Data file: one record per line,
//   family  manifold(GS|ES)  Axx Axy Axz Ayy Ayz Azz  [theta_deg]
// components in MHz. A trailing theta rotates the tensor about y (records
// supplied in the nuclear principal-axis system). '#' starts a comment.
// Families listed with GS only reuse the ground tensor for the excited state.
inline std::vector<FamilyRecord> load_family_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hyperfine data file: " + path);
    struct Entry {
        std::optional<HyperfineTensor> gs, es;
    };
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string name, manifold;
        if (!(ss >> name >> manifold)) continue;  // blank line
        double c[6];
        for (double& x : c)
            if (!(ss >> x))
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected six tensor components");
        double theta_deg = 0.0;
        ss >> theta_deg;
        Eigen::Matrix3d m;
        m << c[0], c[1], c[2], c[1], c[3], c[4], c[2], c[4], c[5];
        if (theta_deg != 0.0) {
            const double th = theta_deg * two_pi / 360.0;
            Eigen::Matrix3d r;
            r << std::cos(th), 0, std::sin(th), 0, 1, 0, -std::sin(th), 0, std::cos(th);
            m = r * m * r.transpose();
        }
        auto tensor = HyperfineTensor::from_matrix(two_pi * m);
        if (entries.find(name) == entries.end()) order.push_back(name);
        if (manifold == "GS")
            entries[name].gs = tensor;
        else if (manifold == "ES")
            entries[name].es = tensor;
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": manifold must be GS or ES");
    }
    std::vector<FamilyRecord> fams;
    for (const auto& name : order) {
        const auto& e = entries.at(name);
        if (!e.gs)
            throw std::runtime_error(path + ": family " + name + " has no GS record");
        FamilyRecord rec;
        rec.name = name;
        rec.ground = *e.gs;
        rec.excited = e.es ? *e.es : *e.gs;
        rec.note = e.es ? "from data file" : "from data file (ES copied from GS)";
        fams.push_back(rec);
    }
    return fams;
}

class FamilyRegistry {
public:
    FamilyRegistry() : families_(builtin_families()) {}

    explicit FamilyRegistry(const std::string& data_file) : FamilyRegistry() {
        merge(load_family_file(data_file));
    }

    void merge(const std::vector<FamilyRecord>& extra) {
        for (const auto& rec : extra) {
            bool replaced = false;
            for (auto& existing : families_)
                if (existing.name == rec.name) {
                    existing = rec;
                    replaced = true;
                }
            if (!replaced) families_.push_back(rec);
        }
    }

    const std::vector<FamilyRecord>& all() const { return families_; }

    const FamilyRecord& get(const std::string& name) const {
        for (const auto& rec : families_)
            if (rec.name == name) return rec;
        throw std::out_of_range("unknown hyperfine family: " + name);
    }

private:
    std::vector<FamilyRecord> families_;
};

}  // namespace nvpol
