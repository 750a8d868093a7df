#pragma once

// Radially symmetric self-dual vortices and lattice pairs built from them.
//
// In the radial gauge u = f(r) e^{ik theta}, alpha = a(r) d theta with
// eps = 1 the Bogomolny system reads
//   f' = (k - a) f / r,    a' = r (1 - f^2) / 2,
// with f(0) = a(0) = 0 and f -> 1, a -> k at infinity.

#include <iosfwd>
#include <vector>

#include "ymh/currents.hpp"
#include "ymh/lattice.hpp"

namespace ymh {

struct ProfileOptions {
    double r0 = 1e-3;          // shooting starts from the series f = c r^k e^{-r^2/8}
    double dr = 0.005;         // mesh step away from the origin
    double geometric = 0.025;  // near the origin the step is geometric * r
    double splice_tol = 1e-5;  // 1 - f below this: switch to the Bessel tail
};

class VortexProfile {
public:
    struct Value {
        double f, a, df, da;
    };

    int k() const { return k_; }
    double r_max() const { return r_max_; }
    double shooting_coefficient() const { return c_; }
    double splice_radius() const { return r_splice_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& f() const { return f_; }
    const std::vector<double>& a() const { return a_; }

    // Cubic Hermite interpolation with the ODE slopes; the series below r0,
    // the decaying Bessel tail between the splice point and r_max, and
    // f = 1, a = k beyond r_max.
    Value eval(double r) const;

    // max over interval midpoints of the two Bogomolny residuals.
    double max_residual() const;

private:
    friend VortexProfile solve_profile(int k, double r_max, double tol, const ProfileOptions& opt);
    Value eval_abs(double r) const;

    int k_ = 0;
    int sign_ = 1;
    double r_max_ = 30.0;
    double r0_ = 0.0;
    double c_ = 0.0;
    double r_splice_ = 0.0;
    double tail_c_ = 0.0;
    std::vector<double> r_, f_, a_, df_, da_;
};

VortexProfile solve_profile(int k, double r_max = 30.0, double tol = 1e-10, const ProfileOptions& opt = {});

struct ProfileEnergy {
    double value = 0.0;
    double defect = 0.0;  // value - 2 pi |k|
};
ProfileEnergy profile_energy(const VortexProfile& p);

// r, f, a, residual_f, residual_a per mesh point.
void write_profile_csv(const VortexProfile& p, std::ostream& os);

// One vortex line (n = 3) or point (n = 2) for synthesis. pos holds the
// coordinates in the transverse plane (j, k), j < k; in n = 3 `axis` is the
// line direction and degree counts windings in the (j, k) orientation.
struct VortexCore {
    int axis = -1;
    double pos[2] = {0.0, 0.0};
    int degree = 1;
};

struct SynthesisOptions {
    // The glued profile keeps the vortex for r <= lambda and is the vacuum
    // beyond 2 lambda.
    double lambda = 0.0;
    int link_quadrature = 8;
};

// Pair whose gauge-invariant content samples the glued vortices: |u| at
// sites, link phases from the exact line integrals of the radial-gauge
// connection, plaquette curvature from their circulation. Cores must sit
// inside plaquettes (not on links). The degrees must reproduce the flux
// sector. The profiles are looked up by |degree|.
PairState synthesize_cores(LatticeHandle lattice, double eps, const std::vector<VortexCore>& cores,
                           const std::vector<VortexProfile>& profiles, const SynthesisOptions& opt);

// Single planar vortex of degree profile.k() in the flux-k sector of T^2,
// glued at lambda = min l / 6.
PairState synthesize_planar(const VortexProfile& profile, double eps, LatticeHandle grid2,
                            std::array<double, 2> center);

struct RecoveryOptions {
    double c_lambda = 1.2;       // lambda = c_lambda eps^{3/4}
    double lambda = 0.0;         // explicit override when > 0
    double min_separation = 6.0; // in units of eps
};

// Recovery pair for a union of straight dual loops along the axes of T^3
// (or a dual 0-cycle on T^2). Each loop carries the multiplicity of its
// cells; the cycle class must match the flux sector.
PairState build_recovery_pair(LatticeHandle lattice, const CubicalCurrent& cycle, double eps,
                              const RecoveryOptions& opt = {});

// The glueing radius chosen by build_recovery_pair for this cycle.
double recovery_lambda(const Grid& g, const CubicalCurrent& cycle, double eps, const RecoveryOptions& opt);

}  // namespace ymh
