#pragma once

// Numeric verification: deterministic random sampling of jets and group
// elements, a closed-form surface catalog, a finite-difference oracle,
// invariance trial suites and solution-residual checks.

#include <cstdint>
#include <string>
#include <vector>

#include "invpde/conformal.hpp"
#include "invpde/euclidean.hpp"
#include "invpde/expr.hpp"
#include "invpde/jet_point.hpp"

namespace invpde {

/// Deterministic 64-bit generator (splitmix64). Identical streams on every
/// platform, which keeps reports reproducible byte for byte.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Per-trial stream derived from (seed, trial index); independent of how
/// trials are partitioned across threads.
SplitMix64 trial_rng(std::uint64_t seed, long index);

/// Catalog surface with closed-form jets. The plane is the zero graph; the
/// sphere and cylinder have radius r; the catenoid has waist a (n = 2 only).
struct Surface {
    enum class Kind { Plane, Sphere, Cylinder, Catenoid };

    Kind kind = Kind::Plane;
    int n = 2;
    double param = 1.0;

    static Surface plane(int n);
    static Surface sphere(int n, double r);
    static Surface cylinder(int n, double r);
    static Surface catenoid(double a);

    std::string name() const;
    bool in_domain(const std::vector<double>& x) const;
    /// Graph height u(x); throws OutOfDomain outside the chart domain.
    double height(const std::vector<double>& x) const;
    /// Closed-form 2-jet at x.
    JetPoint2 jet_at(const std::vector<double>& x) const;
    /// Deterministic sample inside the surface's parameter range.
    std::vector<double> sample_point(SplitMix64& rng) const;
};

/// Uniform jet in [-scale, scale] per entry, d2u symmetrized; deterministic
/// for a fixed seed.
JetPoint2 sample_jet(int n, std::uint64_t seed, double scale);

/// Central-difference 2-jet of order h^2, for validating closed-form jets.
JetPoint2 fd_jet(const Surface& s, const std::vector<double>& x0, double h);

/// Random motion: exp of a random skew matrix with norm <= 1 plus a bounded
/// translation.
EuclideanMotion sample_motion(int n, SplitMix64& rng);

/// Near-identity Moebius element g_minus(xi1) rotation(B) dilation(a)
/// g_plus(xi2) a_e0(t) with all parameters bounded by `bound`.
MoebiusElement sample_moebius(int n, SplitMix64& rng, double bound = 0.3);

struct TrialReport {
    std::string suite;
    long trials = 0;
    long failures = 0;
    long discarded = 0;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    std::uint64_t seed = 0;
};

std::string report_to_json(const TrialReport& r);

enum class SuiteGroup { Euclidean, Conformal };

/// Euclidean: checks every tau_m preserved under random motions.
/// Conformal: checks weight-zero ratios rho_h = tau_deg_h^2 / tau_deg_2^h and
/// single-factor consistency tau_deg_h(Mp) = c^h tau_deg_h(p) with
/// c = sqrt(tau_deg_2(Mp)/tau_deg_2(p)).
/// Failures are counted, not thrown. threads = 0 means use INVPDE_THREADS or 1.
TrialReport run_invariance_suite(SuiteGroup group, int n, long trials, double tol,
                                 std::uint64_t seed, int threads = 0);

/// max |pde(jet_at(x_k))| over deterministic samples on the surface.
double solution_residual(const Expr& pde, const Surface& s, int samples,
                         std::uint64_t seed = 2026);

}  // namespace invpde
