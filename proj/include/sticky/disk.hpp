#pragma once

#include "sticky/mesh.hpp"
#include "sticky/parallel.hpp"

#include <string>
#include <vector>

namespace sticky {

/// Unit ball (Euclidean disk of radius 1 or hyperbolic ball of geodesic radius 1) with the
/// constant weights alpha = alpha_bar/|Omega|, beta = (1 - alpha_bar)/|dOmega|.
struct DiskModel {
    Geometry geometry = Geometry::Euclidean;
    double alpha_bar = 0.5;
    double delta = 0.0;

    /// Throws std::invalid_argument unless 0 < alpha_bar < 1 and delta >= 0 (finite).
    void validate() const;
    /// alpha / beta = alpha_bar/(1 - alpha_bar) * |dOmega| / |Omega|.
    double gamma() const;
};

double ball_area(Geometry geometry);
double ball_perimeter(Geometry geometry);

/// J_k(x) and J_k'(x) for integer k >= 0 and 0 <= x <= kMaxBesselArgument.
/// Throws EvaluationRangeError outside that range.
inline constexpr double kMaxBesselArgument = 200.0;
double bessel_j(int k, double x);
double bessel_j_prime(int k, double x);

/// Radial solution R of R'' + coth(r) R' - k^2/sinh^2(r) R + lambda R = 0 on (0, 1], regular
/// at 0 and normalized so R ~ r^k. Returns {R(1), R'(1)}. Valid for 0 <= lambda <= kMaxShootingLambda.
inline constexpr double kMaxShootingLambda = 2500.0;
struct RadialValue {
    double value = 0.0;
    double derivative = 0.0;
};
RadialValue hyperbolic_radial(int k, double lambda);

/// Mode-k matching condition whose positive roots are the mode-k eigenvalues.
///   Euclidean:  gamma sqrt(l) J_k'(sqrt(l)) - (l - delta k^2) J_k(sqrt(l))
///   hyperbolic: gamma R'(1) - (l - delta k^2 / sinh^2(1)) R(1)
/// Throws std::invalid_argument for lambda <= 0 and EvaluationRangeError beyond the
/// reliable range.
double secular_value(const DiskModel& model, int mode, double lambda);

inline constexpr int kDiskModeCutoff = 12;

struct DiskGap {
    double value = 0.0;
    int mode = 0;
    /// First positive root of each mode 0..kDiskModeCutoff, or +infinity when the mode has
    /// no root below the running minimum (it cannot be the gap).
    std::vector<double> first_roots;
    /// True when the highest modes scanned have no root below the minimum, so modes above
    /// the cutoff cannot lower it either.
    bool cutoff_verified = false;
};

/// First nonzero eigenvalue of the sticky-reflection problem (delta = 0) or the
/// boundary-diffusion problem on the ball, by a sign scan plus bisection to 1e-10.
/// Throws SolverError if no bracket is found for the radial mode.
DiskGap disk_gap_details(const DiskModel& model);
double disk_gap(const DiskModel& model);

/// 4 alpha_bar / pi^2 (Euclidean) and alpha_bar / (pi^2 (cosh 1 - 1)^2) (hyperbolic): the
/// product of the half-ball constants over 4.
double bound_curve(const DiskModel& model);

/// First nonzero Neumann eigenvalue of the ball.
double neumann_gap(Geometry geometry);

/// Finite element counterpart of disk_gap on generate_disk_mesh(level, geometry).
double fem_disk_gap(const DiskModel& model, int level);

struct DiskRow {
    DiskModel model;
    double exact = 0.0;
    /// NaN when not computed.
    double fem = 0.0;
    double bound = 0.0;
};

/// Rows for every (alpha_bar, delta) pair, computed in parallel. `fem_level` < 0 skips FEM.
std::vector<DiskRow> disk_rows(Geometry geometry, const std::vector<double>& alpha_bars,
                               const std::vector<double>& deltas, int fem_level = -1,
                               Execution execution = Execution::Parallel);

std::string to_string(Geometry geometry);
Geometry parse_geometry(const std::string& text);

/// "geometry,alpha_bar,delta,lambda1_exact,lambda1_fem,bound"
std::string disk_csv_header();
/// One CSV line, 12 significant digits, "nan" for a missing FEM value.
std::string to_csv(const DiskRow& row);

}  // namespace sticky
