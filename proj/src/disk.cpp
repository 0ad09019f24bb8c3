#include "sticky/disk.hpp"

#include "sticky/assembly.hpp"
#include "sticky/eigensolver.hpp"
#include "sticky/error.hpp"
#include "sticky/mesh_generators.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace sticky {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void DiskModel::validate() const {
    if (!(alpha_bar > 0.0 && alpha_bar < 1.0)) throw std::invalid_argument("alpha_bar must lie in (0,1)");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be finite and nonnegative");
}

double DiskModel::gamma() const {
    validate();
    return alpha_bar / (1.0 - alpha_bar) * ball_perimeter(geometry) / ball_area(geometry);
}

double ball_area(Geometry geometry) {
    return geometry == Geometry::Euclidean ? kPi : 2.0 * kPi * (std::cosh(1.0) - 1.0);
}

double ball_perimeter(Geometry geometry) {
    return geometry == Geometry::Euclidean ? 2.0 * kPi : 2.0 * kPi * std::sinh(1.0);
}

// ---------------------------------------------------------------------------------------
// Special functions

namespace {

void check_bessel(int k, double x) {
    if (k < 0) throw std::invalid_argument("Bessel order must be nonnegative");
    if (!(x >= 0.0 && x <= kMaxBesselArgument))
        throw EvaluationRangeError("Bessel argument " + std::to_string(x) + " outside [0, " +
                                   std::to_string(kMaxBesselArgument) + "]");
}

}  // namespace

double bessel_j(int k, double x) {
    check_bessel(k, x);
    return std::cyl_bessel_j(static_cast<double>(k), x);
}

double bessel_j_prime(int k, double x) {
    check_bessel(k, x);
    if (k == 0) return -std::cyl_bessel_j(1.0, x);
    return 0.5 * (std::cyl_bessel_j(k - 1.0, x) - std::cyl_bessel_j(k + 1.0, x));
}

namespace {

// R(r) in the variable t = log r: R_tt = (1 - r coth r) R_t + (k^2 r^2/sinh^2 r - lambda r^2) R.
// The coefficients stay bounded as r -> 0, unlike the equation in r.
struct ShootingGrid {
    static constexpr double kStart = 1e-6;
    static constexpr int kSteps = 6908;

    double h;
    // Coefficients at t_j, t_j + h/2 for j = 0..kSteps, interleaved.
    std::vector<double> p, q, w;

    ShootingGrid() {
        const double t0 = std::log(kStart);
        h = -t0 / kSteps;
        const std::size_t n = 2 * kSteps + 1;
        p.resize(n);
        q.resize(n);
        w.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::exp(t0 + 0.5 * h * static_cast<double>(i));
            const double s = std::sinh(r);
            p[i] = 1.0 - r * std::cosh(r) / s;
            q[i] = r * r / (s * s);
            w[i] = r * r;
        }
    }
};

const ShootingGrid& shooting_grid() {
    static const ShootingGrid grid;
    return grid;
}

}  // namespace

RadialValue hyperbolic_radial(int k, double lambda) {
    if (k < 0) throw std::invalid_argument("mode must be nonnegative");
    if (!(lambda >= 0.0 && lambda <= kMaxShootingLambda))
        throw EvaluationRangeError("shooting eigenvalue " + std::to_string(lambda) + " outside [0, " +
                                   std::to_string(kMaxShootingLambda) + "]");
    const ShootingGrid& g = shooting_grid();
    const double k2 = static_cast<double>(k) * k;
    // Two-term series R = r^k (1 + c r^2), scaled by r0^-k.
    const double r0 = ShootingGrid::kStart;
    const double c = -(lambda + k * (k + 1.0) / 3.0) / (4.0 * (k + 1.0));
    double y = 1.0 + c * r0 * r0;
    double z = k + c * (k + 2.0) * r0 * r0;  // dR/dt = r R'
    auto accel = [&](std::size_t i, double y_, double z_) { return g.p[i] * z_ + (k2 * g.q[i] - lambda * g.w[i]) * y_; };
    const double h = g.h;
    for (int j = 0; j < ShootingGrid::kSteps; ++j) {
        const std::size_t i = 2 * static_cast<std::size_t>(j);
        const double k1y = z, k1z = accel(i, y, z);
        const double k2y = z + 0.5 * h * k1z, k2z = accel(i + 1, y + 0.5 * h * k1y, z + 0.5 * h * k1z);
        const double k3y = z + 0.5 * h * k2z, k3z = accel(i + 1, y + 0.5 * h * k2y, z + 0.5 * h * k2z);
        const double k4y = z + h * k3z, k4z = accel(i + 2, y + h * k3y, z + h * k3z);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    }
    const double scale = std::pow(r0, k);
    return {scale * y, scale * z};  // at r = 1, dR/dt = R'
}

double secular_value(const DiskModel& model, int mode, double lambda) {
    model.validate();
    if (mode < 0) throw std::invalid_argument("mode must be nonnegative");
    if (!(lambda > 0.0)) throw std::invalid_argument("secular_value needs lambda > 0");
    const double gamma = model.gamma();
    const double k2 = static_cast<double>(mode) * mode;
    if (model.geometry == Geometry::Euclidean) {
        const double x = std::sqrt(lambda);
        return gamma * x * bessel_j_prime(mode, x) - (lambda - model.delta * k2) * bessel_j(mode, x);
    }
    const double sh = std::sinh(1.0);
    const RadialValue r = hyperbolic_radial(mode, lambda);
    return gamma * r.derivative - (lambda - model.delta * k2 / (sh * sh)) * r.value;
}

// ---------------------------------------------------------------------------------------
// Root finding

namespace {

constexpr double kScanStart = 1e-6;  // lambda; the root at 0 is excluded
constexpr double kScanStep = 0.05;   // in sqrt(lambda)
constexpr double kBisectionWidth = 1e-10;

// First root of g in (kScanStart, upper], or nullopt if g keeps its sign there.
std::optional<double> first_root(const std::function<double(double)>& g, double upper) {
    double lo = kScanStart;
    double glo = g(lo);
    for (double x = std::sqrt(lo) + kScanStep;; x += kScanStep) {
        const double hi = std::min(x * x, upper);
        const double ghi = g(hi);
        if (glo == 0.0) return lo;
        if ((glo < 0.0) != (ghi < 0.0) || ghi == 0.0) {
            double a = lo, b = hi, ga = glo;
            while (b - a > kBisectionWidth) {
                const double m = 0.5 * (a + b);
                const double gm = g(m);
                if (gm == 0.0) return m;
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        if (hi >= upper) return std::nullopt;
        lo = hi;
        glo = ghi;
    }
}

// The radial mode always has a root below the first radial Dirichlet-Neumann crossing,
// which is well under this limit.
constexpr double kRadialScanLimit = 60.0;

}  // namespace

DiskGap disk_gap_details(const DiskModel& model) {
    model.validate();
    DiskGap out;
    out.first_roots.assign(kDiskModeCutoff + 1, kInf);
    auto secular = [&](int k) { return [&model, k](double l) { return secular_value(model, k, l); }; };

    const auto radial = first_root(secular(0), kRadialScanLimit);
    if (!radial) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "no sign change of the radial secular function in (%g, %g] (alpha_bar=%g delta=%g)",
                      kScanStart, kRadialScanLimit, model.alpha_bar, model.delta);
        throw SolverError(buf);
    }
    out.first_roots[0] = out.value = *radial;
    for (int k = 1; k <= kDiskModeCutoff; ++k) {
        const auto root = first_root(secular(k), out.value);
        if (!root) continue;
        out.first_roots[static_cast<std::size_t>(k)] = *root;
        if (*root < out.value) {
            out.value = *root;
            out.mode = k;
        }
    }
    // First roots grow with k; when the last two modes stay above the minimum, so do the rest.
    out.cutoff_verified = !std::isfinite(out.first_roots[kDiskModeCutoff]) &&
                          !std::isfinite(out.first_roots[kDiskModeCutoff - 1]);
    return out;
}

double disk_gap(const DiskModel& model) { return disk_gap_details(model).value; }

double bound_curve(const DiskModel& model) {
    model.validate();
    if (model.geometry == Geometry::Euclidean) return 4.0 * model.alpha_bar / (kPi * kPi);
    const double c = std::cosh(1.0) - 1.0;
    return model.alpha_bar / (kPi * kPi * c * c);
}

double neumann_gap(Geometry geometry) {
    if (geometry == Geometry::Euclidean) {
        const auto root = first_root([](double l) { return bessel_j_prime(1, std::sqrt(l)); }, kRadialScanLimit);
        if (!root) throw SolverError("no root of J_1' found");
        return *root;
    }
    double best = kInf;
    for (int k = 0; k <= kDiskModeCutoff; ++k) {
        const double upper = std::isfinite(best) ? best : kRadialScanLimit;
        const auto root = first_root([k](double l) { return hyperbolic_radial(k, l).derivative; }, upper);
        if (root) best = std::min(best, *root);
    }
    if (!std::isfinite(best)) throw SolverError("no Neumann root found on the hyperbolic ball");
    return best;
}

double fem_disk_gap(const DiskModel& model, int level) {
    model.validate();
    const auto mesh = with_constant_weights(generate_disk_mesh(level, model.geometry), model.alpha_bar);
    const ProblemKind kind =
        model.delta == 0.0 ? ProblemKind::sticky_reflection() : ProblemKind::boundary_diffusion(model.delta);
    return solve_generalized(assemble_problem(mesh, kind, {Execution::Serial}), 2).eigenvalues[1];
}

std::vector<DiskRow> disk_rows(Geometry geometry, const std::vector<double>& alpha_bars,
                               const std::vector<double>& deltas, int fem_level, Execution execution) {
    std::vector<DiskRow> rows;
    for (double d : deltas)
        for (double a : alpha_bars) rows.push_back({{geometry, a, d}, 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0});
    for (const auto& r : rows) r.model.validate();
    std::vector<std::exception_ptr> errors(rows.size());
    const auto n = static_cast<std::int64_t>(rows.size());
    auto fill = [&](std::int64_t i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        try {
            row.exact = disk_gap(row.model);
            row.bound = bound_curve(row.model);
            if (fem_level >= 0) row.fem = fem_disk_gap(row.model, fem_level);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    };
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) fill(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) fill(i);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string to_string(Geometry geometry) { return geometry == Geometry::Euclidean ? "euclidean" : "hyperbolic"; }

Geometry parse_geometry(const std::string& text) {
    if (text == "euclidean") return Geometry::Euclidean;
    if (text == "hyperbolic") return Geometry::Hyperbolic;
    throw std::invalid_argument("unknown geometry '" + text + "' (expected euclidean or hyperbolic)");
}

std::string disk_csv_header() { return "geometry,alpha_bar,delta,lambda1_exact,lambda1_fem,bound"; }

std::string to_csv(const DiskRow& row) {
    auto num = [](double x) {
        if (std::isnan(x)) return std::string("nan");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    return to_string(row.model.geometry) + "," + num(row.model.alpha_bar) + "," + num(row.model.delta) + "," +
           num(row.exact) + "," + num(row.fem) + "," + num(row.bound);
}

}  // namespace sticky
