#include "sticky/cheeger.hpp"

#include "sticky/error.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sticky {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Enum>
struct Names {
    Enum value;
    const char* name;
};

constexpr Names<ConstantKind> kKindNames[] = {
    {ConstantKind::HC, "hc"},         {ConstantKind::HJ, "hj"},
    {ConstantKind::HB, "hb"},         {ConstantKind::HD, "hd"},
    {ConstantKind::HE, "he"},         {ConstantKind::HC_boundary, "hc-boundary"},
    {ConstantKind::HC_tilde_bulkonly, "hc-tilde-bulk"},
};

constexpr Names<RestrictionVariant> kVariantNames[] = {
    {RestrictionVariant::Bulk, "bulk"},
    {RestrictionVariant::Boundary, "boundary"},
    {RestrictionVariant::Combined, "combined"},
};

}  // namespace

std::string to_string(ConstantKind kind) {
    for (const auto& n : kKindNames)
        if (n.value == kind) return n.name;
    return "?";
}

std::string to_string(RestrictionVariant variant) {
    for (const auto& n : kVariantNames)
        if (n.value == variant) return n.name;
    return "?";
}

std::string to_string(CheegerMethod method) {
    switch (method) {
        case CheegerMethod::BruteForce: return "brute-force";
        case CheegerMethod::Sweep: return "sweep";
        case CheegerMethod::ArcEnumeration: return "arc-enumeration";
    }
    return "?";
}

ConstantKind parse_constant_kind(const std::string& text) {
    for (const auto& n : kKindNames)
        if (text == n.name) return n.value;
    throw std::invalid_argument("unknown constant kind '" + text + "'");
}

RestrictionVariant parse_restriction_variant(const std::string& text) {
    for (const auto& n : kVariantNames)
        if (text == n.name) return n.value;
    throw std::invalid_argument("unknown restriction variant '" + text + "'");
}

int set_count(ConstantKind kind) { return kind == ConstantKind::HD ? 3 : 1; }

std::optional<double> ratio(ConstantKind kind, std::span<const SubsetMeasures> sets, double delta) {
    if (sets.size() != static_cast<std::size_t>(set_count(kind)))
        throw std::invalid_argument("wrong number of sets for " + to_string(kind));
    const SubsetMeasures& a = sets[0];
    switch (kind) {
        case ConstantKind::HC:
        case ConstantKind::HC_tilde_bulkonly:
            if (!(a.bulk > 0.0)) return std::nullopt;
            return a.interior_cut / a.bulk;
        case ConstantKind::HJ:
            if (!(a.exterior_arc > 0.0)) return std::nullopt;
            return a.interior_cut / a.exterior_arc;
        case ConstantKind::HB: {
            const double den = a.bulk + a.exterior_arc;
            if (!(den > 0.0)) return std::nullopt;
            return a.interior_cut / den;
        }
        case ConstantKind::HE: {
            const double den = a.bulk + a.exterior_arc;
            if (!(den > 0.0)) return std::nullopt;
            return (a.interior_cut + delta * a.arc_endpoints) / den;
        }
        case ConstantKind::HC_boundary:
            if (!(a.exterior_arc > 0.0)) return std::nullopt;
            return a.arc_endpoints / a.exterior_arc;
        case ConstantKind::HD: {
            const SubsetMeasures& b = sets[1];
            const SubsetMeasures& c = sets[2];
            const double den = b.bulk + b.exterior_arc;
            if (!(a.bulk > 0.0) || !(den > 0.0) || !(c.exterior_arc > 0.0)) return std::nullopt;
            return a.interior_cut / a.bulk * (b.interior_cut / den) +
                   delta * (b.arc_endpoints / den) * (c.arc_endpoints / c.exterior_arc);
        }
    }
    return std::nullopt;
}

std::optional<double> ratio(ConstantKind kind, const std::vector<TriangleSubset>& sets, double delta) {
    std::vector<SubsetMeasures> m;
    for (const auto& s : sets) m.push_back(subset_measures(s));
    return ratio(kind, m, delta);
}

bool admissible(const WeightedMesh& mesh, RestrictionVariant variant, const SubsetMeasures& m) {
    constexpr double rel = 1e-12;
    switch (variant) {
        case RestrictionVariant::Bulk: {
            const double half = mesh.bulk_measure() / 2.0;
            return m.bulk <= half * (1.0 + rel);
        }
        case RestrictionVariant::Boundary: {
            const double half = mesh.boundary_measure() / 2.0;
            return m.exterior_arc <= half * (1.0 + rel);
        }
        case RestrictionVariant::Combined:
            return m.bulk + m.exterior_arc <= 0.5 * (1.0 + rel);
    }
    return false;
}

nlohmann::json to_json(const CheegerReport& report) {
    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& w : report.witnesses) witnesses.push_back(w.members());
    nlohmann::json out = {{"kind", to_string(report.kind)},
                          {"variant", to_string(report.variant)},
                          {"delta", report.delta},
                          {"method", to_string(report.method)},
                          {"found", report.found},
                          {"witnesses", witnesses}};
    if (std::isfinite(report.value))
        out["value"] = report.value;
    else
        out["value"] = "inf";
    if (!report.arc_edges.empty()) out["arc_edges"] = report.arc_edges;
    return out;
}

// ---------------------------------------------------------------------------------------
// Exhaustive enumeration

SubsetMeasureTable::SubsetMeasureTable(const WeightedMesh& mesh, Execution execution) : mesh_(&mesh) {
    const std::size_t t_count = mesh.triangle_count();
    if (t_count > kBruteForceTriangleLimit)
        throw EnumerationLimitError("exhaustive enumeration supports at most " +
                                    std::to_string(kBruteForceTriangleLimit) + " triangles, mesh has " +
                                    std::to_string(t_count) + "; use the sweep method");

    // Flattened in the summation order of subset_measures so both give identical values.
    struct Cut {
        int left, right;
        double w;
    };
    struct Arc {
        int tri;
        double w;
    };
    struct Corner {
        int in, out;
        double beta;
    };
    std::vector<double> area(t_count);
    for (std::size_t t = 0; t < t_count; ++t) area[t] = mesh.weighted_area(static_cast<int>(t));
    std::vector<Cut> cuts;
    for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
        const auto& edge = mesh.edges()[e];
        if (!edge.on_boundary()) cuts.push_back({edge.left, edge.right, mesh.weighted_cut(static_cast<int>(e))});
    }
    std::vector<Arc> arcs;
    for (int e : mesh.boundary_edges()) arcs.push_back({mesh.edges()[static_cast<std::size_t>(e)].left, mesh.weighted_arc(e)});
    std::vector<Corner> corners;
    for (const auto& c : mesh.boundary_corners())
        corners.push_back({mesh.edges()[static_cast<std::size_t>(c.incoming_edge)].left,
                           mesh.edges()[static_cast<std::size_t>(c.outgoing_edge)].left,
                           mesh.beta()[static_cast<std::size_t>(c.vertex)]});

    entries_.resize(std::size_t{1} << t_count);
    const auto n = static_cast<std::int64_t>(entries_.size());
    auto fill = [&](std::int64_t k) {
        const auto mask = static_cast<std::uint64_t>(k);
        auto in = [mask](int t) { return ((mask >> t) & 1u) != 0; };
        SubsetMeasures m;
        for (std::size_t t = 0; t < t_count; ++t)
            if (in(static_cast<int>(t))) m.bulk += area[t];
        for (const auto& c : cuts)
            if (in(c.left) != in(c.right)) m.interior_cut += c.w;
        for (const auto& a : arcs)
            if (in(a.tri)) m.exterior_arc += a.w;
        for (const auto& c : corners)
            if (in(c.in) != in(c.out)) m.arc_endpoints += c.beta;
        entries_[static_cast<std::size_t>(k)] = m;
    };
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < n; ++k) fill(k);
    } else {
        for (std::int64_t k = 0; k < n; ++k) fill(k);
    }
}

namespace {

// Lexicographic order of the ascending member lists of two distinct masks.
bool lex_less(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    if (diff == 0) return false;
    const int low = std::countr_zero(diff);
    const std::uint64_t above = low + 1 >= 64 ? 0 : ~std::uint64_t{0} << (low + 1);
    if ((a >> low) & 1u) return (b & above) != 0;
    return (a & above) == 0;
}

struct Candidate {
    double value = kInf;
    double bulk = kInf;
    std::uint64_t mask = 0;
    bool found = false;
};

bool better(const Candidate& a, const Candidate& b) {
    if (!a.found) return false;
    if (!b.found) return true;
    if (a.value != b.value) return a.value < b.value;
    if (a.bulk != b.bulk) return a.bulk < b.bulk;
    return lex_less(a.mask, b.mask);
}

template <class Score>
Candidate minimize(const SubsetMeasureTable& table, RestrictionVariant variant, Execution execution, Score score) {
    const auto n = static_cast<std::int64_t>(table.size());
    const WeightedMesh& mesh = table.mesh();
    auto visit = [&](std::int64_t k, Candidate& best) {
        const SubsetMeasures& m = table[static_cast<std::uint64_t>(k)];
        if (!admissible(mesh, variant, m)) return;
        const std::optional<double> r = score(m);
        if (!r) return;
        const Candidate c{*r, m.bulk, static_cast<std::uint64_t>(k), true};
        if (better(c, best)) best = c;
    };
    if (execution == Execution::Serial) {
        Candidate best;
        for (std::int64_t k = 1; k < n - 1; ++k) visit(k, best);
        return best;
    }
    std::vector<Candidate> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
    {
        Candidate local;
#pragma omp for schedule(static)
        for (std::int64_t k = 1; k < n - 1; ++k) visit(k, local);
        partial[static_cast<std::size_t>(omp_get_thread_num())] = local;
    }
    Candidate best;
    for (const auto& c : partial)
        if (better(c, best)) best = c;
    return best;
}

RestrictionVariant effective_variant(ConstantKind kind, RestrictionVariant variant) {
    if (kind == ConstantKind::HC_tilde_bulkonly || kind == ConstantKind::HC_boundary) return RestrictionVariant::Boundary;
    return variant;
}

void require_normalized(const WeightedMesh& mesh, RestrictionVariant variant) {
    if (variant != RestrictionVariant::Combined) return;
    const double total = mesh.bulk_measure() + mesh.boundary_measure();
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("the combined restriction needs normalized weights (total measure 1)");
}

}  // namespace

CheegerReport brute_force_constant(const WeightedMesh& mesh, ConstantKind kind, RestrictionVariant variant,
                                   double delta, Execution execution) {
    if (kind == ConstantKind::HC_boundary) return boundary_cheeger(mesh);
    if (kind == ConstantKind::HD && mesh.triangle_count() > kTripleBruteForceTriangleLimit)
        throw EnumerationLimitError("exhaustive enumeration of the three-set constant supports at most " +
                                    std::to_string(kTripleBruteForceTriangleLimit) + " triangles, mesh has " +
                                    std::to_string(mesh.triangle_count()) + "; use the sweep method");
    const SubsetMeasureTable table(mesh, execution);
    return brute_force_constant(table, kind, variant, delta, execution);
}

CheegerReport brute_force_constant(const SubsetMeasureTable& table, ConstantKind kind, RestrictionVariant variant,
                                   double delta, Execution execution) {
    const WeightedMesh& mesh = table.mesh();
    if (kind == ConstantKind::HC_boundary) return boundary_cheeger(mesh);
    if (kind == ConstantKind::HD && mesh.triangle_count() > kTripleBruteForceTriangleLimit)
        throw EnumerationLimitError("exhaustive enumeration of the three-set constant supports at most " +
                                    std::to_string(kTripleBruteForceTriangleLimit) + " triangles");
    variant = effective_variant(kind, variant);
    require_normalized(mesh, variant);

    CheegerReport report;
    report.kind = kind;
    report.variant = variant;
    report.delta = delta;
    report.method = CheegerMethod::BruteForce;
    report.value = kInf;

    if (kind != ConstantKind::HD) {
        const Candidate best = minimize(table, variant, execution, [&](const SubsetMeasures& m) {
            return ratio(kind, std::span<const SubsetMeasures>(&m, 1), delta);
        });
        if (best.found) {
            report.found = true;
            report.value = best.value;
            report.witnesses.push_back(TriangleSubset::from_mask(mesh, best.mask));
        }
        return report;
    }

    // The two terms are nonnegative and A, C enter only one of them each, so the triple
    // infimum splits into an infimum over B of terms with A and C already minimized.
    const Candidate a = minimize(table, variant, execution, [](const SubsetMeasures& m) {
        return ratio(ConstantKind::HC, std::span<const SubsetMeasures>(&m, 1));
    });
    const Candidate c = minimize(table, variant, execution, [](const SubsetMeasures& m) -> std::optional<double> {
        if (!(m.exterior_arc > 0.0)) return std::nullopt;
        return m.arc_endpoints / m.exterior_arc;
    });
    if (!a.found || !c.found) return report;
    const Candidate b = minimize(table, variant, execution, [&](const SubsetMeasures& m) -> std::optional<double> {
        const double den = m.bulk + m.exterior_arc;
        if (!(den > 0.0)) return std::nullopt;
        return a.value * (m.interior_cut / den) + delta * (m.arc_endpoints / den) * c.value;
    });
    if (!b.found) return report;
    report.found = true;
    report.value = b.value;
    report.witnesses = {TriangleSubset::from_mask(mesh, a.mask), TriangleSubset::from_mask(mesh, b.mask),
                        TriangleSubset::from_mask(mesh, c.mask)};
    return report;
}

// ---------------------------------------------------------------------------------------
// Superlevel-set sweeps

namespace {

// Measures of the nested sets obtained by adding triangles in a fixed order.
class NestedSets {
public:
    explicit NestedSets(const WeightedMesh& mesh)
        : mesh_(mesh), in_(mesh.triangle_count(), 0), corner_on_(mesh.boundary_corners().size(), 0),
          edge_corners_(mesh.edge_count()) {
        const auto& corners = mesh.boundary_corners();
        for (std::size_t c = 0; c < corners.size(); ++c) {
            edge_corners_[static_cast<std::size_t>(corners[c].incoming_edge)].push_back(static_cast<int>(c));
            edge_corners_[static_cast<std::size_t>(corners[c].outgoing_edge)].push_back(static_cast<int>(c));
        }
    }

    void add(int t) {
        const auto& edges = mesh_.edges();
        in_[static_cast<std::size_t>(t)] = 1;
        m_.bulk += mesh_.weighted_area(t);
        for (int e : mesh_.triangle_edges()[static_cast<std::size_t>(t)]) {
            const Edge& edge = edges[static_cast<std::size_t>(e)];
            if (!edge.on_boundary()) {
                const int other = edge.left == t ? edge.right : edge.left;
                m_.interior_cut += in_[static_cast<std::size_t>(other)] ? -mesh_.weighted_cut(e) : mesh_.weighted_cut(e);
                continue;
            }
            m_.exterior_arc += mesh_.weighted_arc(e);
            for (int c : edge_corners_[static_cast<std::size_t>(e)]) refresh_corner(c);
        }
    }

    const SubsetMeasures& measures() const { return m_; }

private:
    void refresh_corner(int c) {
        const auto& corner = mesh_.boundary_corners()[static_cast<std::size_t>(c)];
        const auto& edges = mesh_.edges();
        const bool a = in_[static_cast<std::size_t>(edges[static_cast<std::size_t>(corner.incoming_edge)].left)] != 0;
        const bool b = in_[static_cast<std::size_t>(edges[static_cast<std::size_t>(corner.outgoing_edge)].left)] != 0;
        const char on = a != b ? 1 : 0;
        if (on == corner_on_[static_cast<std::size_t>(c)]) return;
        const double beta = mesh_.beta()[static_cast<std::size_t>(corner.vertex)];
        m_.arc_endpoints += on ? beta : -beta;
        corner_on_[static_cast<std::size_t>(c)] = on;
    }

    const WeightedMesh& mesh_;
    std::vector<char> in_;
    std::vector<char> corner_on_;
    std::vector<std::vector<int>> edge_corners_;
    SubsetMeasures m_;
};

struct SweepFamily {
    std::vector<int> order;                 // triangles, decreasing vertex mean
    std::vector<std::size_t> prefix;        // prefix lengths of the superlevel sets
    std::vector<SubsetMeasures> measures;   // measures of each prefix
};

SweepFamily superlevel_family(const WeightedMesh& mesh, const Eigen::VectorXd& g) {
    const std::size_t t_count = mesh.triangle_count();
    std::vector<double> mean(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        const auto& tri = mesh.triangles()[t];
        mean[t] = (g(tri[0]) + g(tri[1]) + g(tri[2])) / 3.0;
    }
    SweepFamily family;
    family.order.resize(t_count);
    for (std::size_t t = 0; t < t_count; ++t) family.order[t] = static_cast<int>(t);
    std::stable_sort(family.order.begin(), family.order.end(),
                     [&](int a, int b) { return mean[static_cast<std::size_t>(a)] > mean[static_cast<std::size_t>(b)]; });

    std::vector<double> thresholds(g.data(), g.data() + g.size());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    NestedSets sets(mesh);
    std::size_t count = 0;
    for (double t : thresholds) {
        const std::size_t before = count;
        while (count < t_count && mean[static_cast<std::size_t>(family.order[count])] > t) sets.add(family.order[count++]);
        if (count == 0 || count == t_count) continue;
        if (!family.prefix.empty() && count == before) continue;
        family.prefix.push_back(count);
        family.measures.push_back(sets.measures());
    }
    return family;
}

TriangleSubset prefix_subset(const WeightedMesh& mesh, const SweepFamily& family, std::size_t index) {
    const std::size_t n = family.prefix[index];
    return TriangleSubset(mesh, std::vector<int>(family.order.begin(), family.order.begin() + static_cast<std::ptrdiff_t>(n)));
}

struct SweepPick {
    double value = kInf;
    const SweepFamily* family = nullptr;
    std::size_t index = 0;
};

template <class Score>
SweepPick sweep_min(const WeightedMesh& mesh, const std::vector<SweepFamily>& families, RestrictionVariant variant,
                    Score score) {
    SweepPick best;
    for (const auto& family : families)
        for (std::size_t i = 0; i < family.measures.size(); ++i) {
            const auto& m = family.measures[i];
            if (!admissible(mesh, variant, m)) continue;
            const std::optional<double> r = score(m);
            if (r && *r < best.value) best = {*r, &family, i};
        }
    return best;
}

bool is_constant(const Eigen::VectorXd& f) {
    if (f.size() == 0) return true;
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    return f.maxCoeff() - f.minCoeff() <= 1e-9 * scale;
}

}  // namespace

CheegerReport sweep_upper_bound(const WeightedMesh& mesh, const Eigen::VectorXd& f, ConstantKind kind,
                                RestrictionVariant variant, double delta) {
    return sweep_upper_bound(mesh, std::span<const Eigen::VectorXd>(&f, 1), kind, variant, delta);
}

CheegerReport sweep_upper_bound(const WeightedMesh& mesh, std::span<const Eigen::VectorXd> functions,
                                ConstantKind kind, RestrictionVariant variant, double delta) {
    if (kind == ConstantKind::HC_boundary) return boundary_cheeger(mesh);
    variant = effective_variant(kind, variant);
    require_normalized(mesh, variant);

    CheegerReport report;
    report.kind = kind;
    report.variant = variant;
    report.delta = delta;
    report.method = CheegerMethod::Sweep;
    report.value = kInf;

    std::vector<SweepFamily> families;
    for (const auto& f : functions) {
        if (f.size() != static_cast<Eigen::Index>(mesh.vertex_count()))
            throw std::invalid_argument("sweep function needs one value per mesh vertex");
        if (is_constant(f)) continue;
        families.push_back(superlevel_family(mesh, f));
        families.push_back(superlevel_family(mesh, -f));
    }

    if (kind != ConstantKind::HD) {
        const SweepPick best = sweep_min(mesh, families, variant, [&](const SubsetMeasures& m) {
            return ratio(kind, std::span<const SubsetMeasures>(&m, 1), delta);
        });
        if (!best.family) return report;
        report.witnesses.push_back(prefix_subset(mesh, *best.family, best.index));
    } else {
        const SweepPick a = sweep_min(mesh, families, variant, [](const SubsetMeasures& m) {
            return ratio(ConstantKind::HC, std::span<const SubsetMeasures>(&m, 1));
        });
        const SweepPick c = sweep_min(mesh, families, variant, [](const SubsetMeasures& m) -> std::optional<double> {
            if (!(m.exterior_arc > 0.0)) return std::nullopt;
            return m.arc_endpoints / m.exterior_arc;
        });
        if (!a.family || !c.family) return report;
        const SweepPick b = sweep_min(mesh, families, variant, [&](const SubsetMeasures& m) -> std::optional<double> {
            const double den = m.bulk + m.exterior_arc;
            if (!(den > 0.0)) return std::nullopt;
            return a.value * (m.interior_cut / den) + delta * (m.arc_endpoints / den) * c.value;
        });
        if (!b.family) return report;
        report.witnesses = {prefix_subset(mesh, *a.family, a.index), prefix_subset(mesh, *b.family, b.index),
                            prefix_subset(mesh, *c.family, c.index)};
    }
    // Report the value of the witnesses themselves rather than the running sums.
    report.value = *ratio(kind, report.witnesses, delta);
    report.found = true;
    return report;
}

std::vector<Eigen::VectorXd> sweep_functions(const WeightedMesh& mesh, const SpectralResult& result, int angles) {
    std::vector<Eigen::VectorXd> out;
    const std::size_t first = result.kind.has_constant_kernel() ? 1 : 0;
    auto lift = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.vertex_count()));
        for (std::size_t i = 0; i < result.dof_map.size(); ++i) f(result.dof_map[i]) = v(static_cast<Eigen::Index>(i));
        return f;
    };
    for (std::size_t k = first; k < result.eigenvectors.size(); ++k) out.push_back(lift(result.eigenvectors[k]));
    if (angles > 1 && first + 1 < result.eigenvalues.size()) {
        const double l0 = result.eigenvalues[first];
        const double l1 = result.eigenvalues[first + 1];
        // Mesh asymmetry splits symmetric eigenvalues slightly; any pair this close is treated as one eigenspace.
        if (std::abs(l1 - l0) <= 1e-2 * std::max(std::abs(l0), 1e-300)) {
            const Eigen::VectorXd& u = result.eigenvectors[first];
            const Eigen::VectorXd& v = result.eigenvectors[first + 1];
            for (int a = 1; a < angles; ++a) {
                const double theta = std::numbers::pi * a / angles;
                out.push_back(lift(std::cos(theta) * u + std::sin(theta) * v));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Boundary isoperimetric constant

CheegerReport boundary_cheeger(const WeightedMesh& mesh) {
    CheegerReport report;
    report.kind = ConstantKind::HC_boundary;
    report.variant = RestrictionVariant::Boundary;
    report.method = CheegerMethod::ArcEnumeration;
    report.value = kInf;

    const auto& edges = mesh.edges();
    const auto& beta = mesh.beta();
    const double half = mesh.boundary_measure() / 2.0 * (1.0 + 1e-12);
    const auto& boundary = mesh.boundary_edges();

    std::vector<double> start_beta(mesh.edge_count(), 0.0), end_beta(mesh.edge_count(), 0.0);
    for (const auto& c : mesh.boundary_corners()) {
        start_beta[static_cast<std::size_t>(c.outgoing_edge)] = beta[static_cast<std::size_t>(c.vertex)];
        end_beta[static_cast<std::size_t>(c.incoming_edge)] = beta[static_cast<std::size_t>(c.vertex)];
    }

    double best_measure = kInf;
    std::size_t offset = 0;
    for (const auto& loop : mesh.boundary_loops()) {
        const std::size_t n = loop.size();
        const std::vector<int> ids(boundary.begin() + static_cast<std::ptrdiff_t>(offset),
                                   boundary.begin() + static_cast<std::ptrdiff_t>(offset + n));
        offset += n;
        auto consider = [&](double value, double measure, std::vector<int> arc) {
            if (value < report.value || (value == report.value && measure < best_measure)) {
                report.value = value;
                best_measure = measure;
                report.arc_edges = std::move(arc);
                report.found = true;
            }
        };
        if (mesh.boundary_loops().size() > 1) {
            double whole = 0.0;
            for (int e : ids) whole += mesh.weighted_arc(e);
            if (whole <= half) consider(0.0, whole, ids);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double measure = 0.0;
            for (std::size_t len = 1; len < n; ++len) {
                const int last = ids[(i + len - 1) % n];
                measure += mesh.weighted_arc(last);
                if (measure > half) break;
                const double value = (start_beta[static_cast<std::size_t>(ids[i])] + end_beta[static_cast<std::size_t>(last)]) / measure;
                if (value < report.value || (value == report.value && measure < best_measure)) {
                    std::vector<int> arc;
                    for (std::size_t k = 0; k < len; ++k) arc.push_back(ids[(i + k) % n]);
                    consider(value, measure, std::move(arc));
                }
            }
        }
    }
    (void)edges;
    return report;
}

// ---------------------------------------------------------------------------------------
// Constant matrix, comparison checks and lower bounds

namespace {

constexpr RestrictionVariant kVariants[] = {RestrictionVariant::Bulk, RestrictionVariant::Boundary,
                                            RestrictionVariant::Combined};
constexpr ConstantKind kSingleKinds[] = {ConstantKind::HC, ConstantKind::HJ, ConstantKind::HB, ConstantKind::HE};

}  // namespace

bool ConstantMatrix::has(ConstantKind kind, RestrictionVariant variant) const {
    variant = effective_variant(kind, variant);
    if (kind == ConstantKind::HC_tilde_bulkonly) kind = ConstantKind::HC;
    for (const auto& r : reports)
        if (r.kind == kind && (kind == ConstantKind::HC_boundary || r.variant == variant)) return true;
    return false;
}

const CheegerReport& ConstantMatrix::at(ConstantKind kind, RestrictionVariant variant) const {
    variant = effective_variant(kind, variant);
    if (kind == ConstantKind::HC_tilde_bulkonly) kind = ConstantKind::HC;
    for (const auto& r : reports)
        if (r.kind == kind && (kind == ConstantKind::HC_boundary || r.variant == variant)) return r;
    throw std::out_of_range("constant " + to_string(kind) + "/" + to_string(variant) + " not computed");
}

ConstantMatrix constant_matrix(const WeightedMesh& mesh, double delta, Execution execution) {
    require_normalized(mesh, RestrictionVariant::Combined);
    const SubsetMeasureTable table(mesh, execution);
    ConstantMatrix out;
    out.delta = delta;
    out.method = CheegerMethod::BruteForce;
    for (auto kind : kSingleKinds)
        for (auto variant : kVariants) out.reports.push_back(brute_force_constant(table, kind, variant, delta, execution));
    if (mesh.triangle_count() <= kTripleBruteForceTriangleLimit)
        for (auto variant : kVariants)
            out.reports.push_back(brute_force_constant(table, ConstantKind::HD, variant, delta, execution));
    out.reports.push_back(boundary_cheeger(mesh));
    return out;
}

ConstantMatrix sweep_constant_matrix(const WeightedMesh& mesh, std::span<const Eigen::VectorXd> functions,
                                     double delta) {
    require_normalized(mesh, RestrictionVariant::Combined);
    ConstantMatrix out;
    out.delta = delta;
    out.method = CheegerMethod::Sweep;
    for (auto kind : kSingleKinds)
        for (auto variant : kVariants) out.reports.push_back(sweep_upper_bound(mesh, functions, kind, variant, delta));
    for (auto variant : kVariants)
        out.reports.push_back(sweep_upper_bound(mesh, functions, ConstantKind::HD, variant, delta));
    out.reports.push_back(boundary_cheeger(mesh));
    return out;
}

std::vector<Check> comparison_checks(const ConstantMatrix& k) {
    using CK = ConstantKind;
    using RV = RestrictionVariant;
    const char* clause = "cheeger-constant comparison";
    std::vector<Check> out;
    auto tol = [](double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
    auto rel = [&](const std::string& name, double lhs, Relation r, double rhs) {
        out.push_back(make_check(name, clause, lhs, r, rhs, tol(lhs, rhs)));
    };
    auto symbol = [](RV v) { return v == RV::Bulk ? "h" : v == RV::Boundary ? "htilde" : "hbar"; };

    for (auto v : kVariants)
        for (auto kind : {CK::HC, CK::HJ, CK::HB})
            out.push_back(make_check(std::string(symbol(v)) + (kind == CK::HC ? "_C" : kind == CK::HJ ? "_J" : "_B") + " > 0", clause,
                                     k.value(kind, v), Relation::Greater, 0.0, 0.0));

    rel("htilde_C <= hbar_C", k.value(CK::HC, RV::Boundary), Relation::LessEqual, k.value(CK::HC, RV::Combined));
    rel("hbar_C <= h_C", k.value(CK::HC, RV::Combined), Relation::LessEqual, k.value(CK::HC, RV::Bulk));
    rel("h_J <= hbar_J", k.value(CK::HJ, RV::Bulk), Relation::LessEqual, k.value(CK::HJ, RV::Combined));
    rel("hbar_J <= htilde_J", k.value(CK::HJ, RV::Combined), Relation::LessEqual, k.value(CK::HJ, RV::Boundary));
    rel("h_B <= hbar_B", k.value(CK::HB, RV::Bulk), Relation::LessEqual, k.value(CK::HB, RV::Combined));
    rel("htilde_B <= hbar_B", k.value(CK::HB, RV::Boundary), Relation::LessEqual, k.value(CK::HB, RV::Combined));
    for (auto v : kVariants) {
        const std::string s = symbol(v);
        const double hc = k.value(CK::HC, v), hj = k.value(CK::HJ, v), hb = k.value(CK::HB, v);
        rel(s + "_B <= " + s + "_C", hb, Relation::LessEqual, hc);
        rel(s + "_B <= " + s + "_J", hb, Relation::LessEqual, hj);
        rel(s + "_B >= min(" + s + "_C, " + s + "_J)/2", hb, Relation::GreaterEqual, std::min(hc, hj) / 2.0);
    }
    rel("htilde_E >= htilde_B", k.value(CK::HE, RV::Boundary), Relation::GreaterEqual, k.value(CK::HB, RV::Boundary));
    for (auto v : kVariants) {
        const std::string s = symbol(v);
        const std::string name = s + "_D >= " + s + "_C * " + s + "_B";
        if (!k.has(CK::HD, v)) {
            out.push_back(skipped_check(name, clause, Relation::GreaterEqual, "three-set constant not computed"));
            continue;
        }
        const double rhs = k.value(CK::HC, v) * k.value(CK::HB, v);
        rel(name, k.value(CK::HD, v), Relation::GreaterEqual, rhs);
    }
    return out;
}

std::string to_string(Theorem theorem) {
    switch (theorem) {
        case Theorem::SR_Combined: return "sr-combined";
        case Theorem::SR_Bulk: return "sr-bulk";
        case Theorem::SR_Boundary: return "sr-boundary";
        case Theorem::SRBD_D: return "srbd-d-combined";
        case Theorem::SRBD_D_Bulk: return "srbd-d-bulk";
        case Theorem::SRBD_D_Boundary: return "srbd-d-boundary";
        case Theorem::SRBD_E: return "srbd-e";
    }
    return "?";
}

bool bounds_boundary_diffusion(Theorem theorem) {
    return theorem != Theorem::SR_Combined && theorem != Theorem::SR_Bulk && theorem != Theorem::SR_Boundary;
}

LowerBound lower_bound(const ConstantMatrix& k, Theorem theorem) {
    using CK = ConstantKind;
    using RV = RestrictionVariant;
    LowerBound out;
    out.theorem = theorem;
    out.certified = k.method == CheegerMethod::BruteForce;
    switch (theorem) {
        case Theorem::SR_Combined: out.value = k.value(CK::HB, RV::Combined) * k.value(CK::HC, RV::Combined) / 4.0; break;
        case Theorem::SR_Bulk: out.value = k.value(CK::HB, RV::Bulk) * k.value(CK::HC, RV::Bulk) / 4.0; break;
        case Theorem::SR_Boundary: out.value = k.value(CK::HB, RV::Boundary) * k.value(CK::HC, RV::Boundary) / 4.0; break;
        case Theorem::SRBD_D: out.value = k.value(CK::HD, RV::Combined) / 4.0; break;
        case Theorem::SRBD_D_Bulk: out.value = k.value(CK::HD, RV::Bulk) / 4.0; break;
        case Theorem::SRBD_D_Boundary: out.value = k.value(CK::HD, RV::Boundary) / 4.0; break;
        case Theorem::SRBD_E:
            out.value = std::min(k.value(CK::HC, RV::Boundary), k.value(CK::HC_boundary, RV::Boundary)) *
                        k.value(CK::HE, RV::Boundary) / 4.0;
            break;
    }
    return out;
}

LowerBound lower_bound(const WeightedMesh& mesh, Theorem theorem, double delta, Execution execution) {
    const bool three_sets = theorem == Theorem::SRBD_D || theorem == Theorem::SRBD_D_Bulk ||
                            theorem == Theorem::SRBD_D_Boundary;
    const std::size_t limit = three_sets ? kTripleBruteForceTriangleLimit : kBruteForceTriangleLimit;
    if (mesh.triangle_count() <= limit) return lower_bound(constant_matrix(mesh, delta, execution), theorem);

    const ProblemKind kind =
        bounds_boundary_diffusion(theorem) ? ProblemKind::boundary_diffusion(delta) : ProblemKind::sticky_reflection();
    const auto result = solve_generalized(assemble_problem(mesh, kind), 5);
    const auto functions = sweep_functions(mesh, result);
    return lower_bound(sweep_constant_matrix(mesh, functions, delta), theorem);
}

}  // namespace sticky
