#pragma once

// Discrete domains on the square grid of mesh δ: primal, dual and medial
// graphs, boundary bookkeeping with multiplicity, and the lines ℓ(e)
// attached to medial edges.

#include <ising/types.hpp>

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ising {

// ---------------------------------------------------------------------------
// Continuum regions

struct Disk {
    cplx center{0.0, 0.0};
    double radius = 1.0;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

struct Polygon {
    std::vector<cplx> corners;
};

/// Bounded open region used to carve discrete domains out of the grid.
class Region {
public:
    Region() = default;
    Region(Disk d) : shape_(d) {}
    Region(Rect r) : shape_(r) {}
    Region(Polygon p) : shape_(std::move(p)) {}

    /// Strict interior test.
    bool contains(cplx z) const;
    /// Axis-aligned bounding box {xmin, ymin, xmax, ymax}.
    std::array<double, 4> bounds() const;

    const std::variant<Disk, Rect, Polygon>& shape() const { return shape_; }
    const Disk* disk() const { return std::get_if<Disk>(&shape_); }

    /// Parses "disk:cx,cy,r", "rect:x0,y0,x1,y1" or "polygon:x,y;x,y;...".
    static Region parse(std::string_view text);
    std::string to_string() const;

private:
    std::variant<Disk, Rect, Polygon> shape_{Disk{}};
};

void to_json(nlohmann::json& j, const Region& r);
void from_json(const nlohmann::json& j, Region& r);

// ---------------------------------------------------------------------------
// Lines through the origin

/// A line ηℝ through the origin, stored as η² so that the mod-π ambiguity
/// of the direction never shows up.
class EdgeLine {
public:
    EdgeLine() = default;
    static EdgeLine from_doubled(cplx eta_squared) { return EdgeLine(eta_squared / std::abs(eta_squared)); }
    static EdgeLine from_direction(cplx eta) { return from_doubled(eta * eta); }

    cplx doubled() const { return doubled_; }
    /// Principal-branch unit direction.
    cplx direction() const { return std::sqrt(doubled_); }

    bool operator==(const EdgeLine& o) const { return std::abs(doubled_ - o.doubled_) < 1e-14; }

private:
    explicit EdgeLine(cplx d) : doubled_(d) {}
    cplx doubled_{1.0, 0.0};
};

/// Orthogonal projection ½(z + η² z̄) onto the line.
inline cplx project(const EdgeLine& line, cplx z) { return 0.5 * (z + line.doubled() * std::conj(z)); }

/// Real coordinate of z along the line direction: P_ℓ[z] = coordinate · η.
inline double line_coordinate(const EdgeLine& line, cplx z) {
    return (std::conj(line.direction()) * z).real();
}

/// ℓ(e) = (d − v)^{-1/2}ℝ for the medial edge whose nearest primal vertex is
/// `vertex` and nearest dual vertex is `dual`.
EdgeLine edge_line(HalfPoint vertex, HalfPoint dual);

/// ℓ(e) for the medial edge joining a horizontal-edge midpoint and a
/// vertical-edge midpoint (either order). Works on the full plane.
EdgeLine edge_line_between(HalfPoint m1, HalfPoint m2);

// ---------------------------------------------------------------------------
// Discrete domain

struct Edge {
    int u = 0;  ///< left (horizontal) or bottom (vertical) endpoint
    int v = 0;
    bool horizontal = true;
};

/// One element of ∂V: an outside grid point together with the boundary edge
/// that reaches it. A point adjacent to several domain vertices appears once
/// per edge.
struct BoundaryEntry {
    GridPoint outside;
    int inner = 0;      ///< index of the domain vertex on the other end
    GridPoint step;     ///< outside − inner, a unit grid step
};

enum class MedialKind { interior, boundary };

struct MedialVertex {
    HalfPoint pos;
    MedialKind kind = MedialKind::interior;
    int index = 0;  ///< edge index (interior) or boundary entry index (boundary)
};

struct MedialEdge {
    int horizontal_end = 0;  ///< medial vertex id on the horizontal edge
    int vertical_end = 0;    ///< medial vertex id on the vertical edge
    int vertex = 0;          ///< nearest primal vertex (always a domain vertex)
    HalfPoint dual;          ///< nearest dual vertex (face center, possibly outside)
    EdgeLine line;
};

class DiscreteDomain {
public:
    /// Induced subgraph on `vertices`. Throws EmptyDomainError on an empty
    /// set and PreconditionError if the induced graph is disconnected.
    DiscreteDomain(std::vector<GridPoint> vertices, double mesh, std::optional<Region> region = std::nullopt);

    /// nx × ny block of vertices with lower-left corner at the origin.
    static DiscreteDomain block(int nx, int ny, double mesh = 1.0);

    double mesh() const { return mesh_; }
    const std::optional<Region>& region() const { return region_; }

    std::span<const GridPoint> vertices() const { return vertices_; }
    int vertex_index(GridPoint p) const;
    bool has_vertex(GridPoint p) const { return vertex_index(p) >= 0; }

    std::span<const Edge> edges() const { return edges_; }
    /// Edge joining two adjacent grid points, or -1.
    int edge_index(GridPoint p, GridPoint q) const;
    std::span<const int> horizontal_edges() const { return horizontal_edges_; }
    std::span<const int> vertical_edges() const { return vertical_edges_; }
    HalfPoint edge_midpoint(int e) const;

    /// Centers of bounded faces (unit squares with all four corners inside).
    std::span<const HalfPoint> dual_vertices() const { return dual_vertices_; }
    int dual_index(HalfPoint d) const;
    /// Pairs of dual vertex indices whose faces share an edge.
    std::span<const std::pair<int, int>> dual_edges() const { return dual_edges_; }

    std::span<const BoundaryEntry> boundary() const { return boundary_; }
    /// Face centers outside the domain sharing an edge with a domain face.
    std::span<const HalfPoint> boundary_dual_vertices() const { return boundary_dual_vertices_; }

    std::span<const MedialVertex> medial_vertices() const { return medial_; }
    int medial_index(HalfPoint m) const;
    std::span<const MedialEdge> medial_edges() const { return medial_edges_; }
    /// Medial edge ids touching medial vertex `m` (4 interior, 2 boundary).
    std::span<const int> medial_edges_at(int m) const { return medial_incidence_[m]; }

    /// ν_out(m) = y − x as a complex number of modulus δ (boundary medial vertices only).
    cplx outward_normal(int m) const;

    /// V − E + F = 1 with every bounded face a unit square.
    bool simply_connected() const { return simply_connected_; }

    /// Midpoint of the edge `e` of this domain, as a medial vertex id.
    int medial_of_edge(int e) const { return edge_medial_[e]; }

private:
    void build();

    double mesh_;
    std::optional<Region> region_;
    std::vector<GridPoint> vertices_;
    std::unordered_map<GridPoint, int, PointHash> vertex_lookup_;
    std::vector<Edge> edges_;
    std::unordered_map<std::uint64_t, int> edge_lookup_;
    std::vector<int> horizontal_edges_, vertical_edges_;
    std::vector<HalfPoint> dual_vertices_;
    std::unordered_map<HalfPoint, int, PointHash> dual_lookup_;
    std::vector<std::pair<int, int>> dual_edges_;
    std::vector<BoundaryEntry> boundary_;
    std::vector<HalfPoint> boundary_dual_vertices_;
    std::vector<MedialVertex> medial_;
    std::unordered_map<HalfPoint, int, PointHash> medial_lookup_;
    std::vector<MedialEdge> medial_edges_;
    std::vector<std::vector<int>> medial_incidence_;
    std::vector<int> edge_medial_;
    bool simply_connected_ = false;
};

/// Largest connected induced subgraph of the mesh-δ grid inside `region`.
/// Among components of equal size the one with the lexicographically
/// smallest sorted vertex list wins.
DiscreteDomain discretize(const Region& region, double mesh);

/// Midpoint of the horizontal edge closest to `a`; ties go to the smaller
/// real part, then the smaller imaginary part.
HalfPoint nearest_horizontal_midpoint(const DiscreteDomain& domain, cplx a);

/// Versioned JSON: {version, mesh, vertices: [[j,k],...], region}.
nlohmann::json domain_to_json(const DiscreteDomain& domain);
DiscreteDomain domain_from_json(const nlohmann::json& j);

/// Stable 64-bit FNV-1a hash of mesh and sorted vertex list.
std::uint64_t domain_hash(const DiscreteDomain& domain);

}  // namespace ising
