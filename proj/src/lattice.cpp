#include <ising/lattice.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <sstream>

namespace ising {

namespace {

constexpr GridPoint kSteps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

std::vector<double> parse_numbers(std::string_view text, char sep) {
    std::vector<double> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw PreconditionError(fmt::format("bad number '{}' in region descriptor", item));
        }
    }
    return out;
}

bool polygon_contains(const std::vector<cplx>& pts, cplx z) {
    bool inside = false;
    const std::size_t n = pts.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const cplx a = pts[i], b = pts[j];
        if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
            const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (z.real() < x) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

// ---------------------------------------------------------------------------
// Region

bool Region::contains(cplx z) const {
    return std::visit(
        [z](const auto& s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Disk>) {
                return std::norm(z - s.center) < s.radius * s.radius;
            } else if constexpr (std::is_same_v<S, Rect>) {
                return z.real() > s.x0 && z.real() < s.x1 && z.imag() > s.y0 && z.imag() < s.y1;
            } else {
                return polygon_contains(s.corners, z);
            }
        },
        shape_);
}

std::array<double, 4> Region::bounds() const {
    return std::visit(
        [](const auto& s) -> std::array<double, 4> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Disk>) {
                return {s.center.real() - s.radius, s.center.imag() - s.radius, s.center.real() + s.radius,
                        s.center.imag() + s.radius};
            } else if constexpr (std::is_same_v<S, Rect>) {
                return {s.x0, s.y0, s.x1, s.y1};
            } else {
                std::array<double, 4> b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                                        -std::numeric_limits<double>::infinity(),
                                        -std::numeric_limits<double>::infinity()};
                for (cplx p : s.corners) {
                    b[0] = std::min(b[0], p.real());
                    b[1] = std::min(b[1], p.imag());
                    b[2] = std::max(b[2], p.real());
                    b[3] = std::max(b[3], p.imag());
                }
                return b;
            }
        },
        shape_);
}

Region Region::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw PreconditionError(fmt::format("region '{}' lacks a kind prefix", text));
    const auto kind = text.substr(0, colon);
    const auto body = text.substr(colon + 1);
    if (kind == "disk") {
        auto v = parse_numbers(body, ',');
        if (v.size() != 3 || !(v[2] > 0)) throw PreconditionError("disk needs cx,cy,r with r > 0");
        return Disk{{v[0], v[1]}, v[2]};
    }
    if (kind == "rect") {
        auto v = parse_numbers(body, ',');
        if (v.size() != 4 || !(v[0] < v[2]) || !(v[1] < v[3])) throw PreconditionError("rect needs x0,y0,x1,y1");
        return Rect{v[0], v[1], v[2], v[3]};
    }
    if (kind == "polygon") {
        Polygon p;
        std::istringstream in{std::string(body)};
        std::string pt;
        while (std::getline(in, pt, ';')) {
            auto v = parse_numbers(pt, ',');
            if (v.size() != 2) throw PreconditionError(fmt::format("bad polygon corner '{}'", pt));
            p.corners.emplace_back(v[0], v[1]);
        }
        if (p.corners.size() < 3) throw PreconditionError("polygon needs at least three corners");
        return p;
    }
    throw PreconditionError(fmt::format("unknown region kind '{}'", kind));
}

std::string Region::to_string() const {
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Disk>) {
                return fmt::format("disk:{},{},{}", s.center.real(), s.center.imag(), s.radius);
            } else if constexpr (std::is_same_v<S, Rect>) {
                return fmt::format("rect:{},{},{},{}", s.x0, s.y0, s.x1, s.y1);
            } else {
                std::string out = "polygon:";
                for (std::size_t i = 0; i < s.corners.size(); ++i) {
                    if (i) out += ';';
                    out += fmt::format("{},{}", s.corners[i].real(), s.corners[i].imag());
                }
                return out;
            }
        },
        shape_);
}

void to_json(nlohmann::json& j, const Region& r) {
    std::visit(
        [&j](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Disk>) {
                j = {{"kind", "disk"}, {"center", {s.center.real(), s.center.imag()}}, {"radius", s.radius}};
            } else if constexpr (std::is_same_v<S, Rect>) {
                j = {{"kind", "rect"}, {"corners", {s.x0, s.y0, s.x1, s.y1}}};
            } else {
                nlohmann::json pts = nlohmann::json::array();
                for (cplx p : s.corners) pts.push_back({p.real(), p.imag()});
                j = {{"kind", "polygon"}, {"corners", pts}};
            }
        },
        r.shape());
}

void from_json(const nlohmann::json& j, Region& r) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "disk") {
        const auto c = j.at("center");
        r = Disk{{c.at(0).get<double>(), c.at(1).get<double>()}, j.at("radius").get<double>()};
    } else if (kind == "rect") {
        const auto c = j.at("corners");
        r = Rect{c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>(), c.at(3).get<double>()};
    } else if (kind == "polygon") {
        Polygon p;
        for (const auto& pt : j.at("corners")) p.corners.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
        r = std::move(p);
    } else {
        throw PreconditionError(fmt::format("unknown region kind '{}'", kind));
    }
}

// ---------------------------------------------------------------------------
// Lines

EdgeLine edge_line(HalfPoint vertex, HalfPoint dual) {
    const HalfPoint d = dual - vertex;
    if (std::abs(d.x) != 1 || std::abs(d.y) != 1)
        throw PreconditionError("edge_line: dual vertex is not diagonal-adjacent to the vertex");
    // (d − v)^{-1/2}ℝ has doubled direction conj(d − v)/|d − v|.
    return EdgeLine::from_doubled(std::conj(cplx(d.x, d.y)));
}

EdgeLine edge_line_between(HalfPoint m1, HalfPoint m2) {
    if (!m1.is_horizontal_midpoint()) std::swap(m1, m2);
    if (!m1.is_horizontal_midpoint() || !m2.is_medial() || m2.is_horizontal_midpoint())
        throw PreconditionError("edge_line_between: need one horizontal and one vertical midpoint");
    const HalfPoint diff = m2 - m1;
    if (std::abs(diff.x) != 1 || std::abs(diff.y) != 1) throw PreconditionError("edge_line_between: not a medial edge");
    return edge_line(HalfPoint{m2.x, m1.y}, HalfPoint{m1.x, m2.y});
}

// ---------------------------------------------------------------------------
// DiscreteDomain

DiscreteDomain::DiscreteDomain(std::vector<GridPoint> vertices, double mesh, std::optional<Region> region)
    : mesh_(mesh), region_(std::move(region)), vertices_(std::move(vertices)) {
    if (!(mesh_ > 0)) throw PreconditionError("mesh must be positive");
    if (vertices_.empty()) throw EmptyDomainError("discrete domain has no vertices");
    std::sort(vertices_.begin(), vertices_.end());
    vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
    build();
}

DiscreteDomain DiscreteDomain::block(int nx, int ny, double mesh) {
    std::vector<GridPoint> v;
    for (int j = 0; j < nx; ++j)
        for (int k = 0; k < ny; ++k) v.push_back({j, k});
    return DiscreteDomain(std::move(v), mesh);
}

int DiscreteDomain::vertex_index(GridPoint p) const {
    auto it = vertex_lookup_.find(p);
    return it == vertex_lookup_.end() ? -1 : it->second;
}

int DiscreteDomain::edge_index(GridPoint p, GridPoint q) const {
    if (q < p) std::swap(p, q);
    const GridPoint d = q - p;
    const bool horizontal = d == GridPoint{1, 0};
    if (!horizontal && d != GridPoint{0, 1}) return -1;
    const int u = vertex_index(p);
    if (u < 0 || vertex_index(q) < 0) return -1;
    auto it = edge_lookup_.find((std::uint64_t(u) << 1) | (horizontal ? 1u : 0u));
    return it == edge_lookup_.end() ? -1 : it->second;
}

HalfPoint DiscreteDomain::edge_midpoint(int e) const {
    const Edge& ed = edges_[e];
    return HalfPoint::of(vertices_[ed.u]) + (ed.horizontal ? HalfPoint{1, 0} : HalfPoint{0, 1});
}

int DiscreteDomain::dual_index(HalfPoint d) const {
    auto it = dual_lookup_.find(d);
    return it == dual_lookup_.end() ? -1 : it->second;
}

int DiscreteDomain::medial_index(HalfPoint m) const {
    auto it = medial_lookup_.find(m);
    return it == medial_lookup_.end() ? -1 : it->second;
}

cplx DiscreteDomain::outward_normal(int m) const {
    const MedialVertex& mv = medial_[m];
    if (mv.kind != MedialKind::boundary) throw PreconditionError("outward_normal: not a boundary medial vertex");
    const GridPoint s = boundary_[mv.index].step;
    return mesh_ * cplx(s.j, s.k);
}

void DiscreteDomain::build() {
    const int nv = static_cast<int>(vertices_.size());
    vertex_lookup_.reserve(2 * vertices_.size());
    for (int i = 0; i < nv; ++i) vertex_lookup_.emplace(vertices_[i], i);

    // Connectivity of the induced graph.
    {
        std::vector<char> seen(nv, 0);
        std::deque<int> queue{0};
        seen[0] = 1;
        int count = 1;
        while (!queue.empty()) {
            const int i = queue.front();
            queue.pop_front();
            for (GridPoint s : kSteps) {
                const int n = vertex_index(vertices_[i] + s);
                if (n >= 0 && !seen[n]) {
                    seen[n] = 1;
                    ++count;
                    queue.push_back(n);
                }
            }
        }
        if (count != nv) throw PreconditionError("induced subgraph is not connected");
    }

    for (int i = 0; i < nv; ++i) {
        for (GridPoint s : {GridPoint{1, 0}, GridPoint{0, 1}}) {
            const int n = vertex_index(vertices_[i] + s);
            if (n < 0) continue;
            const bool horizontal = s.j == 1;
            const int id = static_cast<int>(edges_.size());
            edges_.push_back({i, n, horizontal});
            edge_lookup_.emplace((std::uint64_t(i) << 1) | (horizontal ? 1u : 0u), id);
            (horizontal ? horizontal_edges_ : vertical_edges_).push_back(id);
        }
    }

    // Bounded faces: unit squares with four corners present.
    for (int i = 0; i < nv; ++i) {
        const GridPoint p = vertices_[i];
        if (has_vertex(p + GridPoint{1, 0}) && has_vertex(p + GridPoint{0, 1}) && has_vertex(p + GridPoint{1, 1}))
            dual_vertices_.push_back(HalfPoint::of(p) + HalfPoint{1, 1});
    }
    std::sort(dual_vertices_.begin(), dual_vertices_.end());
    for (int i = 0; i < static_cast<int>(dual_vertices_.size()); ++i) dual_lookup_.emplace(dual_vertices_[i], i);
    for (int i = 0; i < static_cast<int>(dual_vertices_.size()); ++i) {
        for (HalfPoint s : {HalfPoint{2, 0}, HalfPoint{0, 2}}) {
            const int n = dual_index(dual_vertices_[i] + s);
            if (n >= 0) dual_edges_.emplace_back(i, n);
        }
    }
    {
        std::vector<HalfPoint> outer;
        for (HalfPoint d : dual_vertices_)
            for (HalfPoint s : {HalfPoint{2, 0}, HalfPoint{0, 2}, HalfPoint{-2, 0}, HalfPoint{0, -2}})
                if (dual_index(d + s) < 0) outer.push_back(d + s);
        std::sort(outer.begin(), outer.end());
        outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
        boundary_dual_vertices_ = std::move(outer);
    }

    simply_connected_ = nv - static_cast<long>(edges_.size()) + static_cast<long>(dual_vertices_.size()) == 1;

    // Boundary entries, one per boundary edge.
    for (int i = 0; i < nv; ++i)
        for (GridPoint s : kSteps)
            if (!has_vertex(vertices_[i] + s)) boundary_.push_back({vertices_[i] + s, i, s});

    // Medial vertices: midpoints of E ∪ ∂E, in sorted position order.
    struct Pending {
        HalfPoint pos;
        MedialKind kind;
        int index;
    };
    std::vector<Pending> pending;
    pending.reserve(edges_.size() + boundary_.size());
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e)
        pending.push_back({edge_midpoint(e), MedialKind::interior, e});
    for (int b = 0; b < static_cast<int>(boundary_.size()); ++b) {
        const BoundaryEntry& be = boundary_[b];
        pending.push_back(
            {HalfPoint::of(vertices_[be.inner]) + HalfPoint{be.step.j, be.step.k}, MedialKind::boundary, b});
    }
    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) { return a.pos < b.pos; });
    edge_medial_.assign(edges_.size(), -1);
    for (const Pending& p : pending) {
        const int id = static_cast<int>(medial_.size());
        medial_.push_back({p.pos, p.kind, p.index});
        medial_lookup_.emplace(p.pos, id);
        if (p.kind == MedialKind::interior) edge_medial_[p.index] = id;
    }

    // Medial edges: four around every domain vertex.
    medial_incidence_.assign(medial_.size(), {});
    for (int i = 0; i < nv; ++i) {
        const HalfPoint v = HalfPoint::of(vertices_[i]);
        for (int sx : {1, -1}) {
            for (int sy : {1, -1}) {
                MedialEdge me;
                me.horizontal_end = medial_index(v + HalfPoint{sx, 0});
                me.vertical_end = medial_index(v + HalfPoint{0, sy});
                me.vertex = i;
                me.dual = v + HalfPoint{sx, sy};
                me.line = edge_line(v, me.dual);
                const int id = static_cast<int>(medial_edges_.size());
                medial_edges_.push_back(me);
                medial_incidence_[me.horizontal_end].push_back(id);
                medial_incidence_[me.vertical_end].push_back(id);
            }
        }
    }
}

// ---------------------------------------------------------------------------

DiscreteDomain discretize(const Region& region, double mesh) {
    if (!(mesh > 0)) throw PreconditionError("mesh must be positive");
    const auto b = region.bounds();
    const int j0 = static_cast<int>(std::floor(b[0] / mesh)) - 1, j1 = static_cast<int>(std::ceil(b[2] / mesh)) + 1;
    const int k0 = static_cast<int>(std::floor(b[1] / mesh)) - 1, k1 = static_cast<int>(std::ceil(b[3] / mesh)) + 1;

    std::unordered_map<GridPoint, int, PointHash> inside;
    std::vector<GridPoint> pts;
    for (int j = j0; j <= j1; ++j)
        for (int k = k0; k <= k1; ++k)
            if (region.contains(embed(GridPoint{j, k}, mesh))) {
                inside.emplace(GridPoint{j, k}, static_cast<int>(pts.size()));
                pts.push_back({j, k});
            }
    if (pts.empty()) throw EmptyDomainError(fmt::format("no grid vertex of mesh {} lies inside {}", mesh, region.to_string()));

    std::vector<int> comp(pts.size(), -1);
    std::vector<std::vector<GridPoint>> components;
    for (std::size_t s = 0; s < pts.size(); ++s) {
        if (comp[s] >= 0) continue;
        const int c = static_cast<int>(components.size());
        components.emplace_back();
        std::deque<std::size_t> queue{s};
        comp[s] = c;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            components[c].push_back(pts[i]);
            for (GridPoint st : kSteps) {
                auto it = inside.find(pts[i] + st);
                if (it != inside.end() && comp[it->second] < 0) {
                    comp[it->second] = c;
                    queue.push_back(static_cast<std::size_t>(it->second));
                }
            }
        }
    }
    for (auto& c : components) std::sort(c.begin(), c.end());
    const auto best = std::min_element(components.begin(), components.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return DiscreteDomain(std::move(*best), mesh, region);
}

HalfPoint nearest_horizontal_midpoint(const DiscreteDomain& domain, cplx a) {
    if (domain.horizontal_edges().empty()) throw PreconditionError("domain has no horizontal edge");
    const double tol = 1e-12 * domain.mesh() * domain.mesh();
    HalfPoint best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int e : domain.horizontal_edges()) {
        const HalfPoint m = domain.edge_midpoint(e);
        const double d = std::norm(m.embed(domain.mesh()) - a);
        if (d < best_d - tol || (d <= best_d + tol && m < best)) {
            best = m;
            best_d = std::min(best_d, d);
        }
    }
    return best;
}

nlohmann::json domain_to_json(const DiscreteDomain& domain) {
    nlohmann::json verts = nlohmann::json::array();
    for (GridPoint p : domain.vertices()) verts.push_back({p.j, p.k});
    nlohmann::json j = {{"version", 1}, {"mesh", domain.mesh()}, {"vertices", verts}};
    if (domain.region())
        j["region"] = *domain.region();
    else
        j["region"] = nullptr;
    return j;
}

DiscreteDomain domain_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1) throw PreconditionError("unsupported domain document version");
    std::vector<GridPoint> v;
    for (const auto& p : j.at("vertices")) v.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    std::optional<Region> region;
    if (j.contains("region") && !j["region"].is_null()) region = j["region"].get<Region>();
    return DiscreteDomain(std::move(v), j.at("mesh").get<double>(), std::move(region));
}

std::uint64_t domain_hash(const DiscreteDomain& domain) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t x) {
        for (int b = 0; b < 8; ++b) {
            h ^= (x >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    const double mesh = domain.mesh();
    std::uint64_t bits;
    std::memcpy(&bits, &mesh, sizeof bits);
    mix(bits);
    for (GridPoint p : domain.vertices()) {
        mix(std::uint32_t(p.j));
        mix(std::uint32_t(p.k));
    }
    return h;
}

}  // namespace ising
