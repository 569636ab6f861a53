#include <ising/coupling.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

namespace ising {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

/// Sum of non-adaptive Gauss–Kronrod panels; throws when the summed
/// Kronrod–Gauss discrepancy exceeds `tol`.
template <class F>
double integrate(F&& f, double lo, double hi, int panels, double tol, const char* what) {
    double sum = 0.0, err = 0.0;
    const double h = (hi - lo) / panels;
    for (int i = 0; i < panels; ++i) {
        double e = 0.0;
        sum += gauss_kronrod<double, 61>::integrate(f, lo + i * h, lo + (i + 1) * h, 0, 0.0, &e);
        err += e;
    }
    if (!(err <= tol))
        throw NumericalError(fmt::format("quadrature did not converge for {} (error estimate {:.3g})", what, err));
    return sum;
}

// Residue in θ leaves, for x ≥ 0 and x + y odd,
//   C = (1/π) ∫₀^{π/2} ρ^x / √(1+sin²φ) · {cos yφ | −i sin yφ} dφ,
// with ρ = √(1+sin²φ) − sinφ.
cplx c0_reduced(int x, int y, double tol) {
    const bool neg = x < 0;
    if (neg) x = -x;
    auto g = [x](double phi) {
        const double s = std::sin(phi), r = std::sqrt(1.0 + s * s);
        return std::pow(r - s, x) / r;
    };
    cplx v;
    const auto what = fmt::format("C0({},{})", x, y);
    const int panels = 4 + (x + std::abs(y)) / 4;  // roughly one oscillation or decay length per panel
    if (y % 2 == 0) {
        v = integrate([&](double p) { return g(p) * std::cos(y * p); }, 0.0, pi / 2, panels, tol, what.c_str()) / pi;
    } else {
        v = cplx(0.0,
                 -integrate([&](double p) { return g(p) * std::sin(y * p); }, 0.0, pi / 2, panels, tol, what.c_str()) /
                     pi);
    }
    // C(−x, y) = (−1)^x C(x, y)
    return (neg && (x & 1)) ? -v : v;
}

bool odd_pair(int x, int y) { return ((x + y) & 1) != 0; }

}  // namespace

std::string to_string(CouplingMethod m) {
    switch (m) {
        case CouplingMethod::exact: return "exact";
        case CouplingMethod::quadrature: return "quadrature";
        case CouplingMethod::asymptotic: return "asymptotic";
    }
    return "?";
}

CouplingMethod CouplingEvaluator::method_for(int x, int y) const {
    return std::hypot(double(x), double(y)) >= opt_.crossover_radius ? CouplingMethod::asymptotic
                                                                      : CouplingMethod::quadrature;
}

cplx CouplingEvaluator::quadrature(int x, int y) const {
    if (!odd_pair(x, y)) return 0.0;
    return c0_reduced(x, y, opt_.tolerance);
}

cplx CouplingEvaluator::operator()(int x, int y) const {
    if (!odd_pair(x, y)) return 0.0;
    const auto k = key(x, y);
    {
        std::shared_lock lock(mutex_);
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
    }
    const cplx v = method_for(x, y) == CouplingMethod::asymptotic ? c0_asymptotic(x, y) : quadrature(x, y);
    std::unique_lock lock(mutex_);
    // first writer wins; the value is a pure function of (x,y) anyway
    return cache_.emplace(k, v).first->second;
}

std::size_t CouplingEvaluator::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

void CouplingEvaluator::clear_cache() {
    std::unique_lock lock(mutex_);
    cache_.clear();
}

void CouplingEvaluator::overwrite_cache_entry(int x, int y, cplx value) {
    std::unique_lock lock(mutex_);
    cache_[key(x, y)] = value;
}

cplx c0_phi_residue(int x, int y) {
    if (!odd_pair(x, y)) return 0.0;
    // integrate over φ by residues; formula written for y ≤ 0
    const double flip = (y > 0 && (y & 1)) ? -1.0 : 1.0;
    const int k = std::abs(y);
    auto integrand = [x, k](double th) {
        const double t = std::sin(th), r = std::sqrt(1.0 + t * t);
        const double sg = t > 0 ? 1.0 : t < 0 ? -1.0 : 0.0;
        const double amp = ((k & 1) ? -1.0 : 1.0) * std::pow(sg, k + 1) * std::pow(r - std::abs(t), k) / r;
        // e^{ixθ}·(−πi)·amp
        return cplx(0.0, -pi) * std::polar(amp, x * th);
    };
    double re = 0, im = 0;
    const int panels = 8 + (std::abs(x) + k) / 2;
    for (auto [lo, hi] : {std::pair{0.0, pi}, std::pair{pi, 2 * pi}}) {
        re += integrate([&](double th) { return integrand(th).real(); }, lo, hi, panels, 1e-10, "phi-residue");
        im += integrate([&](double th) { return integrand(th).imag(); }, lo, hi, panels, 1e-10, "phi-residue");
    }
    return flip * cplx(re, im) / (4 * pi * pi);
}

cplx c0_asymptotic(int x, int y) {
    if (!odd_pair(x, y)) throw PreconditionError(fmt::format("C0 asymptotics undefined off the pairing: ({},{})", x, y));
    const cplx w = 1.0 / (pi * cplx(x, y));
    return (x & 1) ? cplx(w.real(), 0.0) : cplx(0.0, w.imag());
}

std::span<const ExactCoupling> exact_coupling_table() {
    static const double q = 1.0 / pi - 0.25;
    static const std::array<ExactCoupling, 12> table = {{
        {1, 0, 0.25},
        {-1, 0, -0.25},
        {0, 1, cplx(0, -0.25)},
        {0, -1, cplx(0, 0.25)},
        {2, 1, cplx(0, -q)},
        {-2, 1, cplx(0, -q)},
        {1, 2, q},
        {1, -2, q},
        {2, -1, cplx(0, q)},
        {-2, -1, cplx(0, q)},
        {-1, -2, -q},
        {-1, 2, -q},
    }};
    return table;
}

namespace {
const double kc = std::cos(pi / 8), ks = std::sin(pi / 8);
const cplx keta = std::polar(1.0, pi / 8);
}  // namespace

cplx full_plane_spinor(const CouplingEvaluator& c0, HalfPoint d) {
    if (d.x == 0 && d.y == 0) return (2.0 + std::numbers::sqrt2) / 4.0;
    if ((d.x + d.y) & 1)
        throw PreconditionError("full_plane_spinor: offset does not reach a medial vertex");
    // Written with prefactors cosπ/8·η and sinπ/8·e^{−3πi/8}. With the usual
    // 2cos, 2sin the function is twice too big: the jump at a becomes 2 and
    // the pole δ/(π(z−a)).
    return kc * keta * (c0(d.x - 1, d.y) + c0(d.x, d.y + 1)) +
           ks * std::polar(1.0, -3 * pi / 8) * (c0(d.x + 1, d.y) + c0(d.x, d.y - 1));
}

cplx full_plane_spinor(const CouplingEvaluator& c0, cplx a, cplx z, double mesh) {
    const cplx d = 2.0 * (z - a) / mesh;
    const HalfPoint h{static_cast<int>(std::lround(d.real())), static_cast<int>(std::lround(d.imag()))};
    if (std::abs(d - cplx(h.x, h.y)) > 1e-9) throw PreconditionError("full_plane_spinor: z − a is not a lattice offset");
    return full_plane_spinor(c0, h);
}

cplx full_plane_neighbor_closed_form(int sx, int sy) {
    // halved, matching the normalization above
    const cplx i(0, 1), h = (1.0 + i) / 2.0;
    cplx v;
    if (sx > 0 && sy > 0) v = keta * (kc * (2 / pi - h) - i * ks * (-2.0 * i / pi + h));
    else if (sx > 0) v = keta * (kc * h - i * ks * ((2.0 + 2.0 * i) / pi - h));
    else if (sy > 0) v = keta * (kc * (-(2.0 + 2.0 * i) / pi + h) + i * ks * h);
    else v = keta * (kc * (2.0 * i / pi - h) + i * ks * (2 / pi - h));
    return 0.5 * v;
}

SingularityResiduals check_full_plane_singularity(const CouplingEvaluator& c0) {
    const HalfPoint a{1, 0};
    const cplx faa = (2.0 + std::numbers::sqrt2) / 4.0;
    SingularityResiduals r;
    for (int sx : {1, -1}) {
        for (int sy : {1, -1}) {
            const EdgeLine l = edge_line_between(a, a + HalfPoint{sx, sy});
            const cplx lhs = project(l, sx > 0 ? faa : faa - 1.0);
            r.closed_form = std::max(r.closed_form, std::abs(lhs - project(l, full_plane_neighbor_closed_form(sx, sy))));
            r.quadrature = std::max(r.quadrature, std::abs(lhs - project(l, full_plane_spinor(c0, HalfPoint{sx, sy}))));
        }
    }
    return r;
}

void write_coupling_csv(std::ostream& out, const CouplingEvaluator& c0, double radius) {
    out << "x,y,re,im,method\n";
    const int n = static_cast<int>(std::floor(radius));
    for (int x = -n; x <= n; ++x) {
        for (int y = -n; y <= n; ++y) {
            if (std::hypot(double(x), double(y)) > radius || !odd_pair(x, y)) continue;
            cplx v;
            CouplingMethod m = c0.method_for(x, y);
            for (const auto& e : exact_coupling_table())
                if (e.x == x && e.y == y) v = e.value, m = CouplingMethod::exact;
            if (m != CouplingMethod::exact) v = c0(x, y);
            out << fmt::format("{},{},{:.17g},{:.17g},{}\n", x, y, v.real(), v.imag(), to_string(m));
        }
    }
}

}  // namespace ising
