#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace ising {

using cplx = std::complex<double>;

/// Primal grid vertex δ(j + ik).
struct GridPoint {
    int j = 0;
    int k = 0;

    constexpr auto operator<=>(const GridPoint&) const = default;
    constexpr GridPoint operator+(GridPoint o) const { return {j + o.j, k + o.k}; }
    constexpr GridPoint operator-(GridPoint o) const { return {j - o.j, k - o.k}; }
};

/// Point δ(x + iy)/2 on the half-integer lattice.
///
/// Primal vertices have both coordinates even, dual vertices (face centers)
/// both odd, and medial vertices (edge midpoints) exactly one odd coordinate.
/// A medial vertex with odd x is the midpoint of a horizontal edge.
struct HalfPoint {
    int x = 0;
    int y = 0;

    constexpr auto operator<=>(const HalfPoint&) const = default;
    constexpr HalfPoint operator+(HalfPoint o) const { return {x + o.x, y + o.y}; }
    constexpr HalfPoint operator-(HalfPoint o) const { return {x - o.x, y - o.y}; }

    constexpr bool is_primal() const { return (x & 1) == 0 && (y & 1) == 0; }
    constexpr bool is_dual() const { return (x & 1) != 0 && (y & 1) != 0; }
    constexpr bool is_medial() const { return ((x ^ y) & 1) != 0; }
    constexpr bool is_horizontal_midpoint() const { return (x & 1) != 0 && (y & 1) == 0; }

    static constexpr HalfPoint of(GridPoint p) { return {2 * p.j, 2 * p.k}; }
    /// Only meaningful when is_primal().
    constexpr GridPoint grid() const { return {x / 2, y / 2}; }

    cplx embed(double mesh) const { return {0.5 * mesh * x, 0.5 * mesh * y}; }
};

inline cplx embed(GridPoint p, double mesh) { return {mesh * p.j, mesh * p.k}; }

struct PointHash {
    std::size_t operator()(GridPoint p) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(p.j)) << 32) | std::uint32_t(p.k));
    }
    std::size_t operator()(HalfPoint p) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(p.x)) << 32) | std::uint32_t(p.y));
    }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyDomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class CapExceededError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ising
