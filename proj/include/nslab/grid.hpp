#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace nslab {

using Vec3 = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& g) { return g[0] + g[1] + g[2]; }

/// Uniform truncated grid on [-R,R]^3 with a half-cell shift on every axis
/// so that no node coincides with the origin (the data profile has singular
/// derivatives at r=0).
struct Grid {
    double extent = 0.0;  // half-width R of the cube
    int n = 0;            // nodes per axis, odd
    double h = 0.0;       // spacing 2R/(n-1)
    double shift = 0.0;   // half-cell offset, h/2

    static Grid make(double extent_R, int n);

    double coord(int j) const { return -extent + j * h + shift; }

    Vec3 point(int i, int j, int k) const {
        return {coord(i), coord(j), coord(k)};
    }

    // x-fastest storage order
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    }

    std::size_t size() const {
        return static_cast<std::size_t>(n) * n * n;
    }

    bool operator==(const Grid& o) const {
        return extent == o.extent && n == o.n;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nslab
