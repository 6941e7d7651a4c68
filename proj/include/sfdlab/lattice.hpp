#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "sfdlab/errors.hpp"

namespace sfdlab {

/// Integer grid direction in Z^d. The zero vector stands for the identity
/// operator wherever a direction indexes a difference operator.
class DirectionVector {
public:
    explicit DirectionVector(std::vector<int> components);

    static DirectionVector zero(int dim);
    static DirectionVector axis(int dim, int axis); // unit vector e_axis, axis in [0, dim)

    int dim() const noexcept { return static_cast<int>(c_.size()); }
    int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    std::span<const int> components() const noexcept { return c_; }

    bool is_zero() const noexcept;
    double euclidean_norm() const noexcept;

    DirectionVector operator-() const;
    bool operator==(const DirectionVector&) const = default;

    std::string str() const; // "(1,0)" style, for messages and labels

private:
    std::vector<int> c_;
};

/// Uniform periodic grid on the torus [0, N*h)^d with d in {1,2,3}.
/// Values attach to nodes x = h * (i_1, ..., i_d), i_k in [0, N).
/// Flat storage is row-major with axis 0 slowest.
class Lattice {
public:
    Lattice(int dim, int points_per_axis, double spacing);

    int dim() const noexcept { return dim_; }
    int points_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double period() const noexcept { return n_ * h_; }
    std::size_t size() const noexcept { return size_; }

    /// Node index of the periodic neighbor at x + steps*h*lambda.
    std::size_t neighbor(std::size_t flat, const DirectionVector& lambda, int steps) const;

    /// Physical coordinates of a node, written into out (size dim).
    void coordinates(std::size_t flat, std::span<double> out) const;
    std::vector<double> coordinates(std::size_t flat) const;

    bool operator==(const Lattice&) const = default;

    /// True when other is this lattice refined dyadically `levels` times
    /// (same dim, same period, points multiplied by 2^levels).
    bool refines_to(const Lattice& other, int levels) const;

private:
    int dim_;
    int n_;
    double h_;
    std::size_t size_;
};

/// Real-valued function on the nodes of a Lattice.
class GridFunction {
public:
    explicit GridFunction(Lattice lat, double fill = 0.0);
    GridFunction(Lattice lat, std::vector<double> values);

    /// Pointwise sampling of an analytic field at the node coordinates.
    static GridFunction sample(const Lattice& lat,
                               const std::function<double(std::span<const double>)>& f);

    const Lattice& lattice() const noexcept { return lat_; }
    std::size_t size() const noexcept { return v_.size(); }

    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    std::span<const double> values() const noexcept { return v_; }
    std::span<double> values() noexcept { return v_; }

    bool all_finite() const noexcept;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s);
    /// this += s * other, the workhorse of stencil assembly.
    GridFunction& axpy(double s, const GridFunction& other);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

    /// Text dump: first line "d,N,h", then one value per line,
    /// 17 significant digits. Round-trips doubles exactly.
    void write_csv(std::ostream& os) const;
    static GridFunction read_csv(std::istream& is);

    /// Binary dump: int32 d, int32 N, double h, then row-major doubles.
    void write_binary(std::ostream& os) const;
    static GridFunction read_binary(std::istream& is);

private:
    Lattice lat_;
    std::vector<double> v_;
};

void require_same_lattice(const GridFunction& a, const GridFunction& b, const char* op);

/// Lattices sharing one period whose spacings approximate the requested
/// targets: points_per_axis = round(period / h_target), clamped to >= 3,
/// spacing = period / points. Keeps trigonometric test fields exactly
/// periodic on every level of a convergence ladder.
std::vector<Lattice> commensurate_ladder(int dim, double period,
                                         std::span<const double> h_targets);

} // namespace sfdlab
