#include "sfdlab/lattice.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace sfdlab {

DirectionVector::DirectionVector(std::vector<int> components) : c_(std::move(components)) {
    if (c_.empty() || c_.size() > 3)
        throw ValidationError("direction vector dimension must be 1..3");
}

DirectionVector DirectionVector::zero(int dim) {
    return DirectionVector(std::vector<int>(static_cast<std::size_t>(dim), 0));
}

DirectionVector DirectionVector::axis(int dim, int axis) {
    if (axis < 0 || axis >= dim) throw ValidationError("axis out of range");
    std::vector<int> c(static_cast<std::size_t>(dim), 0);
    c[static_cast<std::size_t>(axis)] = 1;
    return DirectionVector(std::move(c));
}

bool DirectionVector::is_zero() const noexcept {
    for (int x : c_)
        if (x != 0) return false;
    return true;
}

double DirectionVector::euclidean_norm() const noexcept {
    double s = 0;
    for (int x : c_) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

DirectionVector DirectionVector::operator-() const {
    std::vector<int> c(c_);
    for (int& x : c) x = -x;
    return DirectionVector(std::move(c));
}

std::string DirectionVector::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c_[i]);
    }
    return s + ")";
}

Lattice::Lattice(int dim, int points_per_axis, double spacing)
    : dim_(dim), n_(points_per_axis), h_(spacing) {
    if (dim < 1 || dim > 3) throw ValidationError("lattice dimension must be 1..3");
    if (points_per_axis < 3) throw ValidationError("lattice needs at least 3 points per axis");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ValidationError("lattice spacing must be positive and finite");
    size_ = 1;
    for (int k = 0; k < dim; ++k) size_ *= static_cast<std::size_t>(n_);
}

std::size_t Lattice::neighbor(std::size_t flat, const DirectionVector& lambda, int steps) const {
    if (lambda.dim() != dim_) throw ValidationError("direction dimension mismatch");
    // Row-major, axis 0 slowest: peel axes from the fastest end.
    std::size_t out = 0;
    std::size_t stride = 1;
    const auto n = static_cast<std::size_t>(n_);
    for (int ax = dim_ - 1; ax >= 0; --ax) {
        const long i = static_cast<long>(flat % n);
        flat /= n;
        long j = (i + static_cast<long>(steps) * lambda[ax]) % n_;
        if (j < 0) j += n_;
        out += static_cast<std::size_t>(j) * stride;
        stride *= n;
    }
    return out;
}

void Lattice::coordinates(std::size_t flat, std::span<double> out) const {
    const auto n = static_cast<std::size_t>(n_);
    for (int ax = dim_ - 1; ax >= 0; --ax) {
        out[static_cast<std::size_t>(ax)] = h_ * static_cast<double>(flat % n);
        flat /= n;
    }
}

std::vector<double> Lattice::coordinates(std::size_t flat) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    coordinates(flat, x);
    return x;
}

bool Lattice::refines_to(const Lattice& other, int levels) const {
    if (other.dim_ != dim_ || levels < 0) return false;
    long factor = 1;
    for (int i = 0; i < levels; ++i) factor *= 2;
    if (other.n_ != n_ * factor) return false;
    const double rel = std::abs(other.period() - period()) / period();
    return rel <= 1e-12;
}

GridFunction::GridFunction(Lattice lat, double fill)
    : lat_(lat), v_(lat.size(), fill) {}

GridFunction::GridFunction(Lattice lat, std::vector<double> values)
    : lat_(lat), v_(std::move(values)) {
    if (v_.size() != lat_.size()) throw ValidationError("value count does not match lattice size");
}

GridFunction GridFunction::sample(const Lattice& lat,
                                  const std::function<double(std::span<const double>)>& f) {
    GridFunction g(lat);
    std::vector<double> x(static_cast<std::size_t>(lat.dim()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        lat.coordinates(i, x);
        g[i] = f(x);
    }
    return g;
}

bool GridFunction::all_finite() const noexcept {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_lattice(*this, other, "add");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += other.v_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_lattice(*this, other, "subtract");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= other.v_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

GridFunction& GridFunction::axpy(double s, const GridFunction& other) {
    require_same_lattice(*this, other, "axpy");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * other.v_[i];
    return *this;
}

namespace {

void write_g17(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
}

} // namespace

void GridFunction::write_csv(std::ostream& os) const {
    os << lat_.dim() << "," << lat_.points_per_axis() << ",";
    write_g17(os, lat_.spacing());
    os << "\n";
    for (double x : v_) {
        write_g17(os, x);
        os << "\n";
    }
}

GridFunction GridFunction::read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ValidationError("grid function dump: missing header");
    int d = 0, n = 0;
    double h = 0;
    if (std::sscanf(header.c_str(), "%d,%d,%lf", &d, &n, &h) != 3)
        throw ValidationError("grid function dump: malformed header '" + header + "'");
    Lattice lat(d, n, h);
    std::vector<double> vals;
    vals.reserve(lat.size());
    std::string line;
    while (vals.size() < lat.size() && std::getline(is, line)) {
        if (line.empty()) continue;
        vals.push_back(std::stod(line));
    }
    if (vals.size() != lat.size())
        throw ValidationError("grid function dump: expected " + std::to_string(lat.size()) +
                              " values, got " + std::to_string(vals.size()));
    return GridFunction(lat, std::move(vals));
}

void GridFunction::write_binary(std::ostream& os) const {
    const std::int32_t d = lat_.dim(), n = lat_.points_per_axis();
    const double h = lat_.spacing();
    os.write(reinterpret_cast<const char*>(&d), sizeof d);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&h), sizeof h);
    os.write(reinterpret_cast<const char*>(v_.data()),
             static_cast<std::streamsize>(v_.size() * sizeof(double)));
}

GridFunction GridFunction::read_binary(std::istream& is) {
    std::int32_t d = 0, n = 0;
    double h = 0;
    is.read(reinterpret_cast<char*>(&d), sizeof d);
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!is) throw ValidationError("grid function binary dump: truncated header");
    Lattice lat(d, n, h);
    std::vector<double> vals(lat.size());
    is.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!is) throw ValidationError("grid function binary dump: truncated payload");
    return GridFunction(lat, std::move(vals));
}

void require_same_lattice(const GridFunction& a, const GridFunction& b, const char* op) {
    if (!(a.lattice() == b.lattice()))
        throw ValidationError(std::string("lattice mismatch in ") + op);
}

std::vector<Lattice> commensurate_ladder(int dim, double period,
                                         std::span<const double> h_targets) {
    if (!(period > 0.0)) throw ValidationError("period must be > 0");
    if (h_targets.empty()) throw ValidationError("no spacing targets given");
    std::vector<Lattice> levels;
    levels.reserve(h_targets.size());
    for (double h : h_targets) {
        if (!(h > 0.0)) throw ValidationError("spacing targets must be > 0");
        int n = static_cast<int>(std::lround(period / h));
        if (n < 3) n = 3;
        levels.emplace_back(dim, n, period / n);
    }
    return levels;
}

} // namespace sfdlab
