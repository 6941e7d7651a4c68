#include "sfdlab/scheme.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace sfdlab {

namespace {

void check_alpha(int alpha, int dim, const char* what) {
    if (alpha < 0 || alpha > dim)
        throw ValidationError(std::string(what) + " index " + std::to_string(alpha) +
                              " outside 0.." + std::to_string(dim));
}

void check_driver(int r, int m) {
    if (r < 0 || r >= m)
        throw ValidationError("driver index " + std::to_string(r) + " outside 0.." +
                              std::to_string(m - 1));
}

double eval_at(const CoefficientField& c, double t, const std::vector<double>& x) {
    return c(t, x);
}

} // namespace

void axpy_field(GridFunction& out, const CoefficientField& c, double t, const GridFunction& g,
                double scale) {
    if (scale == 0.0) return;
    if (c.is_constant()) {
        double v = c.constant_value();
        if (!std::isfinite(v))
            throw ValidationError("non-finite coefficient '" + c.label() + "'");
        if (v != 0.0) out.axpy(scale * v, g);
        return;
    }
    const Lattice& lat = out.lattice();
    std::vector<double> x(static_cast<std::size_t>(lat.dim()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        lat.coordinates(i, x);
        double v = c(t, x);
        if (!std::isfinite(v))
            throw ValidationError("non-finite coefficient '" + c.label() + "' at a node");
        out[i] += scale * v * g[i];
    }
}

TargetPDE::TargetPDE(int dim, int driver_count) : dim_(dim), m_(driver_count) {
    if (dim < 1 || dim > 3)
        throw ValidationError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (driver_count < 0) throw ValidationError("driver count must be >= 0");
    std::size_t n1 = static_cast<std::size_t>(dim + 1);
    a_.assign(n1 * n1, CoefficientField());
    b_.assign(n1 * static_cast<std::size_t>(m_), CoefficientField());
}

void TargetPDE::set_a(int alpha, int beta, CoefficientField f) {
    check_alpha(alpha, dim_, "coefficient a");
    check_alpha(beta, dim_, "coefficient a");
    std::size_t n1 = static_cast<std::size_t>(dim_ + 1);
    a_[static_cast<std::size_t>(alpha) * n1 + static_cast<std::size_t>(beta)] = f;
    a_[static_cast<std::size_t>(beta) * n1 + static_cast<std::size_t>(alpha)] = std::move(f);
}

void TargetPDE::set_b(int alpha, int r, CoefficientField f) {
    check_alpha(alpha, dim_, "coefficient b");
    check_driver(r, m_);
    b_[static_cast<std::size_t>(alpha) * static_cast<std::size_t>(m_) +
       static_cast<std::size_t>(r)] = std::move(f);
}

const CoefficientField& TargetPDE::a(int alpha, int beta) const {
    check_alpha(alpha, dim_, "coefficient a");
    check_alpha(beta, dim_, "coefficient a");
    std::size_t n1 = static_cast<std::size_t>(dim_ + 1);
    return a_[static_cast<std::size_t>(alpha) * n1 + static_cast<std::size_t>(beta)];
}

const CoefficientField& TargetPDE::b(int alpha, int r) const {
    check_alpha(alpha, dim_, "coefficient b");
    check_driver(r, m_);
    return b_[static_cast<std::size_t>(alpha) * static_cast<std::size_t>(m_) +
              static_cast<std::size_t>(r)];
}

StencilSpec::StencilSpec(int dim, int driver_count,
                         std::vector<DirectionVector> nonzero_directions)
    : dim_(dim), m_(driver_count) {
    if (dim < 1 || dim > 3)
        throw ValidationError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (driver_count < 0) throw ValidationError("driver count must be >= 0");
    dirs_.reserve(nonzero_directions.size() + 1);
    dirs_.push_back(DirectionVector::zero(dim));
    for (auto& d : nonzero_directions) {
        if (d.dim() != dim)
            throw ValidationError("direction " + d.str() + " has dimension " +
                                  std::to_string(d.dim()) + ", expected " + std::to_string(dim));
        if (d.is_zero())
            throw ValidationError("the zero vector is implicit and cannot be listed "
                                  "among the nonzero directions");
        for (const auto& seen : dirs_)
            if (seen == d) throw ValidationError("duplicate direction " + d.str());
        dirs_.push_back(std::move(d));
    }
    std::size_t n1 = dirs_.size();
    a_.assign(n1 * n1, CoefficientField());
    b_.assign(n1 * static_cast<std::size_t>(m_), CoefficientField());
    p_.assign(n1 - 1, CoefficientField());
    q_.assign(n1 - 1, CoefficientField());
}

int StencilSpec::index_of(const DirectionVector& lam) const noexcept {
    for (std::size_t k = 0; k < dirs_.size(); ++k)
        if (dirs_[k] == lam) return static_cast<int>(k);
    return -1;
}

int StencilSpec::require_index(const DirectionVector& lam, const char* what) const {
    int k = index_of(lam);
    if (k < 0)
        throw ValidationError(std::string(what) + ": direction " + lam.str() +
                              " is not in the scheme's direction set");
    return k;
}

void StencilSpec::set_a(const DirectionVector& lam, const DirectionVector& mu,
                        CoefficientField f) {
    std::size_t k = static_cast<std::size_t>(require_index(lam, "set_a"));
    std::size_t l = static_cast<std::size_t>(require_index(mu, "set_a"));
    std::size_t n1 = dirs_.size();
    a_[k * n1 + l] = f;
    a_[l * n1 + k] = std::move(f);
}

void StencilSpec::set_b(const DirectionVector& lam, int r, CoefficientField f) {
    std::size_t k = static_cast<std::size_t>(require_index(lam, "set_b"));
    check_driver(r, m_);
    b_[k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(r)] = std::move(f);
}

void StencilSpec::set_p(const DirectionVector& gamma, CoefficientField f) {
    int k = require_index(gamma, "set_p");
    if (k == 0) throw ValidationError("set_p: the zero direction carries no one-sided term");
    p_[static_cast<std::size_t>(k - 1)] = std::move(f);
}

void StencilSpec::set_q(const DirectionVector& gamma, CoefficientField f) {
    int k = require_index(gamma, "set_q");
    if (k == 0) throw ValidationError("set_q: the zero direction carries no one-sided term");
    q_[static_cast<std::size_t>(k - 1)] = std::move(f);
}

const CoefficientField& StencilSpec::a(int k, int l) const {
    std::size_t n1 = dirs_.size();
    return a_.at(static_cast<std::size_t>(k) * n1 + static_cast<std::size_t>(l));
}

const CoefficientField& StencilSpec::b(int k, int r) const {
    check_driver(r, m_);
    return b_.at(static_cast<std::size_t>(k) * static_cast<std::size_t>(m_) +
                 static_cast<std::size_t>(r));
}

const CoefficientField& StencilSpec::p(int k) const {
    if (k < 1) throw ValidationError("p is defined on nonzero directions only");
    return p_.at(static_cast<std::size_t>(k - 1));
}

const CoefficientField& StencilSpec::q(int k) const {
    if (k < 1) throw ValidationError("q is defined on nonzero directions only");
    return q_.at(static_cast<std::size_t>(k - 1));
}

GridFunction apply_L(const StencilSpec& spec, double t, const GridFunction& f) {
    const Lattice& lat = f.lattice();
    if (lat.dim() != spec.dim())
        throw ValidationError("lattice dimension " + std::to_string(lat.dim()) +
                              " does not match scheme dimension " + std::to_string(spec.dim()));
    int n1 = spec.direction_count();
    GridFunction out(lat);
    for (int l = 0; l < n1; ++l) {
        bool needed = false;
        for (int k = 0; k < n1 && !needed; ++k) needed = !spec.a(k, l).is_zero();
        if (!needed) continue;
        GridFunction g = (l == 0) ? f : symmetric_diff(f, spec.direction(l));
        for (int k = 0; k < n1; ++k) {
            const CoefficientField& c = spec.a(k, l);
            if (c.is_zero()) continue;
            if (k == 0) {
                axpy_field(out, c, t, g);
            } else {
                GridFunction dg = symmetric_diff(g, spec.direction(k));
                axpy_field(out, c, t, dg);
            }
        }
    }
    for (int k = 1; k < n1; ++k) {
        const DirectionVector& gamma = spec.direction(k);
        if (!spec.p(k).is_zero()) axpy_field(out, spec.p(k), t, forward_diff(f, gamma));
        if (!spec.q(k).is_zero()) axpy_field(out, spec.q(k), t, backward_diff(f, gamma), -1.0);
    }
    return out;
}

std::vector<GridFunction> apply_M(const StencilSpec& spec, double t, const GridFunction& f) {
    const Lattice& lat = f.lattice();
    if (lat.dim() != spec.dim())
        throw ValidationError("lattice dimension " + std::to_string(lat.dim()) +
                              " does not match scheme dimension " + std::to_string(spec.dim()));
    int n1 = spec.direction_count();
    int m = spec.driver_count();
    std::vector<GridFunction> out(static_cast<std::size_t>(m), GridFunction(lat));
    for (int k = 0; k < n1; ++k) {
        bool needed = false;
        for (int r = 0; r < m && !needed; ++r) needed = !spec.b(k, r).is_zero();
        if (!needed) continue;
        GridFunction g = (k == 0) ? f : symmetric_diff(f, spec.direction(k));
        for (int r = 0; r < m; ++r) {
            const CoefficientField& c = spec.b(k, r);
            if (!c.is_zero()) axpy_field(out[static_cast<std::size_t>(r)], c, t, g);
        }
    }
    return out;
}

double consistency_residual(const StencilSpec& spec, const TargetPDE& pde, double t,
                            std::span<const std::vector<double>> samples) {
    if (spec.dim() != pde.dim())
        throw ValidationError("scheme dimension " + std::to_string(spec.dim()) +
                              " does not match PDE dimension " + std::to_string(pde.dim()));
    if (spec.driver_count() != pde.driver_count())
        throw ValidationError("scheme has " + std::to_string(spec.driver_count()) +
                              " drivers, PDE has " + std::to_string(pde.driver_count()));
    int d = spec.dim();
    int n1 = spec.direction_count();
    int m = spec.driver_count();
    double worst = 0.0;
    auto note = [&worst](double target, double got) {
        double r = std::fabs(target - got);
        if (r > worst) worst = r;
    };
    for (const auto& x : samples) {
        if (static_cast<int>(x.size()) != d)
            throw ValidationError("sample point has wrong dimension");
        // (1) second-order block
        for (int i = 1; i <= d; ++i) {
            for (int j = 1; j <= d; ++j) {
                double got = 0.0;
                for (int k = 1; k < n1; ++k)
                    for (int l = 1; l < n1; ++l)
                        got += eval_at(spec.a(k, l), t, x) * spec.direction(k)[i - 1] *
                               spec.direction(l)[j - 1];
                note(eval_at(pde.a(i, j), t, x), got);
            }
        }
        // (2) first-order block
        for (int i = 1; i <= d; ++i) {
            double got = 0.0;
            for (int k = 1; k < n1; ++k)
                got += (eval_at(spec.a(0, k), t, x) + eval_at(spec.a(k, 0), t, x) +
                        eval_at(spec.p(k), t, x) - eval_at(spec.q(k), t, x)) *
                       spec.direction(k)[i - 1];
            note(eval_at(pde.a(0, i), t, x) + eval_at(pde.a(i, 0), t, x), got);
        }
        // (3) gradient block of the diffusion
        for (int r = 0; r < m; ++r) {
            for (int i = 1; i <= d; ++i) {
                double got = 0.0;
                for (int k = 1; k < n1; ++k)
                    got += eval_at(spec.b(k, r), t, x) * spec.direction(k)[i - 1];
                note(eval_at(pde.b(i, r), t, x), got);
            }
        }
        // (4) zeroth-order drift
        note(eval_at(pde.a(0, 0), t, x), eval_at(spec.a(0, 0), t, x));
        // (5) zeroth-order diffusion
        for (int r = 0; r < m; ++r)
            note(eval_at(pde.b(0, r), t, x), eval_at(spec.b(0, r), t, x));
    }
    return worst;
}

ParabolicityReport parabolicity_report(const StencilSpec& spec, double t,
                                       std::span<const std::vector<double>> samples,
                                       double tol) {
    if (tol < 0.0) throw ValidationError("tolerance must be >= 0");
    if (samples.empty()) throw ValidationError("parabolicity check needs sample points");
    int n = spec.direction_count() - 1;
    int m = spec.driver_count();
    ParabolicityReport rep;
    if (n == 0) {
        rep.min_eigenvalue = 0.0;
        rep.min_pq = 0.0;
        rep.pass = true;
        return rep;
    }
    double min_eig = std::numeric_limits<double>::infinity();
    double min_pq = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd A(n, n);
    for (const auto& x : samples) {
        if (static_cast<int>(x.size()) != spec.dim())
            throw ValidationError("sample point has wrong dimension");
        for (int k = 1; k <= n; ++k) {
            for (int l = 1; l <= n; ++l) {
                double v = eval_at(spec.a(k, l), t, x);
                for (int r = 0; r < m; ++r)
                    v -= 0.5 * eval_at(spec.b(k, r), t, x) * eval_at(spec.b(l, r), t, x);
                A(k - 1, l - 1) = v;
            }
            min_pq = std::min(min_pq, eval_at(spec.p(k), t, x));
            min_pq = std::min(min_pq, eval_at(spec.q(k), t, x));
        }
        if (!A.allFinite()) throw ValidationError("non-finite entries in parabolicity matrix");
        Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ValidationError("eigensolve failed");
        min_eig = std::min(min_eig, es.eigenvalues()(0));
    }
    rep.min_eigenvalue = min_eig;
    rep.min_pq = min_pq;
    rep.pass = (min_eig >= -tol) && (min_pq >= -tol);
    return rep;
}

StencilSpec from_pde_central(const TargetPDE& pde) {
    int d = pde.dim();
    std::vector<DirectionVector> dirs;
    dirs.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dirs.push_back(DirectionVector::axis(d, i));
    StencilSpec spec(d, pde.driver_count(), std::move(dirs));
    auto dir_of = [&](int alpha) {
        return alpha == 0 ? DirectionVector::zero(d) : DirectionVector::axis(d, alpha - 1);
    };
    for (int alpha = 0; alpha <= d; ++alpha) {
        for (int beta = alpha; beta <= d; ++beta)
            spec.set_a(dir_of(alpha), dir_of(beta), pde.a(alpha, beta));
        for (int r = 0; r < pde.driver_count(); ++r)
            spec.set_b(dir_of(alpha), r, pde.b(alpha, r));
    }
    return spec;
}

namespace {

/// Builds p or q for the one-sided scheme: 0.5*sign*a + theta, with the
/// nonnegativity bound |a| <= 2 theta enforced either at construction
/// (constant a) or at every later evaluation (variable a).
CoefficientField one_sided_weight(const CoefficientField& a_field, double sign, double theta,
                                  int gamma, const char* name) {
    if (theta < 0.0)
        throw ValidationError("theta for direction gamma=" + std::to_string(gamma) +
                              " must be >= 0, got " + std::to_string(theta));
    if (a_field.is_constant()) {
        double a = a_field.constant_value();
        if (std::fabs(a) > 2.0 * theta)
            throw ValidationError(
                "inadmissible theta for direction gamma=" + std::to_string(gamma) + ": |" +
                std::to_string(a) + "| exceeds 2*theta = " + std::to_string(2.0 * theta));
        return CoefficientField::constant(0.5 * sign * a + theta);
    }
    std::string label = std::string(name) + "[gamma=" + std::to_string(gamma) + "]";
    return CoefficientField::function(
        [a_field, sign, theta, gamma](double t, std::span<const double> x) {
            double a = a_field(t, x);
            if (std::fabs(a) > 2.0 * theta)
                throw ValidationError("inadmissible theta for direction gamma=" +
                                      std::to_string(gamma) + " at a sample point: |" +
                                      std::to_string(a) +
                                      "| exceeds 2*theta = " + std::to_string(2.0 * theta));
            return 0.5 * sign * a + theta;
        },
        label);
}

} // namespace

StencilSpec from_pde_upwind(const TargetPDE& pde, std::span<const double> theta) {
    int d = pde.dim();
    if (static_cast<int>(theta.size()) != d)
        throw ValidationError("theta must list one value per spatial direction; got " +
                              std::to_string(theta.size()) + " for dimension " +
                              std::to_string(d));
    std::vector<DirectionVector> dirs;
    dirs.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dirs.push_back(DirectionVector::axis(d, i));
    StencilSpec spec(d, pde.driver_count(), std::move(dirs));
    auto dir_of = [&](int alpha) {
        return alpha == 0 ? DirectionVector::zero(d) : DirectionVector::axis(d, alpha - 1);
    };
    spec.set_a(dir_of(0), dir_of(0), pde.a(0, 0));
    for (int i = 1; i <= d; ++i)
        for (int j = i; j <= d; ++j) spec.set_a(dir_of(i), dir_of(j), pde.a(i, j));
    // a(0, e_i) and a(e_i, 0) stay zero: the first-order drift moves into p/q.
    for (int alpha = 0; alpha <= d; ++alpha)
        for (int r = 0; r < pde.driver_count(); ++r)
            spec.set_b(dir_of(alpha), r, pde.b(alpha, r));
    for (int g = 1; g <= d; ++g) {
        double th = theta[static_cast<std::size_t>(g - 1)];
        spec.set_p(dir_of(g), one_sided_weight(pde.a(0, g), +1.0, th, g, "p"));
        spec.set_q(dir_of(g), one_sided_weight(pde.a(g, 0), -1.0, th, g, "q"));
    }
    return spec;
}

} // namespace sfdlab
