#include "dynsolve/approx.hpp"

#include <cmath>
#include <stdexcept>

namespace dynsolve {

namespace {

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// T_m and derivatives at u in [-1,1] via the three-term recurrence.
void cheb_1d(double u, int degree, int deriv, std::vector<double>& out) {
    out.resize(degree + 1);
    std::vector<double> t(degree + 1), t1, t2;
    t[0] = 1.0;
    if (degree >= 1) t[1] = u;
    for (int m = 2; m <= degree; ++m) t[m] = 2.0 * u * t[m - 1] - t[m - 2];
    if (deriv == 0) { out = t; return; }
    t1.assign(degree + 1, 0.0);
    if (degree >= 1) t1[1] = 1.0;
    for (int m = 2; m <= degree; ++m) t1[m] = 2.0 * t[m - 1] + 2.0 * u * t1[m - 1] - t1[m - 2];
    if (deriv == 1) { out = t1; return; }
    t2.assign(degree + 1, 0.0);
    for (int m = 2; m <= degree; ++m) t2[m] = 4.0 * t1[m - 1] + 2.0 * u * t2[m - 1] - t2[m - 2];
    out = t2;
}

void mono_1d(double u, int degree, int deriv, std::vector<double>& out) {
    out.assign(degree + 1, 0.0);
    for (int m = 0; m <= degree; ++m) {
        switch (deriv) {
        case 0: out[m] = std::pow(u, m); break;
        case 1: out[m] = m >= 1 ? m * std::pow(u, m - 1) : 0.0; break;
        default: out[m] = m >= 2 ? double(m) * (m - 1) * std::pow(u, m - 2) : 0.0; break;
        }
    }
}

void exponent_tuples(int dim, int degree, std::vector<std::vector<int>>& out) {
    // graded lexicographic: total degree ascending, first coordinate descending
    std::vector<int> e(dim, 0);
    std::function<void(int, int)> rec = [&](int d, int rem) {
        if (d == dim - 1) {
            e[d] = rem;
            out.push_back(e);
            return;
        }
        for (int g = rem; g >= 0; --g) {
            e[d] = g;
            rec(d + 1, rem - g);
        }
    };
    for (int total = 0; total <= degree; ++total) rec(0, total);
}

} // namespace

std::size_t PolyBasisSpec::basis_size() const {
    if (kind == BasisKind::chebyshev_tensor) {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= std::size_t(degree) + 1;
        return n;
    }
    return binomial(dim + degree, degree);
}

void PolyBasisSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("PolyBasisSpec: dim must be >= 1");
    if (degree < 0) throw std::invalid_argument("PolyBasisSpec: degree must be >= 0");
    if (domain.size() != std::size_t(dim))
        throw std::invalid_argument("PolyBasisSpec: domain size must equal dim");
    for (const auto& d : domain)
        if (!(d[0] < d[1])) throw std::invalid_argument("PolyBasisSpec: need lo < hi per dimension");
}

double PolyBasisSpec::scale(int d, double x) const {
    const double u = 2.0 * (x - domain[d][0]) / (domain[d][1] - domain[d][0]) - 1.0;
    if (kind == BasisKind::chebyshev_tensor) return std::clamp(u, -1.0, 1.0);
    return u;
}

double PolyBasisSpec::scale_jacobian(int d) const { return 2.0 / (domain[d][1] - domain[d][0]); }

std::vector<double> basis_eval(const PolyBasisSpec& spec, std::span<const double> point,
                               int deriv_order, int wrt) {
    spec.validate();
    if (point.size() != std::size_t(spec.dim))
        throw std::invalid_argument("basis_eval: point dimension mismatch");
    if (wrt < 0 || wrt >= spec.dim) throw std::invalid_argument("basis_eval: bad wrt dimension");

    std::vector<std::vector<double>> per_dim(spec.dim);
    for (int d = 0; d < spec.dim; ++d) {
        const double u = spec.scale(d, point[d]);
        const int deriv = d == wrt ? deriv_order : 0;
        if (spec.kind == BasisKind::chebyshev_tensor)
            cheb_1d(u, spec.degree, deriv, per_dim[d]);
        else
            mono_1d(u, spec.degree, deriv, per_dim[d]);
        const double j = std::pow(spec.scale_jacobian(d), deriv);
        for (double& v : per_dim[d]) v *= j;
    }

    std::vector<double> out;
    out.reserve(spec.basis_size());
    if (spec.kind == BasisKind::chebyshev_tensor) {
        // tensor product, first dimension slowest
        std::vector<int> idx(spec.dim, 0);
        const std::size_t n = spec.basis_size();
        for (std::size_t i = 0; i < n; ++i) {
            double v = 1.0;
            for (int d = 0; d < spec.dim; ++d) v *= per_dim[d][idx[d]];
            out.push_back(v);
            for (int d = spec.dim - 1; d >= 0; --d) {
                if (++idx[d] <= spec.degree) break;
                idx[d] = 0;
            }
        }
    } else {
        std::vector<std::vector<int>> tuples;
        exponent_tuples(spec.dim, spec.degree, tuples);
        for (const auto& e : tuples) {
            double v = 1.0;
            for (int d = 0; d < spec.dim; ++d) v *= per_dim[d][e[d]];
            out.push_back(v);
        }
    }
    return out;
}

std::vector<double> chebyshev_eval(const PolyBasisSpec& spec, std::span<const double> point) {
    if (spec.kind != BasisKind::chebyshev_tensor)
        throw std::invalid_argument("chebyshev_eval: spec is not chebyshev_tensor");
    return basis_eval(spec, point);
}

std::vector<double> complete_basis_eval(const PolyBasisSpec& spec, std::span<const double> point) {
    if (spec.kind != BasisKind::complete_ordinary)
        throw std::invalid_argument("complete_basis_eval: spec is not complete_ordinary");
    return basis_eval(spec, point);
}

Eigen::VectorXd fit_least_squares(const Eigen::MatrixXd& basis_matrix, const Eigen::VectorXd& values,
                                  const std::string& context) {
    if (basis_matrix.rows() != values.size())
        throw std::invalid_argument("fit_least_squares: row/value count mismatch");
    if (basis_matrix.rows() < basis_matrix.cols())
        throw std::invalid_argument("fit_least_squares: fewer grid points than basis functions" +
                                    (context.empty() ? "" : " (" + context + ")"));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis_matrix);
    if (qr.rank() < basis_matrix.cols())
        throw std::runtime_error("fit_least_squares: rank-deficient basis matrix (rank " +
                                 std::to_string(qr.rank()) + " < " +
                                 std::to_string(basis_matrix.cols()) + ")" +
                                 (context.empty() ? "" : " for " + context));
    return qr.solve(values);
}

double FittedFunction::operator()(std::span<const double> point) const {
    auto b = basis_eval(spec, point);
    double v = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) v += coeffs[i] * b[i];
    return v;
}

double FittedFunction::partial(std::span<const double> point, int wrt) const {
    auto b = basis_eval(spec, point, 1, wrt);
    double v = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) v += coeffs[i] * b[i];
    return v;
}

double FittedFunction::second_partial(std::span<const double> point, int wrt) const {
    auto b = basis_eval(spec, point, 2, wrt);
    double v = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) v += coeffs[i] * b[i];
    return v;
}

LeastSquaresFitter::LeastSquaresFitter(PolyBasisSpec spec, const std::vector<std::vector<double>>& grid,
                                       std::string context)
    : spec_(std::move(spec)), context_(std::move(context)) {
    spec_.validate();
    const std::size_t nb = spec_.basis_size();
    if (grid.size() < nb)
        throw std::invalid_argument("LeastSquaresFitter: fewer grid points than basis functions" +
                                    (context_.empty() ? "" : " (" + context_ + ")"));
    basis_.resize(grid.size(), nb);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto row = basis_eval(spec_, grid[i]);
        for (std::size_t j = 0; j < nb; ++j) basis_(i, j) = row[j];
    }
    qr_.compute(basis_);
    if (qr_.rank() < basis_.cols())
        throw std::runtime_error("LeastSquaresFitter: rank-deficient basis/grid combination" +
                                 (context_.empty() ? "" : " for " + context_));
}

FittedFunction LeastSquaresFitter::fit(std::span<const double> values) const {
    if (values.size() != std::size_t(basis_.rows()))
        throw std::invalid_argument("LeastSquaresFitter::fit: value count mismatch");
    Eigen::Map<const Eigen::VectorXd> v(values.data(), values.size());
    Eigen::VectorXd theta = qr_.solve(v);
    FittedFunction f{spec_, std::vector<double>(theta.data(), theta.data() + theta.size())};
    return f;
}

QuadratureRule gauss_hermite(int order) {
    if (order < 1 || order > 32) throw std::invalid_argument("gauss_hermite: order must be in 1..32");
    QuadratureRule rule;
    rule.order = order;
    if (order == 1) {
        rule.nodes = {0.0};
        rule.weights = {std::sqrt(M_PI)};
        return rule;
    }
    // Golub-Welsch: eigen-decompose the Jacobi matrix, off-diagonal sqrt(i/2)
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double b = std::sqrt(i / 2.0);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double w0 = std::sqrt(M_PI);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        rule.weights[i] = w0 * v * v;
    }
    // enforce exact symmetry about 0
    for (int i = 0; i < order / 2; ++i) {
        const int j = order - 1 - i;
        const double n = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -n;
        rule.nodes[j] = n;
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = rule.weights[j] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

double Ar1Process::next(double z, double eps) const {
    if (kind == Ar1Kind::log_level) return std::exp(rho * std::log(z) + eps);
    return mean + rho * (z - mean) + eps;
}

double ar1_expectation(const std::function<double(double)>& f, double z_now, const Ar1Process& proc,
                       const QuadratureRule& rule) {
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double e = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double eps = std::sqrt(2.0) * proc.sigma * rule.nodes[q];
        e += rule.weights[q] * inv_sqrt_pi * f(proc.next(z_now, eps));
    }
    return e;
}

double ar1_expectation(const FittedFunction& f, std::span<const double> endog_next, double z_now,
                       const Ar1Process& proc, const QuadratureRule& rule) {
    std::vector<double> point(endog_next.begin(), endog_next.end());
    point.push_back(0.0);
    return ar1_expectation(
        [&](double z_next) {
            point.back() = z_next;
            return f(point);
        },
        z_now, proc, rule);
}

} // namespace dynsolve
