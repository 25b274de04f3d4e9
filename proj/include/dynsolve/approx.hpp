// Function approximation and numerical integration: Chebyshev / complete
// ordinary polynomial bases, least-squares fitting, Gauss-Hermite quadrature,
// AR(1) conditional expectations.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dynsolve {

enum class BasisKind { chebyshev_tensor, complete_ordinary };

struct PolyBasisSpec {
    BasisKind kind = BasisKind::complete_ordinary;
    int degree = 4;
    int dim = 1;
    std::vector<std::array<double, 2>> domain; // [lo, hi] per dimension

    std::size_t basis_size() const;
    void validate() const;
    // Affine map of coordinate d to [-1,1]. Chebyshev coordinates are clamped
    // to [-1,1]; ordinary-polynomial coordinates are left free so evaluation
    // extrapolates smoothly just outside the box.
    double scale(int d, double x) const;
    double scale_jacobian(int d) const; // d(scaled)/dx
};

// All basis values at a point, tensor/graded-lex ordering. deriv_order in
// {0,1,2} differentiates each basis function w.r.t. coordinate `wrt`.
std::vector<double> chebyshev_eval(const PolyBasisSpec&, std::span<const double> point);
std::vector<double> complete_basis_eval(const PolyBasisSpec&, std::span<const double> point);
std::vector<double> basis_eval(const PolyBasisSpec&, std::span<const double> point,
                               int deriv_order = 0, int wrt = 0);

// Minimizes ||B theta - v||_2 by column-pivoted QR. Throws on rank deficiency,
// naming `context` in the message.
Eigen::VectorXd fit_least_squares(const Eigen::MatrixXd& basis_matrix, const Eigen::VectorXd& values,
                                  const std::string& context = {});

struct FittedFunction {
    PolyBasisSpec spec;
    std::vector<double> coeffs;

    double operator()(std::span<const double> point) const;
    double partial(std::span<const double> point, int wrt) const;
    double second_partial(std::span<const double> point, int wrt) const;
};

// Repeated fits on a fixed grid reuse one QR factorization.
class LeastSquaresFitter {
  public:
    LeastSquaresFitter(PolyBasisSpec spec, const std::vector<std::vector<double>>& grid,
                       std::string context = {});
    FittedFunction fit(std::span<const double> values) const;
    const Eigen::MatrixXd& basis_matrix() const { return basis_; }
    const PolyBasisSpec& spec() const { return spec_; }

  private:
    PolyBasisSpec spec_;
    Eigen::MatrixXd basis_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    std::string context_;
};

struct QuadratureRule {
    std::vector<double> nodes, weights;
    int order = 0;
};

// Hermite rule for weight e^{-x^2}, orders 1..32 (Golub-Welsch).
QuadratureRule gauss_hermite(int order);

enum class Ar1Kind {
    log_level, // ln z' = rho ln z + eps
    level      // z' = mean + rho (z - mean) + eps
};

struct Ar1Process {
    Ar1Kind kind = Ar1Kind::log_level;
    double rho = 0.0;
    double sigma = 0.0;
    double mean = 0.0; // level kind only
    double next(double z, double eps) const;
};

// E[f(z') | z] by Gauss-Hermite: sum_q (w_q / sqrt(pi)) f(z'(sqrt(2) sigma node_q)).
double ar1_expectation(const std::function<double(double)>& f, double z_now, const Ar1Process&,
                       const QuadratureRule&);
// Spec-level convenience: integrate a fitted function of (endog, z) over z'.
double ar1_expectation(const FittedFunction& f, std::span<const double> endog_next, double z_now,
                       const Ar1Process&, const QuadratureRule&);

} // namespace dynsolve
