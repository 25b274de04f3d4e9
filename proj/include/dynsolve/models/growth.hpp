// Single-agent neoclassical growth model, elastic or inelastic labor supply.
#pragma once

#include <memory>

#include "dynsolve/approx.hpp"
#include "dynsolve/model.hpp"

namespace dynsolve {

struct GrowthParams {
    double gamma = 2.0;  // CRRA of consumption (1 = log utility)
    double mu = 2.0;     // curvature of leisure (1 = log leisure)
    double alpha = 1.0 / 3.0;
    double beta = 0.99;
    double delta = 0.025;
    double rho = 0.95;
    double sigma = 0.01;
    double pi_k = 10.0;      // steady-state capital/output calibration ratio
    double pi_c = 0.75;      // steady-state consumption/output calibration ratio
    double l_bar = 1.0 / 3.0;
    bool elastic = true;

    // Production scale; also pins the steady state through the Euler
    // condition (the marginal product of capital equals A there).
    double A() const { return (1.0 / beta - (1.0 - delta)) / alpha; }
    double B() const; // leisure scale implied by the calibration ratios
    void validate() const;
};

struct GrowthGridConfig {
    int nk = 10, nz = 10;
    double k_lo_frac = 0.5, k_hi_frac = 1.5; // multiples of steady-state capital
    double z_lo = 0.95, z_hi = 1.05;
    int poly_degree = 4; // complete ordinary polynomials
    int quad_order = 3;
    int threads = 1;
};

struct BellmanParts {
    double utility, k_next, foc_l, foc_c;
};

// Flow utility, next-period capital and the two first-order-condition
// residuals at (k, z, l, c). beta_dEV_dk is the discounted derivative of the
// continuation value w.r.t. next-period capital.
BellmanParts growth_bellman_parts(const GrowthParams&, double k, double z, double l, double c,
                                  double beta_dEV_dk);
// Consumption that makes the two FOCs mutually consistent at labor l.
double growth_c_of_l(const GrowthParams&, double k, double z, double l);

class GrowthModel final : public Model {
  public:
    GrowthModel(GrowthParams params, GrowthGridConfig grid_cfg);

    std::string name() const override { return params_.elastic ? "growth_elastic" : "growth_inelastic"; }
    int n_agents() const override { return 1; }
    int action_dim() const override { return params_.elastic ? 2 : 1; } // (l, c) or (c)
    int state_dim() const override { return 2; }                        // (k, z)
    double discount() const override { return params_.beta; }
    const std::vector<std::vector<double>>& grid() const override { return grid_; }

    std::shared_ptr<const ValueRepr> fit_values(std::span<const double> v) const override;
    double reward(int agent, int s_idx, std::span<const double> actions) const override;
    double reward_grad(int agent, int dim, int s_idx, std::span<const double> actions) const override;
    double continuation(int agent, int s_idx, std::span<const double> actions,
                        const ValueRepr& v) const override;
    double continuation_grad(int agent, int dim, int s_idx, std::span<const double> actions,
                             const ValueRepr& v) const override;
    std::vector<double> best_response(int agent, int s_idx, std::span<const double> actions,
                                      const ValueRepr& v, InnerSolver solver,
                                      double tol) const override;
    std::vector<double> initial_values() const override;
    std::vector<double> initial_actions() const override;

    const GrowthParams& params() const { return params_; }
    const GrowthGridConfig& grid_config() const { return grid_cfg_; }
    bool elastic() const { return params_.elastic; }
    double steady_k() const { return k_ss_; }
    double steady_l() const { return l_ss_; }
    double steady_c() const { return c_ss_; }

    double u(double c, double l) const;
    double u_c(double c) const;
    double u_l(double l) const;
    double u_c_inv(double marginal) const; // c with u_c(c) = marginal
    double production(double k, double z, double l) const;
    double prod_l(double k, double z, double l) const;
    double prod_k(double k, double z, double l) const;
    double k_next(double k, double z, double l, double c) const;
    double c_of_l(double k, double z, double l) const { return growth_c_of_l(params_, k, z, l); }

    // Conditional expectations of the fitted value function and its capital
    // derivative given current z.
    double w_value(const ValueRepr& v, double k_next, double z) const;
    double w_k(const ValueRepr& v, double k_next, double z) const;

    // Scalar solves used by the ECM / EGM updates.
    double solve_l_envelope(double vk, double k, double z) const;     // ECM, elastic
    double solve_l_endogenous(double k_next, double z, double wk) const; // EGM, elastic
    double k_from_l_endogenous(double l, double z, double wk) const;
    double solve_k_budget(double resources, double z) const; // (1-d)k + zAk^a = resources

    const QuadratureRule& quad() const { return quad_; }
    const Ar1Process& shock() const { return shock_; }
    const LeastSquaresFitter& fitter() const { return *fitter_; }

  private:
    GrowthParams params_;
    GrowthGridConfig grid_cfg_;
    std::vector<std::vector<double>> grid_;
    double k_ss_ = 0, l_ss_ = 0, c_ss_ = 0;
    QuadratureRule quad_;
    Ar1Process shock_;
    std::unique_ptr<LeastSquaresFitter> fitter_;
};

std::shared_ptr<GrowthModel> make_growth_model(const GrowthParams&, const GrowthGridConfig& = {});

} // namespace dynsolve
