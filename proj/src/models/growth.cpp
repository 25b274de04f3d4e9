#include "dynsolve/models/growth.hpp"

#include <cmath>
#include <stdexcept>

#include "../root_find.hpp"

namespace dynsolve {

namespace {

// CRRA with the log limit at curvature 1
double crra(double x, double curvature) {
    if (curvature == 1.0) return std::log(x);
    return (std::pow(x, 1.0 - curvature) - 1.0) / (1.0 - curvature);
}

class GrowthValueRepr final : public ValueRepr {
  public:
    explicit GrowthValueRepr(FittedFunction f) : f_(std::move(f)) {}
    double value(int, std::span<const double> state) const override { return f_(state); }
    double partial(int, std::span<const double> state, int dim) const override {
        return f_.partial(state, dim);
    }
    double second_partial(int, std::span<const double> state, int dim) const override {
        return f_.second_partial(state, dim);
    }

  private:
    FittedFunction f_;
};

} // namespace

double GrowthParams::B() const {
    return (1.0 - alpha) * std::pow(pi_k, (1.0 - gamma) * alpha / (1.0 - alpha)) *
           std::pow(pi_c, -gamma) * std::pow(1.0 - l_bar, mu) * std::pow(l_bar, -mu);
}

void GrowthParams::validate() const {
    if (!(beta > 0 && beta < 1)) throw std::invalid_argument("GrowthParams: beta must be in (0,1)");
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("GrowthParams: alpha must be in (0,1)");
    if (!(gamma > 0) || !(mu > 0) || !(delta >= 0) || !(sigma >= 0))
        throw std::invalid_argument("GrowthParams: nonpositive curvature/depreciation/shock");
    if (!(l_bar > 0 && l_bar < 1)) throw std::invalid_argument("GrowthParams: l_bar must be in (0,1)");
    if (!(A() > 0) || !(B() > 0)) throw std::invalid_argument("GrowthParams: A, B must be positive");
}

BellmanParts growth_bellman_parts(const GrowthParams& p, double k, double z, double l, double c,
                                  double beta_dEV_dk) {
    if (!(k > 0) || !(z > 0) || !(c > 0))
        throw std::invalid_argument("growth_bellman_parts: need k, z, c > 0");
    if (p.elastic && !(l > 0 && l < 1))
        throw std::invalid_argument("growth_bellman_parts: need l in (0,1)");
    const double labor = p.elastic ? l : 1.0;
    BellmanParts out{};
    out.utility = crra(c, p.gamma);
    if (p.elastic) out.utility += p.B() * crra(1.0 - l, p.mu);
    out.k_next =
        (1.0 - p.delta) * k + z * p.A() * std::pow(k, p.alpha) * std::pow(labor, 1.0 - p.alpha) - c;
    out.foc_c = std::pow(c, -p.gamma) - beta_dEV_dk;
    out.foc_l = p.elastic ? -p.B() * std::pow(1.0 - l, -p.mu) +
                                z * (1.0 - p.alpha) * p.A() * std::pow(k, p.alpha) *
                                    std::pow(l, -p.alpha) * beta_dEV_dk
                          : 0.0;
    return out;
}

double growth_c_of_l(const GrowthParams& p, double k, double z, double l) {
    const double mpl = (1.0 - p.alpha) * p.A() * z * std::pow(k, p.alpha) * std::pow(l, -p.alpha);
    return std::pow(p.B() * std::pow(1.0 - l, -p.mu) / mpl, -1.0 / p.gamma);
}

GrowthModel::GrowthModel(GrowthParams params, GrowthGridConfig grid_cfg)
    : params_(params), grid_cfg_(grid_cfg) {
    params_.validate();
    threads_ = grid_cfg_.threads;

    // Deterministic steady state (z = 1). The Euler condition pins the
    // capital/labor ratio through A; the intratemporal condition then fixes l.
    const double kl = 1.0; // prod_k = A at the steady state forces k = l
    if (params_.elastic) {
        auto foc = [&](double l) {
            const double k = kl * l;
            const double c = production(k, 1.0, l) - params_.delta * k;
            return u_l(l) + u_c(c) * prod_l(k, 1.0, l);
        };
        l_ss_ = detail::expanding_root(foc, params_.l_bar, 1e-9, 1.0 - 1e-9, "growth steady-state labor");
        k_ss_ = kl * l_ss_;
        c_ss_ = production(k_ss_, 1.0, l_ss_) - params_.delta * k_ss_;
    } else {
        k_ss_ = 1.0; // alpha A k^(alpha-1) = alpha A at k = 1
        l_ss_ = 1.0;
        c_ss_ = production(k_ss_, 1.0, 1.0) - params_.delta * k_ss_;
    }

    const double k_lo = grid_cfg_.k_lo_frac * k_ss_, k_hi = grid_cfg_.k_hi_frac * k_ss_;
    grid_.reserve(std::size_t(grid_cfg_.nk) * grid_cfg_.nz);
    for (int i = 0; i < grid_cfg_.nk; ++i) {
        const double k = grid_cfg_.nk == 1 ? k_lo : k_lo + (k_hi - k_lo) * i / (grid_cfg_.nk - 1);
        for (int j = 0; j < grid_cfg_.nz; ++j) {
            const double z = grid_cfg_.nz == 1
                                 ? grid_cfg_.z_lo
                                 : grid_cfg_.z_lo + (grid_cfg_.z_hi - grid_cfg_.z_lo) * j / (grid_cfg_.nz - 1);
            grid_.push_back({k, z});
        }
    }

    quad_ = gauss_hermite(grid_cfg_.quad_order);
    shock_ = Ar1Process{Ar1Kind::log_level, params_.rho, params_.sigma, 0.0};

    PolyBasisSpec spec{BasisKind::complete_ordinary, grid_cfg_.poly_degree, 2,
                       {{k_lo, k_hi}, {grid_cfg_.z_lo, grid_cfg_.z_hi}}};
    fitter_ = std::make_unique<LeastSquaresFitter>(spec, grid_, name() + " value function");
}

double GrowthModel::u(double c, double l) const {
    double v = crra(c, params_.gamma);
    if (params_.elastic) v += params_.B() * crra(1.0 - l, params_.mu);
    return v;
}

double GrowthModel::u_c(double c) const { return std::pow(c, -params_.gamma); }

double GrowthModel::u_l(double l) const { return -params_.B() * std::pow(1.0 - l, -params_.mu); }

double GrowthModel::u_c_inv(double marginal) const { return std::pow(marginal, -1.0 / params_.gamma); }

double GrowthModel::production(double k, double z, double l) const {
    return z * params_.A() * std::pow(k, params_.alpha) *
           (params_.elastic ? std::pow(l, 1.0 - params_.alpha) : 1.0);
}

double GrowthModel::prod_l(double k, double z, double l) const {
    return z * (1.0 - params_.alpha) * params_.A() * std::pow(k, params_.alpha) *
           std::pow(l, -params_.alpha);
}

double GrowthModel::prod_k(double k, double z, double l) const {
    return z * params_.alpha * params_.A() * std::pow(k, params_.alpha - 1.0) *
           (params_.elastic ? std::pow(l, 1.0 - params_.alpha) : 1.0);
}

double GrowthModel::k_next(double k, double z, double l, double c) const {
    return (1.0 - params_.delta) * k + production(k, z, l) - c;
}

std::shared_ptr<const ValueRepr> GrowthModel::fit_values(std::span<const double> v) const {
    return std::make_shared<GrowthValueRepr>(fitter_->fit(v));
}

double GrowthModel::reward(int, int, std::span<const double> a) const {
    return params_.elastic ? u(a[1], a[0]) : u(a[0], 1.0);
}

double GrowthModel::reward_grad(int, int dim, int, std::span<const double> a) const {
    if (params_.elastic) return dim == 0 ? u_l(a[0]) : u_c(a[1]);
    return u_c(a[0]);
}

double GrowthModel::w_value(const ValueRepr& v, double kn, double z) const {
    return ar1_expectation(
        [&](double zn) {
            const double pt[2] = {kn, zn};
            return v.value(0, pt);
        },
        z, shock_, quad_);
}

double GrowthModel::w_k(const ValueRepr& v, double kn, double z) const {
    return ar1_expectation(
        [&](double zn) {
            const double pt[2] = {kn, zn};
            return v.partial(0, pt, 0);
        },
        z, shock_, quad_);
}

double GrowthModel::continuation(int, int s_idx, std::span<const double> a, const ValueRepr& v) const {
    const auto& s = grid_[s_idx];
    const double l = params_.elastic ? a[0] : 1.0;
    const double c = params_.elastic ? a[1] : a[0];
    return w_value(v, k_next(s[0], s[1], l, c), s[1]);
}

double GrowthModel::continuation_grad(int, int dim, int s_idx, std::span<const double> a,
                                      const ValueRepr& v) const {
    const auto& s = grid_[s_idx];
    const double l = params_.elastic ? a[0] : 1.0;
    const double c = params_.elastic ? a[1] : a[0];
    const double wk = w_k(v, k_next(s[0], s[1], l, c), s[1]);
    if (params_.elastic && dim == 0) return wk * prod_l(s[0], s[1], l); // dk'/dl
    return -wk;                                                        // dk'/dc
}

std::vector<double> GrowthModel::best_response(int, int s_idx, std::span<const double> a,
                                               const ValueRepr& v, InnerSolver, double tol) const {
    const auto& s = grid_[s_idx];
    const double k = s[0], z = s[1];
    if (!params_.elastic) {
        // u_c(c) = beta E[V_k], strictly decreasing in c
        const double resources = (1.0 - params_.delta) * k + production(k, z, 1.0);
        auto f = [&](double c) {
            return u_c(c) - params_.beta * w_k(v, resources - c, z);
        };
        const double c = detail::expanding_root(f, a[0], 1e-10, resources - 1e-10,
                                                "growth inelastic FOC at grid point " +
                                                    std::to_string(s_idx),
                                                /*best_effort=*/true);
        (void)tol;
        return {c};
    }
    // Reduce the (l, c) system to one equation in l through c_of_l.
    auto f = [&](double l) {
        const double c = c_of_l(k, z, l);
        return u_c(c) - params_.beta * w_k(v, k_next(k, z, l, c), z);
    };
    const double l = detail::expanding_root(f, a[0], 1e-9, 1.0 - 1e-9,
                                            "growth labor FOC at grid point " + std::to_string(s_idx),
                                            /*best_effort=*/true);
    return {l, c_of_l(k, z, l)};
}

std::vector<double> GrowthModel::initial_values() const {
    // Value of following the initial policies forever: the policy-evaluation
    // fixed point V = u0 + beta E Fit V is linear in V, so solve it directly.
    auto a0 = initial_actions();
    const std::size_t ns = n_states();
    const int D = action_dim();
    Eigen::VectorXd u0(ns);
    std::vector<double> kn(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        const double l = params_.elastic ? a0[s * D] : 1.0;
        const double c = params_.elastic ? a0[s * D + 1] : a0[s * D];
        u0(s) = u(c, l);
        kn[s] = k_next(grid_[s][0], grid_[s][1], l, c);
    }
    const Eigen::MatrixXd& B = fitter_->basis_matrix();
    const auto nb = B.cols();
    Eigen::MatrixXd E(ns, nb); // E(s, j) = E[basis_j(k'(s), z') | z_s]
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    for (std::size_t s = 0; s < ns; ++s) {
        E.row(s).setZero();
        for (std::size_t q = 0; q < quad_.nodes.size(); ++q) {
            const double eps = std::sqrt(2.0) * params_.sigma * quad_.nodes[q];
            const double zn = shock_.next(grid_[s][1], eps);
            const double pt[2] = {kn[s], zn};
            auto row = basis_eval(fitter_->spec(), pt);
            for (Eigen::Index j = 0; j < nb; ++j)
                E(s, j) += quad_.weights[q] * inv_sqrt_pi * row[j];
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::MatrixXd fit = qr.solve(Eigen::MatrixXd::Identity(ns, ns)); // nb x ns
    Eigen::MatrixXd G = params_.beta * E * fit;
    // Stop at a loose relative tolerance: the guess should be consistent with
    // the policies without already sitting on the solver's fixed point.
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(u0.data(), ns) / (1.0 - params_.beta);
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd vn = u0 + G * v;
        const double rel = ((vn - v).cwiseQuotient(v.cwiseAbs().cwiseMax(1e-12)))
                               .cwiseAbs()
                               .maxCoeff();
        v = vn;
        if (rel < 1e-3) break;
    }
    return {v.data(), v.data() + ns};
}

std::vector<double> GrowthModel::initial_actions() const {
    // initial leisure z(1 - l_bar); consumption a fraction pi_c of output
    std::vector<double> a(n_states() * action_dim());
    const int D = action_dim();
    for (std::size_t s = 0; s < n_states(); ++s) {
        const double k = grid_[s][0], z = grid_[s][1];
        if (params_.elastic) {
            const double l = std::clamp(z * (1.0 - params_.l_bar), 1e-3, 1.0 - 1e-3);
            a[s * D] = l;
            a[s * D + 1] = params_.pi_c * production(k, z, l);
        } else {
            a[s * D] = params_.pi_c * production(k, z, 1.0);
        }
    }
    return a;
}

double GrowthModel::solve_l_envelope(double vk, double k, double z) const {
    // V_k(k,z) = [B(1-l)^-mu / ((1-a)Azk^a l^-a)] [1 - delta + Aaz k^(a-1) l^(1-a)]
    auto f = [&](double l) {
        const double mpl = prod_l(k, z, l);
        const double uc = params_.B() * std::pow(1.0 - l, -params_.mu) / mpl;
        return uc * (1.0 - params_.delta + prod_k(k, z, l)) - vk;
    };
    return detail::expanding_root(f, l_ss_, 1e-9, 1.0 - 1e-9, "envelope labor equation",
                                  /*best_effort=*/true);
}

double GrowthModel::k_from_l_endogenous(double l, double z, double wk) const {
    const double num = params_.B() * std::pow(1.0 - l, -params_.mu);
    return std::pow(num / (params_.beta * wk * z * (1.0 - params_.alpha) * params_.A()),
                    1.0 / params_.alpha) *
           l;
}

double GrowthModel::solve_l_endogenous(double k_next_target, double z, double wk) const {
    // budget at the endogenous point, with k(l) substituted from the labor FOC
    const double c = u_c_inv(params_.beta * wk);
    auto f = [&](double l) {
        const double k = k_from_l_endogenous(l, z, wk);
        const double prod = params_.B() * std::pow(1.0 - l, -params_.mu) * l /
                            (params_.beta * wk * (1.0 - params_.alpha));
        return (1.0 - params_.delta) * k + prod - c - k_next_target;
    };
    return detail::expanding_root(f, l_ss_, 1e-9, 1.0 - 1e-9, "endogenous-grid labor equation",
                                  /*best_effort=*/true);
}

double GrowthModel::solve_k_budget(double resources, double z) const {
    auto f = [&](double k) { return (1.0 - params_.delta) * k + production(k, z, 1.0) - resources; };
    return detail::expanding_root(f, k_ss_, 1e-12, 50.0 * k_ss_, "budget inversion for capital",
                                  /*best_effort=*/true);
}

std::shared_ptr<GrowthModel> make_growth_model(const GrowthParams& p, const GrowthGridConfig& g) {
    return std::make_shared<GrowthModel>(p, g);
}

} // namespace dynsolve
