#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "dynsolve/model.hpp"

using namespace dynsolve;

namespace {

// Minimal tabular model for exercising the model-level plumbing: reward
// r_j(a) = base - theta (a - peak)^2 summed over dims, transition stays at the
// same grid point.
class StubModel final : public Model {
  public:
    StubModel(int n_agents, int action_dim, int n_states, double beta, double theta = 2.0,
              double peak = 0.7, double base = 0.0)
        : n_agents_(n_agents), action_dim_(action_dim), beta_(beta), theta_(theta), peak_(peak),
          base_(base) {
        for (int s = 0; s < n_states; ++s) grid_.push_back({double(s)});
    }

    std::string name() const override { return "stub"; }
    int n_agents() const override { return n_agents_; }
    int action_dim() const override { return action_dim_; }
    int state_dim() const override { return 1; }
    double discount() const override { return beta_; }
    const std::vector<std::vector<double>>& grid() const override { return grid_; }

    std::shared_ptr<const ValueRepr> fit_values(std::span<const double> v) const override {
        struct Table final : ValueRepr {
            std::vector<double> v;
            std::size_t ns;
            double value(int agent, std::span<const double> state) const override {
                return v[agent * ns + std::size_t(state[0] + 0.5)];
            }
        };
        auto t = std::make_shared<Table>();
        t->v.assign(v.begin(), v.end());
        t->ns = grid_.size();
        return t;
    }

    double reward(int agent, int, std::span<const double> a) const override {
        double r = base_;
        for (int d = 0; d < action_dim_; ++d) {
            const double x = a[agent * action_dim_ + d] - peak_;
            r -= theta_ * x * x;
        }
        return r;
    }
    double reward_grad(int agent, int dim, int, std::span<const double> a) const override {
        return -2.0 * theta_ * (a[agent * action_dim_ + dim] - peak_);
    }
    double continuation(int agent, int s_idx, std::span<const double>,
                        const ValueRepr& v) const override {
        return v.value(agent, grid_[s_idx]);
    }
    double continuation_grad(int, int, int, std::span<const double>, const ValueRepr&) const override {
        return 0.0;
    }
    std::vector<double> best_response(int, int, std::span<const double>, const ValueRepr&,
                                      InnerSolver, double) const override {
        return std::vector<double>(action_dim_, peak_);
    }
    std::vector<double> initial_values() const override {
        return std::vector<double>(grid_.size() * n_agents_, 0.0);
    }
    std::vector<double> initial_actions() const override {
        return std::vector<double>(grid_.size() * n_agents_ * action_dim_, 0.0);
    }

  private:
    int n_agents_, action_dim_;
    double beta_, theta_, peak_, base_;
    std::vector<std::vector<double>> grid_;
};

} // namespace

TEST_CASE("boxed map branches") {
    // lower bound binding with negative gradient stays at the bound
    CHECK(boxed_map(-0.5, -2.0, 0.0, 0.0, 1.0) == 0.0);
    // interior passthrough
    CHECK(boxed_map(0.7, 0.4, 0.5, 0.0, 1.0) == doctest::Approx(0.7));
    // interior candidate beyond the box is projected
    CHECK(boxed_map(1.4, 1.8, 0.5, 0.0, 1.0) == doctest::Approx(1.0));
    // upper bound binding with positive gradient stays at the bound
    CHECK(boxed_map(1.3, 0.2, 1.0, 0.0, 1.0) == 1.0);
    CHECK_THROWS_AS((void)boxed_map(0.5, 0.0, 1.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("proposition 1: boxed-map fixed points match the complementarity conditions") {
    // f(x) = c - x on [0, 1], Phi(x) = x + lambda f(x)
    const double lambda = 0.5;
    for (double c : {-0.5, 0.5, 1.5}) {
        auto f = [&](double x) { return c - x; };
        auto phi_hat = [&](double x) { return boxed_map(x + lambda * f(x), f(x), x, 0.0, 1.0); };
        auto condition = [&](double x) {
            if (x == 0.0) return f(x) <= 0.0;
            if (x == 1.0) return f(x) >= 0.0;
            return std::abs(f(x)) < 1e-12;
        };
        int n_fixed = 0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            const bool fixed = std::abs(phi_hat(x) - x) < 1e-12;
            CHECK(fixed == condition(x));
            n_fixed += fixed;
        }
        CHECK(n_fixed == 1); // one solution in every regime
    }
}

TEST_CASE("proposition 2 premise: one-sided limits of the policy-gradient map") {
    // Phi_i - l = (x_i - l) + lambda f_i, so the limit from above with f <= 0
    // cannot exceed l (and symmetrically at the upper bound)
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lam(1e-8, 10.0), fneg(-5.0, 0.0), bound(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double l = bound(rng), lambda = lam(rng), f = fneg(rng);
        CHECK(l + lambda * f <= l);       // lim_{x->l+} Phi(x) <= l when f <= 0
        const double u = bound(rng), fp = -fneg(rng);
        CHECK(u + lambda * fp >= u);      // lim_{x->u-} Phi(x) >= u when f >= 0
    }
}

TEST_CASE("assemble and disassemble blocks") {
    SUBCASE("single agent, one action dim") {
        StubModel m(1, 1, 100, 0.9);
        std::vector<double> v(100), a(100);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1, 1);
        for (auto& t : v) t = u(rng);
        for (auto& t : a) t = u(rng);
        auto x = assemble_blocks(m, v, a);
        CHECK(x.n_blocks() == 2);
        CHECK(x.block(0).size() == 100);
        CHECK(x.block(1).size() == 100);
        std::vector<double> v2, a2;
        disassemble(m, x, v2, a2);
        CHECK(v2 == v);
        CHECK(a2 == a);
    }
    SUBCASE("three agents stack within a variable type") {
        StubModel m(3, 1, 50, 0.9);
        std::vector<double> v(150), a(150);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = 1000.0 + i;
        auto x = assemble_blocks(m, v, a);
        CHECK(x.n_blocks() == 2);
        CHECK(x.block(0).size() == 150);
        CHECK(x.block(1).size() == 150);
        std::vector<double> v2, a2;
        disassemble(m, x, v2, a2);
        CHECK(v2 == v);
        CHECK(a2 == a);
    }
    SUBCASE("round trip on random multi-dim actions") {
        StubModel m(2, 3, 7, 0.5);
        std::vector<double> v(14), a(7 * 2 * 3);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-5, 5);
        for (auto& t : v) t = u(rng);
        for (auto& t : a) t = u(rng);
        std::vector<double> v2, a2;
        disassemble(m, assemble_blocks(m, v, a), v2, a2);
        CHECK(v2 == v);
        CHECK(a2 == a);
    }
}

TEST_CASE("bellman_rhs: myopic limit and constant-reward fixed point") {
    SUBCASE("beta = 0 returns the reward at the candidate actions") {
        StubModel m(1, 1, 4, 0.0);
        std::vector<double> v(4, 123.0), a{0.1, 0.9, 0.7, 0.3};
        auto repr = m.fit_values(v);
        auto rhs = bellman_rhs(m, *repr, a);
        for (int s = 0; s < 4; ++s) CHECK(rhs[s] == doctest::Approx(m.reward(0, s, {&a[s], 1})));
    }
    SUBCASE("constant reward c has fixed point c/(1-beta)") {
        const double beta = 0.9, c = 2.0;
        StubModel m(1, 1, 5, beta, /*theta=*/0.0, /*peak=*/0.0, /*base=*/c);
        std::vector<double> v(5, c / (1.0 - beta)), a(5, 0.4);
        auto repr = m.fit_values(v);
        auto rhs = bellman_rhs(m, *repr, a);
        for (double r : rhs) CHECK(r == doctest::Approx(c / (1.0 - beta)));
    }
}

TEST_CASE("q_gradient: static quadratic case") {
    // beta = 0 with a quadratic reward: gradient is -2 theta (a - a*)
    const double theta = 2.0, peak = 0.7;
    StubModel m(2, 2, 3, 0.0, theta, peak);
    std::vector<double> v(6, 0.0);
    auto repr = m.fit_values(v);
    std::vector<double> a(3 * 2 * 2);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 2);
    for (auto& t : a) t = u(rng);
    auto g = q_gradient(m, *repr, a);
    const std::size_t ns = 3;
    for (std::size_t s = 0; s < ns; ++s)
        for (int j = 0; j < 2; ++j)
            for (int d = 0; d < 2; ++d)
                CHECK(g[(j * ns + s) * 2 + d] ==
                      doctest::Approx(-2.0 * theta * (a[(s * 2 + j) * 2 + d] - peak)).epsilon(1e-12));
}
