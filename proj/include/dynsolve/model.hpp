// Abstract dynamic-model contract consumed by all solvers, plus the
// box-constraint fixed-point map used for bounded actions.
#pragma once

#include <array>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dynsolve/block_vector.hpp"
#include "dynsolve/fixed_point.hpp"

namespace dynsolve {

// Evaluable per-agent value representation built from grid values
// (polynomial interpolant for continuous-state models, the raw table for
// discrete-state ones). Immutable once built.
class ValueRepr {
  public:
    virtual ~ValueRepr() = default;
    virtual double value(int agent, std::span<const double> state) const = 0;
    virtual double partial(int agent, std::span<const double> state, int dim) const;
    virtual double second_partial(int agent, std::span<const double> state, int dim) const;
};

enum class InnerSolver { newton, bounded_scalar, analytic };

// Action tables are flat, state-major: actions[(s * n_agents + j) * D + d],
// so the profile at one grid point is contiguous. Callbacks taking `actions`
// receive just that per-state profile, indexed [j * D + d].
class Model {
  public:
    virtual ~Model() = default;

    virtual std::string name() const = 0;
    virtual int n_agents() const = 0;
    virtual int action_dim() const = 0;
    virtual int state_dim() const = 0;
    virtual double discount() const = 0;
    virtual const std::vector<std::vector<double>>& grid() const = 0;
    std::size_t n_states() const { return grid().size(); }

    // v laid out [agent * n_states + s]
    virtual std::shared_ptr<const ValueRepr> fit_values(std::span<const double> v) const = 0;

    virtual double reward(int agent, int s_idx, std::span<const double> actions) const = 0;
    virtual double reward_grad(int agent, int dim, int s_idx, std::span<const double> actions) const = 0;
    // W_j(a, s; Vbar) = E[Vbar_j(s') | s, a] and its action derivative
    virtual double continuation(int agent, int s_idx, std::span<const double> actions,
                                const ValueRepr& v) const = 0;
    virtual double continuation_grad(int agent, int dim, int s_idx, std::span<const double> actions,
                                     const ValueRepr& v) const = 0;

    virtual std::array<double, 2> action_bounds(int agent, int dim, int s_idx) const;

    // Inner optimization for VFI-type solvers: the agent's optimal action at
    // s_idx holding rivals' actions fixed. Must not depend on hidden state.
    virtual std::vector<double> best_response(int agent, int s_idx, std::span<const double> actions,
                                              const ValueRepr& v, InnerSolver solver,
                                              double tol) const = 0;

    // Initial guesses on the grid
    virtual std::vector<double> initial_values() const = 0;  // [agent * n_states + s]
    virtual std::vector<double> initial_actions() const = 0; // state-major, see above

    double q_value(int agent, int s_idx, std::span<const double> actions, const ValueRepr& v) const;
    double q_grad(int agent, int dim, int s_idx, std::span<const double> actions,
                  const ValueRepr& v) const;
    bool has_finite_bounds() const;
    int threads() const { return threads_; }

  protected:
    int threads_ = 1;
};

using ModelHandle = std::shared_ptr<const Model>;

// Phi_V(V,a) over every (agent, grid point), evaluated at the candidate a.
std::vector<double> bellman_rhs(const Model&, const ValueRepr&, std::span<const double> actions);
// dQ_j/da_j over every (agent, grid point, dim), rivals and V held fixed.
std::vector<double> q_gradient(const Model&, const ValueRepr&, std::span<const double> actions);

// Box-constraint fixed-point map: l if f <= 0 at the lower bound, u if f >= 0
// at the upper bound, otherwise Phi projected onto [l, u].
double boxed_map(double phi_value, double f_value, double x, double lo, double hi);

BlockVector assemble_blocks(const Model&, std::span<const double> values,
                            std::span<const double> actions);
void disassemble(const Model&, const BlockVector& x, std::vector<double>& values,
                 std::vector<double>& actions);

struct SolutionBundle {
    ModelHandle model;
    std::string algorithm;
    std::vector<double> values;  // [agent * n_states + s]
    std::vector<double> actions; // state-major, [(s * n_agents + j) * D + d]
    std::shared_ptr<const ValueRepr> value_repr;
    IterationTrace trace;
    SpectralConfig config;
    double wall_seconds = 0.0;
};

} // namespace dynsolve
