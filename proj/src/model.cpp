#include "dynsolve/model.hpp"

#include <cmath>
#include <stdexcept>

#include "dynsolve/parallel.hpp"

namespace dynsolve {

double ValueRepr::partial(int, std::span<const double>, int) const {
    throw std::logic_error("ValueRepr: partial not available for this representation");
}

double ValueRepr::second_partial(int, std::span<const double>, int) const {
    throw std::logic_error("ValueRepr: second_partial not available for this representation");
}

std::array<double, 2> Model::action_bounds(int, int, int) const {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
}

double Model::q_value(int agent, int s_idx, std::span<const double> actions,
                      const ValueRepr& v) const {
    return reward(agent, s_idx, actions) + discount() * continuation(agent, s_idx, actions, v);
}

double Model::q_grad(int agent, int dim, int s_idx, std::span<const double> actions,
                     const ValueRepr& v) const {
    return reward_grad(agent, dim, s_idx, actions) +
           discount() * continuation_grad(agent, dim, s_idx, actions, v);
}

bool Model::has_finite_bounds() const {
    for (int j = 0; j < n_agents(); ++j)
        for (int d = 0; d < action_dim(); ++d) {
            auto b = action_bounds(j, d, 0);
            if (std::isfinite(b[0]) || std::isfinite(b[1])) return true;
        }
    return false;
}

std::vector<double> bellman_rhs(const Model& m, const ValueRepr& v, std::span<const double> actions) {
    const std::size_t ns = m.n_states();
    const int J = m.n_agents(), D = m.action_dim();
    std::vector<double> out(std::size_t(J) * ns);
    parallel_for(ns, m.threads(), [&](std::size_t s) {
        std::span<const double> a_s = actions.subspan(s * J * D, std::size_t(J) * D);
        for (int j = 0; j < J; ++j)
            out[std::size_t(j) * ns + s] =
                m.reward(j, int(s), a_s) + m.discount() * m.continuation(j, int(s), a_s, v);
    });
    return out;
}

std::vector<double> q_gradient(const Model& m, const ValueRepr& v, std::span<const double> actions) {
    const std::size_t ns = m.n_states();
    const int J = m.n_agents(), D = m.action_dim();
    std::vector<double> out(std::size_t(J) * ns * D);
    parallel_for(ns, m.threads(), [&](std::size_t s) {
        std::span<const double> a_s = actions.subspan(s * J * D, std::size_t(J) * D);
        for (int j = 0; j < J; ++j)
            for (int d = 0; d < D; ++d)
                out[(std::size_t(j) * ns + s) * D + d] = m.q_grad(j, d, int(s), a_s, v);
    });
    return out;
}

double boxed_map(double phi_value, double f_value, double x, double lo, double hi) {
    if (!(lo <= x && x <= hi)) throw std::invalid_argument("boxed_map: x outside [lo, hi]");
    if (f_value <= 0.0 && x == lo) return lo;
    if (f_value >= 0.0 && x == hi) return hi;
    return std::clamp(phi_value, lo, hi);
}

// Blocks are grouped per variable type: one value block stacked over agents
// and grid, then one block per action dimension stacked the same way.
BlockVector assemble_blocks(const Model& m, std::span<const double> values,
                            std::span<const double> actions) {
    const std::size_t ns = m.n_states();
    const int J = m.n_agents(), D = m.action_dim();
    if (values.size() != std::size_t(J) * ns || actions.size() != std::size_t(J) * ns * D)
        throw std::invalid_argument("assemble_blocks: size mismatch");

    std::vector<BlockSpec> layout;
    layout.push_back({"V", BlockKind::value, std::size_t(J) * ns});
    for (int d = 0; d < D; ++d)
        layout.push_back({"a" + std::to_string(d + 1), BlockKind::action, std::size_t(J) * ns});

    BlockVector x(std::move(layout));
    auto vb = x.block(0);
    std::copy(values.begin(), values.end(), vb.begin());
    for (int d = 0; d < D; ++d) {
        auto ab = x.block(1 + d);
        for (int j = 0; j < J; ++j)
            for (std::size_t s = 0; s < ns; ++s)
                ab[std::size_t(j) * ns + s] = actions[(s * J + j) * D + d];
    }
    return x;
}

void disassemble(const Model& m, const BlockVector& x, std::vector<double>& values,
                 std::vector<double>& actions) {
    const std::size_t ns = m.n_states();
    const int J = m.n_agents(), D = m.action_dim();
    if (x.n_blocks() != std::size_t(D) + 1 || x.block(0).size() != std::size_t(J) * ns)
        throw std::invalid_argument("disassemble: layout mismatch");

    auto vb = x.block(0);
    values.assign(vb.begin(), vb.end());
    actions.assign(std::size_t(J) * ns * D, 0.0);
    for (int d = 0; d < D; ++d) {
        auto ab = x.block(1 + d);
        if (ab.size() != std::size_t(J) * ns) throw std::invalid_argument("disassemble: layout mismatch");
        for (int j = 0; j < J; ++j)
            for (std::size_t s = 0; s < ns; ++s)
                actions[(s * J + j) * D + d] = ab[std::size_t(j) * ns + s];
    }
}

} // namespace dynsolve
