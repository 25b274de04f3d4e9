#include "dynsolve/algorithms.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dynsolve/models/growth.hpp"
#include "dynsolve/parallel.hpp"

namespace dynsolve {

std::string to_string(AlgorithmName n) {
    switch (n) {
    case AlgorithmName::vf_pgi: return "vf_pgi";
    case AlgorithmName::vf_pgi_star: return "vf_pgi_star";
    case AlgorithmName::vfi: return "vfi";
    case AlgorithmName::vfi_star: return "vfi_star";
    case AlgorithmName::ecm_vf: return "ecm_vf";
    case AlgorithmName::egm: return "egm";
    case AlgorithmName::ee: return "ee";
    }
    return "?";
}

std::optional<AlgorithmName> algorithm_from_string(const std::string& s) {
    for (auto n : {AlgorithmName::vf_pgi, AlgorithmName::vf_pgi_star, AlgorithmName::vfi,
                   AlgorithmName::vfi_star, AlgorithmName::ecm_vf, AlgorithmName::egm,
                   AlgorithmName::ee})
        if (to_string(n) == s) return n;
    return std::nullopt;
}

SpectralConfig default_config(const Model& m, AlgorithmName, bool spectral) {
    SpectralConfig cfg;
    cfg.mode = spectral ? IterMode::spectral : IterMode::simple;
    cfg.alpha0 = 1.0;
    const std::string nm = m.name();
    if (nm == "growth_elastic") {
        cfg.lambda = 1e-7;
        cfg.tol_value = cfg.tol_action = 1e-6;
        cfg.max_iter = spectral ? 100000 : 3000;
    } else if (nm == "growth_inelastic") {
        cfg.lambda = 1e-3;
        cfg.tol_value = cfg.tol_action = 1e-6;
        cfg.max_iter = spectral ? 100000 : 3000;
    } else if (nm == "invest_game") {
        cfg.lambda = 1e-3;
        cfg.tol_value = cfg.tol_action = 1e-10;
        cfg.max_iter = 100000;
    } else if (nm == "pakes_mcguire") {
        cfg.lambda = 1e-2;
        cfg.tol_value = cfg.tol_action = 1e-10;
        cfg.max_iter = 100000;
    }
    return cfg;
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

InitGuess default_init(const Model& m, const InitGuess* init) {
    if (init) {
        if (init->values.size() != m.n_states() * std::size_t(m.n_agents()) ||
            init->actions.size() != m.n_states() * std::size_t(m.n_agents()) * m.action_dim())
            throw std::invalid_argument("solve: init guess shapes do not match the model");
        return *init;
    }
    return {m.initial_values(), m.initial_actions()};
}

// Per-block iterate bounds: the value block is free; an action-dimension block
// gets the model's bounds when they are uniform across agents and states.
BlockBounds block_bounds_from_model(const Model& m) {
    const double inf = std::numeric_limits<double>::infinity();
    BlockBounds b = BlockBounds::unbounded(std::size_t(m.action_dim()) + 1);
    for (int d = 0; d < m.action_dim(); ++d) {
        auto first = m.action_bounds(0, d, 0);
        bool uniform = true;
        for (int j = 0; j < m.n_agents() && uniform; ++j)
            for (std::size_t s = 0; s < m.n_states() && uniform; ++s)
                uniform = m.action_bounds(j, d, int(s)) == first;
        if (uniform) {
            b.lo[1 + d] = first[0];
            b.hi[1 + d] = first[1];
        } else {
            b.lo[1 + d] = -inf;
            b.hi[1 + d] = inf;
        }
    }
    return b;
}

SolutionBundle finish(const ModelHandle& model, const AlgorithmSpec& spec, std::string algo,
                      IterateResult&& r, std::vector<double> values, std::vector<double> actions,
                      double seconds) {
    SolutionBundle out;
    out.model = model;
    out.algorithm = std::move(algo);
    out.values = std::move(values);
    out.actions = std::move(actions);
    if (r.trace.status != TerminalStatus::diverged) out.value_repr = model->fit_values(out.values);
    out.trace = std::move(r.trace);
    out.config = spec.cfg;
    out.wall_seconds = seconds;
    return out;
}

const GrowthModel& require_growth(const Model& m, const char* algo, bool elastic_only = false,
                                  bool inelastic_only = false) {
    const auto* g = dynamic_cast<const GrowthModel*>(&m);
    if (!g) throw std::invalid_argument(std::string(algo) + ": requires a growth model");
    if (elastic_only && !g->elastic())
        throw std::invalid_argument(std::string(algo) + ": requires the elastic-labor model");
    if (inelastic_only && g->elastic())
        throw std::invalid_argument(std::string(algo) + ": requires the inelastic-labor model");
    return *g;
}

} // namespace

SolutionBundle solve_vf_pgi(const ModelHandle& model, const AlgorithmSpec& spec,
                            const InitGuess* init) {
    Timer timer;
    const Model& m = *model;
    const auto guess = default_init(m, init);
    const int J = m.n_agents(), D = m.action_dim();
    const std::size_t ns = m.n_states();
    const bool boxed = m.has_finite_bounds();

    FixedPointMap map = [&m, J, D, ns, boxed, lambda = spec.cfg.lambda](const BlockVector& x) {
        std::vector<double> v, a;
        disassemble(m, x, v, a);
        auto repr = m.fit_values(v);
        auto phi_v = bellman_rhs(m, *repr, a);
        auto grad = q_gradient(m, *repr, a);
        std::vector<double> phi_a(a.size());
        parallel_for(ns, m.threads(), [&](std::size_t s) {
            for (int j = 0; j < J; ++j)
                for (int d = 0; d < D; ++d) {
                    const std::size_t i = (s * J + j) * D + d;
                    const double g = grad[(std::size_t(j) * ns + s) * D + d];
                    const double cand = a[i] + lambda * g;
                    if (boxed) {
                        auto bd = m.action_bounds(j, d, int(s));
                        phi_a[i] = boxed_map(cand, g, a[i], bd[0], bd[1]);
                    } else {
                        phi_a[i] = cand;
                    }
                }
        });
        return assemble_blocks(m, phi_v, phi_a);
    };

    BlockVector x0 = assemble_blocks(m, guess.values, guess.actions);
    BlockBounds bounds = block_bounds_from_model(m);
    auto r = iterate(map, std::move(x0), spec.cfg, boxed ? &bounds : nullptr);
    std::vector<double> v, a;
    disassemble(m, r.x, v, a);
    return finish(model, spec, "vf_pgi", std::move(r), std::move(v), std::move(a), timer.seconds());
}

SolutionBundle solve_vf_pgi_star(const ModelHandle& model, const AlgorithmSpec& spec,
                                 const InitGuess* init) {
    Timer timer;
    const auto& g = require_growth(*model, "vf_pgi_star", /*elastic_only=*/true);
    const auto guess = default_init(g, init);
    const std::size_t ns = g.n_states();

    // iterate on (V, l) only; c is recovered from l analytically
    std::vector<BlockSpec> layout{{"V", BlockKind::value, ns}, {"a1", BlockKind::action, ns}};
    BlockVector x0(layout);
    std::copy(guess.values.begin(), guess.values.end(), x0.block(0).begin());
    for (std::size_t s = 0; s < ns; ++s) x0.block(1)[s] = guess.actions[s * 2];

    FixedPointMap map = [&g, ns, lambda = spec.cfg.lambda, layout](const BlockVector& x) {
        BlockVector phi(layout);
        auto v = x.block(0), l = x.block(1);
        auto repr = g.fit_values({v.data(), v.size()});
        auto pv = phi.block(0), pl = phi.block(1);
        parallel_for(ns, g.threads(), [&](std::size_t s) {
            const double k = g.grid()[s][0], z = g.grid()[s][1];
            const double c = g.c_of_l(k, z, l[s]);
            const double kn = g.k_next(k, z, l[s], c);
            const double wk = g.w_k(*repr, kn, z);
            pv[s] = g.u(c, l[s]) + g.discount() * g.w_value(*repr, kn, z);
            pl[s] = l[s] + lambda * (g.u_l(l[s]) + g.discount() * wk * g.prod_l(k, z, l[s]));
        });
        return phi;
    };

    BlockBounds bounds = BlockBounds::unbounded(2);
    bounds.lo[1] = 1e-6;
    bounds.hi[1] = 1.0 - 1e-6;
    auto r = iterate(map, std::move(x0), spec.cfg, &bounds);

    std::vector<double> v(r.x.block(0).begin(), r.x.block(0).end());
    std::vector<double> a(ns * 2);
    for (std::size_t s = 0; s < ns; ++s) {
        const double l = r.x.block(1)[s];
        a[s * 2] = l;
        a[s * 2 + 1] = g.c_of_l(g.grid()[s][0], g.grid()[s][1], l);
    }
    return finish(model, spec, "vf_pgi_star", std::move(r), std::move(v), std::move(a),
                  timer.seconds());
}

SolutionBundle solve_vfi(const ModelHandle& model, const AlgorithmSpec& spec, const InitGuess* init) {
    Timer timer;
    const Model& m = *model;
    if (m.n_agents() != 1) throw std::invalid_argument("vfi: single-agent models only (use vfi_star)");
    const auto guess = default_init(m, init);
    const int D = m.action_dim();
    const std::size_t ns = m.n_states();

    std::vector<BlockSpec> layout{{"V", BlockKind::value, ns}};
    BlockVector x0(layout);
    std::copy(guess.values.begin(), guess.values.end(), x0.block(0).begin());

    std::vector<double> a_final = guess.actions;
    // cold-start actions keep the map a pure function of V
    const std::vector<double> a_start = m.initial_actions();

    FixedPointMap map = [&m, &a_start, D, ns, layout, inner = spec.inner,
                         tol = spec.inner_tol](const BlockVector& x) {
        BlockVector phi(layout);
        auto v = x.block(0);
        auto repr = m.fit_values({v.data(), v.size()});
        auto pv = phi.block(0);
        parallel_for(ns, m.threads(), [&](std::size_t s) {
            std::span<const double> a0{a_start.data() + s * D, std::size_t(D)};
            auto a_star = m.best_response(0, int(s), a0, *repr, inner, tol);
            pv[s] = m.reward(0, int(s), a_star) + m.discount() * m.continuation(0, int(s), a_star, *repr);
        });
        return phi;
    };

    auto r = iterate(map, std::move(x0), spec.cfg);
    std::vector<double> v(r.x.block(0).begin(), r.x.block(0).end());
    // re-solve actions at the returned V so the reported policy matches it
    if (r.trace.status != TerminalStatus::diverged) {
        auto repr = m.fit_values(v);
        parallel_for(ns, m.threads(), [&](std::size_t s) {
            std::span<const double> a0{a_start.data() + s * D, std::size_t(D)};
            auto a_star = m.best_response(0, int(s), a0, *repr, spec.inner, spec.inner_tol);
            std::copy(a_star.begin(), a_star.end(), a_final.begin() + s * D);
        });
    }
    return finish(model, spec, "vfi", std::move(r), std::move(v), std::move(a_final), timer.seconds());
}

SolutionBundle solve_vfi_star(const ModelHandle& model, const AlgorithmSpec& spec,
                              const InitGuess* init) {
    Timer timer;
    const Model& m = *model;
    const auto guess = default_init(m, init);
    const int J = m.n_agents(), D = m.action_dim();
    const std::size_t ns = m.n_states();

    FixedPointMap map = [&m, J, D, ns, inner = spec.inner, tol = spec.inner_tol,
                         fresh = spec.vfi_star_fresh_actions](const BlockVector& x) {
        std::vector<double> v, a;
        disassemble(m, x, v, a);
        auto repr = m.fit_values(v);
        std::vector<double> a_star(a.size());
        parallel_for(ns, m.threads(), [&](std::size_t s) {
            std::span<const double> prof{a.data() + s * J * D, std::size_t(J) * D};
            for (int j = 0; j < J; ++j) {
                auto best = m.best_response(j, int(s), prof, *repr, inner, tol);
                for (int d = 0; d < D; ++d) a_star[(s * J + j) * D + d] = best[d];
            }
        });
        auto phi_v = bellman_rhs(m, *repr, fresh ? a_star : a);
        return assemble_blocks(m, phi_v, a_star);
    };

    BlockVector x0 = assemble_blocks(m, guess.values, guess.actions);
    auto r = iterate(map, std::move(x0), spec.cfg);
    std::vector<double> v, a;
    disassemble(m, r.x, v, a);
    return finish(model, spec, "vfi_star", std::move(r), std::move(v), std::move(a), timer.seconds());
}

SolutionBundle solve_ecm_growth(const ModelHandle& model, const AlgorithmSpec& spec,
                                const InitGuess* init) {
    Timer timer;
    const auto& g = require_growth(*model, "ecm_vf");
    const auto guess = default_init(g, init);
    const std::size_t ns = g.n_states();
    const int D = g.action_dim();

    std::vector<BlockSpec> layout{{"V", BlockKind::value, ns}};
    BlockVector x0(layout);
    std::copy(guess.values.begin(), guess.values.end(), x0.block(0).begin());

    std::vector<double> a_final = guess.actions;
    auto ecm_policy = [&g](const ValueRepr& repr, std::size_t s, double& l, double& c) {
        const double k = g.grid()[s][0], z = g.grid()[s][1];
        const double vk = repr.partial(0, g.grid()[s], 0);
        if (g.elastic()) {
            l = g.solve_l_envelope(vk, k, z);
            c = g.c_of_l(k, z, l);
        } else {
            l = 1.0;
            c = g.u_c_inv(vk / (1.0 - g.params().delta + g.prod_k(k, z, 1.0)));
        }
    };

    FixedPointMap map = [&g, &ecm_policy, ns, layout](const BlockVector& x) {
        BlockVector phi(layout);
        auto v = x.block(0);
        auto repr = g.fit_values({v.data(), v.size()});
        auto pv = phi.block(0);
        parallel_for(ns, g.threads(), [&](std::size_t s) {
            const double k = g.grid()[s][0], z = g.grid()[s][1];
            double l, c;
            ecm_policy(*repr, s, l, c);
            pv[s] = g.u(c, l) + g.discount() * g.w_value(*repr, g.k_next(k, z, l, c), z);
        });
        return phi;
    };

    auto r = iterate(map, std::move(x0), spec.cfg);
    std::vector<double> v(r.x.block(0).begin(), r.x.block(0).end());
    if (r.trace.status != TerminalStatus::diverged) {
        auto repr = g.fit_values(v);
        for (std::size_t s = 0; s < ns; ++s) {
            double l, c;
            ecm_policy(*repr, s, l, c);
            if (g.elastic()) {
                a_final[s * D] = l;
                a_final[s * D + 1] = c;
            } else {
                a_final[s * D] = c;
            }
        }
    }
    return finish(model, spec, "ecm_vf", std::move(r), std::move(v), std::move(a_final),
                  timer.seconds());
}

SolutionBundle solve_egm_growth(const ModelHandle& model, const AlgorithmSpec& spec,
                                const InitGuess* init) {
    Timer timer;
    const auto& g = require_growth(*model, "egm");
    const auto guess = default_init(g, init);
    const std::size_t ns = g.n_states();
    const int D = g.action_dim();

    std::vector<BlockSpec> layout{{"V", BlockKind::value, ns}};
    BlockVector x0(layout);
    std::copy(guess.values.begin(), guess.values.end(), x0.block(0).begin());

    // The fixed grid is read as (k', z). Each step recovers the endogenous
    // current-capital points, updates V there, refits, and evaluates the new
    // interpolant back on the fixed grid so the iterate keeps one layout.
    FixedPointMap map = [&g, ns, layout](const BlockVector& x) {
        BlockVector phi(layout);
        auto v = x.block(0);
        auto repr = g.fit_values({v.data(), v.size()});
        std::vector<std::vector<double>> endog(ns);
        std::vector<double> v_endog(ns);
        parallel_for(ns, g.threads(), [&](std::size_t s) {
            const double kn = g.grid()[s][0], z = g.grid()[s][1];
            const double w = g.w_value(*repr, kn, z);
            const double wk = g.w_k(*repr, kn, z);
            double k, l, c;
            c = g.u_c_inv(g.discount() * wk);
            if (g.elastic()) {
                l = g.solve_l_endogenous(kn, z, wk);
                k = g.k_from_l_endogenous(l, z, wk);
            } else {
                l = 1.0;
                k = g.solve_k_budget(kn + c, z);
            }
            endog[s] = {k, z};
            v_endog[s] = g.u(c, l) + g.discount() * w;
        });
        LeastSquaresFitter refit(g.fitter().spec(), endog, "egm endogenous grid");
        FittedFunction vt = refit.fit(v_endog);
        auto pv = phi.block(0);
        for (std::size_t s = 0; s < ns; ++s) pv[s] = vt(g.grid()[s]);
        return phi;
    };

    auto r = iterate(map, std::move(x0), spec.cfg);
    std::vector<double> v(r.x.block(0).begin(), r.x.block(0).end());
    // policies on the fixed grid from the converged value function
    std::vector<double> a_final = guess.actions;
    if (r.trace.status != TerminalStatus::diverged) {
        auto repr = g.fit_values(v);
        parallel_for(ns, g.threads(), [&](std::size_t s) {
            std::span<const double> a0{a_final.data() + s * D, std::size_t(D)};
            auto a_star = g.best_response(0, int(s), a0, *repr, InnerSolver::newton, spec.inner_tol);
            for (int d = 0; d < D; ++d) a_final[s * D + d] = a_star[d];
        });
    }
    return finish(model, spec, "egm", std::move(r), std::move(v), std::move(a_final), timer.seconds());
}

SolutionBundle solve_ee_growth(const ModelHandle& model, const AlgorithmSpec& spec,
                               const InitGuess* init) {
    Timer timer;
    const auto& g = require_growth(*model, "ee", false, /*inelastic_only=*/true);
    const auto guess = default_init(g, init);
    const std::size_t ns = g.n_states();

    std::vector<BlockSpec> layout{{"a1", BlockKind::action, ns}};
    BlockVector x0(layout);
    std::copy(guess.actions.begin(), guess.actions.end(), x0.block(0).begin());

    // iterate on the consumption policy through the Euler equation
    FixedPointMap map = [&g, ns, layout](const BlockVector& x) {
        BlockVector phi(layout);
        auto c = x.block(0);
        FittedFunction chat = g.fitter().fit({c.data(), c.size()});
        auto pc = phi.block(0);
        parallel_for(ns, g.threads(), [&](std::size_t s) {
            const double k = g.grid()[s][0], z = g.grid()[s][1];
            const double kn = g.k_next(k, z, 1.0, c[s]);
            const double rhs = ar1_expectation(
                [&](double zn) {
                    const double pt[2] = {kn, zn};
                    const double cn = std::max(chat(pt), 1e-12);
                    return g.u_c(cn) * (1.0 - g.params().delta + g.prod_k(kn, zn, 1.0));
                },
                z, g.shock(), g.quad());
            pc[s] = g.u_c_inv(g.discount() * rhs);
        });
        return phi;
    };

    auto r = iterate(map, std::move(x0), spec.cfg);
    std::vector<double> a(r.x.block(0).begin(), r.x.block(0).end());

    // recover V by policy evaluation (spectral-accelerated linear fixed point)
    std::vector<double> v = guess.values;
    if (r.trace.status != TerminalStatus::diverged) {
        std::vector<BlockSpec> vlayout{{"V", BlockKind::value, ns}};
        BlockVector v0(vlayout);
        std::copy(v.begin(), v.end(), v0.block(0).begin());
        FixedPointMap eval = [&g, &a, ns, vlayout](const BlockVector& x) {
            BlockVector phi(vlayout);
            auto vv = x.block(0);
            auto repr = g.fit_values({vv.data(), vv.size()});
            auto pv = phi.block(0);
            parallel_for(ns, g.threads(), [&](std::size_t s) {
                const double k = g.grid()[s][0], z = g.grid()[s][1];
                pv[s] = g.u(a[s], 1.0) + g.discount() * g.w_value(*repr, g.k_next(k, z, 1.0, a[s]), z);
            });
            return phi;
        };
        SpectralConfig pe_cfg = spec.cfg;
        pe_cfg.mode = IterMode::spectral;
        pe_cfg.tol_value = std::min(spec.cfg.tol_value, 1e-9);
        pe_cfg.max_iter = 100000;
        auto pr = iterate(eval, std::move(v0), pe_cfg);
        v.assign(pr.x.block(0).begin(), pr.x.block(0).end());
    }
    return finish(model, spec, "ee", std::move(r), std::move(v), std::move(a), timer.seconds());
}

SolutionBundle solve(const ModelHandle& model, const AlgorithmSpec& spec, const InitGuess* init) {
    switch (spec.name) {
    case AlgorithmName::vf_pgi: return solve_vf_pgi(model, spec, init);
    case AlgorithmName::vf_pgi_star: return solve_vf_pgi_star(model, spec, init);
    case AlgorithmName::vfi: return solve_vfi(model, spec, init);
    case AlgorithmName::vfi_star: return solve_vfi_star(model, spec, init);
    case AlgorithmName::ecm_vf: return solve_ecm_growth(model, spec, init);
    case AlgorithmName::egm: return solve_egm_growth(model, spec, init);
    case AlgorithmName::ee: return solve_ee_growth(model, spec, init);
    }
    throw std::invalid_argument("solve: unknown algorithm");
}

} // namespace dynsolve
