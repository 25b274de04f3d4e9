#include "dynsolve/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynsolve {

void SpectralConfig::validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("SpectralConfig: lambda must be > 0");
    if (!(alpha0 > 0)) throw std::invalid_argument("SpectralConfig: alpha0 must be > 0");
    if (!(tol_value > 0) || !(tol_action > 0))
        throw std::invalid_argument("SpectralConfig: tolerances must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SpectralConfig: max_iter must be >= 1");
    if (!(divergence_threshold > 0))
        throw std::invalid_argument("SpectralConfig: divergence_threshold must be > 0");
}

std::optional<double> spectral_step_size(std::span<const double> s, std::span<const double> y) {
    if (s.size() != y.size())
        throw std::invalid_argument("spectral_step_size: s and y lengths differ");
    const double ny = l2_norm(y);
    if (ny == 0.0) return std::nullopt; // stalled block
    return l2_norm(s) / ny;
}

namespace {

double change_norm(std::span<const double> x_new, std::span<const double> x_old, NormKind norm) {
    double m = 0.0;
    for (std::size_t i = 0; i < x_new.size(); ++i) {
        double d = std::abs(x_new[i] - x_old[i]);
        if (norm == NormKind::unit_free_sup && std::abs(x_old[i]) >= 1e-12) d /= std::abs(x_old[i]);
        m = std::max(m, d);
    }
    return m;
}

} // namespace

bool converged(const BlockVector& x_new, const BlockVector& x_old, const SpectralConfig& cfg) {
    if (!x_new.same_layout(x_old)) throw std::invalid_argument("converged: block layout mismatch");
    for (std::size_t b = 0; b < x_new.n_blocks(); ++b) {
        double r = change_norm(x_new.block(b), x_old.block(b), cfg.norm);
        if (!(r <= cfg.tol_for(x_new.spec(b).kind))) return false;
    }
    return true;
}

BlockBounds BlockBounds::unbounded(std::size_t n_blocks) {
    const double inf = std::numeric_limits<double>::infinity();
    return {std::vector<double>(n_blocks, -inf), std::vector<double>(n_blocks, inf)};
}

IterateResult iterate(const FixedPointMap& map, BlockVector x0, const SpectralConfig& cfg,
                      const BlockBounds* bounds) {
    cfg.validate();
    const std::size_t nb = x0.n_blocks();
    if (bounds && (bounds->lo.size() != nb || bounds->hi.size() != nb))
        throw std::invalid_argument("iterate: bounds size must match block count");

    IterateResult out;
    IterationTrace& trace = out.trace;
    BlockVector x = std::move(x0);
    BlockVector x_prev = x, f_prev = x; // f_prev valid from n >= 1
    std::vector<double> alpha(nb, cfg.mode == IterMode::simple ? 1.0 : cfg.alpha0);

    for (std::size_t n = 0; n < cfg.max_iter; ++n) {
        BlockVector phi = map(x);
        if (!phi.same_layout(x)) throw std::runtime_error("iterate: map changed block layout");

        // F = Phi(x) - x
        BlockVector f = phi;
        {
            auto fd = f.flat();
            auto xd = x.flat();
            for (std::size_t i = 0; i < fd.size(); ++i) fd[i] -= xd[i];
        }

        if (cfg.mode == IterMode::spectral && n >= 1) {
            if (cfg.step_size_scope == StepSizeScope::shared) {
                std::vector<double> s(x.size()), y(x.size());
                auto xd = x.flat(); auto xp = x_prev.flat();
                auto fd = f.flat(); auto fp = f_prev.flat();
                for (std::size_t i = 0; i < s.size(); ++i) {
                    s[i] = xd[i] - xp[i];
                    y[i] = fd[i] - fp[i];
                }
                auto a = spectral_step_size(s, y);
                if (a) std::fill(alpha.begin(), alpha.end(), *a);
            } else {
                for (std::size_t b = 0; b < nb; ++b) {
                    auto xb = x.block(b); auto xpb = x_prev.block(b);
                    auto fb = f.block(b); auto fpb = f_prev.block(b);
                    std::vector<double> s(xb.size()), y(xb.size());
                    for (std::size_t i = 0; i < s.size(); ++i) {
                        s[i] = xb[i] - xpb[i];
                        y[i] = fb[i] - fpb[i];
                    }
                    auto a = spectral_step_size(s, y);
                    if (a) alpha[b] = *a;
                }
            }
        }

        // x_next = x + alpha .* F, projected onto bounds where given
        BlockVector x_next = x;
        for (std::size_t b = 0; b < nb; ++b) {
            auto xn = x_next.block(b);
            auto fb = f.block(b);
            const double lo = bounds ? bounds->lo[b] : -std::numeric_limits<double>::infinity();
            const double hi = bounds ? bounds->hi[b] : std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < xn.size(); ++i) {
                double v = xn[i] + alpha[b] * fb[i];
                if (v < lo) v = lo;
                if (v > hi) v = hi;
                xn[i] = v;
            }
        }

        if (trace.records.size() < IterationTrace::kMaxStoredRecords) {
            IterationRecord rec;
            rec.block_alpha = alpha;
            rec.block_residual.resize(nb);
            for (std::size_t b = 0; b < nb; ++b)
                rec.block_residual[b] = change_norm(x_next.block(b), x.block(b), cfg.norm);
            trace.records.push_back(std::move(rec));
        }
        trace.n_iter = n + 1;

        if (!phi.all_finite() || !x_next.all_finite() ||
            x_next.sup_norm() > cfg.divergence_threshold) {
            trace.status = TerminalStatus::diverged;
            out.x = std::move(x_next);
            return out;
        }
        if (converged(x_next, x, cfg)) {
            trace.status = TerminalStatus::converged;
            trace.converged = true;
            out.x = std::move(x_next);
            return out;
        }

        x_prev = std::move(x);
        f_prev = std::move(f);
        x = std::move(x_next);
    }

    trace.status = TerminalStatus::max_iter;
    out.x = std::move(x);
    return out;
}

} // namespace dynsolve
