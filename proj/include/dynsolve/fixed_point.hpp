// Fixed-point iteration engine: simple damped iteration and the spectral
// (Barzilai-Borwein type) algorithm with per-variable-type step sizes.
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "dynsolve/block_vector.hpp"

namespace dynsolve {

enum class IterMode { simple, spectral };
enum class StepSizeScope { per_block, shared };
enum class NormKind { unit_free_sup, absolute_sup };
enum class TerminalStatus { converged, diverged, max_iter };

struct SpectralConfig {
    double lambda = 1e-7; // policy-gradient scale used when building VF-PGI maps
    double alpha0 = 1.0;  // step size of the first spectral step
    IterMode mode = IterMode::spectral;
    StepSizeScope step_size_scope = StepSizeScope::per_block;
    double tol_value = 1e-6;
    double tol_action = 1e-6;
    NormKind norm = NormKind::unit_free_sup;
    std::size_t max_iter = 100000;
    double divergence_threshold = 1e12;

    double tol_for(BlockKind k) const { return k == BlockKind::value ? tol_value : tol_action; }
    void validate() const; // throws std::invalid_argument
};

struct IterationRecord {
    std::vector<double> block_residual; // convergence norm of the change, per block
    std::vector<double> block_alpha;    // step size used, per block
};

struct IterationTrace {
    std::size_t n_iter = 0;
    bool converged = false;
    TerminalStatus status = TerminalStatus::max_iter;
    std::vector<IterationRecord> records; // capped at kMaxStoredRecords entries
    static constexpr std::size_t kMaxStoredRecords = 50000;
};

// alpha_S3 = ||s||_2 / ||y||_2; nullopt signals a stalled block (||y|| = 0),
// in which case the caller keeps the previous step size.
std::optional<double> spectral_step_size(std::span<const double> s, std::span<const double> y);

// Blockwise convergence test. unit_free_sup divides each element's change by
// |x_old|, falling back to the absolute difference where |x_old| < 1e-12.
bool converged(const BlockVector& x_new, const BlockVector& x_old, const SpectralConfig& cfg);

// Optional per-block box onto which the iterate is projected after each step
// (e.g. nonnegative investment, labor kept inside (0,1)).
struct BlockBounds {
    std::vector<double> lo, hi; // one entry per block
    static BlockBounds unbounded(std::size_t n_blocks);
};

using FixedPointMap = std::function<BlockVector(const BlockVector&)>;

struct IterateResult {
    BlockVector x;
    IterationTrace trace;
};

IterateResult iterate(const FixedPointMap& map, BlockVector x0, const SpectralConfig& cfg,
                      const BlockBounds* bounds = nullptr);

} // namespace dynsolve
