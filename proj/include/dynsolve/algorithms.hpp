// Solver catalogue: VF-PGI(+star), VFI, VFI*, and the growth-model ECM / EGM /
// EE baselines, each with optional spectral acceleration.
#pragma once

#include <optional>
#include <string>

#include "dynsolve/model.hpp"

namespace dynsolve {

enum class AlgorithmName { vf_pgi, vf_pgi_star, vfi, vfi_star, ecm_vf, egm, ee };

std::string to_string(AlgorithmName);
std::optional<AlgorithmName> algorithm_from_string(const std::string&);

struct AlgorithmSpec {
    AlgorithmName name = AlgorithmName::vf_pgi;
    bool spectral = true;
    InnerSolver inner = InnerSolver::newton;
    SpectralConfig cfg;
    double inner_tol = 1e-10;
    // VFI* as written updates V with the iteration's incoming actions; the
    // original formulation uses the freshly solved ones. Both are exposed.
    bool vfi_star_fresh_actions = false;
};

struct InitGuess {
    std::vector<double> values;  // [agent * n_states + s]
    std::vector<double> actions; // state-major
};

// Model-appropriate tolerances, caps and learning rates.
SpectralConfig default_config(const Model&, AlgorithmName, bool spectral);

SolutionBundle solve(const ModelHandle&, const AlgorithmSpec&,
                     const InitGuess* init = nullptr);

SolutionBundle solve_vf_pgi(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);
SolutionBundle solve_vf_pgi_star(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);
SolutionBundle solve_vfi(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);
SolutionBundle solve_vfi_star(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);
SolutionBundle solve_ecm_growth(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);
SolutionBundle solve_egm_growth(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);
SolutionBundle solve_ee_growth(const ModelHandle&, const AlgorithmSpec&, const InitGuess* = nullptr);

} // namespace dynsolve
