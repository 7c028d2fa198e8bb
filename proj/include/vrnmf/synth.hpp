#pragma once

#include <cstdint>
#include <optional>

#include "vrnmf/matrix_core.hpp"

namespace vrnmf {

/// Synthetic mixture: X = [W_true H_true + N]_+ with Dirichlet abundances
/// capped row-wise by a purity vector p (max_j H(i, j) <= p_i).
struct SyntheticSpec {
    DenseMatrix w_true;
    Eigen::Index n = 1000;
    Vector purity;  ///< length r, 1/r < p_i <= 1
    double dirichlet_alpha = 0.1;
    double noise_sigma = 0.0;
    /// Interpret noise_sigma as a variance instead of a standard deviation.
    bool noise_is_variance = false;
    std::uint64_t seed = 0;
    /// Total Dirichlet draws allowed; unset means 1000 * n.
    std::optional<std::int64_t> max_resamples;

    /// ContractError for malformed fields, InfeasibleError when some
    /// p_i <= 1/r (no Dirichlet column can satisfy it).
    void validate() const;
};

struct SyntheticData {
    DenseMatrix x;
    DenseMatrix h_true;
    std::int64_t draws = 0;
    double acceptance_rate = 1.0;
};

SyntheticData synth_generate(const SyntheticSpec& spec);

/// Dirichlet(alpha, ..., alpha) sample of length r by normalized Gamma(alpha, 1) draws.
template <class Engine>
Vector sample_dirichlet(Eigen::Index r, double alpha, Engine& engine);

}  // namespace vrnmf

#include <random>

namespace vrnmf {

template <class Engine>
Vector sample_dirichlet(Eigen::Index r, double alpha, Engine& engine) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    Vector v(r);
    double total = 0.0;
    do {
        for (Eigen::Index i = 0; i < r; ++i) {
            v[i] = gamma(engine);
        }
        total = v.sum();
    } while (!(total > 0.0));
    return v / total;
}

}  // namespace vrnmf
