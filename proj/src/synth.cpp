#include "vrnmf/synth.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "vrnmf/rng.hpp"

namespace vrnmf {

void SyntheticSpec::validate() const {
    const Eigen::Index r = w_true.cols();
    if (w_true.rows() < 1 || r < 1 || n < 1) {
        throw ContractError("synth: W_true must be nonempty and n >= 1");
    }
    require_finite(w_true, "synth W_true");
    if (w_true.minCoeff() < 0.0) {
        throw ContractError("synth: W_true must be nonnegative");
    }
    if (purity.size() != r) {
        throw ContractError("synth: purity has " + std::to_string(purity.size()) + " entries, W_true has " +
                            std::to_string(r) + " columns");
    }
    if (!(dirichlet_alpha > 0.0) || !std::isfinite(dirichlet_alpha)) {
        throw ContractError("synth: Dirichlet parameter must be positive");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ContractError("synth: noise level must be nonnegative");
    }
    if (max_resamples && *max_resamples < n) {
        throw ContractError("synth: max_resamples must be at least n");
    }
    for (Eigen::Index i = 0; i < r; ++i) {
        const double p = purity[i];
        if (!std::isfinite(p) || p > 1.0) {
            throw ContractError("synth: purity entries must lie in (0, 1]");
        }
        if (!(p > 1.0 / static_cast<double>(r))) {
            std::ostringstream msg;
            msg << "synth: purity p_" << i << " = " << p << " <= 1/r = " << 1.0 / static_cast<double>(r)
                << "; every Dirichlet column has a coordinate >= 1/r, acceptance rate is 0";
            throw InfeasibleError(msg.str());
        }
    }
}

SyntheticData synth_generate(const SyntheticSpec& spec) {
    spec.validate();
    const Eigen::Index r = spec.w_true.cols();
    const Eigen::Index n = spec.n;
    const bool capped = (spec.purity.array() < 1.0).any();
    const std::int64_t budget = spec.max_resamples.value_or(1000 * static_cast<std::int64_t>(n));

    Rng rng(spec.seed);
    Rng abundance_rng = rng.split(0);
    Rng noise_rng = rng.split(1);

    SyntheticData data;
    data.h_true.resize(r, n);
    Eigen::Index accepted = 0;
    std::int64_t draws = 0;
    while (accepted < n) {
        if (draws >= budget) {
            std::ostringstream msg;
            msg << "synth: accepted " << accepted << " of " << n << " columns after " << draws
                << " draws (acceptance rate " << static_cast<double>(accepted) / static_cast<double>(draws)
                << "); purity constraints are too tight";
            throw InfeasibleError(msg.str());
        }
        const Vector column = sample_dirichlet(r, spec.dirichlet_alpha, abundance_rng.engine());
        ++draws;
        if (capped && (column.array() > spec.purity.array()).any()) {
            continue;
        }
        data.h_true.col(accepted++) = column;
    }
    data.draws = draws;
    data.acceptance_rate = static_cast<double>(n) / static_cast<double>(draws);

    data.x = spec.w_true * data.h_true;
    if (spec.noise_sigma > 0.0) {
        const double stddev = spec.noise_is_variance ? std::sqrt(spec.noise_sigma) : spec.noise_sigma;
        std::normal_distribution<double> normal(0.0, stddev);
        for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
            for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
                data.x(i, j) += normal(noise_rng.engine());
            }
        }
        data.x = data.x.cwiseMax(0.0);
    }
    return data;
}

}  // namespace vrnmf
