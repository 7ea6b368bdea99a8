#include "raceline/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "raceline/errors.hpp"

namespace raceline {

void EnvParams::validate() const {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("EnvParams: kappa must be positive");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("EnvParams: p must be in [0, 1]");
    }
}

PsiLadder default_ladder(EnvMode mode) {
    switch (mode) {
        case EnvMode::kp:
            return {{0.31, 0.05}, {0.41, 0.07}, {0.51, 0.09}, {0.61, 0.11}};
        case EnvMode::kappa_only:
            return {{0.31, 0.0}, {0.41, 0.0}, {0.51, 0.0}, {0.61, 0.0}};
        case EnvMode::p_only:
            return {{0.31, 0.05}, {0.31, 0.07}, {0.31, 0.09}, {0.31, 0.11}};
    }
    throw std::invalid_argument("default_ladder: unknown mode");
}

std::vector<double> Curriculum::segment_ends() const {
    std::vector<double> ends(switch_epochs.size());
    for (std::size_t i = 0; i < switch_epochs.size(); ++i) {
        ends[i] = static_cast<double>(switch_epochs[i] - 1);
    }
    return ends;
}

Curriculum make_curriculum(const Eigen::VectorXd& ends, const PsiLadder& ladder,
                           int max_epoch) {
    if (ladder.size() != static_cast<std::size_t>(ends.size()) + 1) {
        throw std::invalid_argument("make_curriculum: ladder must have one more entry than ends");
    }
    if (max_epoch <= 0) {
        throw std::invalid_argument("make_curriculum: max_epoch must be positive");
    }
    for (const EnvParams& psi : ladder) psi.validate();

    Curriculum c;
    c.max_epoch = max_epoch;
    c.segments = ladder;
    c.switch_epochs.resize(ends.size());
    for (Eigen::Index i = 0; i < ends.size(); ++i) {
        if (!std::isfinite(ends(i))) {
            throw CurriculumError("make_curriculum: non-finite segment end");
        }
        c.switch_epochs[i] = static_cast<int>(std::lround(ends(i))) + 1;
    }
    int prev = 0;
    for (const int t : c.switch_epochs) {
        if (t <= prev) {
            throw CurriculumError("make_curriculum: switch epochs must be strictly ascending, got " +
                                  std::to_string(t) + " after " + std::to_string(prev));
        }
        if (t >= max_epoch) {
            throw CurriculumError("make_curriculum: switch epoch " + std::to_string(t) +
                                  " is outside (0, " + std::to_string(max_epoch) + ")");
        }
        prev = t;
    }
    return c;
}

Curriculum constant_curriculum(const EnvParams& params, int max_epoch) {
    params.validate();
    Curriculum c;
    c.max_epoch = max_epoch;
    c.segments = {params};
    return c;
}

EnvParams param_at(const Curriculum& c, int epoch) {
    if (epoch < 0 || epoch >= c.max_epoch) {
        throw std::invalid_argument("param_at: epoch " + std::to_string(epoch) +
                                    " outside [0, " + std::to_string(c.max_epoch) + ")");
    }
    const auto it = std::upper_bound(c.switch_epochs.begin(), c.switch_epochs.end(), epoch);
    return c.segments[static_cast<std::size_t>(it - c.switch_epochs.begin())];
}

}  // namespace raceline
