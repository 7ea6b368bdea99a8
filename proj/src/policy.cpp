#include "raceline/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "raceline/errors.hpp"
#include "raceline/rng.hpp"

namespace raceline {

namespace {
constexpr char kMagic[4] = {'R', 'L', 'P', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;
}  // namespace

int PolicyParams::n_params() const {
    return static_cast<int>(w1.size() + b1.size() + w_act.size() + b_act.size() +
                            w_val.size() + 1 + log_std.size());
}

Eigen::VectorXd PolicyParams::flatten() const {
    Eigen::VectorXd theta(n_params());
    Eigen::Index at = 0;
    auto put = [&](const double* data, Eigen::Index count) {
        theta.segment(at, count) = Eigen::Map<const Eigen::VectorXd>(data, count);
        at += count;
    };
    put(w1.data(), w1.size());
    put(b1.data(), b1.size());
    put(w_act.data(), w_act.size());
    put(b_act.data(), b_act.size());
    put(w_val.data(), w_val.size());
    theta(at++) = b_val;
    put(log_std.data(), log_std.size());
    return theta;
}

PolicyParams PolicyParams::unflatten(const Eigen::VectorXd& theta, int hidden) {
    PolicyParams p;
    p.w1.resize(hidden, kObservationDim);
    p.b1.resize(hidden);
    p.w_act.resize(kActionDim, hidden);
    p.b_act.resize(kActionDim);
    p.w_val.resize(hidden);
    p.log_std.resize(kActionDim);
    if (theta.size() != p.n_params()) {
        throw std::invalid_argument("PolicyParams::unflatten: wrong parameter count");
    }
    Eigen::Index at = 0;
    auto take = [&](double* data, Eigen::Index count) {
        Eigen::Map<Eigen::VectorXd>(data, count) = theta.segment(at, count);
        at += count;
    };
    take(p.w1.data(), p.w1.size());
    take(p.b1.data(), p.b1.size());
    take(p.w_act.data(), p.w_act.size());
    take(p.b_act.data(), p.b_act.size());
    take(p.w_val.data(), p.w_val.size());
    p.b_val = theta(at++);
    take(p.log_std.data(), p.log_std.size());
    return p;
}

bool PolicyParams::all_finite() const {
    return w1.allFinite() && b1.allFinite() && w_act.allFinite() && b_act.allFinite() &&
           w_val.allFinite() && std::isfinite(b_val) && log_std.allFinite();
}

void PolicyParams::clamp_log_std() {
    log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

PolicyParams init_policy(int hidden, std::uint64_t seed, double init_log_std) {
    if (hidden < 1) {
        throw std::invalid_argument("init_policy: hidden width must be >= 1");
    }
    auto rng = make_rng(seed, "policy-init");
    std::normal_distribution<double> normal(0.0, 1.0);
    auto fill = [&](auto& m, double gain, int fan_in, int fan_out) {
        const double scale = gain * std::sqrt(2.0 / (fan_in + fan_out));
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * normal(rng);
    };
    PolicyParams p;
    p.w1.resize(hidden, kObservationDim);
    fill(p.w1, 1.0, kObservationDim, hidden);
    p.b1 = Eigen::VectorXd::Zero(hidden);
    p.w_act.resize(kActionDim, hidden);
    fill(p.w_act, 0.01, hidden, kActionDim);
    p.b_act = Eigen::VectorXd::Zero(kActionDim);
    p.w_val.resize(hidden);
    fill(p.w_val, 1.0, hidden, 1);
    p.b_val = 0.0;
    p.log_std = Eigen::VectorXd::Constant(kActionDim, init_log_std);
    return p;
}

ForwardResult forward(const PolicyParams& params, const Observation& obs) {
    ForwardResult r;
    r.hidden = (params.w1 * obs + params.b1).array().tanh();
    r.action_mean = params.w_act * r.hidden + params.b_act;
    r.value = params.w_val.dot(r.hidden) + params.b_val;
    return r;
}

double gaussian_log_prob(const PolicyParams& params, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& u) {
    const Eigen::ArrayXd sigma = params.log_std.array().exp();
    const Eigen::ArrayXd z = (u - mean).array() / sigma;
    return -0.5 * z.square().sum() - params.log_std.sum() -
           0.5 * kActionDim * std::log(2.0 * std::numbers::pi);
}

Action to_env_action(const Eigen::VectorXd& u) {
    Action a;
    a.steering = std::clamp(u(0), -1.0, 1.0);
    a.accel = std::clamp(u(1), 0.0, 1.0);
    a.brake = std::clamp(u(2), 0.0, 1.0);
    return a;
}

Eigen::VectorXd sample_raw_action(const PolicyParams& params, const Eigen::VectorXd& mean,
                                  std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd u(kActionDim);
    for (int a = 0; a < kActionDim; ++a) {
        u(a) = mean(a) + std::exp(params.log_std(a)) * normal(rng);
    }
    return u;
}

Policy make_greedy_policy(PolicyParams params) {
    return [params = std::move(params)](const Observation& obs, std::mt19937_64&) {
        return to_env_action(forward(params, obs).action_mean);
    };
}

void save_policy(const std::filesystem::path& path, const PolicyParams& params,
                 std::uint64_t config_digest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("save_policy: cannot open " + path.string());
    }
    out.write(kMagic, sizeof(kMagic));
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put_u32(kVersion);
    put_u64(config_digest);
    put_u32(static_cast<std::uint32_t>(kObservationDim));
    put_u32(static_cast<std::uint32_t>(params.hidden()));
    put_u32(static_cast<std::uint32_t>(kActionDim));
    const Eigen::VectorXd theta = params.flatten();
    put_u32(static_cast<std::uint32_t>(theta.size()));
    out.write(reinterpret_cast<const char*>(theta.data()),
              static_cast<std::streamsize>(theta.size() * sizeof(double)));
    if (!out) {
        throw std::runtime_error("save_policy: short write to " + path.string());
    }
}

PolicyCheckpoint load_policy(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_policy: cannot open " + path.string());
    }
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_policy: not a policy checkpoint: " + path.string());
    }
    auto get_u32 = [&] {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&] {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != kVersion) {
        throw std::runtime_error("load_policy: unsupported checkpoint version " +
                                 std::to_string(version));
    }
    PolicyCheckpoint ckpt;
    ckpt.config_digest = get_u64();
    const std::uint32_t obs_dim = get_u32();
    const std::uint32_t hidden = get_u32();
    const std::uint32_t action_dim = get_u32();
    if (obs_dim != kObservationDim || action_dim != kActionDim) {
        throw std::runtime_error("load_policy: checkpoint dimensions do not match this build");
    }
    const std::uint32_t count = get_u32();
    Eigen::VectorXd theta(count);
    in.read(reinterpret_cast<char*>(theta.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) {
        throw std::runtime_error("load_policy: truncated checkpoint: " + path.string());
    }
    ckpt.params = PolicyParams::unflatten(theta, static_cast<int>(hidden));
    return ckpt;
}

}  // namespace raceline
