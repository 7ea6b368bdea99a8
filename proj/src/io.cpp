#include "raceline/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace raceline {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << std::setprecision(17);
    return out;
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open: " + path.string());
    }
    return nlohmann::json::parse(in);
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

nlohmann::json to_json(const EnvParams& params) {
    return {{"kappa", params.kappa}, {"p", params.p}};
}

EnvParams env_params_from_json(const nlohmann::json& j) {
    EnvParams params;
    params.kappa = j.at("kappa").get<double>();
    params.p = j.at("p").get<double>();
    params.validate();
    return params;
}

nlohmann::json to_json(const Curriculum& c) {
    nlohmann::json segments = nlohmann::json::array();
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        const int start = i == 0 ? 0 : c.switch_epochs[i - 1];
        segments.push_back({{"start_epoch", start},
                            {"kappa", c.segments[i].kappa},
                            {"p", c.segments[i].p}});
    }
    return {{"max_epoch", c.max_epoch}, {"segments", segments}};
}

Curriculum curriculum_from_json(const nlohmann::json& j) {
    Curriculum c;
    c.max_epoch = j.at("max_epoch").get<int>();
    for (const auto& seg : j.at("segments")) {
        const int start = seg.at("start_epoch").get<int>();
        if (c.segments.empty()) {
            if (start != 0) {
                throw std::runtime_error("curriculum: first segment must start at epoch 0");
            }
        } else {
            c.switch_epochs.push_back(start);
        }
        EnvParams params;
        params.kappa = seg.at("kappa").get<double>();
        params.p = seg.at("p").get<double>();
        params.validate();
        c.segments.push_back(params);
    }
    if (c.segments.empty()) {
        throw std::runtime_error("curriculum: needs at least one segment");
    }
    int prev = 0;
    for (const int t : c.switch_epochs) {
        if (t <= prev || t >= c.max_epoch) {
            throw std::runtime_error("curriculum: segment starts must be ascending in range");
        }
        prev = t;
    }
    return c;
}

void save_curriculum(const std::filesystem::path& path, const Curriculum& c) {
    open_out(path) << to_json(c).dump(2) << '\n';
}

Curriculum load_curriculum(const std::filesystem::path& path) {
    return curriculum_from_json(load_json(path));
}

nlohmann::json to_json(const Track& track) {
    nlohmann::json tiles = nlohmann::json::array();
    for (const Tile& t : track.tiles) {
        nlohmann::json tile = {{"curvature", t.curvature}};
        if (t.has_obstacle) {
            tile["obstacle_offset"] = t.obstacle_offset;
        }
        tiles.push_back(std::move(tile));
    }
    return {{"seed", track.seed},
            {"params", to_json(track.params)},
            {"n_tiles", track.n_tiles()},
            {"tiles", tiles}};
}

nlohmann::json to_json(const TrainingCurve& curve) {
    nlohmann::json evals = nlohmann::json::array();
    for (const EvalPoint& e : curve.evals) {
        evals.push_back({{"epoch", e.epoch},
                         {"mean_reward", e.mean_reward},
                         {"std_reward", e.std_reward}});
    }
    return {{"train_rewards", curve.train_rewards},
            {"evals", evals},
            {"diverged", curve.diverged},
            {"divergence_epoch", curve.divergence_epoch}};
}

TrainingCurve curve_from_json(const nlohmann::json& j) {
    TrainingCurve curve;
    curve.train_rewards = j.at("train_rewards").get<std::vector<double>>();
    for (const auto& e : j.at("evals")) {
        curve.evals.push_back({e.at("epoch").get<int>(),
                               e.at("mean_reward").get<double>(),
                               e.at("std_reward").get<double>()});
    }
    curve.diverged = j.at("diverged").get<bool>();
    curve.divergence_epoch = j.at("divergence_epoch").get<int>();
    return curve;
}

void write_curve_csv(const std::filesystem::path& path, const TrainingCurve& curve) {
    auto out = open_out(path);
    out << "epoch,train_reward,eval_mean,eval_std\n";
    std::size_t next_eval = 0;
    for (std::size_t e = 0; e < curve.train_rewards.size(); ++e) {
        out << e << ',' << curve.train_rewards[e] << ',';
        if (next_eval < curve.evals.size() &&
            curve.evals[next_eval].epoch == static_cast<int>(e)) {
            out << curve.evals[next_eval].mean_reward << ','
                << curve.evals[next_eval].std_reward;
            ++next_eval;
        } else {
            out << ',';
        }
        out << '\n';
    }
}

void write_trials_csv(const std::filesystem::path& path, const SearchResult& result) {
    auto out = open_out(path);
    out << "trial,phase";
    const int k = result.trials.empty() ? 0 : static_cast<int>(result.trials[0].x.size());
    for (int d = 0; d < k; ++d) out << ",x" << d + 1;
    out << ",y,curriculum_valid\n";
    for (const TrialRecord& t : result.trials) {
        out << t.index << ',' << (t.phase == TrialPhase::warmup ? "warmup" : "bo");
        for (int d = 0; d < k; ++d) out << ',' << t.x(d);
        out << ',' << t.objective << ',' << (t.curriculum_valid ? 1 : 0) << '\n';
    }
}

void write_metrics_csv(const std::filesystem::path& path, const std::string& scheme,
                       const std::string& set_name, const MetricsReport& report) {
    const bool fresh = !std::filesystem::exists(path);
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << std::setprecision(17);
    if (fresh) {
        out << "scheme,set,n_eval,mean_reward,std_reward,collision_obstacle_ratio,"
               "tiles_visited,time_on_grass,collisions\n";
    }
    out << scheme << ',' << set_name << ',' << report.n_eval << ',' << report.mean_reward
        << ',' << report.std_reward << ',' << report.collision_obstacle_ratio << ','
        << report.mean_tiles_visited << ',' << report.mean_grass_fraction << ','
        << report.mean_collisions << '\n';
}

void write_bucket_csv(const std::filesystem::path& path, const std::string& scheme,
                      const std::vector<BucketReport>& buckets) {
    auto out = open_out(path);
    out << "scheme,bucket,kappa,p,n_eval,mean_reward,std_reward\n";
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        out << scheme << ',' << i + 1 << ',' << buckets[i].params.kappa << ','
            << buckets[i].params.p << ',' << buckets[i].report.n_eval << ','
            << buckets[i].report.mean_reward << ',' << buckets[i].report.std_reward
            << '\n';
    }
}

nlohmann::json search_checkpoint_json(const SearchResult& result,
                                      std::uint64_t config_digest,
                                      std::uint64_t master_seed) {
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialRecord& t : result.trials) {
        nlohmann::json jt = {
            {"index", t.index},
            {"x", std::vector<double>(t.x.data(), t.x.data() + t.x.size())},
            {"objective", t.objective},
            {"phase", t.phase == TrialPhase::warmup ? "warmup" : "bo"},
            {"curriculum_valid", t.curriculum_valid},
            {"grid_fallback", t.grid_fallback},
            {"curve", to_json(t.curve)},
        };
        if (t.curriculum_valid) {
            jt["curriculum"] = to_json(t.curriculum);
        }
        trials.push_back(std::move(jt));
    }
    return {{"config_digest", config_digest},
            {"master_seed", master_seed},
            {"next_trial", result.trials.size()},
            {"best_by_final", result.best_by_final},
            {"best_by_curve", result.best_by_curve},
            {"trials", trials}};
}

void save_search_checkpoint(const std::filesystem::path& path, const SearchResult& result,
                            std::uint64_t config_digest, std::uint64_t master_seed) {
    open_out(path) << search_checkpoint_json(result, config_digest, master_seed).dump(2)
                   << '\n';
}

std::vector<TrialRecord> load_search_checkpoint(const std::filesystem::path& path,
                                                std::uint64_t expected_digest) {
    const nlohmann::json j = load_json(path);
    if (j.at("config_digest").get<std::uint64_t>() != expected_digest) {
        throw std::runtime_error(
            "search checkpoint was produced under a different configuration: " +
            path.string());
    }
    std::vector<TrialRecord> trials;
    for (const auto& jt : j.at("trials")) {
        TrialRecord t;
        t.index = jt.at("index").get<int>();
        const auto x = jt.at("x").get<std::vector<double>>();
        t.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        t.objective = jt.at("objective").get<double>();
        t.phase = jt.at("phase").get<std::string>() == "warmup" ? TrialPhase::warmup
                                                                : TrialPhase::bo;
        t.curriculum_valid = jt.at("curriculum_valid").get<bool>();
        t.grid_fallback = jt.at("grid_fallback").get<bool>();
        t.curve = curve_from_json(jt.at("curve"));
        if (t.curriculum_valid) {
            t.curriculum = curriculum_from_json(jt.at("curriculum"));
        }
        trials.push_back(std::move(t));
    }
    return trials;
}

void write_manifest(const std::filesystem::path& path, const nlohmann::json& config,
                    std::uint64_t digest) {
    nlohmann::json manifest = {
        {"tool", "raceline"},
        {"version", "0.1.0"},
        {"config_digest", digest},
        {"config", config},
    };
    open_out(path) << manifest.dump(2) << '\n';
}

}  // namespace raceline
