#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "raceline/bo_search.hpp"
#include "raceline/curriculum.hpp"
#include "raceline/eval.hpp"
#include "raceline/ppo.hpp"
#include "raceline/race_env.hpp"

namespace raceline {

std::uint64_t fnv1a64(const std::string& data);

nlohmann::json to_json(const EnvParams& params);
EnvParams env_params_from_json(const nlohmann::json& j);

// Curricula serialize as a list of {start_epoch, kappa, p} segments.
nlohmann::json to_json(const Curriculum& c);
Curriculum curriculum_from_json(const nlohmann::json& j);
void save_curriculum(const std::filesystem::path& path, const Curriculum& c);
Curriculum load_curriculum(const std::filesystem::path& path);

// Track dump for replay debugging.
nlohmann::json to_json(const Track& track);

nlohmann::json to_json(const TrainingCurve& curve);
TrainingCurve curve_from_json(const nlohmann::json& j);

// CSV artifacts. All files are comma-separated UTF-8 with a header row.
void write_curve_csv(const std::filesystem::path& path, const TrainingCurve& curve);
void write_trials_csv(const std::filesystem::path& path, const SearchResult& result);
void write_metrics_csv(const std::filesystem::path& path, const std::string& scheme,
                       const std::string& set_name, const MetricsReport& report);
void write_bucket_csv(const std::filesystem::path& path, const std::string& scheme,
                      const std::vector<BucketReport>& buckets);

// Search state checkpoint: every completed trial plus enough context to
// resume the loop deterministically.
nlohmann::json search_checkpoint_json(const SearchResult& result,
                                      std::uint64_t config_digest,
                                      std::uint64_t master_seed);
void save_search_checkpoint(const std::filesystem::path& path, const SearchResult& result,
                            std::uint64_t config_digest, std::uint64_t master_seed);
std::vector<TrialRecord> load_search_checkpoint(const std::filesystem::path& path,
                                                std::uint64_t expected_digest);

void write_manifest(const std::filesystem::path& path, const nlohmann::json& config,
                    std::uint64_t digest);

}  // namespace raceline
