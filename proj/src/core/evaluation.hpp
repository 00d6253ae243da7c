#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/inference.hpp"
#include "core/vocab.hpp"

namespace zscomp {

/// video_id -> action_id labels. Every action must exist in the vocabulary.
class GroundTruth {
  public:
    // CSV with header "video_id,action_label".
    static GroundTruth load(const std::string& path, const Vocabulary& actions);
    static GroundTruth from_pairs(std::vector<std::pair<std::string, uint32_t>> pairs,
                                  const Vocabulary& actions);

    size_t size() const { return order_.size(); }
    std::optional<uint32_t> find(const std::string& video_id) const;
    const std::vector<std::string>& video_ids() const { return order_; }

    void save(const std::string& path, const Vocabulary& actions) const;

  private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, uint32_t> map_;
};

/// Fraction of predictions matching the truth exactly.
double accuracy(std::span<const Prediction> predictions, const GroundTruth& truth);

struct TrialRow {
    uint32_t trial = 0;
    std::vector<uint32_t> subset;
    uint64_t subset_hash = 0;
    size_t num_videos = 0;
    bool defined = false;
    double accuracy = 0.0;
};

struct TrialReport {
    uint32_t subset_size = 0;
    uint32_t num_trials = 0;
    uint64_t seed = 0;
    std::vector<TrialRow> trials;
    std::vector<double> per_trial_accuracy; // defined trials, in trial order
    double mean = 0.0;
    double stddev = 0.0; // population
    std::vector<std::string> warnings;
};

/// Randomized n-way protocol: per trial, sample subset_size actions with a
/// per-trial stream seeded from (seed, trial), keep the videos whose truth
/// action is in the subset, and take the argmax over the subset's score
/// columns. Works off the full score matrix; per-action scores are
/// independent of the action set, so column restriction is exact.
TrialReport run_subset_trials(const ScoreMatrix& full_scores, const GroundTruth& truth,
                              uint32_t action_count, uint32_t subset_size, uint32_t num_trials,
                              uint64_t seed, int threads);

struct ActionDelta {
    uint32_t action_id = 0;
    size_t video_count = 0;
    double accuracy_a = 0.0;
    double accuracy_b = 0.0;
    double delta = 0.0;
};

/// Per-action recall of two methods plus the improvement a - b, sorted by
/// delta descending (ties by action id). Actions with no truth videos are
/// omitted.
std::vector<ActionDelta> per_action_delta(std::span<const Prediction> method_a,
                                          std::span<const Prediction> method_b,
                                          const GroundTruth& truth);

} // namespace zscomp
