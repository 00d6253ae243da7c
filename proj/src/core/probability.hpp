#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/vocab.hpp"

namespace zscomp {

enum class ProbabilityFormat { csv, zspm_binary };

/// Per-frame softmax rows for one video, awaiting mean aggregation.
struct FrameProbabilityBlock {
    std::string video_id;
    std::vector<std::vector<float>> frames;
};

/// Video-level class probabilities for one source (objects or scenes).
/// Rows are validated at load: finite, in [0,1], row-stochastic within 1e-3
/// (or renormalized on request). Immutable afterwards.
class ProbabilityMatrix {
  public:
    static ProbabilityMatrix load(const std::string& path, ProbabilityFormat format,
                                  const Vocabulary& vocab, bool renormalize);
    static ProbabilityMatrix from_rows(std::vector<std::string> video_ids, size_t cols,
                                       std::vector<float> values, bool renormalize = false);

    size_t videos() const { return video_ids_.size(); }
    size_t cols() const { return cols_; }
    const std::vector<std::string>& video_ids() const { return video_ids_; }
    std::optional<uint32_t> find_video(const std::string& id) const;

    std::span<const float> row(uint32_t video) const {
        return {values_.data() + static_cast<size_t>(video) * cols_, cols_};
    }

    void save_csv(const std::string& path, const Vocabulary& vocab) const;
    void save_binary(const std::string& path) const;

  private:
    void index_videos();
    void validate(bool renormalize);

    std::vector<std::string> video_ids_;
    std::unordered_map<std::string, uint32_t> video_index_;
    size_t cols_ = 0;
    std::vector<float> values_;
};

/// Elementwise mean over the block's frame rows. Each frame row must be
/// row-stochastic within 1e-3; an empty block is an argument error.
std::vector<float> aggregate_frames(const FrameProbabilityBlock& block);

/// p(c|v) = p(c_o|v) * p(c_s|v).
double composition_likelihood(std::span<const float> objects_row,
                              std::span<const float> scenes_row, uint32_t object_id,
                              uint32_t scene_id);

} // namespace zscomp
