#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/text.hpp"

namespace zscomp {

GroundTruth GroundTruth::load(const std::string& path, const Vocabulary& actions) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open " + path);
    GroundTruth gt;
    std::string line;
    size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && (unsigned char)line[0] == 0xEF) line = line.substr(3);
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (!saw_header) {
            saw_header = true;
            if (fields.size() != 2 || fields[0] != "video_id" || fields[1] != "action_label")
                raise(ErrorKind::schema, path + ": header must be 'video_id,action_label'");
            continue;
        }
        if (fields.size() != 2)
            raise(ErrorKind::format,
                  path + ":" + std::to_string(line_no) + ": expected 2 fields");
        auto action = actions.find(fields[1]);
        if (!action)
            raise(ErrorKind::data, path + ":" + std::to_string(line_no) + ": unknown action '" +
                                       fields[1] + "'");
        if (!gt.map_.emplace(fields[0], *action).second)
            raise(ErrorKind::data, path + ": duplicate video id '" + fields[0] + "'");
        gt.order_.push_back(fields[0]);
    }
    if (!saw_header) raise(ErrorKind::format, path + " is empty");
    if (gt.order_.empty()) raise(ErrorKind::data, path + " contains no labels");
    return gt;
}

GroundTruth GroundTruth::from_pairs(std::vector<std::pair<std::string, uint32_t>> pairs,
                                    const Vocabulary& actions) {
    GroundTruth gt;
    for (auto& [video, action] : pairs) {
        if (action >= actions.size())
            raise(ErrorKind::argument, "action id out of range for video '" + video + "'");
        if (!gt.map_.emplace(video, action).second)
            raise(ErrorKind::argument, "duplicate video id '" + video + "'");
        gt.order_.push_back(std::move(video));
    }
    return gt;
}

std::optional<uint32_t> GroundTruth::find(const std::string& video_id) const {
    auto it = map_.find(video_id);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void GroundTruth::save(const std::string& path, const Vocabulary& actions) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorKind::io, "cannot open " + path + " for writing");
    out << "video_id,action_label\n";
    for (const auto& video : order_)
        out << csv_escape(video) << ',' << csv_escape(actions.label(map_.at(video))) << '\n';
    out.flush();
    if (!out) raise(ErrorKind::io, "failed writing " + path);
}

double accuracy(std::span<const Prediction> predictions, const GroundTruth& truth) {
    if (predictions.empty()) raise(ErrorKind::argument, "no predictions to evaluate");
    size_t correct = 0;
    for (const auto& p : predictions) {
        auto expected = truth.find(p.video_id);
        if (!expected)
            raise(ErrorKind::data, "no ground truth for video '" + p.video_id + "'");
        if (*expected == p.action_id) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

TrialReport run_subset_trials(const ScoreMatrix& full_scores, const GroundTruth& truth,
                              uint32_t action_count, uint32_t subset_size, uint32_t num_trials,
                              uint64_t seed, int threads) {
    if (subset_size < 1) raise(ErrorKind::argument, "subset_size must be at least 1");
    if (subset_size > action_count)
        raise(ErrorKind::argument, "subset_size " + std::to_string(subset_size) +
                                       " exceeds the action count " +
                                       std::to_string(action_count));
    if (num_trials < 1) raise(ErrorKind::argument, "num_trials must be at least 1");
    if (full_scores.action_ids.size() != action_count)
        raise(ErrorKind::argument, "score matrix does not cover the full action set");

    // Coverage check up front so workers cannot hit missing labels.
    std::vector<uint32_t> truth_actions(full_scores.video_ids.size());
    for (size_t v = 0; v < full_scores.video_ids.size(); ++v) {
        auto a = truth.find(full_scores.video_ids[v]);
        if (!a)
            raise(ErrorKind::data,
                  "no ground truth for video '" + full_scores.video_ids[v] + "'");
        truth_actions[v] = *a;
    }

    TrialReport report;
    report.subset_size = subset_size;
    report.num_trials = num_trials;
    report.seed = seed;
    report.trials.resize(num_trials);

    const size_t n_actions = full_scores.action_ids.size();
    parallel_for(0, num_trials, threads, [&](size_t t) {
        TrialRow& row = report.trials[t];
        row.trial = static_cast<uint32_t>(t);
        SplitMix64 gen(mix_seed(seed, t));
        row.subset = sample_without_replacement(gen, action_count, subset_size);
        row.subset_hash = fnv1a64(row.subset);
        std::vector<uint8_t> in_subset(action_count, 0);
        for (uint32_t a : row.subset) in_subset[a] = 1;
        size_t kept = 0, correct = 0;
        for (size_t v = 0; v < full_scores.video_ids.size(); ++v) {
            if (!in_subset[truth_actions[v]]) continue;
            ++kept;
            const double* scores = full_scores.scores.data() + v * n_actions;
            // Subsets are ascending, so the first strict maximum is the
            // lowest-id winner, matching the full-set tie-break.
            uint32_t best = row.subset[0];
            for (uint32_t a : row.subset)
                if (scores[a] > scores[best]) best = a;
            if (best == truth_actions[v]) ++correct;
        }
        row.num_videos = kept;
        row.defined = kept > 0;
        row.accuracy = kept > 0 ? static_cast<double>(correct) / kept : 0.0;
    });

    for (const auto& row : report.trials) {
        if (row.defined) {
            report.per_trial_accuracy.push_back(row.accuracy);
        } else {
            report.warnings.push_back("trial " + std::to_string(row.trial) +
                                      " matched no videos and was excluded");
        }
    }
    if (report.per_trial_accuracy.empty())
        raise(ErrorKind::data, "every trial matched zero videos");
    double sum = 0.0;
    for (double a : report.per_trial_accuracy) sum += a;
    report.mean = sum / report.per_trial_accuracy.size();
    double var = 0.0;
    for (double a : report.per_trial_accuracy) {
        double d = a - report.mean;
        var += d * d;
    }
    report.stddev = std::sqrt(var / report.per_trial_accuracy.size());
    return report;
}

std::vector<ActionDelta> per_action_delta(std::span<const Prediction> method_a,
                                          std::span<const Prediction> method_b,
                                          const GroundTruth& truth) {
    if (method_a.size() != method_b.size())
        raise(ErrorKind::data, "prediction sets cover different numbers of videos");
    std::unordered_map<std::string, uint32_t> preds_b;
    preds_b.reserve(method_b.size());
    for (const auto& p : method_b) preds_b.emplace(p.video_id, p.action_id);

    std::unordered_map<uint32_t, ActionDelta> by_action;
    for (const auto& pa : method_a) {
        auto pb = preds_b.find(pa.video_id);
        if (pb == preds_b.end())
            raise(ErrorKind::data,
                  "prediction sets cover different videos ('" + pa.video_id + "')");
        auto expected = truth.find(pa.video_id);
        if (!expected)
            raise(ErrorKind::data, "no ground truth for video '" + pa.video_id + "'");
        ActionDelta& d = by_action[*expected];
        d.action_id = *expected;
        d.video_count += 1;
        if (pa.action_id == *expected) d.accuracy_a += 1.0;
        if (pb->second == *expected) d.accuracy_b += 1.0;
    }

    std::vector<ActionDelta> out;
    out.reserve(by_action.size());
    for (auto& [id, d] : by_action) {
        d.accuracy_a /= d.video_count;
        d.accuracy_b /= d.video_count;
        d.delta = d.accuracy_a - d.accuracy_b;
        out.push_back(d);
    }
    std::sort(out.begin(), out.end(), [](const ActionDelta& x, const ActionDelta& y) {
        if (x.delta != y.delta) return x.delta > y.delta;
        return x.action_id < y.action_id;
    });
    return out;
}

} // namespace zscomp
