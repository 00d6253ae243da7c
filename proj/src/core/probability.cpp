#include "core/probability.hpp"

#include <cmath>
#include <fstream>

#include "core/binio.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

namespace zscomp {

namespace {

constexpr char kZspmMagic[4] = {'Z', 'S', 'P', 'M'};
constexpr uint32_t kZspmVersion = 1;
constexpr double kRowSumTol = 1e-3;
constexpr double kEntrySlack = 1e-9; // absorbs float round-off at the interval edges

} // namespace

std::optional<uint32_t> ProbabilityMatrix::find_video(const std::string& id) const {
    auto it = video_index_.find(id);
    if (it == video_index_.end()) return std::nullopt;
    return it->second;
}

void ProbabilityMatrix::index_videos() {
    video_index_.reserve(video_ids_.size());
    for (uint32_t i = 0; i < video_ids_.size(); ++i) {
        auto [it, inserted] = video_index_.emplace(video_ids_[i], i);
        if (!inserted) raise(ErrorKind::data, "duplicate video id '" + video_ids_[i] + "'");
    }
}

void ProbabilityMatrix::validate(bool renormalize) {
    for (size_t r = 0; r < video_ids_.size(); ++r) {
        float* row = values_.data() + r * cols_;
        double sum = 0.0;
        for (size_t c = 0; c < cols_; ++c) {
            double v = row[c];
            if (!std::isfinite(v))
                raise(ErrorKind::data, "non-finite probability for video '" + video_ids_[r] +
                                           "', column " + std::to_string(c));
            if (v < -kEntrySlack || v > 1.0 + kEntrySlack)
                raise(ErrorKind::data, "probability out of [0,1] for video '" + video_ids_[r] +
                                           "', column " + std::to_string(c) + ": " +
                                           format_real(v));
            if (v < 0.0) row[c] = 0.0f;
            if (v > 1.0) row[c] = 1.0f;
            sum += row[c];
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            if (!renormalize || sum <= 0.0)
                raise(ErrorKind::data, "row for video '" + video_ids_[r] +
                                           "' sums to " + format_real(sum) +
                                           ", not 1 within 0.001" +
                                           (renormalize ? "" : " (use renormalize to rescale)"));
            double inv = 1.0 / sum;
            for (size_t c = 0; c < cols_; ++c)
                row[c] = static_cast<float>(row[c] * inv);
        }
    }
}

ProbabilityMatrix ProbabilityMatrix::from_rows(std::vector<std::string> video_ids, size_t cols,
                                               std::vector<float> values, bool renormalize) {
    if (cols == 0) raise(ErrorKind::argument, "probability matrix needs at least one column");
    if (values.size() != video_ids.size() * cols)
        raise(ErrorKind::argument, "probability values do not match id count and column count");
    ProbabilityMatrix m;
    m.video_ids_ = std::move(video_ids);
    m.cols_ = cols;
    m.values_ = std::move(values);
    m.index_videos();
    m.validate(renormalize);
    return m;
}

ProbabilityMatrix ProbabilityMatrix::load(const std::string& path, ProbabilityFormat format,
                                          const Vocabulary& vocab, bool renormalize) {
    ProbabilityMatrix m;
    m.cols_ = vocab.size();
    if (format == ProbabilityFormat::csv) {
        std::ifstream in(path);
        if (!in) raise(ErrorKind::io, "cannot open " + path);
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
                if (fields.empty() || fields[0] != "video_id")
                    raise(ErrorKind::schema, path + ": header must start with 'video_id'");
                if (fields.size() != vocab.size() + 1)
                    raise(ErrorKind::schema, path + ": header has " +
                                                 std::to_string(fields.size() - 1) +
                                                 " label columns, vocabulary has " +
                                                 std::to_string(vocab.size()));
                for (size_t i = 1; i < fields.size(); ++i)
                    if (fields[i] != vocab.label(static_cast<uint32_t>(i - 1)))
                        raise(ErrorKind::schema,
                              path + ": column " + std::to_string(i) + " is '" + fields[i] +
                                  "', vocabulary has '" + vocab.label(uint32_t(i - 1)) + "'");
                continue;
            }
            if (fields.size() != vocab.size() + 1)
                raise(ErrorKind::format, path + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(vocab.size() + 1) + " fields, found " +
                                             std::to_string(fields.size()));
            m.video_ids_.push_back(fields[0]);
            for (size_t i = 1; i < fields.size(); ++i) {
                double v = parse_double(fields[i], path + ":" + std::to_string(line_no));
                m.values_.push_back(static_cast<float>(v));
            }
        }
        if (!saw_header) raise(ErrorKind::format, path + " is empty");
    } else {
        auto in = binio::open_in(path);
        binio::check_magic(in, kZspmMagic, path);
        uint32_t version = binio::read_u32(in, path);
        if (version != kZspmVersion)
            raise(ErrorKind::format,
                  path + ": unsupported ZSPM version " + std::to_string(version));
        uint64_t rows = binio::read_u64(in, path);
        uint64_t cols = binio::read_u64(in, path);
        if (cols != vocab.size())
            raise(ErrorKind::schema, path + ": matrix has " + std::to_string(cols) +
                                         " columns, vocabulary has " +
                                         std::to_string(vocab.size()));
        if (rows * cols > (1ull << 34)) raise(ErrorKind::size_guard, path + ": matrix too large");
        m.values_.resize(static_cast<size_t>(rows * cols));
        binio::read_f32_array(in, m.values_.data(), m.values_.size(), path);
        m.video_ids_.reserve(rows);
        for (uint64_t r = 0; r < rows; ++r)
            m.video_ids_.push_back(binio::read_string(in, path));
    }
    if (m.video_ids_.empty()) raise(ErrorKind::data, path + " contains no videos");
    m.index_videos();
    m.validate(renormalize);
    return m;
}

void ProbabilityMatrix::save_csv(const std::string& path, const Vocabulary& vocab) const {
    if (vocab.size() != cols_)
        raise(ErrorKind::argument, "vocabulary size does not match matrix columns");
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorKind::io, "cannot open " + path + " for writing");
    out << "video_id";
    for (uint32_t c = 0; c < cols_; ++c) out << ',' << csv_escape(vocab.label(c));
    out << '\n';
    for (uint32_t r = 0; r < video_ids_.size(); ++r) {
        out << csv_escape(video_ids_[r]);
        auto vals = row(r);
        for (size_t c = 0; c < cols_; ++c) out << ',' << format_real(vals[c]);
        out << '\n';
    }
    out.flush();
    if (!out) raise(ErrorKind::io, "failed writing " + path);
}

void ProbabilityMatrix::save_binary(const std::string& path) const {
    auto out = binio::open_out(path);
    binio::write_bytes(out, kZspmMagic, 4);
    binio::write_u32(out, kZspmVersion);
    binio::write_u64(out, video_ids_.size());
    binio::write_u64(out, cols_);
    binio::write_f32_array(out, values_.data(), values_.size());
    for (const auto& id : video_ids_) binio::write_string(out, id);
    binio::finish_write(out, path);
}

std::vector<float> aggregate_frames(const FrameProbabilityBlock& block) {
    if (block.frames.empty())
        raise(ErrorKind::argument, "video '" + block.video_id + "' has no frames");
    size_t cols = block.frames.front().size();
    std::vector<double> acc(cols, 0.0);
    for (size_t f = 0; f < block.frames.size(); ++f) {
        const auto& frame = block.frames[f];
        if (frame.size() != cols)
            raise(ErrorKind::data, "video '" + block.video_id + "' frame " + std::to_string(f) +
                                       " has inconsistent width");
        double sum = 0.0;
        for (float v : frame) {
            if (!std::isfinite(v))
                raise(ErrorKind::data, "video '" + block.video_id + "' frame " +
                                           std::to_string(f) + " has a non-finite value");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-3)
            raise(ErrorKind::data, "video '" + block.video_id + "' frame " + std::to_string(f) +
                                       " sums to " + format_real(sum));
        for (size_t c = 0; c < cols; ++c) acc[c] += frame[c];
    }
    std::vector<float> out(cols);
    double inv = 1.0 / static_cast<double>(block.frames.size());
    for (size_t c = 0; c < cols; ++c) out[c] = static_cast<float>(acc[c] * inv);
    return out;
}

double composition_likelihood(std::span<const float> objects_row,
                              std::span<const float> scenes_row, uint32_t object_id,
                              uint32_t scene_id) {
    if (object_id >= objects_row.size())
        raise(ErrorKind::argument, "object id " + std::to_string(object_id) + " out of range");
    if (scene_id >= scenes_row.size())
        raise(ErrorKind::argument, "scene id " + std::to_string(scene_id) + " out of range");
    return static_cast<double>(objects_row[object_id]) *
           static_cast<double>(scenes_row[scene_id]);
}

} // namespace zscomp
