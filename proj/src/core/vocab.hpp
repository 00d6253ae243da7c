#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace zscomp {

enum class SourceKind { objects, scenes, actions, generic };

const char* source_kind_name(SourceKind kind);

/// Ordered label list with stable 0-based ids. Labels are unique
/// (case-sensitive, after trimming) and immutable once built.
class Vocabulary {
  public:
    Vocabulary() = default;

    // File format: one label per line, UTF-8, '#'-prefixed comment lines and
    // blank lines ignored.
    static Vocabulary load(const std::string& path, SourceKind kind);
    static Vocabulary from_labels(SourceKind kind,
                                  std::vector<std::string> labels);

    SourceKind kind() const { return kind_; }
    size_t size() const { return labels_.size(); }
    const std::string& label(uint32_t id) const { return labels_[id]; }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<uint32_t> find(std::string_view label) const;

    void save(const std::string& path) const;

  private:
    SourceKind kind_ = SourceKind::generic;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, uint32_t> index_;
};

} // namespace zscomp
