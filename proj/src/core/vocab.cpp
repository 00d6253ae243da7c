#include "core/vocab.hpp"

#include <fstream>

#include "core/error.hpp"
#include "core/text.hpp"

namespace zscomp {

const char* source_kind_name(SourceKind kind) {
    switch (kind) {
        case SourceKind::objects: return "objects";
        case SourceKind::scenes: return "scenes";
        case SourceKind::actions: return "actions";
        case SourceKind::generic: return "generic";
    }
    return "generic";
}

Vocabulary Vocabulary::load(const std::string& path, SourceKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io, "cannot open vocabulary file: " + path);

    std::vector<std::string> labels;
    std::string line;
    size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            // strip a UTF-8 BOM if present
            if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0)
                line.erase(0, 3);
            first = false;
        }
        std::string_view label = trim(line);
        if (label.empty() || label.front() == '#') continue;
        labels.emplace_back(label);
    }
    if (labels.empty())
        raise(ErrorKind::data, "vocabulary file has no labels: " + path);
    return from_labels(kind, std::move(labels));
}

Vocabulary Vocabulary::from_labels(SourceKind kind,
                                   std::vector<std::string> labels) {
    Vocabulary v;
    v.kind_ = kind;
    v.labels_.reserve(labels.size());
    for (auto& raw : labels) {
        std::string label(trim(raw));
        auto [it, inserted] = v.index_.emplace(
            label, static_cast<uint32_t>(v.labels_.size()));
        if (!inserted)
            raise(ErrorKind::data, "duplicate vocabulary label: '" + label + "'");
        v.labels_.push_back(std::move(label));
    }
    return v;
}

std::optional<uint32_t> Vocabulary::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "cannot write vocabulary file: " + path);
    for (const auto& label : labels_) out << label << '\n';
    if (!out) raise(ErrorKind::io, "write failed: " + path);
}

} // namespace zscomp
