#include "core/embedding.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "core/binio.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

namespace zscomp {

namespace {

constexpr char kZsebMagic[4] = {'Z', 'S', 'E', 'B'};
constexpr uint32_t kZsebVersion = 1;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

void check_finite(std::span<const float> row, const std::string& what) {
    for (float v : row)
        if (!std::isfinite(v)) raise(ErrorKind::data, "non-finite value in vector for " + what);
}

// Raw per-label rows from a ZSEB file, before vocabulary resolution.
struct BinaryRows {
    TokenSpace tokens;                                  // keyed by normalized label tokens
    std::unordered_map<std::string, uint32_t> by_label; // exact stored labels
    std::vector<float> values;
    size_t dim = 0;
};

TokenSpace load_word2vec(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open " + path);

    TokenSpace space;
    std::string line;
    size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (first_content) {
            first_content = false;
            // A "count dim" header has exactly two all-digit fields.
            if (fields.size() == 2 && all_digits(fields[0]) && all_digits(fields[1])) {
                space.dim = parse_uint(fields[1], path + " header dimension");
                if (space.dim == 0)
                    raise(ErrorKind::format, path + ": header declares dimension 0");
                continue;
            }
        }
        if (fields.size() < 2)
            raise(ErrorKind::format,
                  path + ":" + std::to_string(line_no) + ": expected token and components");
        if (space.dim == 0) {
            space.dim = fields.size() - 1;
        } else if (fields.size() - 1 != space.dim) {
            raise(ErrorKind::format, path + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(space.dim) + " components, found " +
                                         std::to_string(fields.size() - 1));
        }
        std::string key = normalize_token(fields[0]);
        if (key.empty())
            raise(ErrorKind::format,
                  path + ":" + std::to_string(line_no) + ": token normalizes to empty");
        if (space.index.count(key)) continue; // first occurrence wins
        uint32_t row = static_cast<uint32_t>(space.index.size());
        space.index.emplace(std::move(key), row);
        for (size_t i = 1; i < fields.size(); ++i) {
            double v = parse_double(fields[i], path + ":" + std::to_string(line_no));
            if (!std::isfinite(v))
                raise(ErrorKind::data,
                      path + ":" + std::to_string(line_no) + ": non-finite component");
            space.values.push_back(static_cast<float>(v));
        }
    }
    if (space.index.empty()) raise(ErrorKind::format, path + " contains no vectors");
    return space;
}

BinaryRows load_zseb(const std::string& path) {
    auto in = binio::open_in(path);
    binio::check_magic(in, kZsebMagic, path);
    uint32_t version = binio::read_u32(in, path);
    if (version != kZsebVersion)
        raise(ErrorKind::format, path + ": unsupported ZSEB version " + std::to_string(version));
    uint64_t count = binio::read_u64(in, path);
    uint64_t dim = binio::read_u64(in, path);
    if (count == 0 || dim == 0) raise(ErrorKind::format, path + ": empty embedding table");
    if (count > (1ull << 32) || dim > (1ull << 24) || count * dim > (1ull << 34))
        raise(ErrorKind::size_guard, path + ": embedding table too large");

    BinaryRows rows;
    rows.dim = static_cast<size_t>(dim);
    rows.values.resize(static_cast<size_t>(count * dim));
    binio::read_f32_array(in, rows.values.data(), rows.values.size(), path);
    for (uint64_t i = 0; i < count; ++i) {
        std::string label = binio::read_string(in, path);
        rows.by_label.emplace(label, static_cast<uint32_t>(i));
        // Single-token stored labels double as composition tokens.
        auto toks = tokenize_label(label);
        if (toks.size() == 1 && !rows.tokens.index.count(toks[0]))
            rows.tokens.index.emplace(toks[0], static_cast<uint32_t>(i));
    }
    rows.tokens.dim = rows.dim;
    rows.tokens.values = rows.values;
    return rows;
}

} // namespace

size_t EmbeddingTable::oov_count() const {
    size_t n = 0;
    for (uint8_t f : oov_) n += f;
    return n;
}

std::vector<float> EmbeddingTable::embed_label(std::string_view label, OovPolicy policy,
                                               bool* oov) const {
    if (oov) *oov = false;
    if (trim(label).empty()) raise(ErrorKind::argument, "cannot embed an empty label");
    auto tokens = tokenize_label(label);
    std::vector<const float*> hits;
    hits.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto it = tokens_.index.find(t);
        if (it != tokens_.index.end()) hits.push_back(tokens_.row(it->second).data());
    }
    if (hits.empty()) {
        if (policy == OovPolicy::fail)
            raise(ErrorKind::data, "no known tokens for label '" + std::string(label) + "'");
        if (oov) *oov = true;
        return std::vector<float>(dim_, 0.0f);
    }
    if (hits.size() == 1) return std::vector<float>(hits[0], hits[0] + dim_);
    std::vector<float> out(dim_);
    double inv = 1.0 / static_cast<double>(hits.size());
    for (size_t d = 0; d < dim_; ++d) {
        double acc = 0.0;
        for (const float* h : hits) acc += h[d];
        out[d] = static_cast<float>(acc * inv);
    }
    return out;
}

EmbeddingTable EmbeddingTable::load(const std::string& path, EmbeddingFormat format,
                                    const Vocabulary& vocab, OovPolicy policy) {
    EmbeddingTable table;
    std::unordered_map<std::string, uint32_t> exact;
    if (format == EmbeddingFormat::word2vec_text) {
        table.tokens_ = load_word2vec(path);
    } else {
        auto rows = load_zseb(path);
        table.tokens_ = std::move(rows.tokens);
        exact = std::move(rows.by_label);
    }
    table.dim_ = table.tokens_.dim;
    table.values_.reserve(vocab.size() * table.dim_);
    table.norms_.reserve(vocab.size());
    table.oov_.reserve(vocab.size());

    for (uint32_t id = 0; id < vocab.size(); ++id) {
        const std::string& label = vocab.label(id);
        std::vector<float> vec;
        bool is_oov = false;
        auto hit = exact.find(label);
        if (hit != exact.end()) {
            auto row = table.tokens_.row(hit->second);
            vec.assign(row.begin(), row.end());
        } else {
            vec = table.embed_label(label, policy, &is_oov);
        }
        check_finite(vec, "label '" + label + "'");
        double n2 = 0.0;
        for (float v : vec) n2 += static_cast<double>(v) * v;
        double n = std::sqrt(n2);
        if (n == 0.0 && !is_oov) {
            // Zero vectors are only valid as an out-of-vocabulary outcome.
            if (policy == OovPolicy::fail)
                raise(ErrorKind::data, "zero vector for label '" + label + "'");
            is_oov = true;
        }
        table.values_.insert(table.values_.end(), vec.begin(), vec.end());
        table.norms_.push_back(static_cast<float>(n));
        table.oov_.push_back(is_oov ? 1 : 0);
    }
    return table;
}

EmbeddingTable EmbeddingTable::from_rows(size_t dim, std::vector<float> rows,
                                         const Vocabulary& vocab) {
    if (dim == 0) raise(ErrorKind::argument, "embedding dimension must be positive");
    if (rows.size() != dim * vocab.size())
        raise(ErrorKind::argument, "row data does not match vocabulary size");
    EmbeddingTable table;
    table.dim_ = dim;
    table.values_ = std::move(rows);
    table.tokens_.dim = dim;
    table.tokens_.values = table.values_;
    for (uint32_t id = 0; id < vocab.size(); ++id) {
        auto toks = tokenize_label(vocab.label(id));
        if (toks.size() == 1) table.tokens_.index.emplace(toks[0], id);
        std::span<const float> vec{table.values_.data() + size_t(id) * dim, dim};
        check_finite(vec, "label '" + vocab.label(id) + "'");
        double n2 = 0.0;
        for (float v : vec) n2 += static_cast<double>(v) * v;
        table.norms_.push_back(static_cast<float>(std::sqrt(n2)));
        table.oov_.push_back(0);
    }
    return table;
}

void EmbeddingTable::save_binary(const std::string& path, const Vocabulary& vocab) const {
    if (vocab.size() != size())
        raise(ErrorKind::argument, "vocabulary size does not match embedding table");
    auto out = binio::open_out(path);
    binio::write_bytes(out, kZsebMagic, 4);
    binio::write_u32(out, kZsebVersion);
    binio::write_u64(out, size());
    binio::write_u64(out, dim_);
    binio::write_f32_array(out, values_.data(), values_.size());
    for (uint32_t id = 0; id < vocab.size(); ++id) binio::write_string(out, vocab.label(id));
    binio::finish_write(out, path);
}

void save_word2vec_text(const EmbeddingTable& table, const Vocabulary& vocab,
                        const std::string& path) {
    if (vocab.size() != table.size())
        raise(ErrorKind::argument, "vocabulary size does not match embedding table");
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "cannot open '" + path + "' for writing");
    std::string buf = std::to_string(table.size());
    buf += ' ';
    buf += std::to_string(table.dim());
    buf += '\n';
    for (uint32_t id = 0; id < vocab.size(); ++id) {
        const std::string& label = vocab.label(id);
        for (char ch : label)
            if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r')
                raise(ErrorKind::argument,
                      "label '" + label + "' contains whitespace, not writable as word2vec text");
        buf += label;
        for (float v : table.vector(id)) {
            buf += ' ';
            buf += format_real(v);
        }
        buf += '\n';
    }
    out << buf;
    out.flush();
    if (!out) raise(ErrorKind::io, "failed writing '" + path + "'");
}

double cosine(std::span<const float> u, std::span<const float> v, uint64_t* degenerate) {
    if (u.size() != v.size()) raise(ErrorKind::argument, "cosine operands differ in dimension");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        double a = u[i], b = v[i];
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if (nu == 0.0 || nv == 0.0) {
        if (degenerate) ++*degenerate;
        return 0.0;
    }
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

} // namespace zscomp
