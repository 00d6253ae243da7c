#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/vocab.hpp"

namespace zscomp {

enum class OovPolicy { fail, zero };
enum class EmbeddingFormat { word2vec_text, binary_table };

/// Token-level vector store backing phrase composition. Keys are normalized
/// (lowercased, ASCII punctuation stripped) so lookups from tokenized labels
/// hit file tokens regardless of case.
struct TokenSpace {
    size_t dim = 0;
    std::vector<float> values;
    std::unordered_map<std::string, uint32_t> index;

    std::span<const float> row(uint32_t i) const {
        return {values.data() + static_cast<size_t>(i) * dim, dim};
    }
};

/// Per-label embedding vectors for one vocabulary, plus the token space they
/// were composed from. Immutable after load; safe for concurrent readers.
class EmbeddingTable {
  public:
    // word2vec_text: optional "N d" header line, then one token + d floats
    //   per line. Label vectors are composed from tokens via embed_label.
    // binary_table: ZSEB file of per-label vectors. Labels matching a stored
    //   entry exactly use it as-is; other labels fall back to token
    //   composition over the stored entries.
    static EmbeddingTable load(const std::string& path, EmbeddingFormat format,
                               const Vocabulary& vocab, OovPolicy policy);

    // Adopts one prebuilt vector per vocabulary label (fixtures, tests).
    static EmbeddingTable from_rows(size_t dim, std::vector<float> rows,
                                    const Vocabulary& vocab);

    size_t dim() const { return dim_; }
    size_t size() const { return norms_.size(); }

    std::span<const float> vector(uint32_t id) const {
        return {values_.data() + static_cast<size_t>(id) * dim_, dim_};
    }
    double norm(uint32_t id) const { return norms_[id]; }
    bool oov(uint32_t id) const { return oov_[id] != 0; }
    size_t oov_count() const;

    // Mean of the in-vocabulary token vectors of `label` (split on
    // whitespace/underscore, lowercased, punctuation stripped). Single-token
    // labels return the stored token vector bit-exactly. Labels whose tokens
    // are all unknown follow `policy`: zero vector (oov=true) or error.
    std::vector<float> embed_label(std::string_view label, OovPolicy policy,
                                   bool* oov = nullptr) const;

    void save_binary(const std::string& path, const Vocabulary& vocab) const;

  private:
    size_t dim_ = 0;
    std::vector<float> values_;
    std::vector<float> norms_; // cached Euclidean norms
    std::vector<uint8_t> oov_;
    TokenSpace tokens_;
};

/// Writes the table as word2vec text: "N d" header, then one label plus d
/// components per line. Labels must be single whitespace-free tokens.
void save_word2vec_text(const EmbeddingTable& table, const Vocabulary& vocab,
                        const std::string& path);

/// Cosine similarity in [-1, 1]; dot and norms accumulate in double. A
/// zero-norm operand yields 0 and bumps *degenerate when given.
double cosine(std::span<const float> u, std::span<const float> v,
              uint64_t* degenerate = nullptr);

} // namespace zscomp
