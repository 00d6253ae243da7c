#include "zscomp/zscomp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include <json.hpp>

#include "core/composition.hpp"
#include "core/embedding.hpp"
#include "core/error.hpp"
#include "core/pipeline.hpp"
#include "core/probability.hpp"
#include "core/selection.hpp"
#include "core/vocab.hpp"

using namespace zscomp;

struct zsc_vocab {
    Vocabulary v;
};
struct zsc_embeddings {
    EmbeddingTable t;
};
struct zsc_probs {
    ProbabilityMatrix m;
};
struct zsc_space {
    zsc_space(const EmbeddingTable& objects, const EmbeddingTable& scenes, SpaceOptions opts)
        : s(objects, scenes, opts) {}
    CompositionSpace s;
};
struct zsc_selection {
    ActionCompositionSet set;
};

namespace {

thread_local std::string g_last_error;

zsc_status map_kind(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return ZSC_ERR_IO;
    case ErrorKind::format: return ZSC_ERR_FORMAT;
    case ErrorKind::argument: return ZSC_ERR_ARGUMENT;
    case ErrorKind::schema: return ZSC_ERR_SCHEMA;
    case ErrorKind::data: return ZSC_ERR_DATA;
    case ErrorKind::config: return ZSC_ERR_CONFIG;
    case ErrorKind::lookup: return ZSC_ERR_LOOKUP;
    case ErrorKind::size_guard: return ZSC_ERR_SIZE_GUARD;
    case ErrorKind::internal: return ZSC_ERR_INTERNAL;
    }
    return ZSC_ERR_INTERNAL;
}

zsc_status fail(zsc_status status, const char* message) {
    g_last_error = message ? message : "";
    return status;
}

// Runs `fn`, translating exceptions into status codes and g_last_error.
template <typename Fn>
zsc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ZSC_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return map_kind(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return ZSC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ZSC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ZSC_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* zsc_version(void) { return "1.0.0"; }

const char* zsc_status_name(zsc_status status) {
    switch (status) {
    case ZSC_OK: return "ok";
    case ZSC_ERR_IO: return "io";
    case ZSC_ERR_FORMAT: return "format";
    case ZSC_ERR_ARGUMENT: return "argument";
    case ZSC_ERR_SCHEMA: return "schema";
    case ZSC_ERR_DATA: return "data";
    case ZSC_ERR_CONFIG: return "config";
    case ZSC_ERR_LOOKUP: return "lookup";
    case ZSC_ERR_SIZE_GUARD: return "size_guard";
    case ZSC_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* zsc_last_error(void) { return g_last_error.c_str(); }

zsc_status zsc_vocab_load(const char* path, zsc_source_kind kind, zsc_vocab** out) {
    if (!path || !out) return fail(ZSC_ERR_ARGUMENT, "path and out must be non-null");
    *out = nullptr;
    return guarded([&] {
        SourceKind sk = SourceKind::generic;
        switch (kind) {
        case ZSC_SOURCE_OBJECTS: sk = SourceKind::objects; break;
        case ZSC_SOURCE_SCENES: sk = SourceKind::scenes; break;
        case ZSC_SOURCE_ACTIONS: sk = SourceKind::actions; break;
        case ZSC_SOURCE_GENERIC: sk = SourceKind::generic; break;
        default: raise(ErrorKind::argument, "invalid source kind");
        }
        auto* h = new zsc_vocab{Vocabulary::load(path, sk)};
        *out = h;
    });
}

size_t zsc_vocab_size(const zsc_vocab* vocab) { return vocab ? vocab->v.size() : 0; }

const char* zsc_vocab_label(const zsc_vocab* vocab, uint32_t id) {
    if (!vocab || id >= vocab->v.size()) return nullptr;
    return vocab->v.label(id).c_str();
}

int zsc_vocab_find(const zsc_vocab* vocab, const char* label, uint32_t* id) {
    if (!vocab || !label) return 0;
    auto hit = vocab->v.find(label);
    if (!hit) return 0;
    if (id) *id = *hit;
    return 1;
}

void zsc_vocab_free(zsc_vocab* vocab) { delete vocab; }

zsc_status zsc_embeddings_load(const char* path, zsc_embedding_format format,
                               const zsc_vocab* vocab, zsc_oov_policy policy,
                               zsc_embeddings** out) {
    if (!path || !vocab || !out) return fail(ZSC_ERR_ARGUMENT, "path, vocab, out must be non-null");
    *out = nullptr;
    return guarded([&] {
        EmbeddingFormat fmt = format == ZSC_EMBEDDINGS_BINARY_TABLE
                                  ? EmbeddingFormat::binary_table
                                  : EmbeddingFormat::word2vec_text;
        OovPolicy pol = policy == ZSC_OOV_ZERO ? OovPolicy::zero : OovPolicy::fail;
        auto* h = new zsc_embeddings{EmbeddingTable::load(path, fmt, vocab->v, pol)};
        *out = h;
    });
}

size_t zsc_embeddings_dim(const zsc_embeddings* table) { return table ? table->t.dim() : 0; }

size_t zsc_embeddings_size(const zsc_embeddings* table) { return table ? table->t.size() : 0; }

const float* zsc_embeddings_vector(const zsc_embeddings* table, uint32_t id) {
    if (!table || id >= table->t.size()) return nullptr;
    return table->t.vector(id).data();
}

size_t zsc_embeddings_oov_count(const zsc_embeddings* table) {
    return table ? table->t.oov_count() : 0;
}

void zsc_embeddings_free(zsc_embeddings* table) { delete table; }

zsc_status zsc_cosine(const float* u, const float* v, size_t dim, double* out) {
    if (!u || !v || !out) return fail(ZSC_ERR_ARGUMENT, "u, v, out must be non-null");
    return guarded([&] { *out = cosine({u, dim}, {v, dim}); });
}

zsc_status zsc_probs_load(const char* path, zsc_probability_format format,
                          const zsc_vocab* vocab, int renormalize, zsc_probs** out) {
    if (!path || !vocab || !out) return fail(ZSC_ERR_ARGUMENT, "path, vocab, out must be non-null");
    *out = nullptr;
    return guarded([&] {
        ProbabilityFormat fmt = format == ZSC_PROBS_ZSPM_BINARY ? ProbabilityFormat::zspm_binary
                                                                : ProbabilityFormat::csv;
        auto* h = new zsc_probs{ProbabilityMatrix::load(path, fmt, vocab->v, renormalize != 0)};
        *out = h;
    });
}

size_t zsc_probs_videos(const zsc_probs* probs) { return probs ? probs->m.videos() : 0; }

size_t zsc_probs_cols(const zsc_probs* probs) { return probs ? probs->m.cols() : 0; }

const char* zsc_probs_video_id(const zsc_probs* probs, size_t video) {
    if (!probs || video >= probs->m.videos()) return nullptr;
    return probs->m.video_ids()[video].c_str();
}

const float* zsc_probs_row(const zsc_probs* probs, size_t video) {
    if (!probs || video >= probs->m.videos()) return nullptr;
    return probs->m.row(static_cast<uint32_t>(video)).data();
}

void zsc_probs_free(zsc_probs* probs) { delete probs; }

zsc_status zsc_space_create(const zsc_embeddings* objects, const zsc_embeddings* scenes,
                            int normalize_before_sum, int exclude_self_pairs, int threads,
                            zsc_space** out) {
    if (!objects || !scenes || !out)
        return fail(ZSC_ERR_ARGUMENT, "objects, scenes, out must be non-null");
    *out = nullptr;
    return guarded([&] {
        SpaceOptions opts;
        opts.normalize_before_sum = normalize_before_sum != 0;
        opts.exclude_self_pairs = exclude_self_pairs != 0;
        auto* h = new zsc_space(objects->t, scenes->t, opts);
        h->s.build_caches(threads);
        *out = h;
    });
}

uint64_t zsc_space_compositions(const zsc_space* space) {
    return space ? space->s.composition_count() : 0;
}

zsc_status zsc_space_similarity(const zsc_space* space, uint32_t object_id, uint32_t scene_id,
                                const float* action_vec, size_t dim, double* out) {
    if (!space || !action_vec || !out)
        return fail(ZSC_ERR_ARGUMENT, "space, action_vec, out must be non-null");
    return guarded([&] {
        *out = space->s.action_similarity(CompositionRef{object_id, scene_id}, {action_vec, dim});
    });
}

void zsc_space_free(zsc_space* space) { delete space; }

void zsc_selection_params_init(zsc_selection_params* params) {
    if (!params) return;
    params->k = 250;
    params->lambda = 0.75;
    params->diversify = 1;
    params->pool_size = 0;
    params->weight_in_selection = 0;
}

zsc_status zsc_select(const zsc_space* space, const float* action_vec, size_t dim,
                      uint32_t action_id, const zsc_selection_params* params,
                      zsc_selection** out) {
    if (!space || !action_vec || !out)
        return fail(ZSC_ERR_ARGUMENT, "space, action_vec, out must be non-null");
    *out = nullptr;
    return guarded([&] {
        SelectionConfig cfg;
        if (params) {
            cfg.k = params->k;
            cfg.lambda = params->lambda;
            cfg.diversify = params->diversify != 0;
            cfg.pool_size = params->pool_size;
            cfg.weight_in_selection = params->weight_in_selection != 0;
        }
        auto* h = new zsc_selection{
            select_compositions(space->s, {action_vec, dim}, action_id, cfg)};
        *out = h;
    });
}

size_t zsc_selection_size(const zsc_selection* selection) {
    return selection ? selection->set.members.size() : 0;
}

zsc_status zsc_selection_member(const zsc_selection* selection, size_t rank, uint32_t* object_id,
                                uint32_t* scene_id, double* similarity, double* mmr_score) {
    if (!selection) return fail(ZSC_ERR_ARGUMENT, "selection must be non-null");
    if (rank >= selection->set.members.size())
        return fail(ZSC_ERR_ARGUMENT, "rank out of range");
    const SelectedMember& m = selection->set.members[rank];
    if (object_id) *object_id = m.ref.object_id;
    if (scene_id) *scene_id = m.ref.scene_id;
    if (similarity) *similarity = m.similarity;
    if (mmr_score) *mmr_score = m.mmr_score;
    g_last_error.clear();
    return ZSC_OK;
}

void zsc_selection_free(zsc_selection* selection) { delete selection; }

zsc_status zsc_run(const char* command, const char* config_json, const char* base_dir,
                   char** summary_json) {
    if (!command || !config_json)
        return fail(ZSC_ERR_ARGUMENT, "command and config_json must be non-null");
    if (summary_json) *summary_json = nullptr;
    return guarded([&] {
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            raise(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
        }
        if (!cfg.is_object()) raise(ErrorKind::config, "config must be a JSON object");
        nlohmann::json summary = run_command(command, cfg, base_dir ? base_dir : "");
        if (summary_json) {
            *summary_json = dup_string(summary.dump(2));
            if (!*summary_json) raise(ErrorKind::internal, "out of memory");
        }
    });
}

void zsc_string_free(char* text) { std::free(text); }

} // extern "C"
