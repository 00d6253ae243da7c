#ifndef ZSCOMP_H
#define ZSCOMP_H

/* C interface to the zero-shot composition engine. All functions return a
 * zsc_status; outputs are written through pointer arguments. Handles are
 * opaque and must be released with their matching _free function. Error
 * messages are thread-local: call zsc_last_error() right after a failure.
 * Handles are safe for concurrent readers once fully constructed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ZSC_API __declspec(dllexport)
#else
#define ZSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zsc_status {
    ZSC_OK = 0,
    ZSC_ERR_IO = 1,
    ZSC_ERR_FORMAT = 2,
    ZSC_ERR_ARGUMENT = 3,
    ZSC_ERR_SCHEMA = 4,
    ZSC_ERR_DATA = 5,
    ZSC_ERR_CONFIG = 6,
    ZSC_ERR_LOOKUP = 7,
    ZSC_ERR_SIZE_GUARD = 8,
    ZSC_ERR_INTERNAL = 9
} zsc_status;

typedef enum zsc_source_kind {
    ZSC_SOURCE_OBJECTS = 0,
    ZSC_SOURCE_SCENES = 1,
    ZSC_SOURCE_ACTIONS = 2,
    ZSC_SOURCE_GENERIC = 3
} zsc_source_kind;

typedef enum zsc_embedding_format {
    ZSC_EMBEDDINGS_WORD2VEC_TEXT = 0,
    ZSC_EMBEDDINGS_BINARY_TABLE = 1
} zsc_embedding_format;

typedef enum zsc_probability_format {
    ZSC_PROBS_CSV = 0,
    ZSC_PROBS_ZSPM_BINARY = 1
} zsc_probability_format;

typedef enum zsc_oov_policy {
    ZSC_OOV_FAIL = 0,
    ZSC_OOV_ZERO = 1
} zsc_oov_policy;

typedef struct zsc_vocab zsc_vocab;
typedef struct zsc_embeddings zsc_embeddings;
typedef struct zsc_probs zsc_probs;
typedef struct zsc_space zsc_space;
typedef struct zsc_selection zsc_selection;

/* Library version string, static storage. */
ZSC_API const char* zsc_version(void);

/* Symbolic name for a status code ("ok", "io", "format", ...). */
ZSC_API const char* zsc_status_name(zsc_status status);

/* Message of the calling thread's most recent failure; empty string if the
 * last call on this thread succeeded. Storage is owned by the library. */
ZSC_API const char* zsc_last_error(void);

/* ---- vocabularies ---- */

ZSC_API zsc_status zsc_vocab_load(const char* path, zsc_source_kind kind, zsc_vocab** out);
ZSC_API size_t zsc_vocab_size(const zsc_vocab* vocab);
/* NULL when id is out of range. */
ZSC_API const char* zsc_vocab_label(const zsc_vocab* vocab, uint32_t id);
/* Returns 1 and writes *id when found, 0 otherwise. */
ZSC_API int zsc_vocab_find(const zsc_vocab* vocab, const char* label, uint32_t* id);
ZSC_API void zsc_vocab_free(zsc_vocab* vocab);

/* ---- embedding tables ---- */

ZSC_API zsc_status zsc_embeddings_load(const char* path, zsc_embedding_format format,
                                       const zsc_vocab* vocab, zsc_oov_policy policy,
                                       zsc_embeddings** out);
ZSC_API size_t zsc_embeddings_dim(const zsc_embeddings* table);
ZSC_API size_t zsc_embeddings_size(const zsc_embeddings* table);
/* Pointer to the label's dim() floats; NULL when id is out of range. */
ZSC_API const float* zsc_embeddings_vector(const zsc_embeddings* table, uint32_t id);
ZSC_API size_t zsc_embeddings_oov_count(const zsc_embeddings* table);
ZSC_API void zsc_embeddings_free(zsc_embeddings* table);

/* Cosine similarity of two length-dim vectors; zero-norm operands give 0. */
ZSC_API zsc_status zsc_cosine(const float* u, const float* v, size_t dim, double* out);

/* ---- probability matrices ---- */

ZSC_API zsc_status zsc_probs_load(const char* path, zsc_probability_format format,
                                  const zsc_vocab* vocab, int renormalize, zsc_probs** out);
ZSC_API size_t zsc_probs_videos(const zsc_probs* probs);
ZSC_API size_t zsc_probs_cols(const zsc_probs* probs);
/* NULL when the index is out of range. */
ZSC_API const char* zsc_probs_video_id(const zsc_probs* probs, size_t video);
ZSC_API const float* zsc_probs_row(const zsc_probs* probs, size_t video);
ZSC_API void zsc_probs_free(zsc_probs* probs);

/* ---- composition spaces ---- */

/* Builds the object x scene space and its similarity caches. threads <= 0
 * selects the hardware concurrency. */
ZSC_API zsc_status zsc_space_create(const zsc_embeddings* objects, const zsc_embeddings* scenes,
                                    int normalize_before_sum, int exclude_self_pairs,
                                    int threads, zsc_space** out);
ZSC_API uint64_t zsc_space_compositions(const zsc_space* space);
/* s(c, a) for one composition against a length-dim action vector. */
ZSC_API zsc_status zsc_space_similarity(const zsc_space* space, uint32_t object_id,
                                        uint32_t scene_id, const float* action_vec, size_t dim,
                                        double* out);
ZSC_API void zsc_space_free(zsc_space* space);

/* ---- top-k composition selection ---- */

typedef struct zsc_selection_params {
    uint32_t k;              /* compositions to keep, default 250 */
    double lambda;           /* MMR trade-off in [0, 1], default 0.75 */
    int diversify;           /* 0 plain relevance, 1 MMR, default 1 */
    int64_t pool_size;       /* -1 full space, 0 default rule, else explicit */
    int weight_in_selection; /* rank on s * cos(phi_o, phi_s) */
} zsc_selection_params;

/* Fills params with the documented defaults. */
ZSC_API void zsc_selection_params_init(zsc_selection_params* params);

ZSC_API zsc_status zsc_select(const zsc_space* space, const float* action_vec, size_t dim,
                              uint32_t action_id, const zsc_selection_params* params,
                              zsc_selection** out);
ZSC_API size_t zsc_selection_size(const zsc_selection* selection);
/* Member fields in rank order; any output pointer may be NULL. */
ZSC_API zsc_status zsc_selection_member(const zsc_selection* selection, size_t rank,
                                        uint32_t* object_id, uint32_t* scene_id,
                                        double* similarity, double* mmr_score);
ZSC_API void zsc_selection_free(zsc_selection* selection);

/* ---- full pipeline ---- */

/* Runs one CLI command ("select", "classify", "evaluate", "ablate",
 * "fixtures", "oracle-check") against a JSON config string. Relative paths
 * in the config resolve against base_dir (NULL or "" means the process
 * working directory). On success *summary_json receives a malloc'd JSON
 * summary; release it with zsc_string_free. */
ZSC_API zsc_status zsc_run(const char* command, const char* config_json, const char* base_dir,
                           char** summary_json);
ZSC_API void zsc_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* ZSCOMP_H */
