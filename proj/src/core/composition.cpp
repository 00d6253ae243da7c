#include "core/composition.hpp"

#include <cmath>

#include "core/binio.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"

namespace zscomp {

namespace {

constexpr char kZspcMagic[4] = {'Z', 'S', 'P', 'C'};
constexpr uint32_t kZspcVersion = 1;

double dot(std::span<const float> u, std::span<const float> v) {
    double acc = 0.0;
    for (size_t i = 0; i < u.size(); ++i) acc += static_cast<double>(u[i]) * v[i];
    return acc;
}

double clamp_unit(double c) {
    if (c > 1.0) return 1.0;
    if (c < -1.0) return -1.0;
    return c;
}

// Norm of phi_o + phi_s accumulated from the summed components. The
// decomposition through norms and cross dots cancels catastrophically when
// the two vectors nearly oppose; direct accumulation stays accurate.
double direct_pair_norm(std::span<const float> o, std::span<const float> s) {
    double acc = 0.0;
    for (size_t i = 0; i < o.size(); ++i) {
        double c = static_cast<double>(o[i]) + s[i];
        acc += c * c;
    }
    return std::sqrt(acc);
}

// Copies one table's vectors, optionally rescaled to unit norm.
void copy_vectors(const EmbeddingTable& table, bool normalize, std::vector<float>& vecs,
                  std::vector<float>& norms) {
    size_t d = table.dim();
    vecs.reserve(table.size() * d);
    norms.reserve(table.size());
    for (uint32_t i = 0; i < table.size(); ++i) {
        auto row = table.vector(i);
        double n = table.norm(i);
        if (normalize && n > 0.0) {
            double inv = 1.0 / n;
            for (float v : row) vecs.push_back(static_cast<float>(v * inv));
            double n2 = 0.0;
            for (size_t k = vecs.size() - d; k < vecs.size(); ++k)
                n2 += static_cast<double>(vecs[k]) * vecs[k];
            norms.push_back(static_cast<float>(std::sqrt(n2)));
        } else {
            vecs.insert(vecs.end(), row.begin(), row.end());
            norms.push_back(static_cast<float>(n));
        }
    }
}

} // namespace

CompositionSpace::CompositionSpace(const EmbeddingTable& objects, const EmbeddingTable& scenes,
                                   SpaceOptions options) {
    if (objects.size() == 0 || scenes.size() == 0)
        raise(ErrorKind::argument, "composition space needs non-empty object and scene tables");
    if (objects.dim() != scenes.dim())
        raise(ErrorKind::argument, "object and scene embeddings differ in dimension (" +
                                       std::to_string(objects.dim()) + " vs " +
                                       std::to_string(scenes.dim()) + ")");
    dim_ = objects.dim();
    n_obj_ = objects.size();
    n_scn_ = scenes.size();
    exclude_self_ = options.exclude_self_pairs;
    copy_vectors(objects, options.normalize_before_sum, obj_vecs_, obj_norms_);
    copy_vectors(scenes, options.normalize_before_sum, scn_vecs_, scn_norms_);
    if (composition_count() == 0)
        raise(ErrorKind::argument, "self-pair exclusion leaves an empty composition space");
}

size_t CompositionSpace::composition_count() const {
    size_t total = n_obj_ * n_scn_;
    if (exclude_self_) total -= std::min(n_obj_, n_scn_);
    return total;
}

void CompositionSpace::check_ids(CompositionRef c) const {
    if (c.object_id >= n_obj_)
        raise(ErrorKind::argument, "object id " + std::to_string(c.object_id) + " out of range");
    if (c.scene_id >= n_scn_)
        raise(ErrorKind::argument, "scene id " + std::to_string(c.scene_id) + " out of range");
}

double CompositionSpace::flag_degenerate() const {
    degenerate_.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
}

void CompositionSpace::build_caches(int threads) {
    pair_norms_.assign(n_obj_ * n_scn_, 0.0f);
    cross_dots_.assign(n_obj_ * n_scn_, 0.0f);
    parallel_for(0, n_obj_, threads, [&](size_t o) {
        auto vo = object_vector(static_cast<uint32_t>(o));
        float* pn = pair_norms_.data() + o * n_scn_;
        float* cd = cross_dots_.data() + o * n_scn_;
        for (uint32_t s = 0; s < n_scn_; ++s) {
            auto vs = scene_vector(s);
            double cross = 0.0, sum2 = 0.0;
            for (size_t i = 0; i < dim_; ++i) {
                double a = vo[i], b = vs[i];
                cross += a * b;
                double c = a + b;
                sum2 += c * c;
            }
            cd[s] = static_cast<float>(cross);
            pn[s] = static_cast<float>(std::sqrt(sum2));
        }
    });
}

void CompositionSpace::save_cache(const std::string& path) const {
    if (!caches_built()) raise(ErrorKind::internal, "caches not built");
    auto out = binio::open_out(path);
    binio::write_bytes(out, kZspcMagic, 4);
    binio::write_u32(out, kZspcVersion);
    binio::write_u64(out, n_obj_);
    binio::write_u64(out, n_scn_);
    binio::write_f32_array(out, pair_norms_.data(), pair_norms_.size());
    binio::write_f32_array(out, cross_dots_.data(), cross_dots_.size());
    binio::finish_write(out, path);
}

void CompositionSpace::load_cache(const std::string& path) {
    auto in = binio::open_in(path);
    binio::check_magic(in, kZspcMagic, path);
    uint32_t version = binio::read_u32(in, path);
    if (version != kZspcVersion)
        raise(ErrorKind::format, path + ": unsupported ZSPC version " + std::to_string(version));
    uint64_t no = binio::read_u64(in, path);
    uint64_t ns = binio::read_u64(in, path);
    if (no != n_obj_ || ns != n_scn_)
        raise(ErrorKind::format, path + ": cache is " + std::to_string(no) + "x" +
                                     std::to_string(ns) + ", space is " + std::to_string(n_obj_) +
                                     "x" + std::to_string(n_scn_));
    pair_norms_.resize(n_obj_ * n_scn_);
    cross_dots_.resize(n_obj_ * n_scn_);
    binio::read_f32_array(in, pair_norms_.data(), pair_norms_.size(), path);
    binio::read_f32_array(in, cross_dots_.data(), cross_dots_.size(), path);
}

std::vector<float> CompositionSpace::composition_embedding(CompositionRef c) const {
    check_ids(c);
    auto vo = object_vector(c.object_id);
    auto vs = scene_vector(c.scene_id);
    std::vector<float> out(dim_);
    for (size_t d = 0; d < dim_; ++d) out[d] = vo[d] + vs[d];
    return out;
}

CompositionSpace::ActionContext
CompositionSpace::prepare_action(std::span<const float> action_vec) const {
    if (action_vec.size() != dim_)
        raise(ErrorKind::internal, "action vector dimension does not match composition space");
    if (!caches_built())
        raise(ErrorKind::internal, "composition caches must be built before streaming scores");
    ActionContext ctx;
    ctx.object_dots.resize(n_obj_);
    ctx.scene_dots.resize(n_scn_);
    for (uint32_t o = 0; o < n_obj_; ++o) ctx.object_dots[o] = dot(object_vector(o), action_vec);
    for (uint32_t s = 0; s < n_scn_; ++s) ctx.scene_dots[s] = dot(scene_vector(s), action_vec);
    ctx.action_norm = std::sqrt(dot(action_vec, action_vec));
    return ctx;
}

double CompositionSpace::similarity_from(const ActionContext& ctx, uint32_t o, uint32_t s) const {
    double pn = pair_norms_[size_t(o) * n_scn_ + s];
    double denom = pn * ctx.action_norm;
    if (denom <= 0.0) return flag_degenerate();
    return clamp_unit((ctx.object_dots[o] + ctx.scene_dots[s]) / denom);
}

double CompositionSpace::action_similarity(CompositionRef c,
                                           std::span<const float> action_vec) const {
    check_ids(c);
    auto vo = object_vector(c.object_id);
    auto vs = scene_vector(c.scene_id);
    double pn = caches_built() ? pair_norm(c.object_id, c.scene_id) : direct_pair_norm(vo, vs);
    double na2 = dot(action_vec, action_vec);
    if (pn <= 0.0 || na2 <= 0.0) return flag_degenerate();
    double num = dot(vo, action_vec) + dot(vs, action_vec);
    return clamp_unit(num / (pn * std::sqrt(na2)));
}

double CompositionSpace::pair_similarity(CompositionRef c1, CompositionRef c2) const {
    check_ids(c1);
    check_ids(c2);
    double pn1, pn2;
    if (caches_built()) {
        pn1 = pair_norm(c1.object_id, c1.scene_id);
        pn2 = pair_norm(c2.object_id, c2.scene_id);
    } else {
        pn1 = direct_pair_norm(object_vector(c1.object_id), scene_vector(c1.scene_id));
        pn2 = direct_pair_norm(object_vector(c2.object_id), scene_vector(c2.scene_id));
    }
    if (pn1 <= 0.0 || pn2 <= 0.0) return flag_degenerate();
    auto o1 = object_vector(c1.object_id), s1 = scene_vector(c1.scene_id);
    auto o2 = object_vector(c2.object_id), s2 = scene_vector(c2.scene_id);
    double num = dot(o1, o2) + dot(o1, s2) + dot(s1, o2) + dot(s1, s2);
    return clamp_unit(num / (pn1 * pn2));
}

double CompositionSpace::weight(CompositionRef c) const {
    check_ids(c);
    double no = obj_norms_[c.object_id], ns = scn_norms_[c.scene_id];
    if (no <= 0.0 || ns <= 0.0) return 0.0;
    double cross = caches_built() ? cross_dot(c.object_id, c.scene_id)
                                  : dot(object_vector(c.object_id), scene_vector(c.scene_id));
    return clamp_unit(cross / (no * ns));
}

} // namespace zscomp
