#include "temo/geo/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "temo/util/error.hpp"

namespace temo::geo {
namespace {

constexpr int kLeafSize = 8;

struct Box {
    Vec3 bmin{std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
    Vec3 bmax{-std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};

    void grow(const Vec3& p) {
        bmin = min(bmin, p);
        bmax = max(bmax, p);
    }
};

// Conservative slab test clipped to [0, tmax]; per-axis branches avoid the
// 0 * inf pitfalls of the branchless form.
bool box_hit(const Vec3& bmin, const Vec3& bmax, const Vec3& o, const Vec3& d,
             double tmax, double& tmin_out) {
    double tmin = 0.0, tmax_cur = tmax;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-14) {
            if (o[a] < bmin[a] || o[a] > bmax[a]) return false;
            continue;
        }
        double t1 = (bmin[a] - o[a]) / d[a];
        double t2 = (bmax[a] - o[a]) / d[a];
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax_cur = std::min(tmax_cur, t2);
        if (tmin > tmax_cur) return false;
    }
    tmin_out = tmin;
    return true;
}

}  // namespace

Bvh::Bvh(const Mesh& mesh) : mesh_(mesh) {
    if (mesh.faces.empty()) raise(ErrorKind::Internal, "BVH over empty mesh");
    std::size_t n = mesh.faces.size();
    face_ids_.resize(n);
    std::vector<Vec3> centroids(n);
    for (std::size_t f = 0; f < n; ++f) {
        face_ids_[f] = static_cast<int>(f);
        const auto& [a, b, c] = mesh.faces[f];
        centroids[f] =
            (mesh.vertices[a] + mesh.vertices[b] + mesh.vertices[c]) / 3.0;
    }
    nodes_.reserve(2 * n);
    root_ = build(face_ids_, 0, static_cast<int>(n), centroids);
}

int Bvh::build(std::vector<int>& ids, int begin, int end,
               const std::vector<Vec3>& centroids) {
    Node node;
    Box box, cbox;
    for (int i = begin; i < end; ++i) {
        const auto& [a, b, c] = mesh_.faces[ids[i]];
        box.grow(mesh_.vertices[a]);
        box.grow(mesh_.vertices[b]);
        box.grow(mesh_.vertices[c]);
        cbox.grow(centroids[ids[i]]);
    }
    node.bmin = box.bmin;
    node.bmax = box.bmax;
    int count = end - begin;
    Vec3 extent = cbox.bmax - cbox.bmin;
    int axis = 0;
    if (extent.y > extent[axis]) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    if (count <= kLeafSize || extent[axis] < 1e-12) {
        node.first = begin;
        node.count = count;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int mid = begin + count / 2;
    std::nth_element(ids.begin() + begin, ids.begin() + mid, ids.begin() + end,
                     [&](int x, int y) {
                         double cx = centroids[x][axis], cy = centroids[y][axis];
                         return cx < cy || (cx == cy && x < y);
                     });
    int left = build(ids, begin, mid, centroids);
    int right = build(ids, mid, end, centroids);
    node.left = left;
    node.right = right;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
}

std::optional<FaceHit> Bvh::nearest(const Vec3& origin, const Vec3& dir) const {
    FaceHit best;
    best.t = std::numeric_limits<double>::infinity();
    int stack[64];
    int top = 0;
    stack[top++] = root_;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        double tmin;
        // Strict > keeps nodes whose entry distance ties best.t, so equal-t
        // faces with lower ids are still found.
        if (!box_hit(node.bmin, node.bmax, origin, dir, best.t, tmin) ||
            tmin > best.t)
            continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                int f = face_ids_[i];
                const auto& [a, b, c] = mesh_.faces[f];
                auto hit = ray_triangle_intersect(origin, dir, mesh_.vertices[a],
                                                  mesh_.vertices[b],
                                                  mesh_.vertices[c]);
                if (!hit) continue;
                if (hit->t < best.t || (hit->t == best.t && f < best.face)) {
                    best.face = f;
                    best.t = hit->t;
                    best.bary = hit->bary;
                }
            }
        } else {
            // near child first for earlier pruning
            double tl = 0.0, tr = 0.0;
            bool hl = box_hit(nodes_[node.left].bmin, nodes_[node.left].bmax,
                              origin, dir, best.t, tl);
            bool hr = box_hit(nodes_[node.right].bmin, nodes_[node.right].bmax,
                              origin, dir, best.t, tr);
            if (hl && hr) {
                if (tl <= tr) {
                    stack[top++] = node.right;
                    stack[top++] = node.left;
                } else {
                    stack[top++] = node.left;
                    stack[top++] = node.right;
                }
            } else if (hl) {
                stack[top++] = node.left;
            } else if (hr) {
                stack[top++] = node.right;
            }
        }
    }
    if (best.face < 0) return std::nullopt;
    return best;
}

}  // namespace temo::geo
