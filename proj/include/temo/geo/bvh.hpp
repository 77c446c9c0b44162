#pragma once

#include <optional>
#include <vector>

#include "temo/geo/mesh.hpp"
#include "temo/geo/raycast.hpp"

namespace temo::geo {

struct FaceHit {
    int face = -1;
    double t = 0.0;
    Vec3 bary{};
};

// Median-split bounding volume hierarchy over mesh faces (leaves hold up to
// 8). nearest() resolves equal-t ties toward the lower face id, so results
// coincide exactly with a sequential scan over all faces using the same
// triangle test.
class Bvh {
public:
    explicit Bvh(const Mesh& mesh);

    std::optional<FaceHit> nearest(const Vec3& origin, const Vec3& dir) const;

private:
    struct Node {
        Vec3 bmin, bmax;
        int left = -1, right = -1;   // internal nodes
        int first = 0, count = 0;    // leaves: range into face_ids_
    };

    int build(std::vector<int>& ids, int begin, int end,
              const std::vector<Vec3>& centroids);

    const Mesh& mesh_;
    std::vector<Node> nodes_;
    std::vector<int> face_ids_;
    int root_ = -1;
};

}  // namespace temo::geo
