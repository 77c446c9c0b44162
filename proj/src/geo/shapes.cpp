#include "temo/geo/shapes.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::geo {

Mesh make_uv_sphere(double radius, int stacks, int slices) {
    if (stacks < 2 || slices < 3)
        raise(ErrorKind::Config, "sphere needs stacks >= 2 and slices >= 3");
    constexpr double pi = 3.14159265358979323846;
    Mesh m;
    m.vertices.push_back({0, radius, 0});  // north pole
    for (int s = 1; s < stacks; ++s) {
        double phi = pi * s / stacks;
        for (int k = 0; k < slices; ++k) {
            double theta = 2.0 * pi * k / slices;
            m.vertices.push_back({radius * std::sin(phi) * std::cos(theta),
                                  radius * std::cos(phi),
                                  radius * std::sin(phi) * std::sin(theta)});
        }
    }
    m.vertices.push_back({0, -radius, 0});  // south pole
    int south = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [&](int s, int k) { return 1 + (s - 1) * slices + (k % slices); };
    for (int k = 0; k < slices; ++k)
        m.faces.push_back({0, ring(1, k + 1), ring(1, k)});
    for (int s = 1; s + 1 < stacks; ++s)
        for (int k = 0; k < slices; ++k) {
            int a = ring(s, k), b = ring(s, k + 1);
            int c = ring(s + 1, k), d = ring(s + 1, k + 1);
            m.faces.push_back({a, b, d});
            m.faces.push_back({a, d, c});
        }
    for (int k = 0; k < slices; ++k)
        m.faces.push_back({south, ring(stacks - 1, k),
                           ring(stacks - 1, k + 1)});
    compute_face_normals(m);
    return m;
}

Mesh make_quad(double half) {
    Mesh m;
    m.vertices = {{-half, -half, 0}, {half, -half, 0}, {half, half, 0},
                  {-half, half, 0}};
    m.faces = {{0, 1, 2}, {0, 2, 3}};
    compute_face_normals(m);
    return m;
}

}  // namespace temo::geo
