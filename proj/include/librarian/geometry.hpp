#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "librarian/error.hpp"

namespace librarian {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline bool operator==(const Point2& a, const Point2& b) {
  return a.x == b.x && a.y == b.y;
}

inline bool operator==(const Point3& a, const Point3& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

/// Rigid transform p' = R * p + t. Rotation is row-major 3x3.
struct RigidTransform {
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  Point3 translation;

  Point3 apply(const Point3& p) const {
    const auto& r = rotation;
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z + translation.x,
            r[3] * p.x + r[4] * p.y + r[5] * p.z + translation.y,
            r[6] * p.x + r[7] * p.y + r[8] * p.z + translation.z};
  }
};

/// Checks R^T R = I within tol and det(R) > 0.
inline bool is_orthonormal(const std::array<double, 9>& r, double tol = 1e-9) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[k * 3 + i] * r[k * 3 + j];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) -
                     r[1] * (r[3] * r[8] - r[5] * r[6]) +
                     r[2] * (r[3] * r[7] - r[4] * r[6]);
  return det > 0.0;
}

/// Pinhole camera. `pose` maps world coordinates into the camera frame
/// (x right, y down, z forward).
struct CameraModel {
  double focal_px = 1.0;
  Point2 principal_point;
  RigidTransform pose;
};

inline void validate_camera(const CameraModel& cam) {
  if (!(cam.focal_px > 0.0))
    throw ValidationError("camera: focal_px must be positive");
  if (!is_orthonormal(cam.pose.rotation))
    throw ValidationError("camera: rotation is not orthonormal");
}

/// Shelf frame: x along the shelf width, y up (levels stack in +y),
/// z out of the shelf toward the viewer. Level fronts lie on z = 0.
struct ShelfGeometry {
  RigidTransform origin_pose; // shelf frame -> world
  double level_width_mm = 0.0;
  double level_height_mm = 0.0;
  double level_depth_mm = 0.0;
  int n_levels = 1;
};

inline void validate_shelf(const ShelfGeometry& shelf) {
  if (!(shelf.level_width_mm > 0.0 && shelf.level_height_mm > 0.0 &&
        shelf.level_depth_mm > 0.0))
    throw ValidationError("shelf: level dimensions must be positive");
  if (shelf.n_levels < 1)
    throw ValidationError("shelf: n_levels must be >= 1");
  if (!is_orthonormal(shelf.origin_pose.rotation))
    throw ValidationError("shelf: origin rotation is not orthonormal");
}

/// Front-plane corners of one shelf level in world coordinates,
/// ordered top-left, top-right, bottom-right, bottom-left.
inline std::array<Point3, 4> shelf_level_corners(const ShelfGeometry& shelf,
                                                 int level) {
  if (level < 0 || level >= shelf.n_levels)
    throw DomainError("shelf_level_corners: level " + std::to_string(level) +
                      " out of range [0, " + std::to_string(shelf.n_levels) +
                      ")");
  const double w = shelf.level_width_mm;
  const double y0 = static_cast<double>(level) * shelf.level_height_mm;
  const double y1 = y0 + shelf.level_height_mm;
  return {shelf.origin_pose.apply({0.0, y1, 0.0}),
          shelf.origin_pose.apply({w, y1, 0.0}),
          shelf.origin_pose.apply({w, y0, 0.0}),
          shelf.origin_pose.apply({0.0, y0, 0.0})};
}

/// Projects a world point to pixels. Throws if the point is not strictly
/// in front of the camera.
inline Point2 project_point(const CameraModel& cam, const Point3& p) {
  const Point3 c = cam.pose.apply(p);
  if (!(c.z > 0.0))
    throw DomainError("project_point: point at or behind the camera plane");
  return {cam.focal_px * c.x / c.z + cam.principal_point.x,
          cam.focal_px * c.y / c.z + cam.principal_point.y};
}

/// 3x3 projective map between image planes. Stored normalized with
/// m[2][2] = 1 whenever that entry is nonzero.
struct Homography {
  std::array<std::array<double, 3>, 3> m = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  static Homography identity() { return {}; }

  static Homography translation(double dx, double dy) {
    Homography h;
    h.m[0][2] = dx;
    h.m[1][2] = dy;
    return h;
  }

  static Homography scale(double s) {
    Homography h;
    h.m[0][0] = s;
    h.m[1][1] = s;
    return h;
  }

  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  void normalize() {
    const double w = m[2][2];
    if (std::abs(w) > 1e-12) {
      for (auto& row : m)
        for (auto& v : row) v /= w;
    }
  }
};

/// Perspective-divided image of p under h. Throws when p maps to the
/// line at infinity.
inline Point2 apply_homography(const Homography& h, const Point2& p) {
  const auto& m = h.m;
  const double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  if (std::abs(w) < 1e-12)
    throw DomainError("apply_homography: point maps to the line at infinity");
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
          (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

namespace detail {

// Gaussian elimination with partial pivoting on an n x n system.
// Returns false when the system is singular.
template <std::size_t N>
bool solve_linear(std::array<std::array<double, N + 1>, N>& a,
                  std::array<double, N>& out) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= N; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (std::size_t i = N; i-- > 0;) {
    double s = a[i][N];
    for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * out[c];
    out[i] = s / a[i][i];
  }
  return true;
}

inline bool has_collinear_triple(const std::array<Point2, 4>& pts) {
  // Cross-product area test over all 4 triples, scaled by the point spread.
  double span = 0.0;
  for (const auto& p : pts) span = std::max({span, std::abs(p.x), std::abs(p.y)});
  const double eps = 1e-9 * std::max(1.0, span * span);
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2, 3> t;
    int n = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) t[n++] = pts[i];
    const double cross = (t[1].x - t[0].x) * (t[2].y - t[0].y) -
                         (t[1].y - t[0].y) * (t[2].x - t[0].x);
    if (std::abs(cross) < eps) return true;
  }
  return false;
}

} // namespace detail

/// Exact 4-point homography fit: 8 linear equations in the 8 unknowns of
/// H with H[2][2] = 1. Throws on collinear (degenerate) configurations.
inline Homography fit_homography(const std::array<Point2, 4>& src,
                                 const std::array<Point2, 4>& dst) {
  if (detail::has_collinear_triple(src))
    throw DomainError("fit_homography: three source points are collinear");
  if (detail::has_collinear_triple(dst))
    throw DomainError("fit_homography: three destination points are collinear");

  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const Point2& s = src[i];
    const Point2& d = dst[i];
    a[2 * i] = {s.x, s.y, 1, 0, 0, 0, -d.x * s.x, -d.x * s.y, d.x};
    a[2 * i + 1] = {0, 0, 0, s.x, s.y, 1, -d.y * s.x, -d.y * s.y, d.y};
  }
  std::array<double, 8> h{};
  if (!detail::solve_linear<8>(a, h))
    throw DomainError("fit_homography: singular system");

  Homography out;
  out.m = {{{h[0], h[1], h[2]}, {h[3], h[4], h[5]}, {h[6], h[7], 1.0}}};
  if (std::abs(out.det()) < 1e-12)
    throw DomainError("fit_homography: resulting matrix is singular");
  return out;
}

/// Inverse map. Throws on singular input.
inline Homography invert_homography(const Homography& h) {
  const double d = h.det();
  if (std::abs(d) < 1e-12)
    throw DomainError("invert_homography: singular matrix");
  const auto& m = h.m;
  Homography inv;
  inv.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
  inv.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
  inv.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
  inv.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
  inv.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
  inv.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
  inv.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
  inv.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
  inv.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
  inv.normalize();
  return inv;
}

/// Vertex-wise homography application, order preserved.
inline std::vector<Point2> unrectify_polygon(const Homography& h_inv,
                                             const std::vector<Point2>& poly) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (const auto& p : poly) out.push_back(apply_homography(h_inv, p));
  return out;
}

} // namespace librarian
