#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sepgap {

// Halfspace {x : normal . x <= offset} with unit normal.
struct Halfspace {
  Eigen::Vector4d normal;
  double offset;
};

// Outer (certified) approximation of a joint numerical range in R^4: the
// intersection of supporting halfspaces. Every achievable point lies inside.
struct JointRangeOuter {
  std::vector<Halfspace> halfspaces;
};

// Incremental halfspace intersection in R^4 (double description style).
// Starts from an artificial bounding box; a vertex of the final polytope that
// still touches a box facet exposes an unbounded input.
class HalfspaceIntersection4 {
 public:
  struct Vertex {
    Eigen::Vector4d x;
    std::vector<int> active;  // sorted plane ids this vertex lies on
  };

  // box_bound: artificial starting box; data_scale: magnitude of the real
  // offsets, sets the absolute pivot tolerance
  explicit HalfspaceIntersection4(double box_bound, double data_scale = 1.0, double tol = 1e-9)
      : box_bound_(box_bound), tol_abs_(tol * std::max(1.0, data_scale)) {
    for (int axis = 0; axis < 4; ++axis)
      for (double sign : {1.0, -1.0}) {
        Halfspace h;
        h.normal = Eigen::Vector4d::Zero();
        h.normal[axis] = sign;
        h.offset = box_bound_;
        planes_.push_back(h);
      }
    for (int m = 0; m < 16; ++m) {
      Vertex v;
      for (int axis = 0; axis < 4; ++axis) {
        const bool pos = (m >> axis) & 1;
        v.x[axis] = pos ? box_bound_ : -box_bound_;
        v.active.push_back(2 * axis + (pos ? 0 : 1));
      }
      std::sort(v.active.begin(), v.active.end());
      vertices_.push_back(v);
    }
  }

  void add(const Halfspace& h) {
    const int id = static_cast<int>(planes_.size());
    planes_.push_back(h);
    const double tol = tol_abs_;

    std::vector<double> dist(vertices_.size());
    std::vector<int> kept, cut, on;
    for (size_t i = 0; i < vertices_.size(); ++i) {
      dist[i] = h.normal.dot(vertices_[i].x) - h.offset;
      if (dist[i] > tol)
        cut.push_back(static_cast<int>(i));
      else if (dist[i] >= -tol)
        on.push_back(static_cast<int>(i));
      else
        kept.push_back(static_cast<int>(i));
    }
    for (int i : on) insert_sorted(vertices_[i].active, id);
    if (cut.empty()) return;

    std::vector<Vertex> born;
    for (int iu : kept)
      for (int iv : cut) {
        std::vector<int> shared;
        std::set_intersection(vertices_[iu].active.begin(), vertices_[iu].active.end(),
                              vertices_[iv].active.begin(), vertices_[iv].active.end(),
                              std::back_inserter(shared));
        if (shared.size() < 3 || !rank3(shared)) continue;
        const double t = dist[iu] / (dist[iu] - dist[iv]);
        Vertex w;
        w.x = vertices_[iu].x + t * (vertices_[iv].x - vertices_[iu].x);
        if (!feasible(w.x, tol)) continue;
        w.active = shared;
        insert_sorted(w.active, id);
        born.push_back(std::move(w));
      }

    std::vector<Vertex> next;
    next.reserve(kept.size() + on.size() + born.size());
    for (int i : kept) next.push_back(std::move(vertices_[i]));
    for (int i : on) next.push_back(std::move(vertices_[i]));
    const double merge_tol = 10 * tol;
    for (auto& w : born) {
      bool merged = false;
      for (auto& v : next)
        if ((v.x - w.x).norm() <= merge_tol) {
          std::vector<int> uni;
          std::set_union(v.active.begin(), v.active.end(), w.active.begin(), w.active.end(),
                         std::back_inserter(uni));
          v.active = std::move(uni);
          merged = true;
          break;
        }
      if (!merged) next.push_back(std::move(w));
    }
    vertices_.swap(next);
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }

  // true if some vertex still lies on an artificial box facet
  bool touches_box() const {
    for (const auto& v : vertices_)
      for (int id : v.active)
        if (id < 8) return true;
    return false;
  }

 private:
  static void insert_sorted(std::vector<int>& v, int id) {
    v.insert(std::upper_bound(v.begin(), v.end(), id), id);
  }

  bool feasible(const Eigen::Vector4d& x, double tol) const {
    for (const auto& p : planes_)
      if (p.normal.dot(x) - p.offset > tol) return false;
    return true;
  }

  bool rank3(const std::vector<int>& ids) const {
    Eigen::MatrixXd m(ids.size(), 4);
    for (size_t r = 0; r < ids.size(); ++r) m.row(r) = planes_[ids[r]].normal.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > 1e-9 * s[0]) ++rank;
    return rank == 3;
  }

  double box_bound_;
  double tol_abs_;
  std::vector<Halfspace> planes_;
  std::vector<Vertex> vertices_;
};

// All vertices of the (bounded) intersection of the given halfspaces.
// Throws if the intersection is unbounded.
inline std::vector<Eigen::Vector4d> vertex_enum_4d(const JointRangeOuter& outer) {
  if (outer.halfspaces.empty()) throw std::invalid_argument("vertex_enum_4d: no halfspaces");
  double scale = 1.0;
  for (const auto& h : outer.halfspaces) scale = std::max(scale, std::abs(h.offset));
  HalfspaceIntersection4 inter(1e4 * scale, scale);
  for (const auto& h : outer.halfspaces) inter.add(h);
  if (inter.touches_box()) throw std::invalid_argument("vertex_enum_4d: unbounded polytope");
  std::vector<Eigen::Vector4d> out;
  out.reserve(inter.vertices().size());
  for (const auto& v : inter.vertices()) out.push_back(v.x);
  return out;
}

}  // namespace sepgap
