#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "imexhdg/errors.hpp"

namespace imexhdg {

enum class BoundaryKind { wall, periodic };

inline std::string to_string(BoundaryKind kind) {
  return kind == BoundaryKind::wall ? "wall" : "periodic";
}

/// Local side numbering of a quadrilateral, counter-clockwise from the bottom edge.
enum Side : int { south = 0, east = 1, north = 2, west = 3 };

struct Bounds {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Element {
  // SW, SE, NE, NW
  std::array<Point, 4> vertices;
  std::array<int, 4> faces{-1, -1, -1, -1};

  double xmin() const { return vertices[0].x; }
  double xmax() const { return vertices[1].x; }
  double ymin() const { return vertices[0].y; }
  double ymax() const { return vertices[2].y; }
  double hx() const { return xmax() - xmin(); }
  double hy() const { return ymax() - ymin(); }
  double area() const { return hx() * hy(); }
};

struct ElementSide {
  int element = -1;
  int side = -1;

  friend bool operator==(const ElementSide &, const ElementSide &) = default;
};

/// One geometric face of the skeleton. Trace nodes follow the left element's
/// local coordinate along the side, i.e. increasing x on south/north sides and
/// increasing y on west/east sides.
struct Face {
  ElementSide left;
  std::optional<ElementSide> right; // empty on a wall boundary
  Point normal;                     // unit, outward from the left element
  double length = 0.0;
  bool right_flipped = false;       // never set on axis-aligned structured meshes

  bool is_boundary() const { return !right.has_value(); }
};

struct FaceNeighbors {
  ElementSide left;
  std::optional<ElementSide> right;
  std::optional<BoundaryKind> boundary; // set iff right is empty
};

inline Point outward_normal(int side) {
  switch (side) {
  case south: return {0.0, -1.0};
  case east: return {1.0, 0.0};
  case north: return {0.0, 1.0};
  case west: return {-1.0, 0.0};
  default: throw invalid_argument("side index out of range: " + std::to_string(side));
  }
}

/// Structured quadrilateral mesh of a rectangle. Elements are row-major
/// (element = j * nx + i). Faces are enumerated x-normal faces first (row by
/// row, west to east) and then y-normal faces (column line by column line,
/// south to north, west to east within a line).
class Mesh {
public:
  static Mesh build_structured(int nx, int ny, const Bounds &bounds, BoundaryKind bc_x,
                               BoundaryKind bc_y) {
    if (nx < 1 || ny < 1)
      throw invalid_argument("element counts must be positive (got nx=" + std::to_string(nx) +
                             ", ny=" + std::to_string(ny) + ")");
    if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin))
      throw invalid_argument("degenerate domain bounds");

    Mesh m;
    m.nx_ = nx;
    m.ny_ = ny;
    m.bounds_ = bounds;
    m.bc_x_ = bc_x;
    m.bc_y_ = bc_y;

    auto xcoord = [&](int i) {
      return i == nx ? bounds.xmax : bounds.xmin + bounds.width() * double(i) / double(nx);
    };
    auto ycoord = [&](int j) {
      return j == ny ? bounds.ymax : bounds.ymin + bounds.height() * double(j) / double(ny);
    };

    m.elements_.resize(std::size_t(nx) * std::size_t(ny));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        auto &e = m.elements_[std::size_t(j * nx + i)];
        e.vertices = {Point{xcoord(i), ycoord(j)}, Point{xcoord(i + 1), ycoord(j)},
                      Point{xcoord(i + 1), ycoord(j + 1)}, Point{xcoord(i), ycoord(j + 1)}};
      }

    auto add_face = [&](ElementSide left, std::optional<ElementSide> right) {
      Face f;
      f.left = left;
      f.right = right;
      f.normal = outward_normal(left.side);
      const auto &e = m.elements_[std::size_t(left.element)];
      f.length = (left.side == east || left.side == west) ? e.hy() : e.hx();
      const int id = int(m.faces_.size());
      m.elements_[std::size_t(left.element)].faces[std::size_t(left.side)] = id;
      if (right)
        m.elements_[std::size_t(right->element)].faces[std::size_t(right->side)] = id;
      m.faces_.push_back(f);
    };

    // x-normal faces
    for (int j = 0; j < ny; ++j) {
      if (bc_x == BoundaryKind::periodic) {
        for (int i = 0; i < nx; ++i) {
          const int im = (i + nx - 1) % nx;
          add_face({j * nx + im, east}, ElementSide{j * nx + i, west});
        }
      } else {
        add_face({j * nx, west}, std::nullopt);
        for (int i = 1; i < nx; ++i)
          add_face({j * nx + i - 1, east}, ElementSide{j * nx + i, west});
        add_face({j * nx + nx - 1, east}, std::nullopt);
      }
    }
    // y-normal faces
    if (bc_y == BoundaryKind::periodic) {
      for (int j = 0; j < ny; ++j) {
        const int jm = (j + ny - 1) % ny;
        for (int i = 0; i < nx; ++i)
          add_face({jm * nx + i, north}, ElementSide{j * nx + i, south});
      }
    } else {
      for (int i = 0; i < nx; ++i)
        add_face({i, south}, std::nullopt);
      for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          add_face({(j - 1) * nx + i, north}, ElementSide{j * nx + i, south});
      for (int i = 0; i < nx; ++i)
        add_face({(ny - 1) * nx + i, north}, std::nullopt);
    }
    return m;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Bounds &bounds() const { return bounds_; }
  BoundaryKind bc_x() const { return bc_x_; }
  BoundaryKind bc_y() const { return bc_y_; }

  int num_elements() const { return int(elements_.size()); }
  int num_faces() const { return int(faces_.size()); }
  const std::vector<Element> &elements() const { return elements_; }
  const std::vector<Face> &faces() const { return faces_; }
  const Element &element(int e) const { return elements_.at(std::size_t(e)); }
  const Face &face(int f) const { return faces_.at(std::size_t(f)); }

  int num_boundary_faces() const {
    int n = 0;
    for (const auto &f : faces_)
      n += f.is_boundary() ? 1 : 0;
    return n;
  }
  int num_interior_faces() const { return num_faces() - num_boundary_faces(); }

  FaceNeighbors face_neighbors(int face_id) const {
    if (face_id < 0 || face_id >= num_faces())
      throw invalid_argument("face id out of range: " + std::to_string(face_id));
    const auto &f = faces_[std::size_t(face_id)];
    FaceNeighbors n{f.left, f.right, std::nullopt};
    if (!f.right)
      n.boundary = BoundaryKind::wall;
    return n;
  }

  /// Outward normal of `element`'s `side`; equals the face normal for the left
  /// element and its negation for the right element.
  Point element_normal(int element, int side) const {
    const auto &f = faces_.at(std::size_t(elements_.at(std::size_t(element)).faces[std::size_t(side)]));
    const bool is_left = f.left.element == element && f.left.side == side;
    return is_left ? f.normal : Point{-f.normal.x, -f.normal.y};
  }

private:
  int nx_ = 0;
  int ny_ = 0;
  Bounds bounds_;
  BoundaryKind bc_x_ = BoundaryKind::wall;
  BoundaryKind bc_y_ = BoundaryKind::wall;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
};

} // namespace imexhdg
