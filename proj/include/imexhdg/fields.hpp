#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imexhdg/basis.hpp"
#include "imexhdg/errors.hpp"
#include "imexhdg/mesh.hpp"
#include "imexhdg/swe_model.hpp"

namespace imexhdg {

/// Mesh, nodal basis and the per-element geometry shared by every operator.
class Discretization {
public:
  Discretization(Mesh mesh, int order) : mesh_(std::move(mesh)), basis_(order) {
    ops_.reserve(std::size_t(mesh_.num_elements()));
    coords_.reserve(std::size_t(mesh_.num_elements()));
    const int n1 = basis_.num_nodes_1d();
    for (const auto &e : mesh_.elements()) {
      ops_.push_back(element_operators(basis_, e));
      std::vector<Point> pts(std::size_t(basis_.num_nodes()));
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i)
          pts[std::size_t(basis_.node(i, j))] =
              Point{e.xmin() + 0.5 * (basis_.nodes()[std::size_t(i)] + 1.0) * e.hx(),
                    e.ymin() + 0.5 * (basis_.nodes()[std::size_t(j)] + 1.0) * e.hy()};
      coords_.push_back(std::move(pts));
    }
  }

  const Mesh &mesh() const { return mesh_; }
  const NodalBasis &basis() const { return basis_; }
  int order() const { return basis_.order(); }
  int num_elements() const { return mesh_.num_elements(); }
  int nodes_per_element() const { return basis_.num_nodes(); }
  const ElementOperators &ops(int e) const { return ops_[std::size_t(e)]; }
  const Point &coord(int e, int k) const { return coords_[std::size_t(e)][std::size_t(k)]; }

private:
  Mesh mesh_;
  NodalBasis basis_;
  std::vector<ElementOperators> ops_;
  std::vector<std::vector<Point>> coords_;
};

/// Nodal (phi', U, V) per element, laid out as (element, node_j, node_i, variable).
class StateField {
public:
  StateField() = default;
  StateField(int num_elements, int nodes_per_element)
      : num_elements_(num_elements), nodes_per_element_(nodes_per_element),
        data_(Eigen::VectorXd::Zero(Eigen::Index(num_elements) * nodes_per_element * 3)) {}
  explicit StateField(const Discretization &disc)
      : StateField(disc.num_elements(), disc.nodes_per_element()) {}

  int num_elements() const { return num_elements_; }
  int nodes_per_element() const { return nodes_per_element_; }
  Eigen::Index size() const { return data_.size(); }

  Eigen::Index index(int e, int k, int var = 0) const {
    return (Eigen::Index(e) * nodes_per_element_ + k) * 3 + var;
  }

  Eigen::Map<State> at(int e, int k) { return Eigen::Map<State>(data_.data() + index(e, k)); }
  Eigen::Map<const State> at(int e, int k) const {
    return Eigen::Map<const State>(data_.data() + index(e, k));
  }
  double &operator()(int e, int k, int var) { return data_[index(e, k, var)]; }
  double operator()(int e, int k, int var) const { return data_[index(e, k, var)]; }

  Eigen::VectorXd &values() { return data_; }
  const Eigen::VectorXd &values() const { return data_; }

  double max_abs(int var) const {
    double m = 0.0;
    for (Eigen::Index i = var; i < data_.size(); i += 3)
      m = std::isfinite(data_[i]) ? std::max(m, std::abs(data_[i]))
                                  : std::numeric_limits<double>::infinity();
    return m;
  }

  StateField &operator+=(const StateField &o) { data_ += o.data_; return *this; }
  StateField &operator-=(const StateField &o) { data_ -= o.data_; return *this; }
  StateField &operator*=(double s) { data_ *= s; return *this; }

  friend StateField operator+(StateField a, const StateField &b) { return a += b; }
  friend StateField operator-(StateField a, const StateField &b) { return a -= b; }
  friend StateField operator*(double s, StateField a) { return a *= s; }
  friend StateField operator*(StateField a, double s) { return a *= s; }
  friend StateField operator/(StateField a, double s) { return a *= 1.0 / s; }

private:
  int num_elements_ = 0;
  int nodes_per_element_ = 0;
  Eigen::VectorXd data_;
};

/// Samples a pointwise function at every volume node.
template <class Fn> StateField interpolate(const Discretization &disc, Fn &&fn) {
  StateField q(disc);
  for (int e = 0; e < disc.num_elements(); ++e)
    for (int k = 0; k < disc.nodes_per_element(); ++k) {
      const auto &pt = disc.coord(e, k);
      q.at(e, k) = fn(pt.x, pt.y);
    }
  return q;
}

/// Scalar trace on the skeleton: one (p+1)-array per geometric face.
class TraceField {
public:
  TraceField() = default;
  TraceField(int num_faces, int nodes_per_face)
      : num_faces_(num_faces), nodes_per_face_(nodes_per_face),
        data_(Eigen::VectorXd::Zero(Eigen::Index(num_faces) * nodes_per_face)) {}

  int num_faces() const { return num_faces_; }
  int nodes_per_face() const { return nodes_per_face_; }
  double &operator()(int face, int f) { return data_[Eigen::Index(face) * nodes_per_face_ + f]; }
  double operator()(int face, int f) const {
    return data_[Eigen::Index(face) * nodes_per_face_ + f];
  }
  Eigen::VectorXd &values() { return data_; }
  const Eigen::VectorXd &values() const { return data_; }

private:
  int num_faces_ = 0;
  int nodes_per_face_ = 0;
  Eigen::VectorXd data_;
};

/// Sum of mass-weighted nodal values of one variable.
inline double integrate(const Discretization &disc, const StateField &q, int var) {
  double s = 0.0;
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto &m = disc.ops(e).mass_diag;
    for (int k = 0; k < disc.nodes_per_element(); ++k)
      s += m[k] * q(e, k, var);
  }
  return s;
}

} // namespace imexhdg
