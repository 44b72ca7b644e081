#pragma once

#include "imexhdg/dg_explicit.hpp"
#include "imexhdg/hdg_implicit.hpp"
#include "imexhdg/imex.hpp"

namespace imexhdg {

/// How the linear gravity-wave operator is advanced.
enum class Splitting {
  imex,     // linear part implicit through HDG, remainder explicit
  explicit_ // everything explicit; HDG flux applied as an ordinary DG operator
};

/// Split semi-discretization of the shallow water system, in the form the
/// IMEX stepper expects: N = explicit DG remainder + sources, L = HDG linear operator.
class ShallowWaterOperator {
public:
  using state_type = StateField;

  ShallowWaterOperator(const Discretization &disc, ModelParams params, HdgOptions options = {},
                       Splitting splitting = Splitting::imex, bool linear_mode = false)
      : disc_(&disc), params_(std::move(params)), hdg_(disc, params_, options), splitting_(splitting),
        linear_mode_(linear_mode) {}

  const ModelParams &params() const { return params_; }
  HdgImplicitOperator &hdg() { return hdg_; }
  const HdgImplicitOperator &hdg() const { return hdg_; }
  Splitting splitting() const { return splitting_; }
  bool linear_mode() const { return linear_mode_; }

  StateField apply_explicit(const StateField &q, double t) {
    StateField n = linear_mode_ ? StateField(*disc_) : residual_explicit(*disc_, q, t, params_);
    if (splitting_ == Splitting::explicit_)
      n += hdg_.apply(q);
    return n;
  }

  StateField solve_implicit(double shift, const StateField &rhs) {
    if (splitting_ == Splitting::explicit_)
      return rhs;
    return hdg_.solve(shift, rhs).q;
  }

  StateField apply_implicit(const StateField &q) {
    if (splitting_ == Splitting::explicit_)
      return StateField(*disc_);
    return hdg_.apply(q);
  }

  /// Full semi-discrete tendency N(q, t) + L(q).
  StateField tendency(const StateField &q, double t) {
    return apply_explicit(q, t) + apply_implicit(q);
  }

private:
  const Discretization *disc_;
  ModelParams params_;
  HdgImplicitOperator hdg_;
  Splitting splitting_;
  bool linear_mode_;
};

} // namespace imexhdg
