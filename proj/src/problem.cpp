#include "hvi/problem.hpp"

namespace hvi {

void ProblemSpec::validate() const {
  solver.validate();
  if (!(field.manifold() == manifold)) {
    throw InvalidArgument("field manifold does not match the problem manifold");
  }
  if (!(omega.manifold() == manifold)) {
    throw InvalidArgument("constraint set manifold does not match the problem manifold");
  }
  if (!(p0.manifold == manifold)) {
    throw InvalidArgument("start point manifold does not match the problem manifold");
  }
  if (reference && !(reference->manifold == manifold)) {
    throw InvalidArgument("reference point manifold does not match the problem manifold");
  }
  if (!contains(omega, p0, tols::set_membership)) {
    throw InvalidArgument("start point p0 lies outside the constraint set");
  }
}

}  // namespace hvi
