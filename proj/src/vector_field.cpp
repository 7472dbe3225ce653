#include "hvi/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace hvi {

namespace {

void require_on_manifold(const FieldOracle& field, const Point& p) {
  if (!(field.manifold() == p.manifold)) {
    throw ManifoldMismatch("point is not on the field's manifold");
  }
}

// Deduplicate near-identical tangents, preserving order of first appearance.
std::vector<Tangent> dedupe(std::vector<Tangent> gens) {
  std::vector<Tangent> out;
  for (auto& g : gens) {
    bool seen = false;
    for (const auto& h : out) {
      if ((g.components - h.components).lpNorm<Eigen::Infinity>() <= 1e-14) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(std::move(g));
  }
  return out;
}

// Sum of weighted -log(p, a_i)/d terms over anchors farther than the anchor
// radius, plus the combined at-anchor weight for the unit-ball term.
struct DistanceFieldParts {
  Tangent off_anchor_sum;            // exact subgradient of the smooth part
  std::vector<Tangent> off_terms;    // individual -w_i log(p,a_i)/d_i
  std::vector<double> off_scale;     // w_i * d_i (budget denominators)
  double at_anchor_weight = 0.0;     // sum of weights of coincident anchors
};

DistanceFieldParts distance_field_parts(const ConvexPotential& f, const Point& p) {
  DistanceFieldParts parts{zero_tangent(p), {}, {}, 0.0};
  for (std::size_t i = 0; i < f.anchors.size(); ++i) {
    const double d = dist(p, f.anchors[i]);
    if (d <= tols::anchor_radius) {
      parts.at_anchor_weight += f.weights[i];
      continue;
    }
    Tangent term = (-f.weights[i] / d) * log_map(p, f.anchors[i]);
    parts.off_anchor_sum = parts.off_anchor_sum + term;
    parts.off_terms.push_back(std::move(term));
    parts.off_scale.push_back(f.weights[i] * d);
  }
  return parts;
}

}  // namespace

void ConvexPotential::validate() const {
  if (anchors.empty()) throw InvalidArgument("potential needs at least one anchor");
  if (weights.size() != anchors.size()) {
    throw InvalidArgument("potential weight/anchor counts differ");
  }
  const ManifoldDescriptor& m = anchors.front().manifold;
  for (const Point& a : anchors) {
    if (!(a.manifold == m)) throw ManifoldMismatch("potential anchors on different manifolds");
  }
  if (!allow_nonconvex) {
    for (double w : weights) {
      if (!(w > 0.0)) throw InvalidArgument("potential weights must be positive");
    }
  }
  if (sphere_directions < 2) throw InvalidArgument("sphere_directions must be >= 2");
}

const ManifoldDescriptor& ConvexPotential::manifold() const { return anchors.front().manifold; }

double potential_value(const ConvexPotential& f, const Point& p) {
  double v = 0.0;
  if (f.kind == ConvexPotential::Kind::WeightedSquaredDistances) {
    for (std::size_t i = 0; i < f.anchors.size(); ++i) {
      const double d = dist(p, f.anchors[i]);
      v += 0.5 * f.weights[i] * d * d;
    }
  } else {
    for (std::size_t i = 0; i < f.anchors.size(); ++i) {
      v += f.weights[i] * dist(p, f.anchors[i]);
    }
  }
  return v;
}

std::vector<Tangent> potential_subgradients(const ConvexPotential& f, const Point& p) {
  if (f.kind == ConvexPotential::Kind::WeightedSquaredDistances) {
    Tangent g = zero_tangent(p);
    for (std::size_t i = 0; i < f.anchors.size(); ++i) {
      g = g + (-f.weights[i]) * log_map(p, f.anchors[i]);
    }
    return {std::move(g)};
  }
  auto parts = distance_field_parts(f, p);
  if (parts.at_anchor_weight == 0.0) {
    return {parts.off_anchor_sum};
  }
  // Unit-ball term: the smooth part plus w * (sampled sphere and its center).
  std::vector<Tangent> gens;
  gens.push_back(parts.off_anchor_sum);
  for (const Tangent& s : sphere_directions(p, f.sphere_directions)) {
    gens.push_back(parts.off_anchor_sum + parts.at_anchor_weight * s);
  }
  return gens;
}

FieldOracle::FieldOracle(ManifoldDescriptor m, Data d)
    : manifold_(m), data_(std::make_shared<const Data>(std::move(d))) {}

FieldOracle FieldOracle::gradient(ConvexPotential potential) {
  potential.validate();
  if (potential.kind != ConvexPotential::Kind::WeightedSquaredDistances) {
    throw InvalidArgument("gradient fields require the smooth squared-distance potential");
  }
  ManifoldDescriptor m = potential.manifold();
  return FieldOracle(m, GradientData{std::move(potential)});
}

FieldOracle FieldOracle::subdifferential(ConvexPotential potential) {
  potential.validate();
  if (potential.kind != ConvexPotential::Kind::WeightedDistances) {
    throw InvalidArgument("subdifferential fields require the distance potential");
  }
  ManifoldDescriptor m = potential.manifold();
  return FieldOracle(m, SubdifferentialData{std::move(potential)});
}

FieldOracle FieldOracle::composite(std::vector<double> weights, std::vector<FieldOracle> members) {
  if (members.empty() || weights.size() != members.size()) {
    throw InvalidArgument("composite needs matching nonempty weight/member lists");
  }
  const ManifoldDescriptor m = members.front().manifold();
  for (const FieldOracle& f : members) {
    if (!(f.manifold() == m)) throw ManifoldMismatch("composite members on different manifolds");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidArgument("composite weights must be positive");
  }
  return FieldOracle(m, CompositeData{std::move(weights), std::move(members)});
}

std::vector<Point> FieldOracle::anchors() const {
  return std::visit(
      [&](const auto& d) -> std::vector<Point> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GradientData> || std::is_same_v<T, SubdifferentialData>) {
          return d.potential.anchors;
        } else if constexpr (std::is_same_v<T, CompositeData>) {
          std::vector<Point> all;
          for (const FieldOracle& f : d.members) {
            auto a = f.anchors();
            all.insert(all.end(), a.begin(), a.end());
          }
          return all;
        } else {
          return d.inner->anchors();
        }
      },
      data());
}

std::vector<Tangent> eval(const FieldOracle& field, const Point& p) {
  require_on_manifold(field, p);
  return std::visit(
      [&](const auto& d) -> std::vector<Tangent> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FieldOracle::GradientData> ||
                      std::is_same_v<T, FieldOracle::SubdifferentialData>) {
          return potential_subgradients(d.potential, p);
        } else if constexpr (std::is_same_v<T, FieldOracle::CompositeData>) {
          std::vector<Tangent> combos{zero_tangent(p)};
          for (std::size_t i = 0; i < d.members.size(); ++i) {
            std::vector<Tangent> next;
            for (const Tangent& base : combos) {
              for (const Tangent& g : eval(d.members[i], p)) {
                next.push_back(base + d.weights[i] * g);
              }
            }
            combos = std::move(next);
          }
          return dedupe(std::move(combos));
        } else {
          std::vector<Tangent> gens = eval(*d.inner, p);
          auto normals = active_normals(d.set, p, tols::set_membership);
          if (normals.empty()) return gens;
          double max_norm = 1.0;
          for (const Tangent& g : gens) max_norm = std::max(max_norm, norm(g));
          const double shift = 2.0 * max_norm;
          std::vector<Tangent> out = gens;  // the zero ray is always included
          for (const Tangent& n : normals) {
            for (const Tangent& g : gens) out.push_back(g + shift * n);
          }
          if (normals.size() > 1) {
            Tangent all = zero_tangent(p);
            for (const Tangent& n : normals) all = all + n;
            for (const Tangent& g : gens) out.push_back(g + shift * all);
          }
          return dedupe(std::move(out));
        }
      },
      field.data());
}

std::vector<EnlargementElement> enlargement_detailed(const FieldOracle& field, const Point& p,
                                                     double eps) {
  if (eps < 0.0) throw NegativeEpsilon("enlargement parameter must be nonnegative");
  require_on_manifold(field, p);

  auto exact_elements = [&](std::vector<Tangent> gens) {
    std::vector<EnlargementElement> out;
    out.reserve(gens.size());
    for (auto& g : gens) {
      out.push_back({std::move(g), 0.0, EnlargementElement::Witness::ExactFieldValue});
    }
    return out;
  };

  if (eps == 0.0) {
    return exact_elements(eval(field, p));
  }

  return std::visit(
      [&](const auto& d) -> std::vector<EnlargementElement> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FieldOracle::GradientData>) {
          auto out = exact_elements(eval(field, p));
          if (d.potential.enlargement_directions > 0) {
            // Squared-distance potentials are W-strongly convex, so the ball
            // of radius sqrt(2 W eps) around the gradient consists of exact
            // eps-subgradients.
            double W = 0.0;
            for (double w : d.potential.weights) W += w;
            const double r = std::sqrt(2.0 * std::max(0.0, W) * eps);
            const Tangent g = out.front().vector;
            for (const Tangent& s : sphere_directions(p, d.potential.enlargement_directions)) {
              out.push_back({g + r * s, eps, EnlargementElement::Witness::EpsSubgradient});
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, FieldOracle::SubdifferentialData>) {
          auto parts = distance_field_parts(d.potential, p);
          const std::size_t m_off = parts.off_terms.size();
          // Scale each smooth term toward (or past) zero within its per-term
          // eps budget: t in [max(-1, 1 - eps_i/(w_i d_i)), 1] keeps the sum
          // an eps-subgradient.
          std::vector<Tangent> variants{parts.off_anchor_sum};
          if (m_off > 0) {
            const double eps_i = eps / static_cast<double>(m_off);
            Tangent all_min = zero_tangent(p);
            for (std::size_t i = 0; i < m_off; ++i) {
              const double t_min = std::max(-1.0, 1.0 - eps_i / parts.off_scale[i]);
              Tangent scaled = parts.off_anchor_sum + (t_min - 1.0) * parts.off_terms[i];
              variants.push_back(std::move(scaled));
              all_min = all_min + t_min * parts.off_terms[i];
            }
            if (m_off > 1) variants.push_back(std::move(all_min));
          }
          std::vector<Tangent> ball{zero_tangent(p)};
          if (parts.at_anchor_weight > 0.0) {
            for (const Tangent& s : sphere_directions(p, d.potential.sphere_directions)) {
              ball.push_back(parts.at_anchor_weight * s);
            }
          }
          std::vector<EnlargementElement> out;
          bool first = true;
          for (const Tangent& v : dedupe(std::move(variants))) {
            for (const Tangent& b : ball) {
              out.push_back({v + b, first ? 0.0 : eps,
                             first ? EnlargementElement::Witness::ExactFieldValue
                                   : EnlargementElement::Witness::EpsSubgradient});
            }
            first = false;
          }
          return out;
        } else if constexpr (std::is_same_v<T, FieldOracle::CompositeData>) {
          // Split the budget so the weighted eps levels sum to eps.
          const std::size_t m = d.members.size();
          std::vector<EnlargementElement> combos{
              {zero_tangent(p), 0.0, EnlargementElement::Witness::ExactFieldValue}};
          for (std::size_t i = 0; i < m; ++i) {
            const double eps_i = eps / (static_cast<double>(m) * d.weights[i]);
            std::vector<EnlargementElement> next;
            for (const auto& base : combos) {
              for (const auto& g : enlargement_detailed(d.members[i], p, eps_i)) {
                auto witness = (base.witness == EnlargementElement::Witness::ExactFieldValue &&
                                g.witness == EnlargementElement::Witness::ExactFieldValue)
                                   ? EnlargementElement::Witness::ExactFieldValue
                                   : EnlargementElement::Witness::EpsSubgradient;
                next.push_back({base.vector + d.weights[i] * g.vector,
                                base.epsilon + d.weights[i] * g.epsilon, witness});
              }
            }
            combos = std::move(next);
          }
          return combos;
        } else {
          auto inner_el = enlargement_detailed(*d.inner, p, eps);
          auto normals = active_normals(d.set, p, tols::set_membership);
          if (normals.empty()) return inner_el;
          double max_norm = 1.0;
          for (const auto& e : inner_el) max_norm = std::max(max_norm, norm(e.vector));
          const double shift = 2.0 * max_norm;
          std::vector<EnlargementElement> out = inner_el;
          for (const Tangent& n : normals) {
            for (const auto& e : inner_el) {
              out.push_back({e.vector + shift * n, e.epsilon, e.witness});
            }
          }
          return out;
        }
      },
      field.data());
}

std::vector<Tangent> enlargement(const FieldOracle& field, const Point& p, double eps) {
  if (eps == 0.0) return eval(field, p);  // X^0 = X, bit-exact
  std::vector<Tangent> out;
  for (auto& e : enlargement_detailed(field, p, eps)) out.push_back(std::move(e.vector));
  return dedupe(std::move(out));
}

bool potential_backed(const FieldOracle& field) {
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FieldOracle::GradientData> ||
                      std::is_same_v<T, FieldOracle::SubdifferentialData>) {
          return true;
        } else if constexpr (std::is_same_v<T, FieldOracle::CompositeData>) {
          for (const FieldOracle& f : d.members) {
            if (!potential_backed(f)) return false;
          }
          return true;
        } else {
          return false;
        }
      },
      field.data());
}

double field_potential_value(const FieldOracle& field, const Point& p) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FieldOracle::GradientData> ||
                      std::is_same_v<T, FieldOracle::SubdifferentialData>) {
          return potential_value(d.potential, p);
        } else if constexpr (std::is_same_v<T, FieldOracle::CompositeData>) {
          double v = 0.0;
          for (std::size_t i = 0; i < d.members.size(); ++i) {
            v += d.weights[i] * field_potential_value(d.members[i], p);
          }
          return v;
        } else {
          throw OracleNotAvailable("field is not potential-backed");
        }
      },
      field.data());
}

CheckReport membership_check(const FieldOracle& field, const Point& p, const Tangent& u,
                             double eps, const SampleSpec& spec) {
  if (!same_point(u.base, p)) throw BasePointMismatch("membership candidate not based at p");
  if (eps < 0.0) throw NegativeEpsilon("membership level must be nonnegative");
  require_on_manifold(field, p);

  std::vector<Point> qs = sample_ball(p, spec.radius, spec.count, spec.seed);
  for (const Point& a : field.anchors()) qs.push_back(a);

  CheckReport report;
  report.seed = spec.seed;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const bool has_potential = potential_backed(field);
  const double fp = has_potential ? field_potential_value(field, p) : 0.0;

  for (const Point& q : qs) {
    if (same_point(q, p, 1e-15)) continue;
    const Tangent back = log_map(q, p);
    const Tangent pu = transport(p, q, u);
    for (const Tangent& v : eval(field, q)) {
      const double slack = inner(pu - v, back) + eps;
      if (slack < report.worst_margin) {
        report.worst_margin = slack;
        if (slack < -tols::membership_slack) report.detail = "enlargement inequality refuted";
      }
    }
    if (has_potential) {
      const double slack = field_potential_value(field, q) - fp - inner(u, log_map(p, q)) + eps;
      if (slack < report.worst_margin) {
        report.worst_margin = slack;
        if (slack < -tols::membership_slack) report.detail = "eps-subgradient inequality refuted";
      }
    }
    ++report.samples;
  }
  report.refuted = report.worst_margin < -tols::membership_slack;
  if (!report.refuted) report.detail = "not refuted";
  return report;
}

CheckReport monotonicity_falsifier(const FieldOracle& field, int trials, uint64_t seed) {
  if (trials < 1) throw InvalidArgument("falsifier needs at least one trial");

  // Sampling region: ball around the anchor cloud (or the constraint set for
  // cone-augmented fields, where monotonicity only holds on the set).
  std::vector<Point> pool;
  if (const auto* cone = std::get_if<FieldOracle::ConeAugmentedData>(&field.data())) {
    pool = sample_set(cone->set, 2 * trials, seed);
  } else {
    auto as = field.anchors();
    Point center = as.empty() ? origin(field.manifold()) : as.front();
    double radius = 2.0;
    for (const Point& a : as) radius = std::max(radius, dist(center, a) + 2.0);
    pool = sample_ball(center, radius, 2 * trials, seed);
  }

  CheckReport report;
  report.seed = seed;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const Point& p = pool[(2 * t) % pool.size()];
    const Point& q = pool[(2 * t + 1) % pool.size()];
    if (same_point(p, q, 1e-14)) continue;
    const Tangent back = log_map(q, p);
    auto us = eval(field, p);
    auto vs = eval(field, q);
    for (const Tangent& u : us) {
      const Tangent pu = transport(p, q, u);
      for (const Tangent& v : vs) {
        const double margin = inner(pu - v, back);
        report.worst_margin = std::min(report.worst_margin, margin);
      }
    }
    ++report.samples;
  }
  report.refuted = report.worst_margin < -tols::monotonicity_slack;
  report.detail = report.refuted ? "monotonicity refuted" : "not refuted";
  return report;
}

FieldOracle add_normal_cone(const FieldOracle& field, const ConvexSet& set) {
  if (!(field.manifold() == set.manifold())) {
    throw ManifoldMismatch("field and set manifolds differ");
  }
  return FieldOracle(field.manifold(),
                     FieldOracle::ConeAugmentedData{std::make_shared<FieldOracle>(field), set});
}

CheckReport lsc_spotcheck(const FieldOracle& field, const Point& pbar, const Tangent& ubar,
                          double eps, const std::vector<Point>& sequence) {
  if (!(eps > 0.0)) throw PreconditionViolated("lsc spot check needs eps > 0");
  if (sequence.empty()) throw PreconditionViolated("lsc spot check needs a nonempty sequence");
  double prev = std::numeric_limits<double>::infinity();
  for (const Point& pk : sequence) {
    const double dk = dist(pk, pbar);
    if (dk > prev + 1e-12) {
      throw PreconditionViolated("sequence distances to pbar must be nonincreasing");
    }
    prev = dk;
  }
  if (prev > 1e-6) throw PreconditionViolated("sequence tail is not within 1e-6 of pbar");
  if (membership_check(field, pbar, ubar, eps).refuted) {
    throw PreconditionViolated("ubar is not certified in the eps-enlargement at pbar");
  }

  CheckReport report;
  report.worst_margin = 0.0;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const Point& pk = sequence[k];
    const Tangent uk = eval(field, pk).front();
    const Tangent carried = transport(pbar, pk, ubar);
    SampleSpec spec;
    spec.seed = 1000 + k;

    auto blend_ok = [&](double theta) {
      Tangent w = (1.0 - theta) * carried + theta * uk;
      return !membership_check(field, pk, w, eps, spec).refuted;
    };

    // theta = 0.1 by default; halve while membership keeps holding (small
    // theta shrinks the transported error), double when it fails.
    double theta = 0.1;
    bool ok = blend_ok(theta);
    if (!ok) {
      for (int i = 0; i < 20 && !ok; ++i) {
        theta *= 2.0;
        if (theta > 1.0) theta = 1.0;
        ok = blend_ok(theta);
        if (theta == 1.0) break;
      }
    } else {
      for (int i = 0; i < 20; ++i) {
        const double half = theta / 2.0;
        if (!blend_ok(half)) break;
        theta = half;
      }
    }
    if (!ok && !blend_ok(theta)) {
      report.refuted = true;
      report.detail = "no blend admitted at step " + std::to_string(k);
      return report;
    }
    Tangent w = (1.0 - theta) * carried + theta * uk;
    const double err = norm(transport(pk, pbar, w) - ubar);
    report.series.push_back(err);
    report.worst_margin = std::max(report.worst_margin, err);
    ++report.samples;
  }
  // The transported blends must settle back onto ubar.
  const double head = report.series.front();
  const double tail = report.series.back();
  if (tail > head + 1e-12) {
    report.refuted = true;
    report.detail = "transported error did not decrease along the sequence";
  } else {
    report.detail = "not refuted";
    report.worst_margin = tail;
  }
  return report;
}

double field_bound_estimate(const FieldOracle& field, const ConvexSet& omega, int samples,
                            uint64_t seed) {
  double bound = 0.0;
  for (const Point& q : sample_set(omega, samples, seed)) {
    for (const Tangent& g : eval(field, q)) bound = std::max(bound, norm(g));
  }
  return bound;
}

double hull_distance(const std::vector<Tangent>& generators, const Tangent& target) {
  if (generators.empty()) throw InvalidArgument("hull of an empty generator list");
  // Frank-Wolfe on min_{lambda in simplex} |G lambda - target|^2.
  Tangent x = generators.front();
  for (int it = 0; it < 4000; ++it) {
    Tangent grad = x - target;
    std::size_t best = 0;
    double best_val = inner(grad, generators[0]);
    for (std::size_t i = 1; i < generators.size(); ++i) {
      const double v = inner(grad, generators[i]);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    Tangent dir = generators[best] - x;
    const double denom = inner(dir, dir);
    if (denom <= 1e-30) break;
    double gamma = -inner(x - target, dir) / denom;
    gamma = std::clamp(gamma, 0.0, 1.0);
    if (gamma <= 0.0) break;
    x = x + gamma * dir;
  }
  return norm(x - target);
}

}  // namespace hvi
