#pragma once

// Numerical tolerances used across the library. They are deliberately
// collected in one place so that every bound that appears in a runtime check
// or a monitored inequality has a single authoritative value.

namespace hvi::tols {

// Embedding constraint (Minkowski norm -1 for hyperboloid points).
inline constexpr double embedding = 1e-9;

// Tangency constraint <<v, p>> = 0 for hyperboloid tangents.
inline constexpr double tangency = 1e-9;

// Coordinate agreement required for two tangents to share a base point.
inline constexpr double base_match = 1e-12;

// Switch to Taylor expansions of sinh/cosh ratios below this vector norm.
inline constexpr double small_angle = 1e-12;

// exp/log round trip and related reconstruction bounds.
inline constexpr double log_roundtrip = 1e-8;

// Parallel transport isometry defect bound.
inline constexpr double transport_isometry = 1e-10;

// Sampled variational-inequality residual accepted for projections.
inline constexpr double projection_vi = 1e-7;

// Cyclic projection onto intersections: per-sweep movement threshold and cap.
inline constexpr double intersection_move = 1e-10;
inline constexpr int intersection_max_sweeps = 10000;

// Membership / selection slack absorbed as roundoff.
inline constexpr double membership_slack = 1e-9;
inline constexpr double selection_slack = 1e-9;

// Monotonicity falsifier refutation threshold.
inline constexpr double monotonicity_slack = 1e-8;

// Monitored solver inequalities (Fejer decrement etc.).
inline constexpr double monitor_slack = 1e-7;

// Relative error allowed between the two geodesic-velocity formulas.
inline constexpr double velocity_crosscheck = 1e-8;

// Default membership tolerance for "p in Omega" checks inside the solver.
inline constexpr double set_membership = 1e-7;

// Default stopping tolerance on dist(p, z).
inline constexpr double default_stop = 1e-9;

// Treat a point closer than this to an anchor as sitting on the anchor.
inline constexpr double anchor_radius = 1e-9;

}  // namespace hvi::tols
