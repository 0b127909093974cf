#pragma once

#include "pcrm/core.hpp"

namespace pcrm {

/// Polar coordinate system with `pole` as origin and the polar axis pointing
/// from the pole toward a reference point.
class PolarFrame {
 public:
  /// Throws std::invalid_argument when pole and reference coincide.
  PolarFrame(Point pole, Point reference);

  /// Frame whose axis is given directly; `direction` need not be normalized
  /// but must be non-zero.
  static PolarFrame with_direction(Point pole, double dx, double dy);

  Point pole() const noexcept { return pole_; }
  double axis_x() const noexcept { return ux_; }
  double axis_y() const noexcept { return uy_; }

 private:
  PolarFrame() = default;
  Point pole_;
  double ux_ = 1.0;
  double uy_ = 0.0;
};

struct PolarCoord {
  double rho = 0.0;    // km
  double theta = 0.0;  // radians, [-pi, pi]
};

/// Straight-line radius and signed angle of q relative to the frame axis.
/// A point at the pole maps to (0, 0).
PolarCoord to_polar(const PolarFrame& frame, Point q) noexcept;

/// Source-side zone: |theta|/n_s <= pi/2 and rho <= R_s * cos(|theta|/n_s).
bool in_source_zone(const PolarFrame& frame, Point src, double r_s, double n_s) noexcept;

/// Source-side zone of a vehicle with no heading: the disk of radius R_s.
bool in_source_disk(Point pole, Point src, double r_s) noexcept;

/// Oval zone with `pole` as route point and axis pole->next:
/// |theta|/n_d <= pi/2 and rho <= |pole next| * (1 - sin(|theta|/n_d)).
/// A zero-length segment admits nothing.
bool in_oval_zone(Point pole, Point next, Point dest, double n_d) noexcept;

/// Tail cone: angle between tail->dest and the extension of tail_prev->tail
/// is at most phi degrees. dest == tail counts as inside.
/// Throws std::invalid_argument when tail_prev == tail.
bool in_triangle_zone(Point tail_prev, Point tail, Point dest, double phi_deg);

/// Delay state of the most inconvenienced rider on board.
struct AdaptiveState {
  double longest_wait = 0.0;            // minutes
  double longest_trip = 0.0;            // minutes
  double single_time_of_longest = 0.0;  // minutes
};

inline constexpr double kAdaptiveFloor = 0.01;

/// Shrunk angular adjustment factor
///   n = N - (exp((C_w*T_lw + C_t*max(0, T_lt - T_s)) / tau) - 1)
/// clamped to [kAdaptiveFloor, N]. Returns exactly N when both delay terms
/// vanish.
double adaptive_factor(double n_init, const AdaptiveState& state, double c_w, double c_t,
                       double tau);

}  // namespace pcrm
