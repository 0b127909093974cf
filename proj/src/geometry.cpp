#include "pcrm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pcrm {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Boundary slack so that points exactly on a zone edge stay inside despite
// rounding in atan2/cos/sin.
constexpr double kTol = 1e-12;

double angle_between(double ax, double ay, double bx, double by) noexcept {
  // Unsigned angle in [0, pi]; robust near 0 and pi.
  return std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
}

}  // namespace

PolarFrame::PolarFrame(Point pole, Point reference) : pole_(pole) {
  const double dx = reference.x - pole.x;
  const double dy = reference.y - pole.y;
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0)) {
    throw std::invalid_argument("polar frame undefined: pole coincides with reference");
  }
  ux_ = dx / len;
  uy_ = dy / len;
}

PolarFrame PolarFrame::with_direction(Point pole, double dx, double dy) {
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0)) throw std::invalid_argument("polar frame direction is zero");
  PolarFrame f;
  f.pole_ = pole;
  f.ux_ = dx / len;
  f.uy_ = dy / len;
  return f;
}

PolarCoord to_polar(const PolarFrame& frame, Point q) noexcept {
  const double vx = q.x - frame.pole().x;
  const double vy = q.y - frame.pole().y;
  const double rho = std::hypot(vx, vy);
  if (rho == 0.0) return {0.0, 0.0};
  const double ux = frame.axis_x();
  const double uy = frame.axis_y();
  return {rho, std::atan2(ux * vy - uy * vx, ux * vx + uy * vy)};
}

bool in_source_zone(const PolarFrame& frame, Point src, double r_s, double n_s) noexcept {
  const auto [rho, theta] = to_polar(frame, src);
  const double scaled = std::abs(theta) / n_s;
  if (scaled > kHalfPi + kTol) return false;
  return rho <= r_s * std::cos(std::min(scaled, kHalfPi)) + kTol * r_s;
}

bool in_source_disk(Point pole, Point src, double r_s) noexcept {
  return euclidean_dist(pole, src) <= r_s + kTol * r_s;
}

bool in_oval_zone(Point pole, Point next, Point dest, double n_d) noexcept {
  if (pole == next) return false;
  const double seg = euclidean_dist(pole, next);
  const auto [rho, theta] = to_polar(PolarFrame(pole, next), dest);
  const double scaled = std::abs(theta) / n_d;
  if (scaled > kHalfPi + kTol) return false;
  return rho <= seg * (1.0 - std::sin(std::min(scaled, kHalfPi))) + kTol * seg;
}

bool in_triangle_zone(Point tail_prev, Point tail, Point dest, double phi_deg) {
  if (tail_prev == tail) {
    throw std::invalid_argument("triangle zone undefined: zero-length tail segment");
  }
  if (dest == tail) return true;
  const double angle = angle_between(tail.x - tail_prev.x, tail.y - tail_prev.y,
                                     dest.x - tail.x, dest.y - tail.y);
  return angle <= phi_deg * (std::numbers::pi / 180.0) + kTol;
}

double adaptive_factor(double n_init, const AdaptiveState& state, double c_w, double c_t,
                       double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("adaptive rate tau must be positive");
  if (!(n_init > 0.0)) throw std::invalid_argument("initial adjustment factor must be positive");
  const double delay = c_w * state.longest_wait +
                       c_t * std::max(0.0, state.longest_trip - state.single_time_of_longest);
  const double n = n_init - std::expm1(delay / tau);
  return std::min(n_init, std::max(n, kAdaptiveFloor));
}

}  // namespace pcrm
