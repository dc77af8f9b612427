#include "hadamard/metric_core.hpp"

#include <atomic>
#include <cmath>

namespace hadamard {

namespace {

std::atomic<std::uint64_t> next_space_id{1};

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::euclidean: return "euclidean";
    case SpaceKind::hyperbolic: return "hyperbolic";
    case SpaceKind::tree: return "tree";
    case SpaceKind::spd: return "spd";
    case SpaceKind::product: return "product";
    case SpaceKind::l2: return "l2";
  }
  return "unknown";
}

ModelSpace::ModelSpace() : id_(static_cast<SpaceId>(next_space_id.fetch_add(1))) {}

void ModelSpace::require_member(const Point& x) const {
  if (x.space_id != id_) {
    throw DomainError("point does not belong to space " + name());
  }
  if (x.coords.size() != coord_size()) {
    throw DomainError("coordinate payload has wrong size for " + name());
  }
}

double ModelSpace::distance(const Point& x, const Point& y) const {
  require_member(x);
  require_member(y);
  return coord_distance(x.coords, y.coords);
}

Point ModelSpace::geodesic_point(const Point& x, const Point& y, double t) const {
  require_member(x);
  require_member(y);
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("geodesic parameter outside [0,1]");
  }
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  return wrap(coord_geodesic(x.coords, y.coords, t));
}

bool ModelSpace::contains(const Point& x) const {
  return x.space_id == id_ && x.coords.size() == coord_size() && coord_contains(x.coords);
}

Point ModelSpace::make_point(Vector coords) const {
  if (coords.size() != coord_size()) {
    throw DomainError("coordinate payload has wrong size for " + name());
  }
  if (!coords.allFinite() || !coord_contains(coords)) {
    throw DomainError("coordinates violate the membership predicate of " + name());
  }
  return wrap(coord_canonical(coords));
}

Point ModelSpace::random_point(Rng& rng, const Point& center, double scale) const {
  require_member(center);
  return wrap(coord_random(rng, center.coords, scale));
}

std::vector<Point> ModelSpace::spread(const Point& from, double radius, int count, Rng& rng) const {
  require_member(from);
  std::vector<Point> out;
  for (auto& c : coord_spread(from.coords, radius, count, rng)) out.push_back(wrap(std::move(c)));
  return out;
}

GeodesicSegment::GeodesicSegment(SpacePtr space, Point start, Point end)
    : space_(std::move(space)), start_(std::move(start)), end_(std::move(end)) {
  length_ = space_->distance(start_, end_);
}

Point GeodesicSegment::at(double t) const { return space_->geodesic_point(start_, end_, t); }

DefectReport make_defect(double lhs, double rhs) { return DefectReport{lhs, rhs, rhs - lhs}; }

double distance(const ModelSpace& space, const Point& x, const Point& y) {
  return space.distance(x, y);
}

Point geodesic_point(const ModelSpace& space, const Point& x, const Point& y, double t) {
  return space.geodesic_point(x, y, t);
}

DefectReport check_cn(const ModelSpace& space, const Point& x, const Point& c, const Point& cp) {
  const Point m = space.geodesic_point(c, cp, 0.5);
  const double dmx = space.distance(m, x);
  const double dcpx = space.distance(cp, x);
  const double dcx = space.distance(c, x);
  const double dccp = space.distance(cp, c);
  return make_defect(2.0 * dmx * dmx, dcpx * dcpx + dcx * dcx - 0.5 * dccp * dccp);
}

DefectReport check_reshetnyak(const ModelSpace& space, const Point& x, const Point& xp,
                              const Point& y, const Point& yp, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("eps must lie in (0,1)");
  }
  const Point x_eps = space.geodesic_point(x, xp, eps);
  const Point xp_eps = space.geodesic_point(x, xp, 1.0 - eps);
  const double dxy = space.distance(x, y);
  const double dxpyp = space.distance(xp, yp);
  const double dxxp = space.distance(x, xp);
  const double dyyp = space.distance(y, yp);
  const double a = space.distance(x_eps, y);
  const double b = space.distance(xp_eps, yp);
  return make_defect(a * a + b * b,
                     dxy * dxy + dxpyp * dxpyp + 2.0 * eps * dxxp * (dyyp - (1.0 - eps) * dxxp));
}

}  // namespace hadamard
