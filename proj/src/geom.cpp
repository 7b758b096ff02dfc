/* Copyright 2026 The occmatch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "occmatch/geom.hpp"

#include <algorithm>
#include <string>

#include "occmatch/error.hpp"

namespace occmatch {

HeadingVec NormalizeHeading(double raw_c, double raw_s) {
  const double n = std::hypot(raw_c, raw_s);
  if (!(n > 1e-12)) {
    throw Error(ErrorCode::kDegenerateHeading,
                "heading components (" + std::to_string(raw_c) + ", " +
                    std::to_string(raw_s) + ") have no direction");
  }
  return {raw_c / n, raw_s / n};
}

std::optional<double> RaySegmentIntersect(Point2 origin, HeadingVec dir,
                                          const Segment2& seg) {
  const Point2 d{dir.c, dir.s};
  const Point2 e = seg.b - seg.a;
  const Point2 ao = seg.a - origin;
  const double denom = Cross(d, e);
  const double e_len = Norm(e);

  if (std::abs(denom) > 1e-12 * e_len) {
    const double t = Cross(ao, e) / denom;
    const double u = Cross(ao, d) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
  }

  // Parallel. Only the colinear case can hit.
  if (std::abs(Cross(ao, d)) > 1e-12 * std::max(1.0, Norm(ao))) {
    return std::nullopt;
  }
  const double ta = Dot(ao, d);
  const double tb = Dot(seg.b - origin, d);
  const double lo = std::min(ta, tb);
  const double hi = std::max(ta, tb);
  if (hi < 0.0) return std::nullopt;
  return std::max(lo, 0.0);
}

std::array<Point2, 4> OrientedBox::Corners() const {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {center + RotateLocalToGlobal({hl, hw}, heading),
          center + RotateLocalToGlobal({-hl, hw}, heading),
          center + RotateLocalToGlobal({-hl, -hw}, heading),
          center + RotateLocalToGlobal({hl, -hw}, heading)};
}

std::array<Segment2, 4> OrientedBox::Edges() const {
  const auto c = Corners();
  return {Segment2{c[0], c[1]}, Segment2{c[1], c[2]}, Segment2{c[2], c[3]},
          Segment2{c[3], c[0]}};
}

bool OrientedBox::Contains(Point2 p) const {
  const Point2 local = RotateGlobalToLocal(p - center, heading);
  return std::abs(local.x) <= 0.5 * length && std::abs(local.y) <= 0.5 * width;
}

namespace {

int Orientation(Point2 a, Point2 b, Point2 c) {
  const double v = Cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool OnSegment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool SegmentsIntersect(const Segment2& s, const Segment2& t) {
  const int o1 = Orientation(s.a, s.b, t.a);
  const int o2 = Orientation(s.a, s.b, t.b);
  const int o3 = Orientation(t.a, t.b, s.a);
  const int o4 = Orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && OnSegment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && OnSegment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && OnSegment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && OnSegment(t.a, t.b, s.b)) return true;
  return false;
}

}  // namespace occmatch
